use chevcert::chevalley::{build_chevalley_basis, max_structure_constant};
use chevcert::irregular::index_of_irregularity;
use chevcert::modp;
use chevcert::rootsys::{build_root_system, pairing};
use chevcert::witness::*;

const SMALL_TYPES: [&str; 14] = ["A1", "A2", "A3", "A4", "B2", "B3", "B4", "C3", "C4", "D4", "F4", "G2", "E6", "E8"];

#[test]
fn n_sequence_monotone_and_starred() {
    for t in ["A1", "A4", "B3", "C4", "D5", "E6", "E7", "E8", "F4", "G2"] {
        let seq = n_sequence(&build_root_system(t.parse().unwrap()), 12).unwrap();
        assert_eq!(seq.values[0], 1);
        assert!(seq.values.windows(2).all(|w| w[0] < w[1]), "{t}");
        for (n, s) in seq.values.iter().zip(&seq.starred) {
            assert_eq!(*s, if n % 2 == 1 { *n } else { n + 1 });
        }
    }
}

#[test]
fn candidate_maximum_is_next_n() {
    for t in SMALL_TYPES {
        let rs = build_root_system(t.parse().unwrap());
        let seq = n_sequence(&rs, 6).unwrap();
        for i in 0..6 {
            let lambda = candidate(&seq, i, rs.rank());
            let max = rs.positive_roots().iter().map(|a| pairing(a, &lambda).unwrap()).max().unwrap();
            assert_eq!(max as u128, seq.n(i + 1), "{t} base {i}");
            assert_eq!(pairing(rs.highest_root(), &lambda).unwrap() as u128, seq.n(i + 1));
        }
    }
}

/// Every type of rank at most 4 plus G2, every admissible p < 500.
#[test]
fn corollary_guarantee() {
    let irr: Vec<_> = modp::primes_in(5, 499).into_iter().map(|p| index_of_irregularity(p).unwrap()).collect();
    for t in ["A1", "A2", "A3", "A4", "B2", "B3", "B4", "C3", "C4", "D4", "F4", "G2"] {
        let cb = build_chevalley_basis(&build_root_system(t.parse().unwrap()));
        let rs = cb.root_system();
        let (n_max, det) = (max_structure_constant(rs), rs.cartan_determinant());
        for d in &irr {
            let seq = n_sequence(rs, d.e_p + 1).unwrap();
            if d.p <= n_max || (d.p as u128) <= 1 + 2 * seq.n(d.e_p + 1) || det.rem_euclid(d.p as i64) == 0 {
                continue;
            }
            match certify_one_prime(&cb, d.p, d.e_p, d).unwrap() {
                Certification::Certified(cert) => {
                    assert!(cert.check_report.passed);
                    assert!(cert.filtration.passed());
                }
                Certification::Rejected(r) => panic!("{t} p={}: {:?} {}", d.p, r.code, r.reason),
            }
        }
    }
}

#[test]
fn certificates_round_trip_through_json() {
    for (t, p, e) in [("A1", 11u64, 0usize), ("G2", 53, 0), ("A2", 67, 1), ("B3", 61, 0)] {
        let cb = build_chevalley_basis(&build_root_system(t.parse().unwrap()));
        let Certification::Certified(cert) = certify_one_prime(&cb, p, e, &index_of_irregularity(p).unwrap()).unwrap()
        else {
            panic!("{t} {p} {e} should certify");
        };
        let json = serde_json::to_string(&cert).unwrap();
        let back: WitnessCertificate = serde_json::from_str(&json).unwrap();
        assert_eq!(&back, &*cert);
        assert!(validate_certificate(&back).unwrap().is_empty(), "{t} {p}");
    }
}

#[test]
fn exact_c_within_analytic_bound() {
    for t in ["A1", "A2", "A3", "B2", "B3", "C3", "D4", "G2", "F4"] {
        let r = effective_bound(&[t.parse().unwrap()], 1_000_000).unwrap();
        assert!(r.c as u128 <= r.analytic_max, "{t}");
        assert!(r.bound_excluding_c_g >= r.c);
    }
}

#[test]
fn tagged_certification_parses_back() {
    let cb = build_chevalley_basis(&build_root_system("A2".parse().unwrap()));
    let c = certify_one_prime(&cb, 67, 1, &index_of_irregularity(67).unwrap()).unwrap();
    let back: Certification = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
    assert_eq!(back, c);
}

/// For A6 and beyond the progression 3, 5, 7, … has two roots with equal
/// pairings (3+5+7+9 = 11+13), so condition (4) fails and a regular prime
/// leaves the selector with no candidate.
#[test]
fn progression_collides_in_rank_six() {
    let rs = build_root_system("A6".parse().unwrap());
    let irr = index_of_irregularity(1009).unwrap();
    assert_eq!(irr.e_p, 0);
    let lambda = candidate(&n_sequence(&rs, 1).unwrap(), 0, 6);
    let report = check_theorem_conditions(&rs, 1009, &lambda, &irr).unwrap();
    assert_eq!(report.first_failure().unwrap().condition, 4);
    assert!(matches!(report.conditions[3].witness, Some(ConditionWitness::Collision { residue: 24, .. })));
    for t in ["A5", "B5", "C5", "D5", "D6"] {
        let cb = build_chevalley_basis(&build_root_system(t.parse().unwrap()));
        assert!(matches!(certify_one_prime(&cb, 1009, 0, &irr).unwrap(), Certification::Certified(_)), "{t}");
    }
}
