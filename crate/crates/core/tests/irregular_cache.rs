use std::fs;

use chevcert::irregular::*;
use chevcert::modp;
use proptest::prelude::*;

#[test]
fn scan_then_rescan() {
    let dir = tempfile::tempdir().unwrap();
    let cache = IrregularCache::new(dir.path());
    let (records, stats) = cache.scan(5, 40, 2).unwrap();
    assert_eq!(records.len(), 10);
    assert_eq!(stats.computed, 10);
    let text = fs::read_to_string(cache.path()).unwrap();
    assert_eq!(text.lines().count(), 10);
    assert!(text.lines().any(|l| l == r#"{"p":37,"indices":[32]}"#));
    let ps: Vec<u64> =
        text.lines().map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()["p"].as_u64().unwrap()).collect();
    assert!(ps.windows(2).all(|w| w[0] < w[1]));

    let (again, stats) = cache.scan(5, 40, 2).unwrap();
    assert_eq!(stats.computed, 0);
    assert_eq!(stats.cached, 10);
    assert_eq!(again, records);
}

#[test]
fn corrupt_record_is_quarantined_and_recomputed() {
    let dir = tempfile::tempdir().unwrap();
    let cache = IrregularCache::new(dir.path());
    cache.scan(5, 40, 1).unwrap();
    let text = fs::read_to_string(cache.path()).unwrap();
    let broken = text.replace(r#"{"p":37,"indices":[32]}"#, r#"{"p":37,"indices":[33"#);
    fs::write(cache.path(), broken).unwrap();

    let (records, stats) = cache.scan(5, 40, 1).unwrap();
    assert_eq!(stats.quarantined, 1);
    assert_eq!(stats.computed, 1);
    assert_eq!(records.iter().find(|d| d.p == 37).unwrap().irregular_indices, vec![32]);
    let quarantine = fs::read_to_string(cache.path().with_extension("jsonl.quarantine")).unwrap();
    assert!(quarantine.contains("[33"));
    assert_eq!(cache.get(37).unwrap().e_p, 1);
}

#[test]
fn known_irregular_primes() {
    for (p, idx) in [
        (59u64, vec![44]),
        (67, vec![58]),
        (101, vec![68]),
        (103, vec![24]),
        (131, vec![22]),
        (149, vec![130]),
        (157, vec![62, 110]),
    ] {
        assert_eq!(index_of_irregularity(p).unwrap().irregular_indices, idx, "p={p}");
    }
}

#[test]
fn bad_set_invariants_for_scanned_primes() {
    for p in modp::primes_in(5, 1000) {
        let irr = index_of_irregularity(p).unwrap();
        let a = bad_set(&irr);
        assert!(a.members.len() <= 2 * irr.e_p, "p={p}");
        for &n in &a.members {
            assert!(a.contains(-(n as i64)), "p={p}: A not symmetric at {n}");
            // 1 ± n even means Vandiver classifies both eigenspaces as zero
            assert_eq!(n % 2, 0, "p={p}: odd n={n} in A");
        }
    }
}

#[test]
#[ignore = "scans every prime below 10000; heuristic check only"]
fn regular_prime_density() {
    let primes = modp::primes_in(5, 10_000);
    let dir = tempfile::tempdir().unwrap();
    let (records, _) = IrregularCache::new(dir.path()).scan(5, 10_000, 8).unwrap();
    let regular = records.iter().filter(|d| d.e_p == 0).count() as f64 / primes.len() as f64;
    let (point, _) = irregularity_density_estimate(0);
    if (regular - point).abs() > 0.05 {
        eprintln!("warning: regular fraction {regular:.4} is not within 0.05 of {point:.4}");
    }
}

proptest! {
    #[test]
    fn density_bounds(r in 0u32..30) {
        let (point, cumulative) = irregularity_density_estimate(r);
        prop_assert!(point > 0.0 && point <= 0.6066);
        prop_assert!((0.39..1.0).contains(&cumulative));
        let (_, next) = irregularity_density_estimate(r + 1);
        prop_assert!(next > cumulative);
    }
}
