use chevcert::chevalley::{build_chevalley_basis, ChevalleyBasis, LieElement};
use chevcert::chevgroup::*;
use chevcert::rootsys::build_root_system;
use proptest::prelude::*;

fn basis(t: &str) -> ChevalleyBasis {
    build_chevalley_basis(&build_root_system(t.parse().unwrap()))
}

#[test]
fn a2_adjoint_group_over_f3() {
    let cb = basis("A2");
    let g = enumerate_subgroup(&chevalley_generators(&cb, 3, 1).unwrap(), DEFAULT_ENUMERATION_CAP).unwrap();
    // |PSL_3(F_3)| = |SL_3(F_3)|
    assert_eq!(g.order(), 5616);
}

#[test]
#[ignore = "about 1.9 million elements; needs a raised cap and several GB"]
fn a2_adjoint_group_over_f7() {
    let cb = basis("A2");
    let g = enumerate_subgroup(&chevalley_generators(&cb, 7, 1).unwrap(), 2_000_000).unwrap();
    // |PSL_3(F_7)| = |SL_3(F_7)| / 3
    assert_eq!(g.order(), 1_876_896);
}

#[test]
fn a2_over_f7_exceeds_default_cap() {
    let cb = basis("A2");
    let gens = chevalley_generators(&cb, 7, 1).unwrap();
    assert!(matches!(enumerate_subgroup(&gens, DEFAULT_ENUMERATION_CAP), Err(chevcert::Error::CapExceeded { .. })));
}

#[test]
fn full_group_kernel_layers() {
    let a1 = basis("A1");
    for (p, k) in [(3u64, 2u32), (3, 3), (5, 2)] {
        let g = enumerate_subgroup(&chevalley_generators(&a1, p, k).unwrap(), DEFAULT_ENUMERATION_CAP).unwrap();
        assert_eq!(g.kernel_size(k - 1), p.pow(3) as usize, "p={p} k={k}");
        let sim = simulate_filtration(&a1, &g).unwrap();
        assert!(sim.phi_dims.iter().all(|&d| d == 3));
        assert!(sim.containments.iter().all(|c| c.2));
    }
}

#[test]
fn layer_subgroup_from_exponentials() {
    // exp_layer(X_α), exp_layer(X_{-α}) and level-1 root elements at p = 5, k = 3
    let a1 = basis("A1");
    let gens = vec![
        exp_layer(&a1, &a1.x(0, 5), 1, 3).unwrap(),
        exp_layer(&a1, &a1.x(1, 5), 1, 3).unwrap(),
        root_element(&a1, 0, 1, 5, 3).unwrap(),
    ];
    let g = enumerate_subgroup(&gens, DEFAULT_ENUMERATION_CAP).unwrap();
    let phi1 = phi_m(&a1, &g, 1).unwrap();
    assert!(phi1.dim() >= 2);
    assert!(verify_bracket_containment(&a1, &g, 1, 1).unwrap());
}

#[test]
fn higher_rank_exp_log_round_trip() {
    for t in ["A2", "B2", "G2"] {
        let cb = basis(t);
        let d = cb.dim();
        let v = LieElement::from_coeffs(cb.rank(), (0..d as i64).map(|i| (3 * i + 1) % 7).collect(), 7);
        let g = exp_layer(&cb, &v, 1, 2).unwrap();
        assert_eq!(log_layer(&cb, &g, 1).unwrap(), v, "{t}");
        assert!(g.is_congruent_identity(1));
    }
}

#[test]
fn tits_orders_are_finite_for_all_types() {
    for t in ["A1", "A3", "B3", "C3", "D4", "F4", "G2", "E6"] {
        let lift = tits_lift_order(&basis(t));
        let h = build_root_system(t.parse().unwrap()).coxeter_number();
        assert_eq!(lift.order_adjoint % h, 0, "{t}: w̃ maps to a Coxeter element of order h");
        assert!(lift.sc_order_bound >= lift.order_adjoint);
    }
    assert_eq!(sl_defining_lift_order(1), 4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn exp_layer_is_additive(a in proptest::collection::vec(0i64..5, 3), b in proptest::collection::vec(0i64..5, 3), m in 1u32..3) {
        let a1 = basis("A1");
        let v = LieElement::from_coeffs(1, a, 5);
        let w = LieElement::from_coeffs(1, b, 5);
        let lhs = exp_layer(&a1, &v, m, m + 1).unwrap().mul(&exp_layer(&a1, &w, m, m + 1).unwrap());
        prop_assert_eq!(lhs, exp_layer(&a1, &v.add(&w).unwrap(), m, m + 1).unwrap());
    }

    #[test]
    fn torus_elements_commute(s in 1u64..25, t in 1u64..25) {
        prop_assume!(s % 5 != 0 && t % 5 != 0);
        let a2 = basis("A2");
        let x = torus_element(&a2, 0, s, 5, 2).unwrap();
        let y = torus_element(&a2, 1, t, 5, 2).unwrap();
        prop_assert_eq!(x.mul(&y), y.mul(&x));
    }
}
