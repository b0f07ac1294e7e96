use approx_c1::geometry::{catalog, parse_geometry, save_geometry, Side, TwoPatchDomain, CATALOG_NAMES};
use approx_c1::gluing::{
    classify_as_g1, exact_gluing, g1_residual, gluing_target_space, modify_beta_for_boundary, project_gluing,
    G1Class, GluingError, GluingEval, GluingFn, Projector,
};
use approx_c1::spline::MixedPattern;
use proptest::prelude::*;

fn all_domains() -> Vec<(&'static str, TwoPatchDomain)> {
    CATALOG_NAMES.iter().map(|&n| (n, catalog(n).unwrap())).collect()
}

fn v_pattern(d: &TwoPatchDomain) -> MixedPattern {
    d.patch(Side::Left).space.v.pattern()
}

#[test]
fn catalog_geometries_are_continuous_and_oriented() {
    for (name, d) in all_domains() {
        assert!(d.check_c0_matching().max_gap < 1e-12, "{name}");
        for j in 0..=20 {
            for i in 0..=20 {
                let (u, v) = (i as f64 / 20.0, j as f64 / 20.0);
                assert!(d.patch(Side::Left).eval(u, v, 1).unwrap().jacobian_det() < 0.0, "{name}");
                assert!(d.patch(Side::Right).eval(u, v, 1).unwrap().jacobian_det() > 0.0, "{name}");
            }
        }
    }
}

#[test]
fn saved_geometries_parse_back_identically() {
    for (name, d) in all_domains() {
        let text = save_geometry(&d);
        let back = parse_geometry(&text).unwrap();
        assert_eq!(back.patches(), d.patches(), "{name}");
    }
}

#[test]
fn reordered_and_flipped_patches_are_recovered() {
    let d = catalog("ex2").unwrap();
    let l = d.patch(Side::Left).transformed(true, false, true).unwrap();
    let r = d.patch(Side::Right).transformed(false, true, false).unwrap();
    let back = TwoPatchDomain::from_patches_any_orientation(r, l).unwrap();
    for i in 0..=10 {
        let v = i as f64 / 10.0;
        let a = d.interface_point(v);
        // same interface curve, possibly traversed in reverse
        let b = back.interface_point(v);
        let b_rev = back.interface_point(1.0 - v);
        let dist = ((a[0] - b[0]).hypot(a[1] - b[1])).min((a[0] - b_rev[0]).hypot(a[1] - b_rev[1]));
        assert!(dist < 1e-13);
    }
}

#[test]
fn malformed_text_is_rejected_with_line_number() {
    let text = save_geometry(&catalog("ex1").unwrap());
    let broken = text.replacen("degrees 1 1", "degrees 1 x", 1);
    let err = parse_geometry(&broken).unwrap_err().to_string();
    assert!(err.starts_with("line 3"), "{err}");
    assert!(parse_geometry("").is_err());
    assert!(parse_geometry("two-patch-geometry v2\n").is_err());
}

#[test]
fn normal_is_side_independent() {
    for (name, d) in all_domains() {
        for i in 0..=50 {
            let v = i as f64 / 50.0;
            let nl = d.normal_from_side(Side::Left, v).unwrap();
            let nr = d.normal_from_side(Side::Right, v).unwrap();
            assert!((nl[0] - nr[0]).abs() < 1e-12 && (nl[1] - nr[1]).abs() < 1e-12, "{name} v={v}");
            assert!((nl[0].hypot(nl[1]) - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn beta_identity_and_exact_residual() {
    for (name, d) in all_domains() {
        let g = exact_gluing(&d).unwrap();
        for i in 0..1000 {
            let v = (i as f64 + 0.5) / 1000.0;
            let e = g.eval(v);
            let combo = e.alpha[0] * e.beta_side[1] - e.alpha[1] * e.beta_side[0];
            assert!((e.beta - combo).abs() < 1e-12, "{name} v={v}");
            assert!(e.alpha[0] < 0.0 && e.alpha[1] > 0.0);
        }
        assert!(g1_residual(&d, &g) < 1e-12, "{name}");
    }
}

#[test]
fn as_g1_classification() {
    assert_eq!(classify_as_g1(&exact_gluing(&catalog("ex1").unwrap()).unwrap(), 1e-12), G1Class::AsG1Gamma1);
    for name in ["ex2", "ex3", "ex4"] {
        let g = exact_gluing(&catalog(name).unwrap()).unwrap();
        assert_eq!(classify_as_g1(&g, 1e-12), G1Class::NotAsG1Gamma1, "{name}");
    }
}

#[test]
fn linear_data_is_reproduced_on_ex1() {
    let d = catalog("ex1").unwrap();
    let g = exact_gluing(&d).unwrap();
    for n in [1, 4, 16] {
        let a = project_gluing(&g, 1, 0, n, v_pattern(&d)).unwrap();
        assert!(g1_residual(&d, &a) < 1e-12);
    }
    // polynomial target space is accepted for linear data
    let a = project_gluing(&g, 1, 1, 8, v_pattern(&d)).unwrap();
    assert!(a.polynomial);
}

#[test]
fn curved_data_rejects_polynomial_target() {
    let d = catalog("ex2").unwrap();
    let g = exact_gluing(&d).unwrap();
    assert!(matches!(project_gluing(&g, 2, 2, 8, v_pattern(&d)), Err(GluingError::NotPolynomial { .. })));
}

#[test]
fn projected_beta_converges_with_order_four() {
    let d = catalog("ex2").unwrap();
    let g = exact_gluing(&d).unwrap();
    let mut errs = Vec::new();
    for n in [8, 16, 32, 64] {
        let a = project_gluing(&g, 3, 2, n, v_pattern(&d)).unwrap();
        let e = (0..=4000)
            .map(|i| i as f64 / 4000.0)
            .map(|v| (a.eval(GluingFn::BetaR, v, 0) - g.eval(v).beta_side[1]).abs())
            .fold(0.0f64, f64::max);
        errs.push(e);
    }
    let last = (errs[2] / errs[3]).log2();
    assert!((last - 4.0).abs() < 0.4, "{errs:?}");
}

#[test]
fn boundary_modification_on_smooth_end() {
    let d = catalog("ex3").unwrap();
    let g = exact_gluing(&d).unwrap();
    // ex3 has a smooth end at v = 0 and a corner at v = 1
    let a = project_gluing(&g, 2, 1, 8, v_pattern(&d)).unwrap();
    assert!(a.beta(0.0).abs() < 1e-10);
    assert!(a.beta(1.0).abs() > 1e-3);
    let m = modify_beta_for_boundary(&a, 0).unwrap();
    assert!(m.boundary_modified[0]);
    for side in Side::BOTH {
        assert!(m.beta_side(side, 0.0).abs() < 1e-13);
    }
    for i in 0..=100 {
        let v = i as f64 / 100.0;
        assert!((m.beta(v) - a.beta(v)).abs() < 1e-12);
    }
    assert!(matches!(modify_beta_for_boundary(&a, 1), Err(GluingError::NotSmoothEnd { .. })));
}

fn random_spline(dim: usize, seed: u64) -> Vec<f64> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    /// Members of the target space are reproduced, with or without
    /// geometry knots.
    #[test]
    fn projector_reproduces_target_space(p_tilde in 2usize..=4, level in 1u32..=4, coarse in 0usize..2, seed in any::<u64>()) {
        let n = 2usize.pow(level);
        let geo = if coarse == 1 { MixedPattern { r: 2, r_coarse: 2, n: 2, k: 1 } } else { MixedPattern { r: 3, r_coarse: 3, n: 1, k: 1 } };
        let space = gluing_target_space(p_tilde, p_tilde - 1, n, geo).unwrap();
        let macro_knots: Vec<f64> = (1..geo.n).map(|j| j as f64 / geo.n as f64).collect();
        let proj = Projector::new(space.clone(), &macro_knots, geo.r - 1).unwrap();
        let c = random_spline(space.dim(), seed);
        let out = proj.project(|v| (space.eval_spline(&c, v, 0), space.eval_spline(&c, v, 1)));
        for i in 0..=200 {
            let v = i as f64 / 200.0;
            prop_assert!((space.eval_spline(&out, v, 0) - space.eval_spline(&c, v, 0)).abs() < 1e-11);
        }
    }

    /// Interpolation at both ends and the stability bound `‖P f‖ <= 2 ‖f‖`.
    #[test]
    fn projector_interpolates_ends_and_is_stable(p_tilde in 2usize..=4, level in 2u32..=5, a in -3.0f64..3.0, b in 0.5f64..12.0, c in -1.0f64..1.0) {
        let n = 2usize.pow(level);
        let geo = MixedPattern { r: 3, r_coarse: 3, n: 1, k: 1 };
        let space = gluing_target_space(p_tilde, p_tilde - 1, n, geo).unwrap();
        let proj = Projector::new(space.clone(), &[], 2).unwrap();
        let f = |v: f64| (a + (b * v + c).sin(), b * (b * v + c).cos());
        let out = proj.project(f);
        prop_assert!((space.eval_spline(&out, 0.0, 0) - f(0.0).0).abs() < 1e-12);
        prop_assert!((space.eval_spline(&out, 1.0, 0) - f(1.0).0).abs() < 1e-12);
        let (mut sup_f, mut sup_p) = (0.0f64, 0.0f64);
        for i in 0..=2000 {
            let v = i as f64 / 2000.0;
            sup_f = sup_f.max(f(v).0.abs());
            sup_p = sup_p.max(space.eval_spline(&out, v, 0).abs());
        }
        prop_assert!(sup_p <= 2.0 * sup_f);
    }

    /// `β = α^(L) β^(R) − α^(R) β^(L)` at random points.
    #[test]
    fn gluing_identity_at_random_points(v in 0.0f64..=1.0) {
        let d = catalog("ex2").unwrap();
        let g = exact_gluing(&d).unwrap();
        let e = g.eval(v);
        prop_assert!((e.beta - (e.alpha[0] * e.beta_side[1] - e.alpha[1] * e.beta_side[0])).abs() < 1e-12);
    }
}
