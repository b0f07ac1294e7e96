use approx_c1::quadrature::GaussRule;
use approx_c1::spline::{make_mixed_space, make_uniform_space, KnotVector, SplineError, SplineSpace1D};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn space_strategy() -> impl Strategy<Value = SplineSpace1D> {
    (1usize..=6, 1usize..=12).prop_flat_map(|(p, n)| (Just(p), 0..p, Just(n))).prop_map(|(p, r, n)| {
        make_uniform_space(p, r, n).unwrap()
    })
}

fn full_values(s: &SplineSpace1D, x: f64, d: usize) -> Vec<f64> {
    let b = s.eval_basis(x, d).unwrap();
    let mut out = vec![0.0; s.dim()];
    for j in 0..b.len() {
        out[b.first + j] = b.get(d, j);
    }
    out
}

proptest! {
    #[test]
    fn partition_of_unity_and_nonnegativity(s in space_strategy(), x in 0.0f64..=1.0) {
        let b = s.eval_basis(x, 0).unwrap();
        prop_assert_eq!(b.len(), s.degree() + 1);
        let sum: f64 = b.row(0).iter().sum();
        prop_assert!((sum - 1.0).abs() < 1e-13);
        prop_assert!(b.row(0).iter().all(|&v| v >= -1e-15));
    }

    #[test]
    fn derivatives_match_central_differences(s in space_strategy(), x in 0.01f64..0.99) {
        // stay inside one polynomial piece
        let n = s.num_elements() as f64;
        let e = ((x * n).floor() as usize).min(s.num_elements() - 1);
        let (a, b) = s.element(e);
        let x = a + 0.5 * (b - a);
        let h = 1e-5 * (b - a);
        let d1 = full_values(&s, x, 1);
        let (vp, vm) = (full_values(&s, x + h, 0), full_values(&s, x - h, 0));
        for i in 0..s.dim() {
            let fd = (vp[i] - vm[i]) / (2.0 * h);
            prop_assert!((d1[i] - fd).abs() < 1e-5 * (1.0 + d1[i].abs()), "i={} {} vs {}", i, d1[i], fd);
        }
        if s.degree() >= 2 {
            let d2 = full_values(&s, x, 2);
            let (dp, dm) = (full_values(&s, x + h, 1), full_values(&s, x - h, 1));
            for i in 0..s.dim() {
                let fd = (dp[i] - dm[i]) / (2.0 * h);
                prop_assert!((d2[i] - fd).abs() < 1e-4 * (1.0 + d2[i].abs()));
            }
        }
    }

    #[test]
    fn dimension_formula(p in 1usize..=6, n in 1usize..=16, r_off in 0usize..6) {
        let r = r_off % p;
        let s = make_uniform_space(p, r, n).unwrap();
        prop_assert_eq!(s.dim(), p + 1 + (p - r) * (n - 1));
    }

    /// Interpolating a coarse spline at the Greville points of the halved
    /// space reproduces it everywhere iff the spaces are nested.
    #[test]
    fn refinement_is_nested(s in space_strategy(), seed in any::<u64>()) {
        let fine = s.refine_halve();
        prop_assert_eq!(fine.num_elements(), 2 * s.num_elements());
        let coefs: Vec<f64> = (0..s.dim()).map(|i| ((seed % 97) as f64 + 1.3 * i as f64).sin()).collect();
        let g = fine.greville();
        let m = fine.dim();
        let mut a = DMatrix::<f64>::zeros(m, m);
        for (i, &x) in g.iter().enumerate() {
            for (j, v) in full_values(&fine, x, 0).into_iter().enumerate() {
                a[(i, j)] = v;
            }
        }
        let rhs = DVector::from_iterator(m, g.iter().map(|&x| s.eval_spline(&coefs, x, 0)));
        let c = a.lu().solve(&rhs).unwrap();
        let c: Vec<f64> = c.iter().copied().collect();
        for k in 0..=50 {
            let x = k as f64 / 50.0;
            prop_assert!((fine.eval_spline(&c, x, 0) - s.eval_spline(&coefs, x, 0)).abs() < 1e-10);
        }
    }

    #[test]
    fn expanded_knots_round_trip(s in space_strategy()) {
        let k = s.knots();
        let back = KnotVector::from_expanded(k.degree(), k.expanded()).unwrap();
        prop_assert_eq!(&back, k);
    }

    #[test]
    fn gauss_rule_exactness(g in 1usize..=10, k in 0usize..20) {
        prop_assume!(k < 2 * g);
        let r = GaussRule::new(g);
        let q: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x.powi(k as i32)).sum();
        prop_assert!((q - 1.0 / (k as f64 + 1.0)).abs() < 1e-14);
    }
}

#[test]
fn cubic_bernstein_values_at_midpoint() {
    let s = SplineSpace1D::polynomial(3).unwrap();
    let b = s.eval_basis(0.5, 0).unwrap();
    let want = [0.125, 0.375, 0.375, 0.125];
    for (j, w) in want.iter().enumerate() {
        assert!((b.get(0, j) - w).abs() < 1e-15);
    }
}

#[test]
fn hat_functions() {
    let s = make_uniform_space(1, 0, 4).unwrap();
    let v = full_values(&s, 0.3, 0);
    // x = 0.3 lies between knots 0.25 and 0.5
    assert!((v[1] - 0.8).abs() < 1e-14 && (v[2] - 0.2).abs() < 1e-14);
}

#[test]
fn mixed_space_keeps_coarse_regularity() {
    let s = make_mixed_space(3, 2, 0.125, 1, 0.5).unwrap();
    let k = s.knots();
    let at_half = k.breakpoints().iter().position(|&b| (b - 0.5).abs() < 1e-14).unwrap();
    assert_eq!(k.multiplicities()[at_half], 2);
    assert_eq!(k.multiplicities()[1], 1);
    assert_eq!(s.dim(), 3 + 1 + 7 + 1);
}

#[test]
fn invalid_inputs() {
    assert!(matches!(make_uniform_space(3, 3, 4), Err(SplineError::Regularity { .. })));
    assert!(matches!(make_uniform_space(3, 1, 0), Err(SplineError::EmptyMesh)));
    assert!(matches!(make_mixed_space(3, 1, 0.125, 1, 0.3), Err(SplineError::NonIntegerRatio { .. })));
    assert!(KnotVector::from_expanded(2, &[0.0, 0.0, 0.5, 0.3, 1.0, 1.0]).is_err());
    assert!(KnotVector::from_expanded(2, &[0.0, 0.0, 1.0, 1.0]).is_err());
    let s = make_uniform_space(2, 1, 3).unwrap();
    assert!(matches!(s.eval_basis(1.5, 0), Err(SplineError::OutOfRange(_))));
}
