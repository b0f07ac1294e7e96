//! Gluing data of the interface and its spline approximation.
//!
//! With `a = ∂uF^(L)(0,v)`, `b = ∂uF^(R)(0,v)` and the common tangent
//! `t = ∂vF(0,v)`:
//!
//! * `α^(L) = det(a, t)`, `α^(R) = det(b, t)`, `β = det(a, b)`;
//! * `β^(S) = (∂uF^(S) · t) / |t|²`, so that `β = α^(L) β^(R) − α^(R) β^(L)`;
//! * every pair of patch functions with `∂u f^(S) = β^(S) G1 + α^(S) G2` for
//!   common `G1 = ∂v f`, `G2` joins C1 across the interface.

use crate::geometry::{det2, dot2, GeometryError, Side, TwoPatchDomain};
use crate::spline::{MixedPattern, SplineError, SplineSpace1D, KNOT_TOL};
use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GluingError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Spline(#[from] SplineError),
    #[error("alpha of the {side} patch has the wrong sign at v = {v:.6}; refine the interface mesh")]
    SignViolation { side: Side, v: f64 },
    #[error("interpolation constraints cannot be met in the target space ({constraints} constraints, dimension {dim})")]
    Infeasible { constraints: usize, dim: usize },
    #[error("gluing data is not a polynomial of degree {degree} (deviation {deviation:.3e}); choose a spline target with regularity below the degree")]
    NotPolynomial { degree: usize, deviation: f64 },
    #[error("beta does not vanish at v = {end} (value {value:.3e}), the boundary is not smooth there")]
    NotSmoothEnd { end: f64, value: f64 },
    #[error("the gluing degree must be at least 1")]
    Degree,
}

/// The four gluing functions, in storage order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GluingFn {
    AlphaL,
    AlphaR,
    BetaL,
    BetaR,
}

impl GluingFn {
    pub const ALL: [GluingFn; 4] = [GluingFn::AlphaL, GluingFn::AlphaR, GluingFn::BetaL, GluingFn::BetaR];

    pub fn alpha(side: Side) -> Self {
        match side {
            Side::Left => GluingFn::AlphaL,
            Side::Right => GluingFn::AlphaR,
        }
    }

    pub fn beta(side: Side) -> Self {
        match side {
            Side::Left => GluingFn::BetaL,
            Side::Right => GluingFn::BetaR,
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Common interface of exact and approximated gluing data.
pub trait GluingEval {
    fn alpha(&self, side: Side, v: f64) -> f64;
    fn beta_side(&self, side: Side, v: f64) -> f64;

    /// `α^(L) β^(R) − α^(R) β^(L)`.
    fn beta(&self, v: f64) -> f64 {
        self.alpha(Side::Left, v) * self.beta_side(Side::Right, v)
            - self.alpha(Side::Right, v) * self.beta_side(Side::Left, v)
    }

    /// Points at which sup-norms over `[0, 1]` are sampled.
    fn sample_points(&self) -> Vec<f64> {
        (0..=4000).map(|i| i as f64 / 4000.0).collect()
    }
}

/// Values and first derivatives of the exact gluing data at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GluingValues {
    pub alpha: [f64; 2],
    pub alpha_d: [f64; 2],
    pub beta_side: [f64; 2],
    pub beta_side_d: [f64; 2],
    /// `det(∂uF^(L), ∂uF^(R))`.
    pub beta: f64,
    pub beta_d: f64,
}

impl GluingValues {
    pub fn get(&self, f: GluingFn) -> (f64, f64) {
        match f {
            GluingFn::AlphaL => (self.alpha[0], self.alpha_d[0]),
            GluingFn::AlphaR => (self.alpha[1], self.alpha_d[1]),
            GluingFn::BetaL => (self.beta_side[0], self.beta_side_d[0]),
            GluingFn::BetaR => (self.beta_side[1], self.beta_side_d[1]),
        }
    }
}

/// Exact gluing data evaluated from the geometry.
#[derive(Debug, Clone)]
pub struct GluingData {
    domain: TwoPatchDomain,
}

pub fn exact_gluing(domain: &TwoPatchDomain) -> Result<GluingData, GluingError> {
    let data = GluingData { domain: domain.clone() };
    for i in 0..=200 {
        let v = i as f64 / 200.0;
        domain.interface_frame(v)?;
        let g = data.eval(v);
        if !(g.alpha[0] < 0.0) {
            return Err(GluingError::SignViolation { side: Side::Left, v });
        }
        if !(g.alpha[1] > 0.0) {
            return Err(GluingError::SignViolation { side: Side::Right, v });
        }
    }
    Ok(data)
}

impl GluingData {
    pub fn domain(&self) -> &TwoPatchDomain {
        &self.domain
    }

    pub fn eval(&self, v: f64) -> GluingValues {
        let fl = self.domain.patch(Side::Left).eval_unchecked(0.0, v, 2);
        let fr = self.domain.patch(Side::Right).eval_unchecked(0.0, v, 2);
        let (t, dt) = (fl.dv, fl.dvv);
        let tt = dot2(t, t);
        let dtt = 2.0 * dot2(t, dt);
        let mut out = GluingValues {
            alpha: [0.0; 2],
            alpha_d: [0.0; 2],
            beta_side: [0.0; 2],
            beta_side_d: [0.0; 2],
            beta: det2(fl.du, fr.du),
            beta_d: det2(fl.duv, fr.du) + det2(fl.du, fr.duv),
        };
        for (s, f) in [fl, fr].iter().enumerate() {
            let (a, da) = (f.du, f.duv);
            out.alpha[s] = det2(a, t);
            out.alpha_d[s] = det2(da, t) + det2(a, dt);
            let num = dot2(a, t);
            let dnum = dot2(da, t) + dot2(a, dt);
            out.beta_side[s] = num / tt;
            out.beta_side_d[s] = (dnum * tt - num * dtt) / (tt * tt);
        }
        out
    }

    /// `β` from its defining determinant.
    pub fn beta_det(&self, v: f64) -> f64 {
        self.eval(v).beta
    }
}

impl GluingEval for GluingData {
    fn alpha(&self, side: Side, v: f64) -> f64 {
        self.eval(v).alpha[side.index()]
    }

    fn beta_side(&self, side: Side, v: f64) -> f64 {
        self.eval(v).beta_side[side.index()]
    }
}

/// Spline approximation of the four gluing functions in a common space.
#[derive(Debug, Clone, PartialEq)]
pub struct ApproxGluingData {
    pub space: SplineSpace1D,
    /// Coefficients ordered as [`GluingFn::ALL`].
    pub coefs: [Vec<f64>; 4],
    pub p_tilde: usize,
    pub r_tilde: usize,
    /// True when the target space has no interior knots.
    pub polynomial: bool,
    /// Whether the beta functions were shifted at `v = 0` / `v = 1`.
    pub boundary_modified: [bool; 2],
}

impl ApproxGluingData {
    pub fn eval(&self, f: GluingFn, v: f64, deriv: usize) -> f64 {
        self.space.eval_spline(&self.coefs[f.index()], v, deriv)
    }
}

impl GluingEval for ApproxGluingData {
    fn alpha(&self, side: Side, v: f64) -> f64 {
        self.eval(GluingFn::alpha(side), v, 0)
    }

    fn beta_side(&self, side: Side, v: f64) -> f64 {
        self.eval(GluingFn::beta(side), v, 0)
    }

    fn sample_points(&self) -> Vec<f64> {
        dense_samples(&self.space, 16)
    }
}

/// `per_element` equispaced points on every element plus the endpoints.
pub fn dense_samples(space: &SplineSpace1D, per_element: usize) -> Vec<f64> {
    let n = space.num_elements();
    let m = n * per_element;
    (0..=m).map(|i| i as f64 / m as f64).collect()
}

/// Target space of the projection. `r_tilde >= p_tilde` selects the
/// polynomials of degree `p_tilde`.
pub fn gluing_target_space(
    p_tilde: usize,
    r_tilde: usize,
    n: usize,
    coarse: MixedPattern,
) -> Result<SplineSpace1D, GluingError> {
    if p_tilde == 0 {
        return Err(GluingError::Degree);
    }
    if r_tilde >= p_tilde {
        return Ok(SplineSpace1D::polynomial(p_tilde)?);
    }
    let (k, r_coarse) = coarse_layout(n, coarse)?;
    Ok(SplineSpace1D::with_pattern(p_tilde, MixedPattern { r: r_tilde, r_coarse, n, k })?)
}

/// Ratio of fine to geometry mesh and the regularity at geometry knots
/// (one below the geometry's, since the gluing data loses a derivative).
fn coarse_layout(n: usize, geometry_v: MixedPattern) -> Result<(usize, usize), GluingError> {
    let n_hat = geometry_v.n;
    if n % n_hat != 0 {
        return Err(GluingError::Spline(SplineError::NonIntegerRatio {
            h: 1.0 / n as f64,
            h_coarse: 1.0 / n_hat as f64,
        }));
    }
    if n_hat == 1 {
        return Ok((n, 0));
    }
    Ok((n / n_hat, geometry_v.r.saturating_sub(1)))
}

/// Something that can be projected: values and first derivatives on `[0,1]`.
pub trait ProjectionSource {
    /// Value and first derivative of component `c` at `v`.
    fn value_and_derivative(&self, c: usize, v: f64) -> (f64, f64);
    fn components(&self) -> usize;
}

impl ProjectionSource for GluingData {
    fn value_and_derivative(&self, c: usize, v: f64) -> (f64, f64) {
        self.eval(v).get(GluingFn::ALL[c])
    }

    fn components(&self) -> usize {
        4
    }
}

/// Constrained least-squares projector onto a spline space.
///
/// Minimizes the Gauss-weighted squared error on every element subject to
/// interpolation of the value at both ends, and of the value and
/// derivatives up to `max_order` (at most 1) at those macro knots that are
/// breakpoints of the space.
#[derive(Debug)]
pub struct Projector {
    space: SplineSpace1D,
    lu: nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>,
    samples: Vec<(f64, f64)>,
    design: Vec<(usize, Vec<f64>)>,
    constraints: Vec<(f64, usize)>,
}

impl Projector {
    pub fn new(space: SplineSpace1D, macro_knots: &[f64], max_order: usize) -> Result<Self, GluingError> {
        let m = space.dim();
        let p = space.degree();
        let g = crate::quadrature::GaussRule::new(2 * (p + 1));
        let mut samples = Vec::new();
        let mut design = Vec::new();
        for e in 0..space.num_elements() {
            let (a, b) = space.element(e);
            for (x, w) in g.mapped(a, b) {
                let bv = space.eval_unchecked(x, 0);
                samples.push((x, w));
                design.push((bv.first, bv.row(0).to_vec()));
            }
        }
        let mut constraints = vec![(0.0, 0), (1.0, 0)];
        let bps = space.knots().breakpoints();
        for &x in macro_knots {
            if !bps.iter().any(|b| (b - x).abs() < KNOT_TOL) {
                continue;
            }
            for d in 0..=max_order.min(1) {
                constraints.push((x, d));
            }
        }
        let constraint_rows: Vec<(usize, Vec<f64>)> = constraints
            .iter()
            .map(|&(x, d)| {
                let bv = space.eval_unchecked(x, d);
                (bv.first, bv.row(d).to_vec())
            })
            .collect();
        let c = constraints.len();
        if c > m {
            return Err(GluingError::Infeasible { constraints: c, dim: m });
        }
        let mut kkt = DMatrix::<f64>::zeros(m + c, m + c);
        for ((_, w), (first, row)) in samples.iter().zip(&design) {
            for (i, ri) in row.iter().enumerate() {
                for (j, rj) in row.iter().enumerate() {
                    kkt[(first + i, first + j)] += w * ri * rj;
                }
            }
        }
        for (k, (first, row)) in constraint_rows.iter().enumerate() {
            for (i, ri) in row.iter().enumerate() {
                kkt[(m + k, first + i)] = *ri;
                kkt[(first + i, m + k)] = *ri;
            }
        }
        let lu = kkt.lu();
        if !lu.is_invertible() {
            return Err(GluingError::Infeasible { constraints: c, dim: m });
        }
        Ok(Self { space, lu, samples, design, constraints })
    }

    pub fn space(&self) -> &SplineSpace1D {
        &self.space
    }

    /// Projects a function given by value and derivative callbacks.
    pub fn project(&self, f: impl Fn(f64) -> (f64, f64)) -> Vec<f64> {
        let m = self.space.dim();
        let c = self.constraints.len();
        let mut rhs = DVector::<f64>::zeros(m + c);
        for ((x, w), (first, row)) in self.samples.iter().zip(&self.design) {
            let fx = f(*x).0;
            for (i, ri) in row.iter().enumerate() {
                rhs[first + i] += w * ri * fx;
            }
        }
        for (k, &(x, d)) in self.constraints.iter().enumerate() {
            let (val, der) = f(x);
            rhs[m + k] = if d == 0 { val } else { der };
        }
        let sol = self.lu.solve(&rhs).expect("factorization checked at construction");
        sol.rows(0, m).iter().copied().collect()
    }
}

/// Projects the exact gluing data into `S(p̃, (r̃, r̂2 − 1), (1/n, ĥ2))`,
/// where the geometry's v-space supplies `ĥ2` and `r̂2`.
pub fn project_gluing(
    data: &GluingData,
    p_tilde: usize,
    r_tilde: usize,
    n: usize,
    geometry_v: MixedPattern,
) -> Result<ApproxGluingData, GluingError> {
    let space = gluing_target_space(p_tilde, r_tilde, n, geometry_v)?;
    let polynomial = r_tilde >= p_tilde;
    let macro_knots: Vec<f64> = if polynomial {
        Vec::new()
    } else {
        (1..geometry_v.n).map(|j| j as f64 / geometry_v.n as f64).collect()
    };
    let proj = Projector::new(space.clone(), &macro_knots, geometry_v.r.saturating_sub(1))?;
    let coefs: [Vec<f64>; 4] =
        std::array::from_fn(|c| proj.project(|v| data.value_and_derivative(c, v)));
    let approx = ApproxGluingData {
        space,
        coefs,
        p_tilde,
        r_tilde,
        polynomial,
        boundary_modified: [false; 2],
    };
    if polynomial {
        let mut dev: f64 = 0.0;
        for i in 0..=400 {
            let v = i as f64 / 400.0;
            let g = data.eval(v);
            for f in GluingFn::ALL {
                dev = dev.max((approx.eval(f, v, 0) - g.get(f).0).abs());
            }
        }
        if dev > 1e-10 {
            return Err(GluingError::NotPolynomial { degree: p_tilde, deviation: dev });
        }
    }
    check_signs(&approx)?;
    Ok(approx)
}

/// Errors unless `α̃^(L) < 0 < α̃^(R)` on a dense sample.
pub fn check_signs(approx: &ApproxGluingData) -> Result<(), GluingError> {
    for v in dense_samples(&approx.space, 8) {
        if !(approx.alpha(Side::Left, v) < 0.0) {
            return Err(GluingError::SignViolation { side: Side::Left, v });
        }
        if !(approx.alpha(Side::Right, v) > 0.0) {
            return Err(GluingError::SignViolation { side: Side::Right, v });
        }
    }
    Ok(())
}

/// Relative tolerance for deciding that `β` vanishes at an interface end.
pub const SMOOTH_END_TOL: f64 = 1e-10;

/// Shifts both beta functions by a multiple of the matching alpha so that
/// they vanish at the end `end` (0 or 1). The combined beta is unchanged.
pub fn modify_beta_for_boundary(
    approx: &ApproxGluingData,
    end: usize,
) -> Result<ApproxGluingData, GluingError> {
    let vb = end as f64;
    let (al, ar) = (approx.alpha(Side::Left, vb), approx.alpha(Side::Right, vb));
    let (bl, br) = (approx.beta_side(Side::Left, vb), approx.beta_side(Side::Right, vb));
    let beta = al * br - ar * bl;
    let scale = (al * br).abs() + (ar * bl).abs() + al.abs() * ar.abs();
    if beta.abs() > SMOOTH_END_TOL * scale {
        return Err(GluingError::NotSmoothEnd { end: vb, value: beta });
    }
    let c = bl / al;
    let mut out = approx.clone();
    for side in Side::BOTH {
        let a = approx.coefs[GluingFn::alpha(side).index()].clone();
        let b = &mut out.coefs[GluingFn::beta(side).index()];
        for (bi, ai) in b.iter_mut().zip(&a) {
            *bi -= c * ai;
        }
    }
    out.boundary_modified[end] = true;
    Ok(out)
}

/// Supremum over samples of the G1 residual
/// `|α^(R) ∂uF^(L) − α^(L) ∂uF^(R) + β ∂vF|`.
pub fn g1_residual(domain: &TwoPatchDomain, data: &impl GluingEval) -> f64 {
    let mut worst: f64 = 0.0;
    for v in data.sample_points() {
        let fl = domain.patch(Side::Left).eval_unchecked(0.0, v, 1);
        let fr = domain.patch(Side::Right).eval_unchecked(0.0, v, 1);
        let (al, ar) = (data.alpha(Side::Left, v), data.alpha(Side::Right, v));
        let beta = data.beta(v);
        let r = [
            ar * fl.du[0] - al * fr.du[0] + beta * fl.dv[0],
            ar * fl.du[1] - al * fr.du[1] + beta * fl.dv[1],
        ];
        worst = worst.max(r[0].hypot(r[1]));
    }
    worst
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum G1Class {
    /// Linear gluing data exists with `γ ≡ 1`.
    AsG1Gamma1,
    NotAsG1Gamma1,
}

/// Checks whether all four gluing functions are linear up to `tol`.
pub fn classify_as_g1(data: &GluingData, tol: f64) -> G1Class {
    let (g0, g1) = (data.eval(0.0), data.eval(1.0));
    for i in 1..200 {
        let v = i as f64 / 200.0;
        let g = data.eval(v);
        for f in GluingFn::ALL {
            let lin = (1.0 - v) * g0.get(f).0 + v * g1.get(f).0;
            if (g.get(f).0 - lin).abs() > tol {
                return G1Class::NotAsG1Gamma1;
            }
        }
    }
    G1Class::AsG1Gamma1
}
