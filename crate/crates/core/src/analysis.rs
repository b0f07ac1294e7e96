//! Error norms, the normal-derivative jump across the interface, the
//! jump factors `E1`, `E2` and convergence orders.

use crate::assembly::QuadratureRule;
use crate::basis::{C1Basis, PatchFunction};
use crate::element::{to_physical, PhysDerivs};
use crate::geometry::{dot2, Side, TwoPatchDomain, Vec2};
use crate::gluing::{ApproxGluingData, GluingData, GluingEval, GluingFn};
use crate::problem::ExactSolution;
use crate::quadrature::GaussRule;
use rayon::prelude::*;
use thiserror::Error;

/// Errors below this are treated as zero when computing orders.
pub const EOC_FLOOR: f64 = 1e-14;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("approximate alpha of the left patch is {value:.3e} at v = {v:.6}")]
    SmallAlpha { v: f64, value: f64 },
    #[error(transparent)]
    Geometry(#[from] crate::geometry::GeometryError),
}

/// Full (not semi-) norms of the error, summed over both patches.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ErrorNorms {
    pub l2: f64,
    pub h1: f64,
    pub h2: f64,
}

fn element_list(basis: &C1Basis) -> Vec<(Side, usize, usize)> {
    let n2 = basis.patch_spaces.v.num_elements();
    let mut out = Vec::new();
    for side in Side::BOTH {
        for e2 in 0..n2 {
            for e1 in 0..basis.patch_spaces.u[side.index()].num_elements() {
                out.push((side, e1, e2));
            }
        }
    }
    out
}

/// Physical derivatives of a patch function at a parameter point.
fn phys_at(
    basis: &C1Basis,
    domain: &TwoPatchDomain,
    pf: &PatchFunction,
    e1: usize,
    e2: usize,
    u: f64,
    v: f64,
) -> (PhysDerivs, [f64; 2], f64) {
    let geo = domain.patch(pf.side).eval_unchecked(u, v, 2);
    let d = pf.eval_on_element(basis, e1, e2, u, v);
    (to_physical(&d, &geo).unwrap_or_default(), geo.x, geo.jacobian_det().abs())
}

/// `‖u − φ_h‖` in L2, H1 and H2 (second derivatives `xx`, `xy`, `yy`
/// each counted once).
pub fn error_norms(
    domain: &TwoPatchDomain,
    basis: &C1Basis,
    coefs: &[f64],
    exact: &dyn ExactSolution,
    quad: &QuadratureRule,
) -> ErrorNorms {
    let pfs = basis.to_patch_functions(coefs);
    let parts: Vec<[f64; 3]> = element_list(basis)
        .par_iter()
        .map(|&(side, e1, e2)| {
            let pf = &pfs[side.index()];
            let g = GaussRule::new(quad.element_points(side, e1));
            let (ua, ub) = basis.patch_spaces.u[side.index()].element(e1);
            let (va, vb) = basis.patch_spaces.v.element(e2);
            let mut acc = [0.0; 3];
            for (v, wv) in g.mapped(va, vb) {
                for (u, wu) in g.mapped(ua, ub) {
                    let (ph, x, jac) = phys_at(basis, domain, pf, e1, e2, u, v);
                    let ex = exact.eval(x[0], x[1]);
                    let w = wu * wv * jac;
                    acc[0] += w * (ex.f - ph.f).powi(2);
                    acc[1] += w * ((ex.gx - ph.gx).powi(2) + (ex.gy - ph.gy).powi(2));
                    acc[2] += w
                        * ((ex.hxx - ph.hxx).powi(2) + (ex.hxy - ph.hxy).powi(2) + (ex.hyy - ph.hyy).powi(2));
                }
            }
            acc
        })
        .collect();
    let s = parts.iter().fold([0.0; 3], |a, p| [a[0] + p[0], a[1] + p[1], a[2] + p[2]]);
    ErrorNorms { l2: s[0].sqrt(), h1: (s[0] + s[1]).sqrt(), h2: (s[0] + s[1] + s[2]).sqrt() }
}

/// One-sided physical gradients at interface point `v`, in the frame
/// `(t0, n)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterfaceDerivs {
    /// `∂_{t0} φ` from the left patch.
    pub tangential: f64,
    /// `∂_n φ^(L)`, `∂_n φ^(R)`.
    pub normal: [f64; 2],
    pub tau: f64,
}

impl InterfaceDerivs {
    pub fn jump(&self) -> f64 {
        self.normal[1] - self.normal[0]
    }
}

fn interface_derivs(
    domain: &TwoPatchDomain,
    basis: &C1Basis,
    pfs: &[PatchFunction; 2],
    e2: usize,
    v: f64,
) -> Result<InterfaceDerivs, AnalysisError> {
    let fr = domain.interface_frame(v)?;
    let grad = |side: Side| -> Vec2 {
        let (ph, _, _) = phys_at(basis, domain, &pfs[side.index()], 0, e2, 0.0, v);
        [ph.gx, ph.gy]
    };
    let (gl, gr) = (grad(Side::Left), grad(Side::Right));
    Ok(InterfaceDerivs { tangential: dot2(gl, fr.t0), normal: [dot2(gl, fr.n), dot2(gr, fr.n)], tau: fr.tau })
}

/// Tangential and normal derivatives of a discrete function at `v`.
pub fn interface_derivatives(
    domain: &TwoPatchDomain,
    basis: &C1Basis,
    coefs: &[f64],
    v: f64,
) -> Result<InterfaceDerivs, AnalysisError> {
    let pfs = basis.to_patch_functions(coefs);
    let e2 = crate::basis::element_of(&basis.patch_spaces.v, v);
    interface_derivs(domain, basis, &pfs, e2, v)
}

/// `‖∂_n φ^(R) − ∂_n φ^(L)‖` in `L2(Γ)`.
pub fn jump_norm(domain: &TwoPatchDomain, basis: &C1Basis, coefs: &[f64]) -> Result<f64, AnalysisError> {
    let pfs = basis.to_patch_functions(coefs);
    let g = GaussRule::new(2 * (basis.lifted.degree() + 1));
    let n2 = basis.patch_spaces.v.num_elements();
    let parts: Vec<Result<f64, AnalysisError>> = (0..n2)
        .into_par_iter()
        .map(|e2| {
            let (a, b) = basis.patch_spaces.v.element(e2);
            let mut acc = 0.0;
            for (v, w) in g.mapped(a, b) {
                let d = interface_derivs(domain, basis, &pfs, e2, v)?;
                acc += w * d.tau * d.jump().powi(2);
            }
            Ok(acc)
        })
        .collect();
    let mut total = 0.0;
    for p in parts {
        total += p?;
    }
    Ok(total.sqrt())
}

/// `(E1, E2)` for the left side at `v`: the jump of any member of the
/// approximate space equals `E1 ∂_{t0} φ + E2 ∂_n φ^(L)`.
pub fn jump_factors(exact: &GluingData, approx: &ApproxGluingData, v: f64) -> Result<(f64, f64), AnalysisError> {
    let fr = exact.domain().interface_frame(v)?;
    let g = exact.eval(v);
    let (al, ar) = (g.get(GluingFn::AlphaL).0, g.get(GluingFn::AlphaR).0);
    let (bl, br) = (g.get(GluingFn::BetaL).0, g.get(GluingFn::BetaR).0);
    let (tal, tar) = (approx.alpha(Side::Left, v), approx.alpha(Side::Right, v));
    let (tbl, tbr) = (approx.beta_side(Side::Left, v), approx.beta_side(Side::Right, v));
    let scale = al.abs().max(1e-300);
    if tal.abs() < 1e-12 * scale {
        return Err(AnalysisError::SmallAlpha { v, value: tal });
    }
    let tau2 = fr.tau * fr.tau;
    let e1 = tau2 * (tar * (bl - tbl) / (ar * tal) - (br - tbr) / ar);
    let e2 = (tar * al - ar * tal) / (ar * tal);
    Ok((e1, e2))
}

/// Sup over a sample of `|E1|` and `|E2|`.
pub fn jump_factor_sup(exact: &GluingData, approx: &ApproxGluingData) -> Result<(f64, f64), AnalysisError> {
    let mut sup = (0.0f64, 0.0f64);
    for v in approx.sample_points() {
        let (e1, e2) = jump_factors(exact, approx, v)?;
        sup = (sup.0.max(e1.abs()), sup.1.max(e2.abs()));
    }
    Ok(sup)
}

/// `log2(e_k / e_{k+1})` per consecutive pair; `None` where either error is
/// at or below [`EOC_FLOOR`].
pub fn eoc(errors: &[f64]) -> Vec<Option<f64>> {
    errors
        .windows(2)
        .map(|w| if w[0] > EOC_FLOOR && w[1] > EOC_FLOOR { Some((w[0] / w[1]).log2()) } else { None })
        .collect()
}

/// One refinement level.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRecord {
    pub level: usize,
    pub h: f64,
    pub dofs: usize,
    pub err_l2: f64,
    pub err_h1: f64,
    pub err_h2: f64,
    pub jump_l2: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    L2,
    H1,
    H2,
    Jump,
}

impl Quantity {
    pub const ALL: [Quantity; 4] = [Quantity::L2, Quantity::H1, Quantity::H2, Quantity::Jump];

    pub fn of(self, r: &ErrorRecord) -> f64 {
        match self {
            Quantity::L2 => r.err_l2,
            Quantity::H1 => r.err_h1,
            Quantity::H2 => r.err_h2,
            Quantity::Jump => r.jump_l2,
        }
    }
}

/// Expected orders for a configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpectedOrders {
    /// Order of the H2 error.
    pub q: f64,
    /// Order of the jump norm, `p̃ + 1`.
    pub jump: f64,
}

impl ExpectedOrders {
    /// `q = min(p − 1, p̃ + 1)`, or `p − 1` for polynomial gluing data.
    pub fn new(p: usize, p_tilde: usize, polynomial: bool) -> Self {
        let q = if polynomial { p - 1 } else { (p - 1).min(p_tilde + 1) };
        Self { q: q as f64, jump: (p_tilde + 1) as f64 }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ConvergenceReport {
    pub label: String,
    pub records: Vec<ErrorRecord>,
    pub expected: Option<ExpectedOrders>,
}

impl ConvergenceReport {
    pub fn values(&self, q: Quantity) -> Vec<f64> {
        self.records.iter().map(|r| q.of(r)).collect()
    }

    pub fn eoc(&self, q: Quantity) -> Vec<Option<f64>> {
        eoc(&self.values(q))
    }

    /// Orders of the last `k` level pairs.
    pub fn last_eocs(&self, q: Quantity, k: usize) -> Vec<Option<f64>> {
        let e = self.eoc(q);
        e[e.len().saturating_sub(k)..].to_vec()
    }
}
