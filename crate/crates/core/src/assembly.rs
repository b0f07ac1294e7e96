//! Galerkin discretization of the biharmonic problem
//! `Δ²u = f`, `u = g0` and `Δu = g1` on the boundary, in the approximately
//! C1 space: `a(φ, ψ) = Σ_S ∫ Δφ Δψ` and `F(ψ) = ∫ f ψ + ∫_∂Ω g1 ∂nψ`.

use crate::basis::C1Basis;
use crate::element::{to_physical, Edge, ElementBasis, PhysDerivs};
use crate::geometry::{Side, TwoPatchDomain};
use crate::quadrature::GaussRule;
use crate::sparse::CsrMatrix;
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AssemblyError {
    #[error("singular Jacobian on the {side} patch at (u, v) = ({u:.6}, {v:.6})")]
    SingularJacobian { side: Side, u: f64, v: f64 },
    #[error("boundary Gram matrix is singular")]
    SingularBoundaryGram,
    #[error("sparse Cholesky factorization failed: {0}")]
    Factorization(String),
    #[error("conjugate gradients stopped after {iterations} iterations at relative residual {residual:.3e}")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("solution residual {residual:.3e} exceeds 1e-10 (diagonal ratio {diag_ratio:.3e})")]
    Residual { residual: f64, diag_ratio: f64 },
}

/// Number of Gauss points per direction for each element.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    /// Extra polynomial degree on top of `2 * degree` the rule must integrate.
    pub budget: usize,
    degree: usize,
    lifted_degree: usize,
    /// Per side: number of u-elements touched by the two interface columns.
    interface_cols: [usize; 2],
}

impl QuadratureRule {
    /// Default budget 2: exact for degree `2 p + 2` per direction.
    pub fn new(basis: &C1Basis) -> Self {
        Self::with_budget(basis, 2)
    }

    pub fn with_budget(basis: &C1Basis, budget: usize) -> Self {
        let degree = basis.patch_spaces.v.degree().max(basis.patch_spaces.u[0].degree()).max(basis.patch_spaces.u[1].degree());
        let interface_cols = Side::BOTH.map(|s| basis.patch_spaces.u[s.index()].element_range(1).end);
        Self { budget, degree, lifted_degree: basis.lifted.degree(), interface_cols }
    }

    /// Points integrating `2 * degree + budget` exactly.
    pub fn points_for_degree(degree: usize, budget: usize) -> usize {
        (2 * degree + budget) / 2 + 1
    }

    /// Largest spline degree present on element column `e1` of `side`.
    pub fn element_degree(&self, side: Side, e1: usize) -> usize {
        if e1 < self.interface_cols[side.index()] {
            self.degree.max(self.lifted_degree)
        } else {
            self.degree
        }
    }

    pub fn element_points(&self, side: Side, e1: usize) -> usize {
        Self::points_for_degree(self.element_degree(side, e1), self.budget)
    }
}

/// Stiffness matrix and load vector over all DOFs.
#[derive(Debug, Clone)]
pub struct DiscreteSystem {
    pub matrix: CsrMatrix,
    pub load: Vec<f64>,
}

/// System on the homogeneous DOFs after eliminating the boundary values.
#[derive(Debug, Clone)]
pub struct ReducedSystem {
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
    /// Full coefficient vector holding the boundary values, zero elsewhere.
    pub lifting: Vec<f64>,
    pub free: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverKind {
    #[default]
    Direct,
    Cg,
}

struct ElementOutput {
    dofs: Vec<usize>,
    stiffness: Vec<f64>,
    load: Vec<f64>,
}

fn all_elements(basis: &C1Basis) -> Vec<(Side, usize, usize)> {
    let n2 = basis.patch_spaces.v.num_elements();
    let mut out = Vec::new();
    for side in Side::BOTH {
        let n1 = basis.patch_spaces.u[side.index()].num_elements();
        for e2 in 0..n2 {
            for e1 in 0..n1 {
                out.push((side, e1, e2));
            }
        }
    }
    out
}

/// Assembles `A_ij = a(B_i, B_j)` and `F_i` over all DOFs.
pub fn assemble<F, G>(
    domain: &TwoPatchDomain,
    basis: &C1Basis,
    quad: &QuadratureRule,
    f: F,
    g1: G,
) -> Result<DiscreteSystem, AssemblyError>
where
    F: Fn(f64, f64) -> f64 + Sync,
    G: Fn(f64, f64) -> f64 + Sync,
{
    let elements = all_elements(basis);
    let n = basis.num_dofs();
    let mut triplets: Vec<(usize, usize, f64)> = Vec::new();
    let mut load = vec![0.0; n];
    for chunk in elements.chunks(2048) {
        let outs: Vec<Result<ElementOutput, AssemblyError>> = chunk
            .par_iter()
            .map(|&(side, e1, e2)| element_matrices(domain, basis, quad, side, e1, e2, &f, &g1))
            .collect();
        for out in outs {
            let out = out?;
            let m = out.dofs.len();
            for (a, &da) in out.dofs.iter().enumerate() {
                load[da] += out.load[a];
                for (b, &db) in out.dofs.iter().enumerate() {
                    triplets.push((da, db, out.stiffness[a * m + b]));
                }
            }
        }
    }
    Ok(DiscreteSystem { matrix: CsrMatrix::from_triplets(n, n, &triplets), load })
}

#[allow(clippy::too_many_arguments)]
fn element_matrices<F, G>(
    domain: &TwoPatchDomain,
    basis: &C1Basis,
    quad: &QuadratureRule,
    side: Side,
    e1: usize,
    e2: usize,
    f: &F,
    g1: &G,
) -> Result<ElementOutput, AssemblyError>
where
    F: Fn(f64, f64) -> f64,
    G: Fn(f64, f64) -> f64,
{
    let eb = ElementBasis::new(basis, side, e1, e2);
    let m = eb.len();
    let mut stiffness = vec![0.0; m * m];
    let mut load = vec![0.0; m];
    let g = GaussRule::new(quad.element_points(side, e1));
    let su = &basis.patch_spaces.u[side.index()];
    let sv = &basis.patch_spaces.v;
    let (ua, ub) = su.element(e1);
    let (va, vb) = sv.element(e2);
    let mut lap = vec![0.0; m];
    for (v, wv) in g.mapped(va, vb) {
        for (u, wu) in g.mapped(ua, ub) {
            let (pd, geo) = eb.eval(basis, domain, u, v);
            let jac = geo.jacobian_det().abs();
            let w = wu * wv * jac;
            let fx = f(geo.x[0], geo.x[1]);
            for (l, d) in pd.iter().enumerate() {
                let p = to_physical(d, &geo).ok_or(AssemblyError::SingularJacobian { side, u, v })?;
                lap[l] = p.laplacian();
                load[l] += w * fx * p.f;
            }
            for a in 0..m {
                let wa = w * lap[a];
                let row = &mut stiffness[a * m..(a + 1) * m];
                for (b, lb) in lap.iter().enumerate() {
                    row[b] += wa * lb;
                }
            }
        }
    }
    // Neumann-type datum on boundary edges
    let (n1, n2) = (su.num_elements(), sv.num_elements());
    for edge in Edge::ALL {
        let on_edge = match edge {
            Edge::Outer => e1 == n1 - 1,
            Edge::Bottom => e2 == 0,
            Edge::Top => e2 == n2 - 1,
        };
        if !on_edge {
            continue;
        }
        let (a, b) = match edge {
            Edge::Outer => (va, vb),
            _ => (ua, ub),
        };
        for (s, ws) in g.mapped(a, b) {
            let (u, v) = edge.point(s);
            let (pd, geo) = eb.eval(basis, domain, u, v);
            let (ds, nrm) = edge.metric(&geo);
            let gx = g1(geo.x[0], geo.x[1]);
            for (l, d) in pd.iter().enumerate() {
                let p = to_physical(d, &geo).ok_or(AssemblyError::SingularJacobian { side, u, v })?;
                load[l] += ws * ds * gx * (p.gx * nrm[0] + p.gy * nrm[1]);
            }
        }
    }
    Ok(ElementOutput { dofs: eb.dofs, stiffness, load })
}

/// Visits every Gauss point on the boundary edges with the physical values
/// of the local DOFs, the physical point and the weight `w ds`.
pub fn for_each_boundary_point(
    domain: &TwoPatchDomain,
    basis: &C1Basis,
    quad: &QuadratureRule,
    mut visit: impl FnMut(&[usize], &[PhysDerivs], [f64; 2], f64),
) {
    for side in Side::BOTH {
        let su = &basis.patch_spaces.u[side.index()];
        let sv = &basis.patch_spaces.v;
        let (n1, n2) = (su.num_elements(), sv.num_elements());
        for edge in Edge::ALL {
            let count = if edge == Edge::Outer { n2 } else { n1 };
            for e in 0..count {
                let (e1, e2) = edge.element(e, n1, n2);
                let eb = ElementBasis::new(basis, side, e1, e2);
                let g = GaussRule::new(quad.element_points(side, e1));
                let (a, b) = if edge == Edge::Outer { sv.element(e2) } else { su.element(e1) };
                for (s, ws) in g.mapped(a, b) {
                    let (u, v) = edge.point(s);
                    let (pd, geo) = eb.eval(basis, domain, u, v);
                    let (ds, _) = edge.metric(&geo);
                    let phys: Vec<PhysDerivs> =
                        pd.iter().map(|d| to_physical(d, &geo).unwrap_or_default()).collect();
                    visit(&eb.dofs, &phys, geo.x, ws * ds);
                }
            }
        }
    }
}

/// Boundary coefficients from the L2 projection of `g0` onto the traces of
/// the boundary DOFs; the result is a full-length coefficient vector.
pub fn boundary_projection<G>(
    domain: &TwoPatchDomain,
    basis: &C1Basis,
    quad: &QuadratureRule,
    g0: G,
) -> Result<Vec<f64>, AssemblyError>
where
    G: Fn(f64, f64) -> f64,
{
    let bnd = &basis.dofs.boundary;
    let nb = bnd.len();
    let mut slot = vec![usize::MAX; basis.num_dofs()];
    for (k, &d) in bnd.iter().enumerate() {
        slot[d] = k;
    }
    let mut gram = DMatrix::<f64>::zeros(nb, nb);
    let mut rhs = DVector::<f64>::zeros(nb);
    for_each_boundary_point(domain, basis, quad, |dofs, phys, x, w| {
        let gv = g0(x[0], x[1]);
        for (a, &da) in dofs.iter().enumerate() {
            let ka = slot[da];
            if ka == usize::MAX {
                continue;
            }
            rhs[ka] += w * gv * phys[a].f;
            for (b, &db) in dofs.iter().enumerate() {
                let kb = slot[db];
                if kb != usize::MAX {
                    gram[(ka, kb)] += w * phys[a].f * phys[b].f;
                }
            }
        }
    });
    let mut full = vec![0.0; basis.num_dofs()];
    if nb == 0 {
        return Ok(full);
    }
    let chol = gram.cholesky().ok_or(AssemblyError::SingularBoundaryGram)?;
    let c = chol.solve(&rhs);
    for (k, &d) in bnd.iter().enumerate() {
        full[d] = c[k];
    }
    Ok(full)
}

/// Eliminates the boundary DOFs: `A00 x = F0 - A0b gb`.
pub fn apply_essential_bc<G>(
    system: &DiscreteSystem,
    domain: &TwoPatchDomain,
    basis: &C1Basis,
    quad: &QuadratureRule,
    g0: G,
) -> Result<ReducedSystem, AssemblyError>
where
    G: Fn(f64, f64) -> f64,
{
    let lifting = boundary_projection(domain, basis, quad, g0)?;
    let free = basis.dofs.free.clone();
    let ag = system.matrix.matvec(&lifting);
    let rhs = free.iter().map(|&i| system.load[i] - ag[i]).collect();
    let matrix = system.matrix.submatrix(&free, &free);
    Ok(ReducedSystem { matrix, rhs, lifting, free })
}

/// Solves the reduced system and returns the full coefficient vector.
pub fn solve(reduced: &ReducedSystem, kind: SolverKind) -> Result<Vec<f64>, AssemblyError> {
    let x = solve_spd(&reduced.matrix, &reduced.rhs, kind)?;
    let mut full = reduced.lifting.clone();
    for (k, &i) in reduced.free.iter().enumerate() {
        full[i] = x[k];
    }
    Ok(full)
}

fn rel_residual(a: &CsrMatrix, x: &[f64], b: &[f64]) -> (f64, Vec<f64>) {
    let ax = a.matvec(x);
    let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    let nb = norm(b);
    let nr = norm(&r);
    (if nb > 0.0 { nr / nb } else { nr }, r)
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn diag_ratio(a: &CsrMatrix) -> f64 {
    let d = a.diagonal();
    let (mn, mx) = d.iter().fold((f64::INFINITY, 0.0f64), |(mn, mx), &v| (mn.min(v.abs()), mx.max(v.abs())));
    if mn > 0.0 { mx / mn } else { f64::INFINITY }
}

/// Solves a symmetric positive definite system to relative residual 1e-10.
pub fn solve_spd(a: &CsrMatrix, b: &[f64], kind: SolverKind) -> Result<Vec<f64>, AssemblyError> {
    let n = a.nrows;
    if n == 0 {
        return Ok(Vec::new());
    }
    if norm(b) == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let x = match kind {
        SolverKind::Direct => cholesky_solve(a, b)?,
        SolverKind::Cg => pcg(a, b, 1e-12, 20 * n + 1000)?,
    };
    let (res, _) = rel_residual(a, &x, b);
    if res > 1e-10 {
        return Err(AssemblyError::Residual { residual: res, diag_ratio: diag_ratio(a) });
    }
    Ok(x)
}

fn cholesky_solve(a: &CsrMatrix, b: &[f64]) -> Result<Vec<f64>, AssemblyError> {
    use faer::linalg::solvers::Solve;
    use faer::sparse::{SparseColMat, Triplet};
    let n = a.nrows;
    // symmetric: storing the rows as columns gives the same matrix
    let trip: Vec<Triplet<usize, usize, f64>> =
        a.triplets().into_iter().filter(|t| t.0 >= t.1).map(|(i, j, v)| Triplet::new(i, j, v)).collect();
    let m = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &trip)
        .map_err(|e| AssemblyError::Factorization(format!("{e:?}")))?;
    let llt = m
        .sp_cholesky(faer::Side::Lower)
        .map_err(|e| AssemblyError::Factorization(format!("{e:?} (diagonal ratio {:.3e})", diag_ratio(a))))?;
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    // one or two steps of iterative refinement keep the residual small
    for _ in 0..3 {
        let rhs = faer::Mat::<f64>::from_fn(n, 1, |i, _| r[i]);
        let dx = llt.solve(&rhs);
        for (i, xi) in x.iter_mut().enumerate() {
            *xi += dx[(i, 0)];
        }
        let (res, rr) = rel_residual(a, &x, b);
        r = rr;
        if res < 1e-13 {
            break;
        }
    }
    Ok(x)
}

/// Jacobi-preconditioned conjugate gradients.
pub fn pcg(a: &CsrMatrix, b: &[f64], tol: f64, max_iter: usize) -> Result<Vec<f64>, AssemblyError> {
    let n = a.nrows;
    let dinv: Vec<f64> = a.diagonal().iter().map(|&d| if d != 0.0 { 1.0 / d } else { 1.0 }).collect();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&dinv).map(|(ri, di)| ri * di).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let nb = norm(b);
    for it in 0..max_iter {
        let ap = a.matvec(&p);
        let pap: f64 = p.iter().zip(&ap).map(|(a, b)| a * b).sum();
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let res = norm(&r) / nb;
        if res < tol {
            return Ok(x);
        }
        if !res.is_finite() {
            return Err(AssemblyError::NoConvergence { iterations: it, residual: res });
        }
        for i in 0..n {
            z[i] = r[i] * dinv[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    let (res, _) = rel_residual(a, &x, b);
    if res < 1e-10 {
        return Ok(x);
    }
    Err(AssemblyError::NoConvergence { iterations: max_iter, residual: res })
}
