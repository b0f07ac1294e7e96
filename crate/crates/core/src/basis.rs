//! The approximately C1 space on a two-patch domain.
//!
//! The space is spanned by
//!
//! * interface functions `f_(j,+)` whose trace on the interface is the spline
//!   `b_j^+` and `f_(j,-)` with zero trace whose transversal derivative is
//!   `α̃^(S) b_j^-`, both living on the first two columns of u-basis
//!   functions of each patch;
//! * patch functions `b_i1(u) b_i2(v)` with `i1 >= 3` (1-based), which vanish
//!   with their first derivatives on the interface.
//!
//! The v-factors of interface functions are products of splines and live in
//! a lifted space of higher degree; they are computed by interpolation at
//! the Greville points of that space.

use crate::geometry::{Side, TwoPatchDomain};
use crate::gluing::{modify_beta_for_boundary, ApproxGluingData, GluingData, GluingError, GluingEval, GluingFn, SMOOTH_END_TOL};
use crate::spline::{BasisValues, MixedPattern, SplineError, SplineSpace1D};
use nalgebra::{DMatrix, DVector};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BasisError {
    #[error("interface degree {0} is too low, at least 3 is required")]
    Degree(usize),
    #[error(transparent)]
    Spline(#[from] SplineError),
    #[error(transparent)]
    Gluing(#[from] GluingError),
    #[error("patch needs at least 3 basis functions across the interface, got {0}")]
    TooFewFunctions(usize),
    #[error("product interpolation matrix is singular")]
    SingularInterpolation,
    #[error("interface function does not lie in the lifted space (residual {0:.3e})")]
    ProductNotRepresentable(f64),
}

/// Trace space `S+` and derivative space `S-` of the interface.
#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceSpaces {
    pub plus: SplineSpace1D,
    pub minus: SplineSpace1D,
}

/// Builds `S+ = S(p2, (p2-1, r̂2))` and `S- = S(p2-1, (p2-2, r̂2-1))` on `n`
/// elements with geometry knots every `k` elements (`k = n`: none).
pub fn build_interface_spaces(p2: usize, r_hat2: usize, n: usize, k: usize) -> Result<InterfaceSpaces, BasisError> {
    if p2 < 3 {
        return Err(BasisError::Degree(p2));
    }
    let plus = SplineSpace1D::with_pattern(p2, MixedPattern { r: p2 - 1, r_coarse: r_hat2, n, k })?;
    let minus = SplineSpace1D::with_pattern(
        p2 - 1,
        MixedPattern { r: p2 - 2, r_coarse: r_hat2.saturating_sub(1), n, k },
    )?;
    Ok(InterfaceSpaces { plus, minus })
}

/// Discretization spaces of both patches.
#[derive(Debug, Clone, PartialEq)]
pub struct PatchSpaces {
    /// u-direction space per side.
    pub u: [SplineSpace1D; 2],
    /// Common v-direction space.
    pub v: SplineSpace1D,
}

impl PatchSpaces {
    /// Degree `p` and regularity `r` on `n` elements per direction, keeping
    /// the geometry's knots with the geometry's regularity.
    pub fn new(domain: &TwoPatchDomain, p: usize, r: usize, n: usize) -> Result<Self, BasisError> {
        let make = |geo: MixedPattern| -> Result<SplineSpace1D, BasisError> {
            let (k, r_coarse) = coarse_layout(n, geo)?;
            Ok(SplineSpace1D::with_pattern(p, MixedPattern { r, r_coarse, n, k })?)
        };
        let u = [
            make(domain.patch(Side::Left).space.u.pattern())?,
            make(domain.patch(Side::Right).space.u.pattern())?,
        ];
        let v = make(domain.patch(Side::Left).space.v.pattern())?;
        Ok(Self { u, v })
    }
}

/// Fine-to-geometry element ratio and geometry regularity; `k = n` when
/// the geometry has no interior knots.
pub fn coarse_layout(n: usize, geo: MixedPattern) -> Result<(usize, usize), SplineError> {
    if geo.n == 0 || n % geo.n != 0 {
        return Err(SplineError::NonIntegerRatio { h: 1.0 / n as f64, h_coarse: 1.0 / geo.n.max(1) as f64 });
    }
    if geo.n == 1 {
        Ok((n, geo.r))
    } else {
        Ok((n / geo.n, geo.r))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum InterfaceKind {
    /// Trace function `(j,+)`.
    Plus,
    /// Derivative function `(j,-)`.
    Minus,
}

/// One primitive interface function with its lifted coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct InterfaceFn {
    pub kind: InterfaceKind,
    /// 0-based index into `S+` or `S-`.
    pub j: usize,
    /// `rows[side][iu]`: coefficients in the lifted v-space multiplying the
    /// u-basis function `iu` (0 or 1) of that side.
    pub rows: [[Vec<f64>; 2]; 2],
}

impl InterfaceFn {
    /// Parametric derivatives of this primitive function on `side`.
    pub fn eval(&self, basis: &C1Basis, side: Side, u: f64, v: f64) -> ParamDerivs {
        let su = &basis.patch_spaces.u[side.index()];
        let lifted = [self.rows[side.index()][0].as_slice(), self.rows[side.index()][1].as_slice()].concat();
        let pf = PatchFunction { side, interior: vec![0.0; su.dim() * basis.patch_spaces.v.dim()], lifted };
        pf.eval_on_element(basis, element_of(su, u), element_of(&basis.patch_spaces.v, v), u, v)
    }
}

/// What happens at an interface end.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EndKind {
    /// The boundary is smooth there; `psi` is the multiple of the end
    /// derivative function subtracted from the second trace function.
    Smooth { psi: f64 },
    Corner,
}

/// A basis function of the global space.
#[derive(Debug, Clone, PartialEq)]
pub enum DofKind {
    /// Combination of primitive interface functions.
    Interface(Vec<(usize, f64)>),
    /// Patch function `b_i1(u) b_i2(v)` (0-based, `i1 >= 2`).
    Patch { side: Side, i1: usize, i2: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dof {
    pub kind: DofKind,
    /// Nonzero trace on the domain boundary.
    pub boundary: bool,
}

/// Global enumeration of the basis with interior/boundary classification.
#[derive(Debug, Clone, PartialEq)]
pub struct DofMap {
    pub dofs: Vec<Dof>,
    /// Indices of DOFs with zero boundary trace, ascending.
    pub free: Vec<usize>,
    /// Indices of DOFs with nonzero boundary trace, ascending.
    pub boundary: Vec<usize>,
}

impl DofMap {
    pub fn len(&self) -> usize {
        self.dofs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dofs.is_empty()
    }
}

/// The assembled approximate C1 basis.
#[derive(Debug, Clone)]
pub struct C1Basis {
    pub spaces: InterfaceSpaces,
    pub patch_spaces: PatchSpaces,
    /// Lifted v-space holding the interface functions.
    pub lifted: SplineSpace1D,
    /// Gluing data actually used (after any boundary modification).
    pub gluing: ApproxGluingData,
    /// Primitive interface functions: all `(j,+)` then all `(j,-)`.
    pub interface: Vec<InterfaceFn>,
    pub ends: [EndKind; 2],
    pub dofs: DofMap,
    /// DOF index of patch function `(i1, i2)` per side, `usize::MAX` for
    /// `i1 < 2`.
    patch_dof: [Vec<usize>; 2],
    /// Per side, for lifted function `(iu, k)` at `iu * N* + k`: the DOFs it
    /// contributes to and with which coefficient.
    lifted_map: [Vec<Vec<(usize, f64)>>; 2],
}

/// Degree and regularity of the lifted v-space.
pub fn lifted_degree_regularity(p2: usize, p_tilde: usize, r_tilde: Option<usize>) -> (usize, usize) {
    let (pp, pm) = (p2, p2 - 1);
    let (rp, rm) = (p2 - 1, p2 - 2);
    let deg = pp.max(pp + p_tilde - 1).max(pm + p_tilde);
    let reg = r_tilde.unwrap_or(usize::MAX).min(rp - 1).min(rm);
    (deg, reg)
}

impl C1Basis {
    /// Builds interface functions, classifies the boundary ends, applies the
    /// beta modification or kernel combination at smooth ends, and numbers
    /// all DOFs.
    pub fn build(
        domain: &TwoPatchDomain,
        exact: &GluingData,
        approx: &ApproxGluingData,
        patch_spaces: PatchSpaces,
    ) -> Result<Self, BasisError> {
        let geo_v = domain.patch(Side::Left).space.v.pattern();
        let sv = &patch_spaces.v;
        let p2 = sv.degree();
        let n = sv.num_elements();
        let (k, r_hat2) = coarse_layout(n, geo_v)?;
        let spaces = build_interface_spaces(p2, r_hat2, n, k)?;
        for s in &patch_spaces.u {
            if s.dim() < 3 {
                return Err(BasisError::TooFewFunctions(s.dim()));
            }
        }

        // classify ends with the exact data
        let mut smooth = [false; 2];
        for end in 0..2 {
            let vb = end as f64;
            let fl = domain.patch(Side::Left).eval_unchecked(0.0, vb, 1);
            let fr = domain.patch(Side::Right).eval_unchecked(0.0, vb, 1);
            let scale = crate::geometry::norm2(fl.du) * crate::geometry::norm2(fr.du);
            smooth[end] = exact.beta_det(vb).abs() <= SMOOTH_END_TOL * scale;
        }
        let mut gluing = approx.clone();
        if let Some(first) = (0..2).find(|&e| smooth[e]) {
            gluing = modify_beta_for_boundary(&gluing, first)?;
        }

        let r_tilde = (!gluing.polynomial).then_some(gluing.r_tilde);
        let (p_star, r_star) = lifted_degree_regularity(p2, gluing.p_tilde, r_tilde);
        let r_coarse_star = if k == n { r_star } else { r_hat2.saturating_sub(1) };
        let lifted = SplineSpace1D::with_pattern(p_star, MixedPattern { r: r_star, r_coarse: r_coarse_star, n, k })?;

        let interface = build_interface_functions(&gluing, &spaces, &patch_spaces, &lifted)?;

        let (np, nm) = (spaces.plus.dim(), spaces.minus.dim());
        let mut ends = [EndKind::Corner; 2];
        for end in 0..2 {
            if smooth[end] {
                let vb = end as f64;
                let j2 = if end == 0 { 1 } else { np - 2 };
                let db = spaces.plus.eval_unchecked(vb, 1);
                let dj = db.get(1, j2 - db.first);
                let psi = gluing.beta_side(Side::Left, vb) * dj / gluing.alpha(Side::Left, vb);
                ends[end] = EndKind::Smooth { psi };
            }
        }

        // number the DOFs
        let mut dofs = Vec::new();
        for j in 0..np {
            let mut combo = vec![(j, 1.0)];
            let mut boundary = j == 0 || j == np - 1;
            for end in 0..2 {
                let j2 = if end == 0 { 1 } else { np - 2 };
                if j != j2 {
                    continue;
                }
                match ends[end] {
                    EndKind::Corner => boundary = true,
                    EndKind::Smooth { psi } => {
                        if psi != 0.0 {
                            let jm = if end == 0 { 0 } else { nm - 1 };
                            combo.push((np + jm, -psi));
                        }
                    }
                }
            }
            dofs.push(Dof { kind: DofKind::Interface(combo), boundary });
        }
        for j in 0..nm {
            dofs.push(Dof { kind: DofKind::Interface(vec![(np + j, 1.0)]), boundary: j == 0 || j == nm - 1 });
        }
        let mut patch_dof = [Vec::new(), Vec::new()];
        for side in Side::BOTH {
            let (n1, n2) = (patch_spaces.u[side.index()].dim(), sv.dim());
            let map = &mut patch_dof[side.index()];
            *map = vec![usize::MAX; n1 * n2];
            for i2 in 0..n2 {
                for i1 in 2..n1 {
                    map[i1 + n1 * i2] = dofs.len();
                    let boundary = i1 == n1 - 1 || i2 == 0 || i2 == n2 - 1;
                    dofs.push(Dof { kind: DofKind::Patch { side, i1, i2 }, boundary });
                }
            }
        }
        let free = (0..dofs.len()).filter(|&i| !dofs[i].boundary).collect();
        let boundary = (0..dofs.len()).filter(|&i| dofs[i].boundary).collect();
        let dof_map = DofMap { dofs, free, boundary };

        let mut lifted_map = [Vec::new(), Vec::new()];
        let ns = lifted.dim();
        for side in Side::BOTH {
            let mut map = vec![Vec::new(); 2 * ns];
            for (d, dof) in dof_map.dofs.iter().enumerate() {
                let DofKind::Interface(combo) = &dof.kind else { continue };
                for &(fi, c) in combo {
                    for iu in 0..2 {
                        for (kk, &val) in interface[fi].rows[side.index()][iu].iter().enumerate() {
                            if val != 0.0 {
                                map[iu * ns + kk].push((d, c * val));
                            }
                        }
                    }
                }
            }
            for entry in &mut map {
                merge_duplicates(entry);
            }
            lifted_map[side.index()] = map;
        }

        Ok(Self { spaces, patch_spaces, lifted, gluing, interface, ends, dofs: dof_map, patch_dof, lifted_map })
    }

    pub fn num_dofs(&self) -> usize {
        self.dofs.len()
    }

    /// DOF of patch function `(i1, i2)`, if it is one (`i1 >= 2`).
    pub fn patch_dof(&self, side: Side, i1: usize, i2: usize) -> Option<usize> {
        let n1 = self.patch_spaces.u[side.index()].dim();
        let d = self.patch_dof[side.index()][i1 + n1 * i2];
        (d != usize::MAX).then_some(d)
    }

    /// DOFs receiving lifted function `(iu, k)` of `side`, with coefficients.
    pub fn lifted_dofs(&self, side: Side, iu: usize, k: usize) -> &[(usize, f64)] {
        &self.lifted_map[side.index()][iu * self.lifted.dim() + k]
    }

    /// Number of homogeneous basis functions predicted from the end types.
    pub fn predicted_free_dim(&self) -> usize {
        let corners = self.ends.iter().filter(|e| matches!(e, EndKind::Corner)).count();
        let (np, nm) = (self.spaces.plus.dim(), self.spaces.minus.dim());
        let n2 = self.patch_spaces.v.dim();
        let patch: usize = self.patch_spaces.u.iter().map(|s| (s.dim() - 3) * (n2 - 2)).sum();
        (np - 2 - corners) + (nm - 2) + patch
    }

    /// Patch-wise coefficient representation of a global coefficient vector.
    pub fn to_patch_functions(&self, coefs: &[f64]) -> [PatchFunction; 2] {
        assert_eq!(coefs.len(), self.num_dofs());
        let ns = self.lifted.dim();
        Side::BOTH.map(|side| {
            let su = &self.patch_spaces.u[side.index()];
            let (n1, n2) = (su.dim(), self.patch_spaces.v.dim());
            let mut interior = vec![0.0; n1 * n2];
            for (idx, &d) in self.patch_dof[side.index()].iter().enumerate() {
                if d != usize::MAX {
                    interior[idx] = coefs[d];
                }
            }
            let mut lifted = vec![0.0; 2 * ns];
            for (idx, entries) in self.lifted_map[side.index()].iter().enumerate() {
                lifted[idx] = entries.iter().map(|&(d, c)| c * coefs[d]).sum();
            }
            PatchFunction { side, interior, lifted }
        })
    }

    /// Unit coefficient vector of one DOF.
    pub fn unit(&self, dof: usize) -> Vec<f64> {
        let mut c = vec![0.0; self.num_dofs()];
        c[dof] = 1.0;
        c
    }
}

fn merge_duplicates(entry: &mut Vec<(usize, f64)>) {
    entry.sort_by_key(|e| e.0);
    let mut out: Vec<(usize, f64)> = Vec::with_capacity(entry.len());
    for &(d, c) in entry.iter() {
        match out.last_mut() {
            Some(last) if last.0 == d => last.1 += c,
            _ => out.push((d, c)),
        }
    }
    *entry = out;
}

/// Computes the lifted coefficients of every primitive interface function.
pub fn build_interface_functions(
    gluing: &ApproxGluingData,
    spaces: &InterfaceSpaces,
    patch_spaces: &PatchSpaces,
    lifted: &SplineSpace1D,
) -> Result<Vec<InterfaceFn>, BasisError> {
    let pts = lifted.greville();
    let ns = lifted.dim();
    let mut colloc = DMatrix::<f64>::zeros(ns, ns);
    for (i, &x) in pts.iter().enumerate() {
        let b = lifted.eval_unchecked(x, 0);
        for j in 0..b.len() {
            colloc[(i, b.first + j)] = b.get(0, j);
        }
    }
    let lu = colloc.clone().lu();
    if !lu.is_invertible() {
        return Err(BasisError::SingularInterpolation);
    }
    let interp = |f: &dyn Fn(f64) -> f64| -> Vec<f64> {
        let rhs = DVector::from_iterator(ns, pts.iter().map(|&x| f(x)));
        let sol = lu.solve(&rhs).expect("checked invertible");
        let scale = sol.amax();
        sol.iter().map(|&c| if c.abs() <= 1e-15 * scale { 0.0 } else { c }).collect()
    };
    // u-scaling h1/p1 per side: makes (h1/p1) b'_{1,2}(0) = 1
    let scale_u: [f64; 2] = Side::BOTH.map(|s| {
        let b = patch_spaces.u[s.index()].eval_unchecked(0.0, 1);
        1.0 / b.get(1, 1)
    });

    let mut out = Vec::with_capacity(spaces.plus.dim() + spaces.minus.dim());
    for j in 0..spaces.plus.dim() {
        let bj = |x: f64, d: usize| {
            let b = spaces.plus.eval_unchecked(x, d);
            if j >= b.first && j < b.first + b.len() { b.get(d, j - b.first) } else { 0.0 }
        };
        let trace = interp(&|x| bj(x, 0));
        let rows = Side::BOTH.map(|side| {
            let beta = GluingFn::beta(side);
            let prod = interp(&|x| gluing.eval(beta, x, 0) * bj(x, 1));
            let second: Vec<f64> =
                trace.iter().zip(&prod).map(|(t, q)| t + scale_u[side.index()] * q).collect();
            [trace.clone(), second]
        });
        out.push(InterfaceFn { kind: InterfaceKind::Plus, j, rows });
    }
    for j in 0..spaces.minus.dim() {
        let bj = |x: f64| {
            let b = spaces.minus.eval_unchecked(x, 0);
            if j >= b.first && j < b.first + b.len() { b.get(0, j - b.first) } else { 0.0 }
        };
        let rows = Side::BOTH.map(|side| {
            let alpha = GluingFn::alpha(side);
            let prod = interp(&|x| gluing.eval(alpha, x, 0) * bj(x));
            let second: Vec<f64> = prod.iter().map(|q| scale_u[side.index()] * q).collect();
            [vec![0.0; ns], second]
        });
        out.push(InterfaceFn { kind: InterfaceKind::Minus, j, rows });
    }
    verify_products(gluing, spaces, lifted, &out, scale_u[0])?;
    Ok(out)
}

/// Spot-checks the left-side interpolants between the interpolation
/// points; a product outside the lifted space shows up as a mismatch.
fn verify_products(
    gluing: &ApproxGluingData,
    spaces: &InterfaceSpaces,
    lifted: &SplineSpace1D,
    funcs: &[InterfaceFn],
    scale_l: f64,
) -> Result<(), BasisError> {
    let mut worst: f64 = 0.0;
    for e in 0..lifted.num_elements() {
        let (a, b) = lifted.element(e);
        for t in [0.173, 0.619] {
            let x = a + t * (b - a);
            let bl = lifted.eval_unchecked(x, 0);
            let bp = spaces.plus.eval_unchecked(x, 1);
            let bm = spaces.minus.eval_unchecked(x, 0);
            let local = |bv: &BasisValues, j: usize, d: usize| {
                j.checked_sub(bv.first).filter(|&jj| jj < bv.len()).map_or(0.0, |jj| bv.get(d, jj))
            };
            for f in funcs {
                let (trace, prod) = match f.kind {
                    InterfaceKind::Plus => (
                        local(&bp, f.j, 0),
                        gluing.eval(GluingFn::BetaL, x, 0) * local(&bp, f.j, 1),
                    ),
                    InterfaceKind::Minus => (0.0, gluing.eval(GluingFn::AlphaL, x, 0) * local(&bm, f.j, 0)),
                };
                let row = &f.rows[0];
                let got_trace = dot_local(&bl, &row[0]);
                let got_prod = (dot_local(&bl, &row[1]) - got_trace) / scale_l;
                worst = worst.max((got_trace - trace).abs());
                worst = worst.max((got_prod - prod).abs() / (1.0 + prod.abs()));
            }
        }
    }
    if worst > 1e-8 {
        return Err(BasisError::ProductNotRepresentable(worst));
    }
    Ok(())
}

fn dot_local(b: &BasisValues, coefs: &[f64]) -> f64 {
    (0..b.len()).map(|j| coefs[b.first + j] * b.get(0, j)).sum()
}

/// Second-order parametric derivatives of a scalar function.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ParamDerivs {
    pub f: f64,
    pub fu: f64,
    pub fv: f64,
    pub fuu: f64,
    pub fuv: f64,
    pub fvv: f64,
}

/// A discrete function restricted to one patch: coefficients of the
/// patch functions (`i1 >= 2`, zero elsewhere) and of the lifted interface
/// part.
#[derive(Debug, Clone, PartialEq)]
pub struct PatchFunction {
    pub side: Side,
    pub interior: Vec<f64>,
    pub lifted: Vec<f64>,
}

impl PatchFunction {
    /// Parametric derivatives at `(u, v)`, using the polynomial pieces of
    /// element `(e1, e2)`.
    pub fn eval_on_element(&self, basis: &C1Basis, e1: usize, e2: usize, u: f64, v: f64) -> ParamDerivs {
        let su = &basis.patch_spaces.u[self.side.index()];
        let bu = su.eval_on_element(e1, u, 2);
        let bv = basis.patch_spaces.v.eval_on_element(e2, v, 2);
        let bl = basis.lifted.eval_on_element(e2, v, 2);
        self.combine(basis, &bu, &bv, &bl)
    }

    pub fn combine(&self, basis: &C1Basis, bu: &BasisValues, bv: &BasisValues, bl: &BasisValues) -> ParamDerivs {
        let n1 = basis.patch_spaces.u[self.side.index()].dim();
        let ns = basis.lifted.dim();
        let mut out = ParamDerivs::default();
        for a in 0..bu.len() {
            let i1 = bu.first + a;
            let (n0, n1d, n2d) = (bu.get(0, a), bu.get(1, a), bu.get(2, a));
            if i1 >= 2 {
                for b in 0..bv.len() {
                    let c = self.interior[i1 + n1 * (bv.first + b)];
                    if c != 0.0 {
                        accumulate(&mut out, c, n0, n1d, n2d, bv.get(0, b), bv.get(1, b), bv.get(2, b));
                    }
                }
            } else {
                for b in 0..bl.len() {
                    let c = self.lifted[i1 * ns + bl.first + b];
                    if c != 0.0 {
                        accumulate(&mut out, c, n0, n1d, n2d, bl.get(0, b), bl.get(1, b), bl.get(2, b));
                    }
                }
            }
        }
        out
    }
}

#[inline]
#[allow(clippy::too_many_arguments)]
fn accumulate(out: &mut ParamDerivs, c: f64, n0: f64, n1: f64, n2: f64, m0: f64, m1: f64, m2: f64) {
    out.f += c * n0 * m0;
    out.fu += c * n1 * m0;
    out.fv += c * n0 * m1;
    out.fuu += c * n2 * m0;
    out.fuv += c * n1 * m1;
    out.fvv += c * n0 * m2;
}

/// Element index containing `x` (right-continuous, last element at 1).
pub fn element_of(space: &SplineSpace1D, x: f64) -> usize {
    let n = space.num_elements();
    ((x * n as f64).floor() as usize).min(n - 1)
}

/// Convenience: evaluate a global coefficient vector on `side` at `(u, v)`.
pub fn eval_global(basis: &C1Basis, coefs: &[f64], side: Side, u: f64, v: f64) -> ParamDerivs {
    let pf = &basis.to_patch_functions(coefs)[side.index()];
    let e1 = element_of(&basis.patch_spaces.u[side.index()], u);
    let e2 = element_of(&basis.patch_spaces.v, v);
    pf.eval_on_element(basis, e1, e2, u, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interface_space_dimensions() {
        let s = build_interface_spaces(3, 0, 4, 4).unwrap();
        assert_eq!(s.plus.dim(), 3 + 1 + 3);
        assert_eq!(s.minus.dim(), 2 + 1 + 3);
        let s5 = build_interface_spaces(5, 0, 4, 4).unwrap();
        assert_eq!((s5.plus.degree(), s5.plus.pattern().r), (5, 4));
        assert_eq!((s5.minus.degree(), s5.minus.pattern().r), (4, 3));
        assert!(matches!(build_interface_spaces(2, 0, 4, 4), Err(BasisError::Degree(2))));
    }

    #[test]
    fn lifted_degrees() {
        assert_eq!(lifted_degree_regularity(3, 2, Some(1)), (4, 1));
        assert_eq!(lifted_degree_regularity(5, 3, Some(2)), (7, 2));
        assert_eq!(lifted_degree_regularity(3, 1, None), (3, 1));
    }
}
