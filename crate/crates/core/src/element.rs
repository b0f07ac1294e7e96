//! Element-level evaluation of the global basis and the pull-back to
//! physical coordinates.

use crate::basis::{C1Basis, ParamDerivs};
use crate::geometry::{PatchPoint, Side, TwoPatchDomain};
use crate::spline::BasisValues;

/// Physical value, gradient and Hessian.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PhysDerivs {
    pub f: f64,
    pub gx: f64,
    pub gy: f64,
    pub hxx: f64,
    pub hxy: f64,
    pub hyy: f64,
}

impl PhysDerivs {
    pub fn laplacian(&self) -> f64 {
        self.hxx + self.hyy
    }
}

/// Chain rule up to second order. Returns `None` for a singular Jacobian.
pub fn to_physical(d: &ParamDerivs, g: &PatchPoint) -> Option<PhysDerivs> {
    let (xu, yu, xv, yv) = (g.du[0], g.du[1], g.dv[0], g.dv[1]);
    let det = xu * yv - xv * yu;
    if det.abs() < 1e-300 || !det.is_finite() {
        return None;
    }
    // J = [[xu, xv], [yu, yv]], Jinv = [[yv, -xv], [-yu, xu]] / det
    let (i00, i01, i10, i11) = (yv / det, -xv / det, -yu / det, xu / det);
    let gx = i00 * d.fu + i10 * d.fv;
    let gy = i01 * d.fu + i11 * d.fv;
    let c00 = d.fuu - gx * g.duu[0] - gy * g.duu[1];
    let c01 = d.fuv - gx * g.duv[0] - gy * g.duv[1];
    let c11 = d.fvv - gx * g.dvv[0] - gy * g.dvv[1];
    // H = Jinv^T C Jinv
    let hxx = i00 * (c00 * i00 + c01 * i10) + i10 * (c01 * i00 + c11 * i10);
    let hxy = i00 * (c00 * i01 + c01 * i11) + i10 * (c01 * i01 + c11 * i11);
    let hyy = i01 * (c00 * i01 + c01 * i11) + i11 * (c01 * i01 + c11 * i11);
    Some(PhysDerivs { f: d.f, gx, gy, hxx, hxy, hyy })
}

/// One tensor-product function active on an element.
#[derive(Debug, Clone)]
struct RawFn {
    /// Local u index into the element's u-basis values.
    a: usize,
    /// Local v index; into the lifted basis if `lifted`.
    b: usize,
    lifted: bool,
    /// (local DOF slot, coefficient).
    entries: Vec<(usize, f64)>,
}

/// Global DOFs supported on one element and how they are made of local
/// tensor-product functions.
#[derive(Debug, Clone)]
pub struct ElementBasis {
    pub side: Side,
    pub e1: usize,
    pub e2: usize,
    /// Global DOF index of every local slot.
    pub dofs: Vec<usize>,
    raw: Vec<RawFn>,
}

impl ElementBasis {
    pub fn new(basis: &C1Basis, side: Side, e1: usize, e2: usize) -> Self {
        let su = &basis.patch_spaces.u[side.index()];
        let sv = &basis.patch_spaces.v;
        let (um, vm) = (mid(su.element(e1)), mid(sv.element(e2)));
        let bu = su.eval_on_element(e1, um, 0);
        let bv = sv.eval_on_element(e2, vm, 0);
        let bl = basis.lifted.eval_on_element(e2, vm, 0);
        let mut dofs: Vec<usize> = Vec::new();
        let mut raw_tmp: Vec<(usize, usize, bool, Vec<(usize, f64)>)> = Vec::new();
        for a in 0..bu.len() {
            let i1 = bu.first + a;
            if i1 >= 2 {
                for b in 0..bv.len() {
                    if let Some(d) = basis.patch_dof(side, i1, bv.first + b) {
                        raw_tmp.push((a, b, false, vec![(d, 1.0)]));
                    }
                }
            } else {
                for b in 0..bl.len() {
                    let entries = basis.lifted_dofs(side, i1, bl.first + b);
                    if !entries.is_empty() {
                        raw_tmp.push((a, b, true, entries.to_vec()));
                    }
                }
            }
        }
        for (_, _, _, e) in &raw_tmp {
            dofs.extend(e.iter().map(|x| x.0));
        }
        dofs.sort_unstable();
        dofs.dedup();
        let raw = raw_tmp
            .into_iter()
            .map(|(a, b, lifted, e)| RawFn {
                a,
                b,
                lifted,
                entries: e.into_iter().map(|(d, c)| (dofs.binary_search(&d).unwrap(), c)).collect(),
            })
            .collect();
        Self { side, e1, e2, dofs, raw }
    }

    pub fn len(&self) -> usize {
        self.dofs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dofs.is_empty()
    }

    /// Parametric derivatives of every local DOF at `(u, v)` and the
    /// geometry there.
    pub fn eval(&self, basis: &C1Basis, domain: &TwoPatchDomain, u: f64, v: f64) -> (Vec<ParamDerivs>, PatchPoint) {
        let su = &basis.patch_spaces.u[self.side.index()];
        let bu = su.eval_on_element(self.e1, u, 2);
        let bv = basis.patch_spaces.v.eval_on_element(self.e2, v, 2);
        let bl = basis.lifted.eval_on_element(self.e2, v, 2);
        let geo = domain.patch(self.side).eval_unchecked(u, v, 2);
        (self.combine(&bu, &bv, &bl), geo)
    }

    fn combine(&self, bu: &BasisValues, bv: &BasisValues, bl: &BasisValues) -> Vec<ParamDerivs> {
        let mut out = vec![ParamDerivs::default(); self.dofs.len()];
        for r in &self.raw {
            let bvv = if r.lifted { bl } else { bv };
            let (n0, n1, n2) = (bu.get(0, r.a), bu.get(1, r.a), bu.get(2, r.a));
            let (m0, m1, m2) = (bvv.get(0, r.b), bvv.get(1, r.b), bvv.get(2, r.b));
            let d = ParamDerivs { f: n0 * m0, fu: n1 * m0, fv: n0 * m1, fuu: n2 * m0, fuv: n1 * m1, fvv: n0 * m2 };
            for &(l, c) in &r.entries {
                let o = &mut out[l];
                o.f += c * d.f;
                o.fu += c * d.fu;
                o.fv += c * d.fv;
                o.fuu += c * d.fuu;
                o.fuv += c * d.fuv;
                o.fvv += c * d.fvv;
            }
        }
        out
    }
}

fn mid((a, b): (f64, f64)) -> f64 {
    0.5 * (a + b)
}

/// Boundary edges of a patch in the interface convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Edge {
    /// `u = 1`, the edge opposite the interface.
    Outer,
    /// `v = 0`.
    Bottom,
    /// `v = 1`.
    Top,
}

impl Edge {
    pub const ALL: [Edge; 3] = [Edge::Outer, Edge::Bottom, Edge::Top];

    /// Parameter point on the edge at edge parameter `s`.
    pub fn point(self, s: f64) -> (f64, f64) {
        match self {
            Edge::Outer => (1.0, s),
            Edge::Bottom => (s, 0.0),
            Edge::Top => (s, 1.0),
        }
    }

    /// Element indices `(e1, e2)` touching the edge at edge element `e`.
    pub fn element(self, e: usize, n1: usize, n2: usize) -> (usize, usize) {
        match self {
            Edge::Outer => (n1 - 1, e),
            Edge::Bottom => (e, 0),
            Edge::Top => (e, n2 - 1),
        }
    }

    /// Arc-length factor and outward unit normal at a geometry point.
    pub fn metric(self, g: &PatchPoint) -> (f64, [f64; 2]) {
        let (tangent, inward) = match self {
            Edge::Outer => (g.dv, [-g.du[0], -g.du[1]]),
            Edge::Bottom => (g.du, g.dv),
            Edge::Top => (g.du, [-g.dv[0], -g.dv[1]]),
        };
        let ds = tangent[0].hypot(tangent[1]);
        let mut n = [tangent[1] / ds, -tangent[0] / ds];
        if n[0] * inward[0] + n[1] * inward[1] > 0.0 {
            n = [-n[0], -n[1]];
        }
        (ds, n)
    }
}
