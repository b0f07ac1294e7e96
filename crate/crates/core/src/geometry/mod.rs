//! Two-patch planar spline geometries.
//!
//! Both patches are parametrized so that the interface is the edge `u = 0`,
//! traversed by `v` in the same direction. The left patch has a negative
//! Jacobian determinant and the right patch a positive one.

mod catalog;
mod io;

pub use catalog::{catalog, CATALOG_NAMES};
pub use io::{load_geometry, parse_geometry, save_geometry, write_geometry};

use crate::spline::{KnotVector, MixedPattern, SplineError, SplineSpace1D, TensorSplineSpace};
use thiserror::Error;

/// Absolute tolerance for the C0 interface check.
pub const C0_TOL: f64 = 1e-12;

/// Resolution of the sampling grid used for the regularity check.
const REGULARITY_SAMPLES: usize = 101;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Spline(#[from] SplineError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("control net has {got} points, expected {expected}")]
    NetSize { got: usize, expected: usize },
    #[error("knot vector is not a uniform mesh with a single interior multiplicity")]
    NonUniformKnots,
    #[error("interface v-spaces of the two patches differ")]
    InterfaceSpaceMismatch,
    #[error("patches do not meet continuously along the interface (gap {gap:.3e})")]
    C0Mismatch { gap: f64 },
    #[error("no orientation of the patches puts a shared edge at u = 0 of both")]
    NoSharedEdge,
    #[error("geometry map of the {side} patch is singular or wrongly oriented near (u, v) = ({u}, {v})")]
    Singular { side: Side, u: f64, v: f64 },
    #[error("interface tangent degenerates at v = {v}")]
    DegenerateTangent { v: f64 },
    #[error("geometry is only C{regularity} across interior v-knots; C1 gluing data needs C2")]
    RoughInterface { regularity: usize },
    #[error("geometry is only C0 across interior u-knots")]
    RoughPatch,
    #[error("parameter ({u}, {v}) outside the unit square")]
    OutOfRange { u: f64, v: f64 },
    #[error("unknown catalog geometry `{0}` (expected one of ex1, ex2, ex3, ex4)")]
    UnknownCatalog(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Left, Side::Right];

    pub fn index(self) -> usize {
        match self {
            Side::Left => 0,
            Side::Right => 1,
        }
    }

    pub fn other(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Side::Left => "L",
            Side::Right => "R",
        }
    }
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Side::Left => "left",
            Side::Right => "right",
        })
    }
}

pub type Vec2 = [f64; 2];

#[inline]
pub fn det2(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub fn dot2(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub fn norm2(a: Vec2) -> f64 {
    a[0].hypot(a[1])
}

/// Geometry map and its partial derivatives at one parameter point.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PatchPoint {
    pub x: Vec2,
    pub du: Vec2,
    pub dv: Vec2,
    pub duu: Vec2,
    pub duv: Vec2,
    pub dvv: Vec2,
}

impl PatchPoint {
    pub fn jacobian_det(&self) -> f64 {
        det2(self.du, self.dv)
    }
}

/// One tensor-product spline patch.
#[derive(Debug, Clone, PartialEq)]
pub struct Patch {
    pub space: TensorSplineSpace,
    /// Control points, `i1` fastest.
    pub net: Vec<Vec2>,
    pub side: Side,
}

impl Patch {
    pub fn new(space: TensorSplineSpace, net: Vec<Vec2>, side: Side) -> Result<Self, GeometryError> {
        if net.len() != space.dim() {
            return Err(GeometryError::NetSize { got: net.len(), expected: space.dim() });
        }
        Ok(Self { space, net, side })
    }

    /// Geometry degrees in u and v.
    pub fn degrees(&self) -> (usize, usize) {
        (self.space.u.degree(), self.space.v.degree())
    }

    pub fn eval(&self, u: f64, v: f64, deriv_order: usize) -> Result<PatchPoint, GeometryError> {
        let inside = |t: f64| (-1e-13..=1.0 + 1e-13).contains(&t);
        if !inside(u) || !inside(v) {
            return Err(GeometryError::OutOfRange { u, v });
        }
        Ok(self.eval_unchecked(u.clamp(0.0, 1.0), v.clamp(0.0, 1.0), deriv_order))
    }

    pub fn eval_unchecked(&self, u: f64, v: f64, deriv_order: usize) -> PatchPoint {
        let bu = self.space.u.eval_unchecked(u, deriv_order);
        let bv = self.space.v.eval_unchecked(v, deriv_order);
        self.combine(&bu, &bv, deriv_order)
    }

    /// Evaluates from precomputed univariate basis values.
    pub fn combine(
        &self,
        bu: &crate::spline::BasisValues,
        bv: &crate::spline::BasisValues,
        deriv_order: usize,
    ) -> PatchPoint {
        let n1 = self.space.u.dim();
        let mut pt = PatchPoint::default();
        let d = deriv_order.min(2);
        for b in 0..bv.len() {
            let i2 = bv.first + b;
            for a in 0..bu.len() {
                let i1 = bu.first + a;
                let c = self.net[i1 + n1 * i2];
                let n0 = bu.get(0, a);
                let m0 = bv.get(0, b);
                let w = n0 * m0;
                add(&mut pt.x, c, w);
                if d >= 1 {
                    add(&mut pt.du, c, bu.get(1, a) * m0);
                    add(&mut pt.dv, c, n0 * bv.get(1, b));
                }
                if d >= 2 {
                    add(&mut pt.duu, c, bu.get(2, a) * m0);
                    add(&mut pt.duv, c, bu.get(1, a) * bv.get(1, b));
                    add(&mut pt.dvv, c, n0 * bv.get(2, b));
                }
            }
        }
        pt
    }

    /// Reparametrizes by a symmetry of the unit square: optional swap of the
    /// parameter directions followed by reversal of the new directions.
    pub fn transformed(&self, swap: bool, rev_u: bool, rev_v: bool) -> Result<Patch, GeometryError> {
        let (su, sv) = if swap {
            (self.space.v.clone(), self.space.u.clone())
        } else {
            (self.space.u.clone(), self.space.v.clone())
        };
        let su = if rev_u { reversed(&su)? } else { su };
        let sv = if rev_v { reversed(&sv)? } else { sv };
        let (n1, n2) = (su.dim(), sv.dim());
        let old_n1 = self.space.u.dim();
        let mut net = Vec::with_capacity(n1 * n2);
        for b in 0..n2 {
            for a in 0..n1 {
                let a2 = if rev_u { n1 - 1 - a } else { a };
                let b2 = if rev_v { n2 - 1 - b } else { b };
                let (i1, i2) = if swap { (b2, a2) } else { (a2, b2) };
                net.push(self.net[i1 + old_n1 * i2]);
            }
        }
        Patch::new(TensorSplineSpace::new(su, sv), net, self.side)
    }
}

#[inline]
fn add(acc: &mut Vec2, c: Vec2, w: f64) {
    acc[0] += w * c[0];
    acc[1] += w * c[1];
}

fn reversed(s: &SplineSpace1D) -> Result<SplineSpace1D, GeometryError> {
    let rev: Vec<f64> = s.knots().expanded().iter().rev().map(|t| 1.0 - t).collect();
    space_from_knots(s.degree(), &rev)
}

/// Turns an expanded knot list into a space, requiring a uniform mesh with
/// one interior multiplicity (the only geometry spaces supported).
pub fn space_from_knots(degree: usize, knots: &[f64]) -> Result<SplineSpace1D, GeometryError> {
    let kv = KnotVector::from_expanded(degree, knots)?;
    let bps = kv.breakpoints();
    let n = bps.len() - 1;
    let mults = &kv.multiplicities()[1..n];
    let m = mults.first().copied().unwrap_or(1);
    if mults.iter().any(|&x| x != m) {
        return Err(GeometryError::NonUniformKnots);
    }
    if bps.iter().enumerate().any(|(i, &b)| (b - i as f64 / n as f64).abs() > 1e-12) {
        return Err(GeometryError::NonUniformKnots);
    }
    // a single element is stored as the polynomial space
    let r = if n == 1 { degree } else { degree - m };
    let space = SplineSpace1D::with_pattern(degree, MixedPattern { r, r_coarse: r, n, k: 1 })?;
    Ok(space)
}

/// Interface frame at one parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Frame {
    pub t: Vec2,
    pub t0: Vec2,
    pub tau: f64,
    pub n: Vec2,
}

/// Outcome of the interface continuity check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct C0Report {
    pub max_gap: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoPatchDomain {
    patches: [Patch; 2],
}

impl TwoPatchDomain {
    /// Validates and wraps two patches already in interface convention.
    pub fn new(left: Patch, right: Patch) -> Result<Self, GeometryError> {
        let d = Self::new_unchecked(left, right);
        d.validate()?;
        Ok(d)
    }

    pub(crate) fn new_unchecked(mut left: Patch, mut right: Patch) -> Self {
        left.side = Side::Left;
        right.side = Side::Right;
        Self { patches: [left, right] }
    }

    pub fn patch(&self, side: Side) -> &Patch {
        &self.patches[side.index()]
    }

    pub fn patches(&self) -> &[Patch; 2] {
        &self.patches
    }

    /// Checks every structural invariant of a two-patch domain.
    pub fn validate(&self) -> Result<(), GeometryError> {
        let (l, r) = (self.patch(Side::Left), self.patch(Side::Right));
        if l.space.v.knots() != r.space.v.knots() {
            return Err(GeometryError::InterfaceSpaceMismatch);
        }
        let rep = self.check_c0_matching();
        if !rep.pass {
            return Err(GeometryError::C0Mismatch { gap: rep.max_gap });
        }
        let pv = l.space.v.pattern();
        if pv.n > 1 && pv.r < 2 {
            return Err(GeometryError::RoughInterface { regularity: pv.r });
        }
        for p in &self.patches {
            let pu = p.space.u.pattern();
            if pu.n > 1 && pu.r < 1 {
                return Err(GeometryError::RoughPatch);
            }
        }
        for p in &self.patches {
            check_regular(p)?;
        }
        for i in 0..=200 {
            let v = i as f64 / 200.0;
            let f = self.patch(Side::Left).eval_unchecked(0.0, v, 1);
            if norm2(f.dv) < 1e-12 {
                return Err(GeometryError::DegenerateTangent { v });
            }
        }
        Ok(())
    }

    /// Largest distance between the two interface curves, sampled at the
    /// Greville points of the interface space and a uniform grid.
    pub fn check_c0_matching(&self) -> C0Report {
        let mut samples = self.patch(Side::Left).space.v.greville();
        samples.extend((0..=200).map(|i| i as f64 / 200.0));
        let mut max_gap: f64 = 0.0;
        for v in samples {
            let a = self.patch(Side::Left).eval_unchecked(0.0, v, 0).x;
            let b = self.patch(Side::Right).eval_unchecked(0.0, v, 0).x;
            max_gap = max_gap.max(norm2([a[0] - b[0], a[1] - b[1]]));
        }
        C0Report { max_gap, pass: max_gap < C0_TOL }
    }

    /// Tangent, unit tangent, speed and unit normal (pointing from the left
    /// into the right patch) at interface parameter `v`.
    pub fn interface_frame(&self, v: f64) -> Result<Frame, GeometryError> {
        if !(0.0..=1.0).contains(&v) {
            return Err(GeometryError::OutOfRange { u: 0.0, v });
        }
        let f = self.patch(Side::Left).eval_unchecked(0.0, v, 1);
        let t = f.dv;
        let tau = norm2(t);
        if tau < 1e-12 {
            return Err(GeometryError::DegenerateTangent { v });
        }
        let t0 = [t[0] / tau, t[1] / tau];
        Ok(Frame { t, t0, tau, n: normal_from(f.du, t0) })
    }

    /// Normal built from the transversal derivative of the given side; it
    /// coincides for both sides.
    pub fn normal_from_side(&self, side: Side, v: f64) -> Result<Vec2, GeometryError> {
        let fr = self.interface_frame(v)?;
        let f = self.patch(side).eval_unchecked(0.0, v, 1);
        Ok(normal_from(f.du, fr.t0))
    }

    /// Physical point of the interface at parameter `v`.
    pub fn interface_point(&self, v: f64) -> Vec2 {
        self.patch(Side::Left).eval_unchecked(0.0, v, 0).x
    }

    /// Applies a symmetry to each patch and optionally exchanges the roles
    /// of the two patches; no validation.
    fn arranged(a: &Patch, b: &Patch, sa: (bool, bool, bool), sb: (bool, bool, bool)) -> Option<Self> {
        let pa = a.transformed(sa.0, sa.1, sa.2).ok()?;
        let pb = b.transformed(sb.0, sb.1, sb.2).ok()?;
        Some(Self::new_unchecked(pa, pb))
    }

    /// Finds a reparametrization that puts a shared edge at `u = 0` of both
    /// patches with consistent orientation, then validates.
    pub fn from_patches_any_orientation(a: Patch, b: Patch) -> Result<Self, GeometryError> {
        let syms: Vec<(bool, bool, bool)> = (0..8)
            .map(|k| (k & 4 != 0, k & 1 != 0, k & 2 != 0))
            .collect();
        for (first, second) in [(&a, &b), (&b, &a)] {
            for &sa in &syms {
                for &sb in &syms {
                    let Some(d) = Self::arranged(first, second, sa, sb) else { continue };
                    if d.quick_interface_check() {
                        d.validate()?;
                        return Ok(d);
                    }
                }
            }
        }
        // report the continuity gap of the untransformed pair when nothing fits
        let d = Self::new_unchecked(a, b);
        let rep = d.check_c0_matching();
        if !rep.pass && d.patch(Side::Left).space.v.knots() == d.patch(Side::Right).space.v.knots() {
            return Err(GeometryError::C0Mismatch { gap: rep.max_gap });
        }
        Err(GeometryError::NoSharedEdge)
    }

    /// Cheap test that the interface is shared, oriented and signed correctly.
    fn quick_interface_check(&self) -> bool {
        let (l, r) = (self.patch(Side::Left), self.patch(Side::Right));
        if l.space.v.knots() != r.space.v.knots() {
            return false;
        }
        for i in 0..=20 {
            let v = i as f64 / 20.0;
            let fl = l.eval_unchecked(0.0, v, 1);
            let fr = r.eval_unchecked(0.0, v, 1);
            let scale = 1.0 + norm2(fl.x);
            if norm2([fl.x[0] - fr.x[0], fl.x[1] - fr.x[1]]) > 1e-9 * scale {
                return false;
            }
        }
        let fl = l.eval_unchecked(0.0, 0.5, 1);
        let fr = r.eval_unchecked(0.0, 0.5, 1);
        det2(fl.du, fl.dv) < 0.0 && det2(fr.du, fl.dv) > 0.0
    }
}

/// Unit normal from a transversal derivative `du` and the unit tangent.
fn normal_from(du: Vec2, t0: Vec2) -> Vec2 {
    let dt = dot2(du, t0);
    let w = [du[0] - dt * t0[0], du[1] - dt * t0[1]];
    let d = det2(du, t0);
    [w[0] / d, w[1] / d]
}

/// The left patch must have negative Jacobian determinant and the right
/// patch positive, bounded away from zero on a dense grid.
fn check_regular(p: &Patch) -> Result<(), GeometryError> {
    let want = match p.side {
        Side::Left => -1.0,
        Side::Right => 1.0,
    };
    let m = REGULARITY_SAMPLES - 1;
    let mut scale: f64 = 0.0;
    let mut dets = Vec::with_capacity(REGULARITY_SAMPLES * REGULARITY_SAMPLES);
    for j in 0..=m {
        for i in 0..=m {
            let (u, v) = (i as f64 / m as f64, j as f64 / m as f64);
            let f = p.eval_unchecked(u, v, 1);
            scale = scale.max(norm2(f.du) * norm2(f.dv));
            dets.push((u, v, f.jacobian_det()));
        }
    }
    for (u, v, d) in dets {
        if !(want * d > 1e-10 * scale) {
            return Err(GeometryError::Singular { side: p.side, u, v });
        }
    }
    Ok(())
}

/// Bilinear patch from corner points `F(0,0), F(1,0), F(0,1), F(1,1)`.
pub fn bilinear_patch(c00: Vec2, c10: Vec2, c01: Vec2, c11: Vec2, side: Side) -> Patch {
    let s = SplineSpace1D::polynomial(1).expect("linear space");
    Patch::new(TensorSplineSpace::new(s.clone(), s), vec![c00, c10, c01, c11], side)
        .expect("four control points")
}
