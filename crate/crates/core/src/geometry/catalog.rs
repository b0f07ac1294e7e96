//! Built-in two-patch geometries.
//!
//! * `ex1`: unit square split by a straight slanted line into two bilinear
//!   patches. Its gluing data is linear.
//! * `ex2`: the same outline, split by an S-shaped cubic curve into two
//!   bicubic patches.
//! * `ex3`: quarter of a plate with a circular hole. The interface runs from
//!   the middle of the arc (smooth boundary) to the outer corner.
//! * `ex4`: a house-shaped domain with cubic B-spline patches having one
//!   interior C2 knot in the interface direction.

use super::{GeometryError, Patch, Side, TwoPatchDomain, Vec2};
use crate::spline::{make_uniform_space, SplineSpace1D, TensorSplineSpace};

pub const CATALOG_NAMES: [&str; 4] = ["ex1", "ex2", "ex3", "ex4"];

pub fn catalog(name: &str) -> Result<TwoPatchDomain, GeometryError> {
    match name {
        "ex1" => ex1(),
        "ex2" => ex2(),
        "ex3" => ex3(),
        "ex4" => ex4(),
        other => Err(GeometryError::UnknownCatalog(other.to_string())),
    }
}

fn ex1() -> Result<TwoPatchDomain, GeometryError> {
    let (a, b) = ([0.4, 0.0], [0.6, 1.0]);
    let l = super::bilinear_patch(a, [0.0, 0.0], b, [0.0, 1.0], Side::Left);
    let r = super::bilinear_patch(a, [1.0, 0.0], b, [1.0, 1.0], Side::Right);
    TwoPatchDomain::new(l, r)
}

fn ex2() -> Result<TwoPatchDomain, GeometryError> {
    let iface = vec![[0.5, 0.0], [0.62, 1.0 / 3.0], [0.38, 2.0 / 3.0], [0.5, 1.0]];
    let cubic = SplineSpace1D::polynomial(3)?;
    let mut patches = Vec::new();
    for (side, x_out, bump) in [(Side::Left, 0.0, [0.03, -0.04]), (Side::Right, 1.0, [0.05, 0.03])] {
        let outer = line(4, [x_out, 0.0], [x_out, 1.0]);
        let bottom = line(4, [0.5, 0.0], [x_out, 0.0]);
        let top = line(4, [0.5, 1.0], [x_out, 1.0]);
        let mut net = coons(&iface, &outer, &bottom, &top, &cubic.greville(), &cubic.greville());
        // bend the interior so the patches are not bilinearly blended
        net[1 + 4] = add(net[1 + 4], bump);
        net[2 + 4 * 2] = add(net[2 + 4 * 2], [-bump[1], bump[0]]);
        let space = TensorSplineSpace::new(cubic.clone(), cubic.clone());
        patches.push(Patch::new(space, net, side)?);
    }
    let r = patches.pop().unwrap();
    let l = patches.pop().unwrap();
    TwoPatchDomain::new(l, r)
}

fn ex3() -> Result<TwoPatchDomain, GeometryError> {
    let radius = 0.5;
    let c = std::f64::consts::FRAC_1_SQRT_2 * radius;
    let mid = [c, c];
    // cubic Bezier of a 45 degree arc: handle length 4/3 tan(pi/16) r
    let k = 4.0 / 3.0 * (std::f64::consts::PI / 16.0).tan() * radius;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let arc_right = vec![mid, [c + k * s, c - k * s], [radius, k], [radius, 0.0]];
    let arc_left = vec![mid, [c - k * s, c + k * s], [k, radius], [0.0, radius]];
    let iface = vec![mid, [0.6, 0.45], [0.85, 0.75], [1.0, 1.0]];
    let cubic = SplineSpace1D::polynomial(3)?;
    let g = cubic.greville();
    let build = |bottom: &[Vec2], outer: Vec<Vec2>, top: Vec<Vec2>, side| {
        let net = coons(&iface, &outer, bottom, &top, &g, &g);
        Patch::new(TensorSplineSpace::new(cubic.clone(), cubic.clone()), net, side)
    };
    // lower patch: interface, arc down to (r,0), bottom edge to (1,0), right edge up to the corner
    let r = build(&arc_right, line(4, [radius, 0.0], [1.0, 0.0]), line(4, [1.0, 1.0], [1.0, 0.0]), Side::Right)?;
    let l = build(&arc_left, line(4, [0.0, radius], [0.0, 1.0]), line(4, [1.0, 1.0], [0.0, 1.0]), Side::Left)?;
    TwoPatchDomain::new(l, r)
}

fn ex4() -> Result<TwoPatchDomain, GeometryError> {
    let sv = make_uniform_space(3, 2, 2)?;
    let su = SplineSpace1D::polynomial(3)?;
    let gv = sv.greville();
    let gu = su.greville();
    let apex = [0.5, 1.25];
    let iface = vec![[0.5, 0.0], [0.44, 0.3], [0.58, 0.65], [0.47, 0.95], apex];
    let mut patches = Vec::new();
    for (side, x_out) in [(Side::Left, 0.0), (Side::Right, 1.0)] {
        let outer: Vec<Vec2> = gv.iter().map(|&t| [x_out, t]).collect();
        let bottom = line(4, [0.5, 0.0], [x_out, 0.0]);
        let top = line(4, apex, [x_out, 1.0]);
        let net = coons(&iface, &outer, &bottom, &top, &gu, &gv);
        patches.push(Patch::new(TensorSplineSpace::new(su.clone(), sv.clone()), net, side)?);
    }
    let r = patches.pop().unwrap();
    let l = patches.pop().unwrap();
    TwoPatchDomain::new(l, r)
}

fn add(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] + b[0], a[1] + b[1]]
}

fn line(n: usize, a: Vec2, b: Vec2) -> Vec<Vec2> {
    (0..n)
        .map(|i| {
            let s = i as f64 / (n - 1) as f64;
            [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
        })
        .collect()
}

/// Discrete Coons net from the four boundary polygons (`u0`, `u1` indexed
/// by `i2`; `v0`, `v1` indexed by `i1`) blended at the Greville points.
fn coons(u0: &[Vec2], u1: &[Vec2], v0: &[Vec2], v1: &[Vec2], gu: &[f64], gv: &[f64]) -> Vec<Vec2> {
    let (n1, n2) = (v0.len(), u0.len());
    let mut net = Vec::with_capacity(n1 * n2);
    for j in 0..n2 {
        for i in 0..n1 {
            let (s, t) = (gu[i], gv[j]);
            let mut p = [0.0; 2];
            for d in 0..2 {
                p[d] = (1.0 - s) * u0[j][d] + s * u1[j][d] + (1.0 - t) * v0[i][d] + t * v1[i][d]
                    - ((1.0 - s) * (1.0 - t) * v0[0][d]
                        + s * (1.0 - t) * v0[n1 - 1][d]
                        + (1.0 - s) * t * v1[0][d]
                        + s * t * v1[n1 - 1][d]);
            }
            net.push(p);
        }
    }
    net
}
