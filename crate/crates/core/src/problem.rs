//! Exact solutions with hand-derived derivatives, used as manufactured data.

use std::f64::consts::PI;

/// Value, gradient and Hessian of a function of `(x, y)`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Derivs2 {
    pub f: f64,
    pub gx: f64,
    pub gy: f64,
    pub hxx: f64,
    pub hxy: f64,
    pub hyy: f64,
}

impl Derivs2 {
    pub fn laplacian(&self) -> f64 {
        self.hxx + self.hyy
    }
}

/// A smooth function with the data of the biharmonic problem it solves:
/// `Δ²u = f` in the domain, `u = g0` and `Δu = g1` on the boundary.
pub trait ExactSolution: Sync {
    fn eval(&self, x: f64, y: f64) -> Derivs2;
    /// `Δ²u`.
    fn bilaplacian(&self, x: f64, y: f64) -> f64;
    fn laplacian(&self, x: f64, y: f64) -> f64 {
        self.eval(x, y).laplacian()
    }
}

/// `u = (cos(4πx) − 1)(cos(4πy) − 1)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct CosineBump;

const A: f64 = 4.0 * PI;

impl ExactSolution for CosineBump {
    fn eval(&self, x: f64, y: f64) -> Derivs2 {
        let (sx, cx) = (A * x).sin_cos();
        let (sy, cy) = (A * y).sin_cos();
        Derivs2 {
            f: (cx - 1.0) * (cy - 1.0),
            gx: -A * sx * (cy - 1.0),
            gy: -A * sy * (cx - 1.0),
            hxx: -A * A * cx * (cy - 1.0),
            hxy: A * A * sx * sy,
            hyy: -A * A * cy * (cx - 1.0),
        }
    }

    fn bilaplacian(&self, x: f64, y: f64) -> f64 {
        let (cx, cy) = ((A * x).cos(), (A * y).cos());
        A.powi(4) * (4.0 * cx * cy - cx - cy)
    }
}

/// Affine function `a + b x + c y`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Affine {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl ExactSolution for Affine {
    fn eval(&self, x: f64, y: f64) -> Derivs2 {
        Derivs2 { f: self.a + self.b * x + self.c * y, gx: self.b, gy: self.c, ..Default::default() }
    }

    fn bilaplacian(&self, _: f64, _: f64) -> f64 {
        0.0
    }
}

/// The zero function.
#[derive(Debug, Clone, Copy, Default)]
pub struct Zero;

impl ExactSolution for Zero {
    fn eval(&self, _: f64, _: f64) -> Derivs2 {
        Derivs2::default()
    }

    fn bilaplacian(&self, _: f64, _: f64) -> f64 {
        0.0
    }
}
