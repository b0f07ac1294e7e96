//! Gauss-Legendre rules.

use std::f64::consts::PI;

/// Gauss-Legendre nodes and weights on `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// `g`-point rule, exact for polynomials of degree `2g - 1`.
    pub fn new(g: usize) -> Self {
        assert!(g >= 1, "a Gauss rule needs at least one point");
        let mut nodes = vec![0.0; g];
        let mut weights = vec![0.0; g];
        let m = g.div_ceil(2);
        for i in 0..m {
            // Newton iteration on P_g from the Chebyshev-like initial guess
            let mut z = (PI * (i as f64 + 0.75) / (g as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(g, z);
                dp = d;
                let dz = p / d;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(g, z);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            nodes[i] = 0.5 * (1.0 - z);
            nodes[g - 1 - i] = 0.5 * (1.0 + z);
            weights[i] = 0.5 * w;
            weights[g - 1 - i] = 0.5 * w;
        }
        Self { nodes, weights }
    }

    /// Smallest rule integrating polynomials of `degree` exactly.
    pub fn for_degree(degree: usize) -> Self {
        Self::new(degree / 2 + 1)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let len = b - a;
        self.nodes.iter().zip(&self.weights).map(move |(&x, &w)| (a + len * x, len * w))
    }
}

/// `P_n(z)` and `P_n'(z)` by the three-term recurrence.
fn legendre(n: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn four_points_integrate_degree_seven() {
        let g = GaussRule::new(4);
        let s: f64 = g.nodes.iter().zip(&g.weights).map(|(x, w)| w * x.powi(6)).sum();
        assert!((s - 1.0 / 7.0).abs() < 1e-15);
        let s7: f64 = g.nodes.iter().zip(&g.weights).map(|(x, w)| w * x.powi(7)).sum();
        assert!((s7 - 1.0 / 8.0).abs() < 1e-15);
    }

    #[test]
    fn weights_sum_to_one() {
        for g in 1..=20 {
            let r = GaussRule::new(g);
            let s: f64 = r.weights.iter().sum();
            assert!((s - 1.0).abs() < 1e-14, "g = {g}");
            assert!(r.nodes.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn degree_selection() {
        assert_eq!(GaussRule::for_degree(6).len(), 4);
        assert_eq!(GaussRule::for_degree(7).len(), 4);
        assert_eq!(GaussRule::for_degree(8).len(), 5);
    }
}
