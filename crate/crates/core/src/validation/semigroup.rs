//! Numerical check that heat kernels compose: diffusing for `t_q - t_p`
//! and then for `t - t_q` is the same as diffusing for `t - t_p`.

use crate::error::{Error, Result};
use crate::solver::green_1d;

/// Trapezoid-rule value of `(G(·, d1) ∗ G(·, d2))(x)` in one dimension.
pub fn convolve_gaussians_1d(kappa: f64, d1: f64, d2: f64, x: f64, nodes: usize) -> f64 {
    let s = (2.0 * kappa * d1.max(d2)).sqrt();
    let half = 12.0 * s + x.abs();
    let h = 2.0 * half / (nodes - 1) as f64;
    let mut acc = 0.0;
    for i in 0..nodes {
        let xi = -half + i as f64 * h;
        let w = if i == 0 || i + 1 == nodes { 0.5 } else { 1.0 };
        acc += w * green_1d(xi, d1, kappa) * green_1d(x - xi, d2, kappa);
    }
    acc * h
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemigroupReport {
    /// Largest 1-D deviation divided by the 1-D peak.
    pub max_rel_1d: f64,
    /// Largest deviation of the 3-D product along a probe line, divided by
    /// the 3-D peak.
    pub max_rel_3d: f64,
}

impl SemigroupReport {
    pub fn max_rel(&self) -> f64 {
        self.max_rel_1d.max(self.max_rel_3d)
    }
}

/// Compares the numerical convolution of the kernels for `t - t_q` and
/// `t_q - t_p` with the closed-form kernel for `t - t_p` on a probe line.
pub fn semigroup_audit(kappa: f64, t_p: f64, t_q: f64, t: f64) -> Result<SemigroupReport> {
    if !(t_p < t_q && t_q < t) {
        return Err(Error::Validation(format!("need t_p < t_q < t, got {t_p}, {t_q}, {t}")));
    }
    if !(kappa > 0.0) {
        return Err(Error::Validation("kappa must be positive".into()));
    }
    let (d1, d2, d) = (t - t_q, t_q - t_p, t - t_p);
    let s = (2.0 * kappa * d).sqrt();
    let nodes = 4001;
    let peak1 = green_1d(0.0, d, kappa);
    let c0 = convolve_gaussians_1d(kappa, d1, d2, 0.0, nodes);
    let mut max_1d = 0.0f64;
    let mut max_3d = 0.0f64;
    for i in 0..=80 {
        let x = -4.0 * s + 8.0 * s * i as f64 / 80.0;
        let c = convolve_gaussians_1d(kappa, d1, d2, x, nodes);
        let exact = green_1d(x, d, kappa);
        max_1d = max_1d.max((c - exact).abs() / peak1);
        // the 3-D kernel factorises; probe along x through the origin
        let c3 = c * c0 * c0;
        let e3 = exact * peak1 * peak1;
        max_3d = max_3d.max((c3 - e3).abs() / peak1.powi(3));
    }
    Ok(SemigroupReport {
        max_rel_1d: max_1d,
        max_rel_3d: max_3d,
    })
}
