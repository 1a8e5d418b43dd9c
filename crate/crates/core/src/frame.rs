//! Nondimensionalisation of one segment relative to one evaluation event.
//!
//! Lengths are scaled by `√2·σ`, times through `√(2κΔt)/σ`, speeds by
//! `σ/(2√2·κ)` and temperatures by `P/(√2·π^{3/2}·λ·σ)`.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};
use crate::material::MaterialParams;
use crate::path::Segment;

/// Which origin the barred position is measured from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FrameKind {
    /// Active segment: origin follows the beam, `x_i + v (t - t_i)`.
    Flux,
    /// Completed segment: origin is the segment end point `x_f`.
    Contribution,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionlessFrame {
    pub kind: FrameKind,
    /// Temperature scale in kelvin.
    pub temp_scale: f64,
    pub vbar: [f64; 2],
    pub xbar: f64,
    pub ybar: f64,
    pub zbar: f64,
    /// Elapsed time since `t_i` (flux) or since `t_f` (contribution).
    pub tbar: f64,
    /// Scaled segment duration.
    pub tbar_f: f64,
}

impl DimensionlessFrame {
    /// Magnitude of the scaled velocity.
    pub fn speed(&self) -> f64 {
        self.vbar[0].hypot(self.vbar[1])
    }
}

/// Temperature scale `P / (√2 π^{3/2} λ σ)`.
pub fn temperature_scale(power: f64, sigma: f64, material: &MaterialParams) -> f64 {
    power / (SQRT_2 * PI.powf(1.5) * material.lambda() * sigma)
}

/// Scaled speed `v σ / (2√2 κ)`.
pub fn scaled_speed(speed: f64, sigma: f64, material: &MaterialParams) -> f64 {
    speed * sigma / (2.0 * SQRT_2 * material.kappa())
}

/// Scaled time `√(2κΔt) / σ`.
pub fn scaled_time(dt: f64, sigma: f64, material: &MaterialParams) -> f64 {
    (2.0 * material.kappa() * dt).sqrt() / sigma
}

fn common(seg: &Segment, material: &MaterialParams) -> (f64, [f64; 2], f64, f64) {
    let sigma = seg.sigma();
    let vel = seg.velocity();
    let k = sigma / (2.0 * SQRT_2 * material.kappa());
    (
        temperature_scale(seg.power(), sigma, material),
        [vel[0] * k, vel[1] * k],
        SQRT_2 * sigma,
        scaled_time(seg.duration(), sigma, material),
    )
}

/// Frame for the segment active at `t ∈ (t_i, t_f]`.
pub fn flux_frame(seg: &Segment, material: &MaterialParams, point: [f64; 3], t: f64) -> Result<DimensionlessFrame> {
    if !(t > seg.t_i() && t <= seg.t_f()) {
        return Err(Error::Domain(format!(
            "flux frame needs t in ({}, {}], got {t}",
            seg.t_i(),
            seg.t_f()
        )));
    }
    let (temp_scale, vbar, len, tbar_f) = common(seg, material);
    let c = seg.position_at(t);
    Ok(DimensionlessFrame {
        kind: FrameKind::Flux,
        temp_scale,
        vbar,
        xbar: (point[0] - c[0]) / len,
        ybar: (point[1] - c[1]) / len,
        zbar: point[2] / len,
        tbar: scaled_time(t - seg.t_i(), seg.sigma(), material),
        tbar_f,
    })
}

/// Frame for a completed segment seen from `t > t_f`.
pub fn contribution_frame(
    seg: &Segment,
    material: &MaterialParams,
    point: [f64; 3],
    t: f64,
) -> Result<DimensionlessFrame> {
    if !(t > seg.t_f()) {
        return Err(Error::Domain(format!(
            "contribution frame needs t > {}, got {t}",
            seg.t_f()
        )));
    }
    let (temp_scale, vbar, len, tbar_f) = common(seg, material);
    let end = seg.end();
    Ok(DimensionlessFrame {
        kind: FrameKind::Contribution,
        temp_scale,
        vbar,
        xbar: (point[0] - end[0]) / len,
        ybar: (point[1] - end[1]) / len,
        zbar: point[2] / len,
        tbar: scaled_time(t - seg.t_f(), seg.sigma(), material),
        tbar_f,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn material() -> MaterialParams {
        MaterialParams::from_diffusivity(4430.0, 20.0, 8.4495e-6).unwrap()
    }

    fn example_segment(power: f64) -> Segment {
        Segment::traverse(0.0, [0.0, 0.0], [2.5e-3, 0.0], power, 1e-4, 1.0).unwrap()
    }

    #[test]
    fn example_scales() {
        let m = material();
        let f = flux_frame(&example_segment(100.0), &m, [1e-3, 0.0, 0.0], 1e-3).unwrap();
        // 100 / (sqrt(2) * pi^1.5 * 20 * 1e-4)
        assert!((f.temp_scale - 6349.3636).abs() < 1e-3, "{}", f.temp_scale);
        // 1e-4 / (2 sqrt(2) 8.4495e-6)
        assert!((f.vbar[0] - 4.184311).abs() < 1e-6, "{}", f.vbar[0]);
        assert_eq!(f.vbar[1], 0.0);
        assert_eq!(f.kind, FrameKind::Flux);
        // the beam is at the evaluation point
        assert!(f.xbar.abs() < 1e-12);
    }

    #[test]
    fn zero_power_zero_scale() {
        let f = flux_frame(&example_segment(0.0), &material(), [0.0; 3], 1e-3).unwrap();
        assert_eq!(f.temp_scale, 0.0);
    }

    #[test]
    fn contribution_duration_scale() {
        let c = contribution_frame(&example_segment(100.0), &material(), [0.0, 0.0, 0.0], 5e-3).unwrap();
        // sqrt(2 * 8.4495e-6 * 2.5e-3) / 1e-4
        assert!((c.tbar_f - 2.055420).abs() < 1e-6, "{}", c.tbar_f);
        assert_eq!(c.zbar, 0.0);
        assert!((c.xbar + 2.5e-3 / (SQRT_2 * 1e-4)).abs() < 1e-12);
    }

    #[test]
    fn contribution_clock_starts_at_zero() {
        let seg = example_segment(100.0);
        let c = contribution_frame(&seg, &material(), [0.0; 3], seg.t_f() + 1e-15).unwrap();
        assert!(c.tbar > 0.0 && c.tbar < 1e-4);
    }

    #[test]
    fn domains() {
        let seg = example_segment(100.0);
        let m = material();
        assert!(flux_frame(&seg, &m, [0.0; 3], 0.0).is_err());
        assert!(flux_frame(&seg, &m, [0.0; 3], seg.t_f() * 1.5).is_err());
        assert!(flux_frame(&seg, &m, [0.0; 3], seg.t_f()).is_ok());
        assert!(contribution_frame(&seg, &m, [0.0; 3], seg.t_f()).is_err());
    }

    #[test]
    fn frame_switch_is_continuous() {
        let seg = example_segment(100.0);
        let m = material();
        let p = [1.3e-3, 2e-4, -1e-4];
        let a = flux_frame(&seg, &m, p, seg.t_f()).unwrap();
        let b = contribution_frame(&seg, &m, p, seg.t_f() * (1.0 + 1e-14)).unwrap();
        assert_eq!(a.temp_scale, b.temp_scale);
        assert_eq!(a.vbar, b.vbar);
        assert!((a.tbar - b.tbar_f).abs() < 1e-12);
        assert!((a.xbar - b.xbar).abs() < 1e-9);
        assert_eq!(a.ybar, b.ybar);
    }

    #[test]
    fn power_scaling_only_touches_temperature() {
        let m = material();
        let p = [4e-4, -3e-4, -2e-4];
        let a = flux_frame(&example_segment(80.0), &m, p, 2e-3).unwrap();
        let b = flux_frame(&example_segment(240.0), &m, p, 2e-3).unwrap();
        assert!((b.temp_scale - 3.0 * a.temp_scale).abs() < 1e-9 * b.temp_scale);
        assert_eq!(
            (a.xbar, a.ybar, a.zbar, a.tbar, a.vbar),
            (b.xbar, b.ybar, b.zbar, b.tbar, b.vbar)
        );
    }
}
