//! Numerical check of a completed-segment term: the field left at the end
//! of the segment, diffused for the elapsed time by explicit 3-D
//! convolution with the heat kernel, must reproduce the closed-form term.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::material::MaterialParams;
use crate::path::Segment;
use crate::quadrature::{cached, DEFAULT_REF_ORDER};
use crate::solver::green_1d;
use crate::solver::terms::TermPlan;

/// Sampling of the end-of-segment field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvolutionGrid {
    /// Grid spacing in m.
    pub spacing: f64,
    /// Padding around the heated track, in standard deviations of the
    /// field's spread at the end of the segment.
    pub pad_sigmas: f64,
    /// Quadrature order for the sampled end-of-segment field.
    pub field_order: usize,
}

impl Default for ConvolutionGrid {
    fn default() -> Self {
        Self {
            spacing: 2.5e-5,
            pad_sigmas: 8.0,
            field_order: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvolutionReport {
    pub probes: Vec<[f64; 3]>,
    /// Convolution result at each probe, K above the initial temperature.
    pub numerical: Vec<f64>,
    /// Closed-form contribution at each probe.
    pub analytical: Vec<f64>,
    /// Largest absolute deviation divided by the largest analytical value.
    pub max_rel_dev: f64,
    /// Number of grid samples of the end-of-segment field.
    pub samples: usize,
}

fn axis(lo: f64, hi: f64, h: f64) -> Vec<f64> {
    let n = ((hi - lo) / h).ceil() as usize + 1;
    (0..n).map(|i| lo + i as f64 * h).collect()
}

/// Default probe points: along the track, beside it and below it.
pub fn default_probes(seg: &Segment) -> Vec<[f64; 3]> {
    let (a, b) = (seg.start(), seg.end());
    let s = seg.sigma();
    let mut out = Vec::new();
    for i in 0..=8 {
        let f = i as f64 / 8.0;
        let p = [a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1])];
        out.push([p[0], p[1], 0.0]);
    }
    for off in [1.0, 3.0] {
        out.push([b[0], b[1] + off * s, 0.0]);
        out.push([b[0], b[1], -off * s]);
    }
    out
}

/// Diffuses the end-of-segment field of `seg` forward to `time` by direct
/// summation and compares it with the closed-form contribution at `probes`.
///
/// The field is extended evenly into `z > 0`, which is what makes the
/// half-space solution with an insulated surface equal to a free-space
/// convolution.
pub fn convolution_audit(
    seg: &Segment,
    material: &MaterialParams,
    time: f64,
    grid: ConvolutionGrid,
    probes: &[[f64; 3]],
) -> Result<ConvolutionReport> {
    if !(time > seg.t_f()) {
        return Err(Error::Validation(format!(
            "audit time {time} must follow segment end {}",
            seg.t_f()
        )));
    }
    if !(grid.spacing > 0.0 && grid.pad_sigmas > 0.0) {
        return Err(Error::Validation("grid spacing and padding must be positive".into()));
    }
    if probes.is_empty() || probes.iter().any(|p| p[2] > 0.0) {
        return Err(Error::Validation("need at least one probe, all with z <= 0".into()));
    }
    let kappa = material.kappa();
    let q = cached(DEFAULT_REF_ORDER)?;
    let end_field = TermPlan::flux(seg, material, seg.t_f(), &*cached(grid.field_order)?)?;

    let spread = (seg.sigma().powi(2) + 2.0 * kappa * seg.duration()).sqrt();
    let pad = grid.pad_sigmas * spread;
    let (a, b) = (seg.start(), seg.end());
    let h = grid.spacing;
    let xs = axis(a[0].min(b[0]) - pad, a[0].max(b[0]) + pad, h);
    let ys = axis(a[1].min(b[1]) - pad, a[1].max(b[1]) + pad, h);
    // symmetric about the surface so the even extension is sampled exactly
    let nz = (pad / h).ceil() as usize;
    let zs: Vec<f64> = (0..=2 * nz).map(|k| (k as f64 - nz as f64) * h).collect();
    let samples = xs.len() * ys.len() * zs.len();
    if samples > 60_000_000 {
        return Err(Error::Capacity {
            requested: samples,
            cap: 60_000_000,
        });
    }

    // field[(ix * ny + iy) * nz + iz], computed once for z <= 0 and mirrored
    let (ny, nzt) = (ys.len(), zs.len());
    let field: Vec<f64> = xs
        .par_iter()
        .flat_map_iter(|&x| {
            let plan = &end_field;
            let zs = &zs;
            ys.iter().flat_map(move |&y| {
                let mut col = vec![0.0; nzt];
                for k in 0..=nz {
                    let v = plan.eval([x, y, zs[k]]);
                    col[k] = v;
                    col[2 * nz - k] = v;
                }
                col
            })
        })
        .collect();

    // The even extension has a slope jump at z = 0 set by the surface flux;
    // the trapezoid error from it is (h²/6) G(p_z) Φ / λ per column.
    let s2 = seg.sigma().powi(2);
    let phi0 = seg.power() / (2.0 * std::f64::consts::PI * s2);
    let e = seg.end();
    let flux: Vec<f64> = xs
        .iter()
        .flat_map(|&x| {
            ys.iter()
                .map(move |&y| phi0 * (-((x - e[0]).powi(2) + (y - e[1]).powi(2)) / (2.0 * s2)).exp())
        })
        .collect();
    let kink = h * h / 6.0 / material.lambda();

    let dt = time - seg.t_f();
    let numerical: Vec<f64> = probes
        .par_iter()
        .map(|p| {
            let gx: Vec<f64> = xs.iter().map(|&x| green_1d(p[0] - x, dt, kappa) * h).collect();
            let gy: Vec<f64> = ys.iter().map(|&y| green_1d(p[1] - y, dt, kappa) * h).collect();
            let gz: Vec<f64> = zs.iter().map(|&z| green_1d(p[2] - z, dt, kappa) * h).collect();
            let g0 = green_1d(p[2], dt, kappa) * kink;
            let mut acc = 0.0;
            for (ix, wx) in gx.iter().enumerate() {
                if *wx == 0.0 {
                    continue;
                }
                let mut sx = 0.0;
                for (iy, wy) in gy.iter().enumerate() {
                    if *wy == 0.0 {
                        continue;
                    }
                    let col = &field[(ix * ny + iy) * nzt..(ix * ny + iy + 1) * nzt];
                    let sz: f64 = col.iter().zip(&gz).map(|(f, g)| f * g).sum::<f64>() - g0 * flux[ix * ny + iy];
                    sx += wy * sz;
                }
                acc += wx * sx;
            }
            acc
        })
        .collect();

    let term = TermPlan::contribution(seg, material, time, &q)?;
    let analytical: Vec<f64> = probes.iter().map(|&p| term.eval(p)).collect();
    let peak = analytical.iter().copied().fold(0.0, f64::max);
    if !(peak > 0.0) {
        return Err(Error::Audit("contribution vanishes at every probe".into()));
    }
    let max_dev = numerical
        .iter()
        .zip(&analytical)
        .map(|(n, a)| (n - a).abs())
        .fold(0.0, f64::max);
    Ok(ConvolutionReport {
        probes: probes.to_vec(),
        numerical,
        analytical,
        max_rel_dev: max_dev / peak,
        samples,
    })
}
