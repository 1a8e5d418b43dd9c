//! The individual temperature terms, each a temperature scale times a
//! one-dimensional integral in scaled time.

use super::kernels::guarded_exp;
use crate::error::{Error, Result};
use crate::frame::{contribution_frame, flux_frame, scaled_time, temperature_scale, FrameKind};
use crate::material::MaterialParams;
use crate::path::Segment;
use crate::quadrature::Quadrature;
use std::f64::consts::SQRT_2;

#[derive(Debug, Clone, Copy)]
struct Node {
    tau2: f64,
    inv_a: f64,
    /// Coefficient of `z̄²` in the exponent.
    inv_b: f64,
    weight: f64,
}

/// One term with its quadrature already mapped, ready to be evaluated at
/// many spatial points for the same time.
#[derive(Debug, Clone)]
pub(crate) struct TermPlan {
    temp_scale: f64,
    origin: [f64; 2],
    len: f64,
    vbar: [f64; 2],
    nodes: Vec<Node>,
}

impl TermPlan {
    /// Active-segment term at time `t ∈ (t_i, t_f]`.
    pub(crate) fn flux(seg: &Segment, material: &MaterialParams, t: f64, q: &Quadrature) -> Result<Self> {
        let frame = flux_frame(seg, material, [0.0; 3], t)?;
        let nodes = q
            .mapped(frame.tbar)
            .map(|(s, w)| {
                let s2 = s * s;
                let inv_a = 1.0 / (1.0 + s2);
                Node {
                    tau2: s2,
                    inv_a,
                    inv_b: 1.0 / s2,
                    weight: w * inv_a,
                }
            })
            .collect();
        Ok(Self::with_nodes(
            seg,
            frame.temp_scale,
            frame.vbar,
            seg.position_at(t),
            nodes,
            frame.tbar == 0.0,
        ))
    }

    /// Completed-segment term at time `t > t_f`.
    pub(crate) fn contribution(seg: &Segment, material: &MaterialParams, t: f64, q: &Quadrature) -> Result<Self> {
        let frame = contribution_frame(seg, material, [0.0; 3], t)?;
        let t2 = frame.tbar * frame.tbar;
        let nodes = q
            .mapped(frame.tbar_f)
            .map(|(r, w)| {
                let r2 = r * r;
                let b = r2 + t2;
                let inv_a = 1.0 / (1.0 + b);
                Node {
                    tau2: r2,
                    inv_a,
                    inv_b: 1.0 / b,
                    weight: w * r / b.sqrt() * inv_a,
                }
            })
            .collect();
        Ok(Self::with_nodes(
            seg,
            frame.temp_scale,
            frame.vbar,
            seg.end(),
            nodes,
            frame.tbar_f == 0.0,
        ))
    }

    fn with_nodes(
        seg: &Segment,
        temp_scale: f64,
        vbar: [f64; 2],
        origin: [f64; 2],
        nodes: Vec<Node>,
        empty: bool,
    ) -> Self {
        Self {
            temp_scale,
            origin,
            len: SQRT_2 * seg.sigma(),
            vbar,
            nodes: if empty { Vec::new() } else { nodes },
        }
    }

    /// Temperature increase in kelvin at `point`.
    pub(crate) fn eval(&self, point: [f64; 3]) -> f64 {
        if self.temp_scale == 0.0 {
            return 0.0;
        }
        let xb = (point[0] - self.origin[0]) / self.len;
        let yb = (point[1] - self.origin[1]) / self.len;
        let zb = point[2] / self.len;
        let z2 = zb * zb;
        let mut acc = 0.0;
        for n in &self.nodes {
            let dx = xb + self.vbar[0] * n.tau2;
            let dy = yb + self.vbar[1] * n.tau2;
            let mut arg = -(dx * dx + dy * dy) * n.inv_a;
            if z2 != 0.0 {
                arg -= z2 * n.inv_b;
            }
            acc += n.weight * guarded_exp(arg);
        }
        self.temp_scale * acc
    }
}

fn check_point(point: [f64; 3]) -> Result<()> {
    if point.iter().any(|c| !c.is_finite()) {
        return Err(Error::Domain("non-finite evaluation point".into()));
    }
    if point[2] > 0.0 {
        return Err(Error::Domain(format!(
            "z must be <= 0 (lower half-space), got {}",
            point[2]
        )));
    }
    Ok(())
}

/// Temperature rise due to the segment active at `time`, in kelvin.
pub fn flux_term(seg: &Segment, material: &MaterialParams, point: [f64; 3], time: f64, q: &Quadrature) -> Result<f64> {
    check_point(point)?;
    Ok(TermPlan::flux(seg, material, time, q)?.eval(point))
}

/// Temperature rise at `time` left behind by a segment that ended before it.
pub fn contribution_term(
    seg: &Segment,
    material: &MaterialParams,
    point: [f64; 3],
    time: f64,
    q: &Quadrature,
) -> Result<f64> {
    check_point(point)?;
    Ok(TermPlan::contribution(seg, material, time, q)?.eval(point))
}

/// Constant-parameter single line starting at the origin at `t = 0` and
/// running along +x.
#[allow(clippy::too_many_arguments)]
pub fn single_line(
    power: f64,
    sigma: f64,
    speed: f64,
    material: &MaterialParams,
    u_init: f64,
    point: [f64; 3],
    time: f64,
    q: &Quadrature,
) -> Result<f64> {
    if !(time > 0.0) {
        return Err(Error::Domain(format!("time must be positive, got {time}")));
    }
    let seg = Segment::new(0.0, time, [0.0, 0.0], [speed * time, 0.0], power, sigma, speed)?;
    Ok(u_init + flux_term(&seg, material, point, time, q)?)
}

/// Scaled keys `(t̄, t̄^f, |v̄|)` used for order lookup.
pub(crate) fn lookup_keys(seg: &Segment, material: &MaterialParams, kind: FrameKind, t: f64) -> (f64, f64, f64) {
    let sigma = seg.sigma();
    let vbar = crate::frame::scaled_speed(seg.speed(), sigma, material);
    let tf = scaled_time(seg.duration(), sigma, material);
    let tbar = match kind {
        FrameKind::Flux => scaled_time(t - seg.t_i(), sigma, material),
        FrameKind::Contribution => scaled_time(t - seg.t_f(), sigma, material),
    };
    (tbar, tf, vbar)
}

/// Whether a segment can contribute heat at all.
pub(crate) fn is_heating(seg: &Segment, material: &MaterialParams) -> bool {
    temperature_scale(seg.power(), seg.sigma(), material) > 0.0
}
