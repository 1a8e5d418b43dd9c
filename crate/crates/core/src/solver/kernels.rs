use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::frame::DimensionlessFrame;

/// Exponent arguments below this are treated as exact zeros.
pub const UNDERFLOW_ARG: f64 = -700.0;

#[inline]
pub(crate) fn guarded_exp(arg: f64) -> f64 {
    if arg < UNDERFLOW_ARG {
        0.0
    } else {
        arg.exp()
    }
}

/// Free-space heat kernel `(4πκt)^{-3/2} exp(-|x|²/(4κt))`, in 1/m³.
pub fn green(x: f64, y: f64, z: f64, t: f64, kappa: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::Domain(format!("Green's function needs t > 0, got {t}")));
    }
    let d = 4.0 * kappa * t;
    Ok((PI * d).powf(-1.5) * guarded_exp(-(x * x + y * y + z * z) / d))
}

/// One-dimensional factor of [`green`]: `(4πκt)^{-1/2} exp(-x²/(4κt))`.
pub fn green_1d(x: f64, t: f64, kappa: f64) -> f64 {
    let d = 4.0 * kappa * t;
    (PI * d).powf(-0.5) * guarded_exp(-x * x / d)
}

/// Integrand of the active-segment integral at scaled time `sbar`.
pub fn flux_integrand(frame: &DimensionlessFrame, sbar: f64) -> f64 {
    let s2 = sbar * sbar;
    let a = 1.0 + s2;
    let dx = frame.xbar + frame.vbar[0] * s2;
    let dy = frame.ybar + frame.vbar[1] * s2;
    let mut arg = -(dx * dx + dy * dy) / a;
    if frame.zbar != 0.0 {
        arg -= frame.zbar * frame.zbar / s2;
    }
    guarded_exp(arg) / a
}

/// Integrand of a completed segment's contribution at scaled time `rbar`.
pub fn contribution_integrand(frame: &DimensionlessFrame, rbar: f64) -> f64 {
    let r2 = rbar * rbar;
    let b = r2 + frame.tbar * frame.tbar;
    if b == 0.0 {
        return 0.0;
    }
    let a = 1.0 + b;
    let dx = frame.xbar + frame.vbar[0] * r2;
    let dy = frame.ybar + frame.vbar[1] * r2;
    let mut arg = -(dx * dx + dy * dy) / a;
    if frame.zbar != 0.0 {
        arg -= frame.zbar * frame.zbar / b;
    }
    rbar / (b.sqrt() * a) * guarded_exp(arg)
}
