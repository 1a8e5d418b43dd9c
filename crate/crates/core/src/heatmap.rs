//! Binary portable pixmap (P6) rendering of a temperature plane.

use crate::error::{Error, Result};
use crate::field::Plane;

/// Black → red → yellow → white; luminance increases monotonically.
const STOPS: [[f64; 3]; 4] = [
    [0.0, 0.0, 0.0],
    [200.0, 30.0, 0.0],
    [255.0, 210.0, 0.0],
    [255.0, 255.0, 255.0],
];

fn ramp(s: f64) -> [u8; 3] {
    let s = if s.is_nan() { 0.0 } else { s.clamp(0.0, 1.0) };
    let seg = s * (STOPS.len() - 1) as f64;
    let i = (seg.floor() as usize).min(STOPS.len() - 2);
    let f = seg - i as f64;
    let mut px = [0u8; 3];
    for c in 0..3 {
        px[c] = (STOPS[i][c] + f * (STOPS[i + 1][c] - STOPS[i][c])).round() as u8;
    }
    px
}

/// Renders the plane with `x` to the right and `y` upwards. Values are
/// mapped linearly from `[lo, hi]` onto the colour ramp; values outside
/// saturate.
pub fn emit_ppm(plane: &Plane, lo: f64, hi: f64) -> Result<Vec<u8>> {
    let (w, h) = (plane.xs.len(), plane.ys.len());
    if w == 0 || h == 0 || plane.values.len() != w * h {
        return Err(Error::Validation("empty or malformed slice".into()));
    }
    if !(hi > lo) {
        return Err(Error::Validation(format!("colour range [{lo}, {hi}] is empty")));
    }
    let mut out = format!("P6\n{w} {h}\n255\n").into_bytes();
    out.reserve(3 * w * h);
    for iy in (0..h).rev() {
        for ix in 0..w {
            out.extend_from_slice(&ramp((plane.at(ix, iy) - lo) / (hi - lo)));
        }
    }
    Ok(out)
}

/// Colour range spanning the plane's own values.
pub fn auto_range(plane: &Plane) -> (f64, f64) {
    let lo = plane.values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = plane.values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi > lo {
        (lo, hi)
    } else {
        (lo - 0.5, lo + 0.5)
    }
}

/// Luminance of a pixel, for tests and summaries.
pub fn luminance(px: [u8; 3]) -> f64 {
    0.2126 * px[0] as f64 + 0.7152 * px[1] as f64 + 0.0722 * px[2] as f64
}
