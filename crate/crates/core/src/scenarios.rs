//! The three reference scenarios: a single line split into segments, a
//! snake pattern with parameters varying along each line, and an hourglass
//! of lines of varying length.

use std::fmt::Write;

use crate::field::FieldResult;

pub const EXAMPLE_RHO: f64 = 4430.0;
pub const EXAMPLE_LAMBDA: f64 = 20.0;
pub const EXAMPLE_KAPPA: f64 = 8.4495e-6;
pub const EXAMPLE_U_INIT: f64 = 1000.0;

/// Material file for all scenarios; `c_p` is chosen so that
/// `λ / (ρ c_p)` reproduces the target diffusivity.
pub fn example_material_text() -> String {
    let cp = EXAMPLE_LAMBDA / (EXAMPLE_RHO * EXAMPLE_KAPPA);
    format!("pbfmat 1\n# rho cp lambda u_init\n{EXAMPLE_RHO} {cp:.17e} {EXAMPLE_LAMBDA} {EXAMPLE_U_INIT}\n")
}

/// 10 mm line at 1 m/s, 100 W, σ = 0.1 mm, written as `segments` equal
/// records.
pub fn example1_path_text(segments: usize) -> String {
    let mut s = String::from("pbfpath 1\n");
    let n = segments.max(1);
    for k in 0..n {
        let a = 10.0 * k as f64 / n as f64;
        let b = 10.0 * (k + 1) as f64 / n as f64;
        let _ = writeln!(s, "melt {a} 0 {b} 0 100 0.1 1000");
    }
    s
}

/// Evaluation points `x_i = 0.05 i mm`, `i = 1..200`, on the line.
pub fn example1_points() -> Vec<[f64; 3]> {
    (1..=200).map(|i| [i as f64 * 5e-5, 0.0, 0.0]).collect()
}

/// Evaluation times `t_j = j · 0.05 ms`, `j = 1..200`.
pub fn example1_times() -> Vec<f64> {
    (1..=200).map(|j| 1e-2 * j as f64 / 200.0).collect()
}

pub const EXAMPLE2_LINES: usize = 10;
/// `(x_start, x_end, σ, v)` in mm and mm/s for each section of a line.
pub const EXAMPLE2_SECTIONS: [(f64, f64, f64, f64); 5] = [
    (5.0, 7.0, 0.10, 1000.0),
    (7.0, 9.0, 0.15, 1500.0),
    (9.0, 11.0, 0.20, 2000.0),
    (11.0, 13.0, 0.25, 2500.0),
    (13.0, 15.0, 0.30, 3000.0),
];
pub const REPOSITION_SPEED: f64 = 10_000.0;

fn example2_y(j: usize) -> f64 {
    1.1 + 0.2 * j as f64
}

/// Ten lines traversed alternately left-to-right and right-to-left. Spot
/// size and speed belong to the x-interval, so a reversed line meets them
/// in reverse order.
pub fn example2_path_text() -> String {
    let mut s = String::from("pbfpath 1\n");
    for j in 0..EXAMPLE2_LINES {
        let y = example2_y(j);
        let forward = j % 2 == 0;
        let mut sections: Vec<_> = EXAMPLE2_SECTIONS.to_vec();
        if !forward {
            sections.reverse();
        }
        for (a, b, sigma, v) in sections {
            let (from, to) = if forward { (a, b) } else { (b, a) };
            let _ = writeln!(s, "melt {from} {y:.1} {to} {y:.1} 100 {sigma} {v}");
        }
        if j + 1 < EXAMPLE2_LINES {
            let x = if forward { 15.0 } else { 5.0 };
            let _ = writeln!(s, "move {x} {y:.1} {x} {:.1} {REPOSITION_SPEED}", example2_y(j + 1));
        }
    }
    s
}

/// Stack of horizontal lines centred on a point, longest at the top and
/// bottom and shortest in the middle, worked from the lower left upwards.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hourglass {
    pub lines: usize,
    /// Line spacing, mm.
    pub hatch: f64,
    pub longest: f64,
    pub shortest: f64,
    pub centre: [f64; 2],
    /// Alternate direction on every line instead of always running +x.
    pub snake: bool,
}

impl Default for Hourglass {
    fn default() -> Self {
        Self {
            lines: 37,
            hatch: 0.1,
            longest: 10.0,
            shortest: 0.5,
            centre: [10.0, 2.0],
            snake: false,
        }
    }
}

impl Hourglass {
    /// Line lengths in mm, bottom to top.
    pub fn lengths(&self) -> Vec<f64> {
        let half = (self.lines.max(2) - 1) as f64 / 2.0;
        (0..self.lines)
            .map(|j| {
                let f = (j as f64 - half).abs() / half;
                self.shortest + (self.longest - self.shortest) * f
            })
            .collect()
    }

    fn y(&self, j: usize) -> f64 {
        let half = (self.lines.max(2) - 1) as f64 / 2.0;
        self.centre[1] + (j as f64 - half) * self.hatch
    }

    /// Half the height of the pattern, mm.
    pub fn half_height(&self) -> f64 {
        (self.lines.max(2) - 1) as f64 / 2.0 * self.hatch
    }

    /// 100 W, σ = 0.1 mm, 1 m/s.
    pub fn path_text(&self) -> String {
        let mut s = String::from("pbfpath 1\n");
        let mut prev_end: Option<[f64; 2]> = None;
        for (j, len) in self.lengths().iter().enumerate() {
            let y = self.y(j);
            let (a, b) = (self.centre[0] - len / 2.0, self.centre[0] + len / 2.0);
            let (from, to) = if !self.snake || j % 2 == 0 { (a, b) } else { (b, a) };
            if let Some(p) = prev_end {
                let _ = writeln!(s, "move {:.4} {:.4} {from:.4} {y:.4} {REPOSITION_SPEED}", p[0], p[1]);
            }
            let _ = writeln!(s, "melt {from:.4} {y:.4} {to:.4} {y:.4} 100 0.1 1000");
            prev_end = Some([to, y]);
        }
        s
    }
}

pub fn example3_path_text() -> String {
    Hourglass::default().path_text()
}

/// Surface grid spec over `[0, 20] × [0, 4]` mm with the given node counts.
pub fn domain_grid_spec(nx: usize, ny: usize) -> String {
    format!("0:0.02:{nx},0:0.004:{ny},0")
}

/// `steps` evenly spaced times inside every melt segment, ending at each
/// segment's end.
pub fn melt_times(path: &crate::path::BeamPath, steps: usize) -> Vec<f64> {
    let mut out = Vec::new();
    for seg in path.segments() {
        if seg.kind() != crate::path::SegmentKind::Melt {
            continue;
        }
        for k in 1..=steps {
            out.push(seg.t_i() + seg.duration() * k as f64 / steps as f64);
        }
    }
    out
}

/// Times along a path so the beam advances at most `dx` per step within
/// each melt segment.
pub fn times_by_travel(path: &crate::path::BeamPath, dx: f64) -> Vec<f64> {
    let mut out = Vec::new();
    for seg in path.segments() {
        if seg.kind() != crate::path::SegmentKind::Melt {
            continue;
        }
        let len = seg.speed() * seg.duration();
        let steps = ((len / dx).ceil() as usize).max(1);
        for k in 1..=steps {
            out.push(seg.t_i() + seg.duration() * k as f64 / steps as f64);
        }
    }
    out
}

/// Largest time-maximum surface temperature over nodes with
/// `near <= |y - y_c| <= far` and `x` inside `x_window` (all in m).
pub fn region_peak(field: &FieldResult, y_c: f64, near: f64, far: f64, x_window: [f64; 2]) -> f64 {
    let max = field.max_over_time();
    let g = &field.grid;
    let iz = g.zs.len() - 1;
    let mut best = f64::NEG_INFINITY;
    for (ix, x) in g.xs.iter().enumerate() {
        if *x < x_window[0] || *x > x_window[1] {
            continue;
        }
        for (iy, y) in g.ys.iter().enumerate() {
            let d = (y - y_c).abs();
            if d >= near && d <= far {
                best = best.max(max[g.index(0, ix, iy, iz)]);
            }
        }
    }
    best
}

impl Hourglass {
    /// Peak over the central quarter of the pattern's height, any `x`.
    pub fn centre_peak(&self, field: &FieldResult) -> f64 {
        let hh = self.half_height() * 1e-3;
        region_peak(
            field,
            self.centre[1] * 1e-3,
            0.0,
            0.25 * hh,
            [f64::NEG_INFINITY, f64::INFINITY],
        )
    }

    /// Peak along the first and last (longest) lines.
    pub fn outer_line_peak(&self, field: &FieldResult) -> f64 {
        let all = [f64::NEG_INFINITY, f64::INFINITY];
        let hh = self.half_height() * 1e-3;
        let yc = self.centre[1] * 1e-3;
        let tol = 1e-3 * self.hatch * 1e-3;
        region_peak(field, yc, hh - tol, hh + tol, all)
    }
}
