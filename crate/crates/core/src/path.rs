//! Beam paths: time-partitioned straight segments with constant power,
//! spot size and speed, plus the `pbfpath` text format.

use crate::error::{Error, Result};
use crate::material::strip_comment;

/// Relative tolerance for `length == speed * duration`.
pub const SEGMENT_REL_TOL: f64 = 1e-9;

const MM: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentKind {
    /// Beam on; contributes heat.
    Melt,
    /// Zero-power repositioning.
    Move,
}

/// One piece of the time partition: on `(t_i, t_f]` the beam runs from
/// `start` to `end` at constant speed with constant power and spot size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    t_i: f64,
    t_f: f64,
    start: [f64; 2],
    end: [f64; 2],
    power: f64,
    sigma: f64,
    speed: f64,
    alpha: f64,
    vel: [f64; 2],
    kind: SegmentKind,
}

impl Segment {
    /// Builds and validates a melt segment. Positions in m, times in s.
    pub fn new(t_i: f64, t_f: f64, start: [f64; 2], end: [f64; 2], power: f64, sigma: f64, speed: f64) -> Result<Self> {
        Self::with_kind(t_i, t_f, start, end, power, sigma, speed, SegmentKind::Melt)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn with_kind(
        t_i: f64,
        t_f: f64,
        start: [f64; 2],
        end: [f64; 2],
        power: f64,
        sigma: f64,
        speed: f64,
        kind: SegmentKind,
    ) -> Result<Self> {
        let all = [t_i, t_f, start[0], start[1], end[0], end[1], power, sigma, speed];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("segment has non-finite data".into()));
        }
        if t_f <= t_i {
            return Err(Error::Validation(format!(
                "segment end time {t_f} not after start {t_i}"
            )));
        }
        if sigma <= 0.0 {
            return Err(Error::Validation(format!("spot size must be positive, got {sigma}")));
        }
        if power < 0.0 {
            return Err(Error::Validation(format!("power must be non-negative, got {power}")));
        }
        if speed < 0.0 {
            return Err(Error::Validation(format!("speed must be non-negative, got {speed}")));
        }
        let dx = end[0] - start[0];
        let dy = end[1] - start[1];
        let len = dx.hypot(dy);
        let (alpha, vel) = if speed == 0.0 {
            if len != 0.0 {
                return Err(Error::Validation(format!(
                    "stationary segment with distinct endpoints ({len} m apart)"
                )));
            }
            (0.0, [0.0, 0.0])
        } else {
            let travelled = speed * (t_f - t_i);
            if (len - travelled).abs() > SEGMENT_REL_TOL * len.max(travelled) {
                return Err(Error::Validation(format!(
                    "segment length {len} m inconsistent with speed*duration {travelled} m"
                )));
            }
            (dy.atan2(dx), [speed * dx / len, speed * dy / len])
        };
        Ok(Self {
            t_i,
            t_f,
            start,
            end,
            power,
            sigma,
            speed,
            alpha,
            vel,
            kind,
        })
    }

    /// A melt segment starting at `t_i` whose duration is `length / speed`.
    pub fn traverse(t_i: f64, start: [f64; 2], end: [f64; 2], power: f64, sigma: f64, speed: f64) -> Result<Self> {
        if speed <= 0.0 {
            return Err(Error::Validation("traverse needs a positive speed".into()));
        }
        let len = (end[0] - start[0]).hypot(end[1] - start[1]);
        Self::new(t_i, t_i + len / speed, start, end, power, sigma, speed)
    }

    /// A stationary beam held at `at` for `duration` seconds.
    pub fn dwell(t_i: f64, duration: f64, at: [f64; 2], power: f64, sigma: f64) -> Result<Self> {
        Self::new(t_i, t_i + duration, at, at, power, sigma, 0.0)
    }

    pub fn t_i(&self) -> f64 {
        self.t_i
    }
    pub fn t_f(&self) -> f64 {
        self.t_f
    }
    pub fn duration(&self) -> f64 {
        self.t_f - self.t_i
    }
    pub fn start(&self) -> [f64; 2] {
        self.start
    }
    pub fn end(&self) -> [f64; 2] {
        self.end
    }
    pub fn power(&self) -> f64 {
        self.power
    }
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
    pub fn speed(&self) -> f64 {
        self.speed
    }
    /// Direction angle from the x-axis; zero for stationary segments.
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    /// Velocity `(v cos α, v sin α)`, computed from the endpoints so that
    /// axis-aligned segments have an exactly zero cross component.
    pub fn velocity(&self) -> [f64; 2] {
        self.vel
    }
    pub fn kind(&self) -> SegmentKind {
        self.kind
    }

    /// Beam centre at time `t`.
    pub fn position_at(&self, t: f64) -> [f64; 2] {
        let dt = t - self.t_i;
        [self.start[0] + self.vel[0] * dt, self.start[1] + self.vel[1] * dt]
    }

    /// Splits into `m` equal sub-segments with identical beam parameters.
    pub fn split(&self, m: usize) -> Result<Vec<Segment>> {
        if m == 0 {
            return Err(Error::Validation("cannot split into zero pieces".into()));
        }
        let frac = |j: usize| j as f64 / m as f64;
        let lerp = |a: f64, b: f64, s: f64| a + (b - a) * s;
        (0..m)
            .map(|j| {
                let (s0, s1) = (frac(j), frac(j + 1));
                let t0 = if j == 0 { self.t_i } else { lerp(self.t_i, self.t_f, s0) };
                let t1 = if j + 1 == m {
                    self.t_f
                } else {
                    lerp(self.t_i, self.t_f, s1)
                };
                let p0 = [
                    lerp(self.start[0], self.end[0], s0),
                    lerp(self.start[1], self.end[1], s0),
                ];
                let p1 = if j + 1 == m {
                    self.end
                } else {
                    [
                        lerp(self.start[0], self.end[0], s1),
                        lerp(self.start[1], self.end[1], s1),
                    ]
                };
                Segment::with_kind(t0, t1, p0, p1, self.power, self.sigma, self.speed, self.kind)
            })
            .collect()
    }

    fn map_points(&self, f: impl Fn([f64; 2]) -> [f64; 2]) -> Result<Segment> {
        Segment::with_kind(
            self.t_i,
            self.t_f,
            f(self.start),
            f(self.end),
            self.power,
            self.sigma,
            self.speed,
            self.kind,
        )
    }

    fn with_power(&self, power: f64) -> Result<Segment> {
        Segment::with_kind(
            self.t_i, self.t_f, self.start, self.end, power, self.sigma, self.speed, self.kind,
        )
    }
}

/// An ordered, time-contiguous sequence of segments and the constant bulk
/// initial temperature.
#[derive(Debug, Clone, PartialEq)]
pub struct BeamPath {
    segments: Vec<Segment>,
    u_init: f64,
}

impl BeamPath {
    pub fn new(segments: Vec<Segment>, u_init: f64) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::Validation("a path needs at least one segment".into()));
        }
        if !u_init.is_finite() {
            return Err(Error::Validation("u_init must be finite".into()));
        }
        for (k, w) in segments.windows(2).enumerate() {
            if w[0].t_f != w[1].t_i {
                return Err(Error::Validation(format!(
                    "segment {} ends at {} but segment {} starts at {}",
                    k,
                    w[0].t_f,
                    k + 1,
                    w[1].t_i
                )));
            }
        }
        Ok(Self { segments, u_init })
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn u_init(&self) -> f64 {
        self.u_init
    }

    pub fn start_time(&self) -> f64 {
        self.segments[0].t_i
    }

    pub fn end_time(&self) -> f64 {
        self.segments[self.segments.len() - 1].t_f
    }

    pub fn melt_count(&self) -> usize {
        self.segments.iter().filter(|s| s.kind == SegmentKind::Melt).count()
    }

    /// Index of the segment whose half-open interval `(t_i, t_f]` holds `t`.
    pub fn locate(&self, t: f64) -> Result<usize> {
        if !(t > self.start_time() && t <= self.end_time()) {
            return Err(Error::Domain(format!(
                "time {t} outside path interval ({}, {}]",
                self.start_time(),
                self.end_time()
            )));
        }
        Ok(self.segments.partition_point(|s| s.t_f < t))
    }

    pub fn translated(&self, dx: f64, dy: f64) -> Result<Self> {
        self.map_segments(|s| s.map_points(|p| [p[0] + dx, p[1] + dy]))
    }

    /// Rotates every segment about the origin by `angle` radians.
    pub fn rotated(&self, angle: f64) -> Result<Self> {
        let (s, c) = angle.sin_cos();
        self.map_segments(|seg| seg.map_points(|p| [c * p[0] - s * p[1], s * p[0] + c * p[1]]))
    }

    pub fn scaled_power(&self, factor: f64) -> Result<Self> {
        self.map_segments(|s| s.with_power(s.power * factor))
    }

    /// Splits every segment into `m` equal pieces.
    pub fn refined(&self, m: usize) -> Result<Self> {
        let mut segs = Vec::with_capacity(self.segments.len() * m);
        for s in &self.segments {
            segs.extend(s.split(m)?);
        }
        BeamPath::new(segs, self.u_init)
    }

    fn map_segments(&self, f: impl Fn(&Segment) -> Result<Segment>) -> Result<Self> {
        BeamPath::new(self.segments.iter().map(f).collect::<Result<_>>()?, self.u_init)
    }
}

pub const PATH_HEADER: &str = "pbfpath 1";

/// Parses a `pbfpath 1` file. Geometry is in mm, speed in mm/s, power in W;
/// the returned path is in SI units and starts at `t = 0`.
///
/// Records:
/// - `melt x_i y_i x_f y_f P sigma v [dwell_ms]` (dwell only when `v == 0`)
/// - `move x_i y_i x_f y_f v` (zero power; `v == 0` means an instantaneous jump)
pub fn load_path(text: &str, u_init: f64) -> Result<BeamPath> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, strip_comment(l).trim()))
        .filter(|(_, l)| !l.is_empty());

    match lines.next() {
        Some((_, l)) if l.split_whitespace().collect::<Vec<_>>() == ["pbfpath", "1"] => {}
        Some((n, l)) => return Err(Error::parse(n, format!("expected header `{PATH_HEADER}`, got `{l}`"))),
        None => return Err(Error::Validation("empty path file".into())),
    }

    let mut segments: Vec<Segment> = Vec::new();
    let mut t = 0.0;
    let mut last_sigma = None;
    for (n, line) in lines {
        let mut toks = line.split_whitespace();
        let kind = toks.next().unwrap_or_default();
        let nums = toks
            .map(|tok| tok.parse::<f64>().map_err(|e| Error::parse(n, format!("`{tok}`: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        if let Some(bad) = nums.iter().find(|v| !v.is_finite()) {
            return Err(Error::parse(n, format!("non-finite value {bad}")));
        }
        let seg = match kind {
            "melt" => {
                if nums.len() != 7 && nums.len() != 8 {
                    return Err(Error::parse(
                        n,
                        format!("melt expects 7 or 8 fields, got {}", nums.len()),
                    ));
                }
                let start = [nums[0] * MM, nums[1] * MM];
                let end = [nums[2] * MM, nums[3] * MM];
                let (power, sigma, speed) = (nums[4], nums[5] * MM, nums[6] * MM);
                let seg = if speed == 0.0 {
                    let dwell = match nums.get(7) {
                        Some(ms) if *ms > 0.0 => ms * 1e-3,
                        _ => return Err(Error::parse(n, "stationary melt needs a positive dwell time (ms)")),
                    };
                    Segment::new(t, t + dwell, start, end, power, sigma, 0.0)
                } else {
                    if nums.len() == 8 {
                        return Err(Error::parse(n, "dwell time only allowed for stationary melts"));
                    }
                    Segment::traverse(t, start, end, power, sigma, speed)
                };
                last_sigma = Some(sigma);
                Some(seg.map_err(|e| Error::parse(n, e.to_string()))?)
            }
            "move" => {
                if nums.len() != 5 {
                    return Err(Error::parse(n, format!("move expects 5 fields, got {}", nums.len())));
                }
                let start = [nums[0] * MM, nums[1] * MM];
                let end = [nums[2] * MM, nums[3] * MM];
                let speed = nums[4] * MM;
                if speed < 0.0 {
                    return Err(Error::parse(n, "negative move speed"));
                }
                if speed == 0.0 {
                    None
                } else {
                    let len = (end[0] - start[0]).hypot(end[1] - start[1]);
                    let sigma = last_sigma.unwrap_or(1e-4);
                    let seg = Segment::with_kind(t, t + len / speed, start, end, 0.0, sigma, speed, SegmentKind::Move)
                        .map_err(|e| Error::parse(n, e.to_string()))?;
                    Some(seg)
                }
            }
            other => return Err(Error::parse(n, format!("unknown record `{other}`"))),
        };
        if let Some(seg) = seg {
            t = seg.t_f;
            segments.push(seg);
        }
    }
    BeamPath::new(segments, u_init)
}
