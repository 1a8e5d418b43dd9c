//! Space–time evaluation lattices, their results and the CSV schema
//! `t,x,y,z,u` (SI units, kelvin).

use std::fmt::Write as _;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::quadrature::lut::linspace;
use crate::solver::Evaluator;

#[derive(Debug, Clone, PartialEq)]
pub struct FieldGrid {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub zs: Vec<f64>,
    pub ts: Vec<f64>,
}

fn parse_axis(spec: &str) -> Result<Vec<f64>> {
    let bad = |m: &str| Error::Validation(format!("axis `{spec}`: {m}"));
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [v] => Ok(vec![v.trim().parse().map_err(|_| bad("not a number"))?]),
        [a, b, n] => {
            let a: f64 = a.trim().parse().map_err(|_| bad("bad start"))?;
            let b: f64 = b.trim().parse().map_err(|_| bad("bad end"))?;
            let n: usize = n.trim().parse().map_err(|_| bad("bad count"))?;
            if n == 0 {
                return Err(bad("count must be positive"));
            }
            if n == 1 && a != b {
                return Err(bad("a single point needs start == end"));
            }
            Ok(linspace(a, b, n))
        }
        _ => Err(bad("expected `start:end:count` or a single value")),
    }
}

impl FieldGrid {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>, zs: Vec<f64>, ts: Vec<f64>) -> Result<Self> {
        for (name, a) in [("x", &xs), ("y", &ys), ("z", &zs), ("t", &ts)] {
            if a.is_empty() {
                return Err(Error::Validation(format!("{name} axis is empty")));
            }
            if a.iter().any(|v| !v.is_finite()) || !a.windows(2).all(|w| w[0] < w[1]) {
                return Err(Error::Validation(format!(
                    "{name} axis must be finite and strictly increasing"
                )));
            }
        }
        if zs.iter().any(|&z| z > 0.0) {
            return Err(Error::Validation("z values must be <= 0".into()));
        }
        if ts[0] <= 0.0 {
            return Err(Error::Validation("evaluation times must be positive".into()));
        }
        Ok(Self { xs, ys, zs, ts })
    }

    /// Parses `x0:x1:nx,y0:y1:ny,z0:z1:nz` (m) and `t0:t1:nt` (s). A bare
    /// value stands for a single point.
    pub fn from_specs(space: &str, times: &str) -> Result<Self> {
        let axes: Vec<&str> = space.split(',').collect();
        if axes.len() != 3 {
            return Err(Error::Validation(format!(
                "grid `{space}` needs three comma-separated axes"
            )));
        }
        Self::new(
            parse_axis(axes[0])?,
            parse_axis(axes[1])?,
            parse_axis(axes[2])?,
            parse_axis(times)?,
        )
    }

    pub fn spatial_len(&self) -> usize {
        self.xs.len() * self.ys.len() * self.zs.len()
    }

    pub fn len(&self) -> usize {
        self.spatial_len() * self.ts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Spatial nodes in `(x, y, z)` row-major order.
    pub fn points(&self) -> Vec<[f64; 3]> {
        let mut out = Vec::with_capacity(self.spatial_len());
        for &x in &self.xs {
            for &y in &self.ys {
                for &z in &self.zs {
                    out.push([x, y, z]);
                }
            }
        }
        out
    }

    pub fn index(&self, it: usize, ix: usize, iy: usize, iz: usize) -> usize {
        ((it * self.xs.len() + ix) * self.ys.len() + iy) * self.zs.len() + iz
    }
}

/// Input hashes and table identifiers carried by every output file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Provenance {
    pub path_sha256: String,
    pub material_sha256: String,
    pub lut_ids: Vec<String>,
    pub tol: Option<f64>,
    /// Omitted from output when `None` so repeated runs stay byte-identical.
    pub timestamp: Option<String>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let d = Sha256::digest(bytes);
    d.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FieldResult {
    pub grid: FieldGrid,
    /// Temperatures in K, indexed by [`FieldGrid::index`].
    pub values: Vec<f64>,
    pub provenance: Provenance,
}

/// Which time layer a 2-D slice is taken from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TimeSelect {
    Index(usize),
    /// Pointwise maximum over all times.
    Max,
}

/// Values on an `x × y` plane, row-major in `y` then `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub values: Vec<f64>,
}

impl Plane {
    pub fn at(&self, ix: usize, iy: usize) -> f64 {
        self.values[iy * self.xs.len() + ix]
    }
}

/// Evaluates the field on every grid node, parallel over time steps. The
/// output does not depend on the number of workers.
pub fn solve_field(eval: &Evaluator, grid: &FieldGrid, provenance: Provenance) -> Result<FieldResult> {
    let points = grid.points();
    let layers = grid
        .ts
        .par_iter()
        .map(|&t| {
            let plan = eval.plan(t)?;
            Ok(points.iter().map(|&p| plan.eval(p)).collect::<Vec<f64>>())
        })
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<f64> = layers.into_iter().flatten().collect();
    let u0 = eval.path().u_init();
    if let Some(bad) = values.iter().find(|v| !v.is_finite() || **v < u0 - 1e-9) {
        return Err(Error::Validation(format!("field value {bad} violates u >= u_init")));
    }
    Ok(FieldResult {
        grid: grid.clone(),
        values,
        provenance,
    })
}

impl FieldResult {
    /// Pointwise maximum over time, in `(x, y, z)` order.
    pub fn max_over_time(&self) -> Vec<f64> {
        let n = self.grid.spatial_len();
        let mut out = vec![f64::NEG_INFINITY; n];
        for layer in self.values.chunks(n) {
            for (o, v) in out.iter_mut().zip(layer) {
                *o = o.max(*v);
            }
        }
        out
    }

    /// Extracts the `x × y` plane at depth index `iz`.
    pub fn plane(&self, time: TimeSelect, iz: usize) -> Result<Plane> {
        let g = &self.grid;
        if iz >= g.zs.len() {
            return Err(Error::Validation(format!("z index {iz} out of range")));
        }
        let layer: Vec<f64> = match time {
            TimeSelect::Max => self.max_over_time(),
            TimeSelect::Index(it) if it < g.ts.len() => {
                let n = g.spatial_len();
                self.values[it * n..(it + 1) * n].to_vec()
            }
            TimeSelect::Index(it) => return Err(Error::Validation(format!("time index {it} out of range"))),
        };
        let mut values = Vec::with_capacity(g.xs.len() * g.ys.len());
        for iy in 0..g.ys.len() {
            for ix in 0..g.xs.len() {
                values.push(layer[(ix * g.ys.len() + iy) * g.zs.len() + iz]);
            }
        }
        Ok(Plane {
            xs: g.xs.clone(),
            ys: g.ys.clone(),
            values,
        })
    }

    fn header(&self) -> String {
        let p = &self.provenance;
        let mut h = String::new();
        let _ = writeln!(h, "# pbfheat field");
        let _ = writeln!(h, "# path_sha256={}", p.path_sha256);
        let _ = writeln!(h, "# material_sha256={}", p.material_sha256);
        let _ = writeln!(h, "# lut_ids={}", p.lut_ids.join(";"));
        if let Some(tol) = p.tol {
            let _ = writeln!(h, "# tol={tol:e}");
        }
        if let Some(ts) = &p.timestamp {
            let _ = writeln!(h, "# timestamp={ts}");
        }
        h
    }

    /// Full field as CSV with one row per `(t, node)`.
    pub fn to_csv(&self) -> String {
        let g = &self.grid;
        let mut s = self.header();
        s.reserve(self.values.len() * 48);
        s.push_str("t,x,y,z,u\n");
        let points = g.points();
        for (it, &t) in g.ts.iter().enumerate() {
            let layer = &self.values[it * points.len()..(it + 1) * points.len()];
            for (p, u) in points.iter().zip(layer) {
                let _ = writeln!(s, "{t},{},{},{},{u}", p[0], p[1], p[2]);
            }
        }
        s
    }

    /// Maximum-over-time field as CSV `x,y,z,u_max`.
    pub fn max_csv(&self) -> String {
        let mut s = self.header();
        s.push_str("x,y,z,u_max\n");
        for (p, u) in self.grid.points().iter().zip(self.max_over_time()) {
            let _ = writeln!(s, "{},{},{},{u}", p[0], p[1], p[2]);
        }
        s
    }

    /// Reads back the output of [`FieldResult::to_csv`].
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut prov = Provenance::default();
        let mut rows: Vec<[f64; 5]> = Vec::new();
        let mut seen_header = false;
        for (i, line) in text.lines().enumerate() {
            let n = i + 1;
            if let Some(c) = line.strip_prefix('#') {
                if let Some((k, v)) = c.trim().split_once('=') {
                    match k {
                        "path_sha256" => prov.path_sha256 = v.to_string(),
                        "material_sha256" => prov.material_sha256 = v.to_string(),
                        "lut_ids" => prov.lut_ids = v.split(';').filter(|s| !s.is_empty()).map(String::from).collect(),
                        "tol" => prov.tol = v.parse().ok(),
                        "timestamp" => prov.timestamp = Some(v.to_string()),
                        _ => {}
                    }
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            if !seen_header {
                if line.trim() != "t,x,y,z,u" {
                    return Err(Error::parse(n, format!("expected header `t,x,y,z,u`, got `{line}`")));
                }
                seen_header = true;
                continue;
            }
            let mut row = [0.0; 5];
            let mut count = 0;
            for (slot, tok) in row.iter_mut().zip(line.split(',')) {
                *slot = tok
                    .trim()
                    .parse()
                    .map_err(|_| Error::parse(n, format!("bad number `{tok}`")))?;
                count += 1;
            }
            if count != 5 || line.split(',').count() != 5 {
                return Err(Error::parse(n, "expected 5 columns"));
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::Validation("field file has no rows".into()));
        }
        let uniq = |c: usize| {
            let mut v: Vec<f64> = rows.iter().map(|r| r[c]).collect();
            v.sort_by(f64::total_cmp);
            v.dedup();
            v
        };
        let grid = FieldGrid::new(uniq(1), uniq(2), uniq(3), uniq(0))?;
        if rows.len() != grid.len() {
            return Err(Error::Validation(format!(
                "{} rows do not fill a {}x{}x{}x{} lattice",
                rows.len(),
                grid.ts.len(),
                grid.xs.len(),
                grid.ys.len(),
                grid.zs.len()
            )));
        }
        let pos = |axis: &[f64], v: f64| axis.binary_search_by(|a| a.total_cmp(&v)).unwrap();
        let mut values = vec![f64::NAN; grid.len()];
        for r in &rows {
            let idx = grid.index(
                pos(&grid.ts, r[0]),
                pos(&grid.xs, r[1]),
                pos(&grid.ys, r[2]),
                pos(&grid.zs, r[3]),
            );
            values[idx] = r[4];
        }
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::Validation("duplicate lattice rows".into()));
        }
        Ok(Self {
            grid,
            values,
            provenance: prov,
        })
    }
}
