//! Explicit finite-volume solver for a box of material heated on its top
//! face by a Gaussian beam. Independent of the analytical machinery and
//! used to cross-check it.

use std::f64::consts::PI;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{FieldGrid, FieldResult, Provenance};
use crate::material::MaterialParams;

/// Box `[x0, x1] × [y0, y1] × [-depth, 0]` with insulated sides and bottom.
#[derive(Debug, Clone, PartialEq)]
pub struct FdConfig {
    pub x: [f64; 2],
    pub y: [f64; 2],
    pub depth: f64,
    pub cells: [usize; 3],
    pub dt: f64,
    pub steps: usize,
    pub power: f64,
    pub sigma: f64,
    /// Beam centre at `t = 0`, in m.
    pub start: [f64; 2],
    /// Beam velocity, m/s.
    pub velocity: [f64; 2],
    pub material: MaterialParams,
    pub u_init: f64,
}

pub const MAX_CELLS: usize = 2_000_000;
pub const MAX_STEPS: usize = 20_000;

impl FdConfig {
    /// Quarter box for a stationary beam at the origin, using the symmetry
    /// planes `x = 0` and `y = 0`. `h` is the cell size; the time step is
    /// the largest stable one that divides `duration` evenly.
    pub fn stationary_quarter(
        material: MaterialParams,
        power: f64,
        sigma: f64,
        u_init: f64,
        half_width: f64,
        h: f64,
        duration: f64,
    ) -> Result<Self> {
        let n = (half_width / h).round() as usize;
        let limit = h * h / (6.0 * material.kappa());
        let steps = (duration / (0.9 * limit)).ceil() as usize;
        let cfg = Self {
            x: [0.0, n as f64 * h],
            y: [0.0, n as f64 * h],
            depth: n as f64 * h,
            cells: [n, n, n],
            dt: duration / steps as f64,
            steps,
            // only a quarter of the beam lands in the box
            power,
            sigma,
            start: [0.0, 0.0],
            velocity: [0.0, 0.0],
            material,
            u_init,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn spacing(&self) -> [f64; 3] {
        [
            (self.x[1] - self.x[0]) / self.cells[0] as f64,
            (self.y[1] - self.y[0]) / self.cells[1] as f64,
            self.depth / self.cells[2] as f64,
        ]
    }

    /// `κ Δt Σ 1/h²`; the explicit scheme is stable at or below 1/2.
    pub fn stability_number(&self) -> f64 {
        let h = self.spacing();
        self.material.kappa() * self.dt * h.iter().map(|v| 1.0 / (v * v)).sum::<f64>()
    }

    pub fn duration(&self) -> f64 {
        self.dt * self.steps as f64
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.x[1] > self.x[0] && self.y[1] > self.y[0] && self.depth > 0.0) {
            return Err(Error::Validation("FD box has non-positive extent".into()));
        }
        if self.cells.iter().any(|&c| c < 2) {
            return Err(Error::Validation("FD box needs at least two cells per axis".into()));
        }
        let total: usize = self.cells.iter().product();
        if total > MAX_CELLS {
            return Err(Error::Capacity {
                requested: total,
                cap: MAX_CELLS,
            });
        }
        if self.steps == 0 || self.steps > MAX_STEPS {
            return Err(Error::Capacity {
                requested: self.steps,
                cap: MAX_STEPS,
            });
        }
        if !(self.dt > 0.0 && self.sigma > 0.0 && self.power >= 0.0) {
            return Err(Error::Validation(
                "FD time step, spot size and power must be positive".into(),
            ));
        }
        let s = self.stability_number();
        if s > 0.5 {
            return Err(Error::Validation(format!(
                "explicit step unstable: κΔtΣ1/h² = {s:.4} > 0.5"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FdResult {
    pub config: FdConfig,
    /// Cell temperatures, index `(k * ny + j) * nx + i` with `k = 0` the top
    /// layer.
    pub values: Vec<f64>,
    /// Energy deposited through the top face, J.
    pub applied_energy: f64,
    /// Gain of `ρ c_p ∫ u dV` over the run, J.
    pub enthalpy_gain: f64,
    /// Largest rise above `u_init` on the insulated far faces, K.
    pub boundary_rise: f64,
}

impl FdResult {
    fn index(&self, i: usize, j: usize, k: usize) -> usize {
        let [nx, ny, _] = self.config.cells;
        (k * ny + j) * nx + i
    }

    /// Surface temperature above cell column `(i, j)`, extrapolated from
    /// the top cell with the imposed flux gradient.
    pub fn surface_temperature(&self, i: usize, j: usize) -> f64 {
        let [hx, hy, hz] = self.config.spacing();
        let xc = self.config.x[0] + (i as f64 + 0.5) * hx;
        let yc = self.config.y[0] + (j as f64 + 0.5) * hy;
        let phi = flux_density(&self.config, xc, yc, self.config.duration());
        self.values[self.index(i, j, 0)] + 0.5 * hz * phi / self.config.material.lambda()
    }

    pub fn peak_surface_temperature(&self) -> f64 {
        let [nx, ny, _] = self.config.cells;
        (0..ny)
            .flat_map(|j| (0..nx).map(move |i| (i, j)))
            .map(|(i, j)| self.surface_temperature(i, j))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// Relative mismatch between enthalpy gain and applied energy.
    pub fn energy_error(&self) -> f64 {
        (self.enthalpy_gain - self.applied_energy).abs() / self.applied_energy.max(f64::MIN_POSITIVE)
    }

    /// Cell-centred values at the final time as a field.
    pub fn to_field(&self) -> Result<FieldResult> {
        let c = &self.config;
        let [hx, hy, hz] = c.spacing();
        let [nx, ny, nz] = c.cells;
        let xs = (0..nx).map(|i| c.x[0] + (i as f64 + 0.5) * hx).collect();
        let ys = (0..ny).map(|j| c.y[0] + (j as f64 + 0.5) * hy).collect();
        // field axes increase, so deepest layer first
        let zs = (0..nz).rev().map(|k| -(k as f64 + 0.5) * hz).collect();
        let grid = FieldGrid::new(xs, ys, zs, vec![c.duration()])?;
        let mut values = vec![0.0; grid.len()];
        for i in 0..nx {
            for j in 0..ny {
                for k in 0..nz {
                    values[grid.index(0, i, j, nz - 1 - k)] = self.values[self.index(i, j, k)];
                }
            }
        }
        Ok(FieldResult {
            grid,
            values,
            provenance: Provenance::default(),
        })
    }
}

fn flux_density(cfg: &FdConfig, x: f64, y: f64, t: f64) -> f64 {
    let cx = cfg.start[0] + cfg.velocity[0] * t;
    let cy = cfg.start[1] + cfg.velocity[1] * t;
    let s2 = cfg.sigma * cfg.sigma;
    let r2 = (x - cx).powi(2) + (y - cy).powi(2);
    cfg.power / (2.0 * PI * s2) * (-r2 / (2.0 * s2)).exp()
}

/// Runs the explicit scheme to `cfg.steps * cfg.dt`.
pub fn fd_solve(cfg: &FdConfig) -> Result<FdResult> {
    cfg.validate()?;
    let [nx, ny, nz] = cfg.cells;
    let [hx, hy, hz] = cfg.spacing();
    let kappa = cfg.material.kappa();
    let rc = cfg.material.heat_capacity();
    let (cx, cy, cz) = (
        kappa * cfg.dt / (hx * hx),
        kappa * cfg.dt / (hy * hy),
        kappa * cfg.dt / (hz * hz),
    );
    let layer = nx * ny;
    let mut u = vec![cfg.u_init; layer * nz];
    let mut next = u.clone();
    let mut source = vec![0.0; layer];
    let mut applied = 0.0;

    for step in 0..cfg.steps {
        // flux sampled at mid-step
        let t = (step as f64 + 0.5) * cfg.dt;
        let mut total = 0.0;
        for j in 0..ny {
            let yc = cfg.y[0] + (j as f64 + 0.5) * hy;
            for i in 0..nx {
                let xc = cfg.x[0] + (i as f64 + 0.5) * hx;
                let q = flux_density(cfg, xc, yc, t);
                source[j * nx + i] = q * cfg.dt / (rc * hz);
                total += q;
            }
        }
        applied += total * hx * hy * cfg.dt;

        next.par_chunks_mut(layer).enumerate().for_each(|(k, out)| {
            let cur = &u[k * layer..(k + 1) * layer];
            let above = (k > 0).then(|| &u[(k - 1) * layer..k * layer]);
            let below = (k + 1 < nz).then(|| &u[(k + 1) * layer..(k + 2) * layer]);
            for j in 0..ny {
                for i in 0..nx {
                    let c = j * nx + i;
                    let v = cur[c];
                    let mut d = 0.0;
                    if i > 0 {
                        d += cx * (cur[c - 1] - v);
                    }
                    if i + 1 < nx {
                        d += cx * (cur[c + 1] - v);
                    }
                    if j > 0 {
                        d += cy * (cur[c - nx] - v);
                    }
                    if j + 1 < ny {
                        d += cy * (cur[c + nx] - v);
                    }
                    if let Some(a) = above {
                        d += cz * (a[c] - v);
                    }
                    if let Some(b) = below {
                        d += cz * (b[c] - v);
                    }
                    out[c] = v + d + if k == 0 { source[c] } else { 0.0 };
                }
            }
        });
        std::mem::swap(&mut u, &mut next);
    }

    if let Some(bad) = u.iter().find(|v| !v.is_finite()) {
        return Err(Error::Numerical {
            node: cfg.duration(),
            value: *bad,
        });
    }
    let enthalpy_gain = rc * hx * hy * hz * u.iter().map(|v| v - cfg.u_init).sum::<f64>();
    let mut boundary_rise = 0.0f64;
    for k in 0..nz {
        for j in 0..ny {
            for i in 0..nx {
                if i + 1 == nx || j + 1 == ny || k + 1 == nz {
                    boundary_rise = boundary_rise.max(u[(k * ny + j) * nx + i] - cfg.u_init);
                }
            }
        }
    }
    Ok(FdResult {
        config: cfg.clone(),
        values: u,
        applied_energy: applied,
        enthalpy_gain,
        boundary_rise,
    })
}
