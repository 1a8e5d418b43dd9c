//! Required-order tables for the two integral families.
//!
//! For every grid point in parameter space the builder integrates the
//! family's integrand over a fixed set of probe positions with a high-order
//! reference rule and with rules of increasing order, and records the first
//! order whose worst probe deviation is below the tolerance.

use rayon::prelude::*;

use super::{cached, Quadrature};
use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_REF_ORDER: usize = 800;
/// Orders added to every table lookup.
pub const LOOKUP_MARGIN: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LutFamily {
    /// Integrals of the active segment, keyed on `(t̄, v̄)`.
    Flux,
    /// Integrals of completed segments, keyed on `(t̄^f, t̄, v̄)`.
    Contribution,
}

impl LutFamily {
    pub fn name(self) -> &'static str {
        match self {
            LutFamily::Flux => "flux",
            LutFamily::Contribution => "contribution",
        }
    }
}

/// `2, 4, …, 48`, then ×1.25 rounded up to even, ending exactly at `cap`.
pub fn default_schedule(cap: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (1..=24).map(|k| 2 * k).filter(|&m| m <= cap).collect();
    let mut m = 48usize;
    while m < cap {
        let next = (m as f64 * 1.25).ceil() as usize;
        m = (next + next % 2).min(cap);
        out.push(m);
    }
    if out.last() != Some(&cap) {
        out.push(cap);
    }
    out
}

/// Spatial probe positions at which a candidate order must agree with the
/// reference. Positions are a tensor product so the integrand factorises
/// per node.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbeSet {
    pub nx: usize,
    pub ny: usize,
    /// Depth samples, in units of the lateral margin / 5.
    pub z: Vec<f64>,
    /// Lateral margin around the heated track.
    pub margin: f64,
}

impl Default for ProbeSet {
    fn default() -> Self {
        Self {
            nx: 64,
            ny: 8,
            z: vec![0.0, 0.5, 2.0],
            margin: 5.0,
        }
    }
}

/// Probe coordinates for one grid point.
struct Probes {
    x: Vec<f64>,
    y: Vec<f64>,
    z: Vec<f64>,
}

impl ProbeSet {
    fn at(&self, family: LutFamily, tbar: f64, vbar: f64, tbar_f: f64) -> Probes {
        // contribution heat has spread by √(1 + t̄²) in the scaled frame
        let (tail, spread) = match family {
            LutFamily::Flux => (2.0 * vbar * tbar * tbar, 1.0),
            LutFamily::Contribution => (2.0 * vbar * tbar_f * tbar_f, (1.0 + tbar * tbar).sqrt()),
        };
        let m = self.margin * spread;
        Probes {
            x: linspace(-(tail + m), m, self.nx),
            y: linspace(0.0, m, self.ny),
            z: self.z.iter().map(|z| z * spread).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny * self.z.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub(crate) fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

pub(crate) fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (a.log10(), b.log10());
    let mut v: Vec<f64> = linspace(la, lb, n).into_iter().map(|e| 10f64.powf(e)).collect();
    if n > 1 {
        v[0] = a;
        v[n - 1] = b;
    }
    v
}

/// Everything [`build_lut`] needs.
#[derive(Debug, Clone, PartialEq)]
pub struct LutConfig {
    pub family: LutFamily,
    pub tbar: Vec<f64>,
    pub vbar: Vec<f64>,
    /// Empty for the flux family.
    pub tbar_f: Vec<f64>,
    pub tol: f64,
    pub ref_order: usize,
    pub schedule: Vec<usize>,
    pub probes: ProbeSet,
}

impl LutConfig {
    /// Default grids: `t̄` log-spaced on `[1e-2, 1e2]` (60), `v̄` linear on
    /// `[0, 50]` (51), and for contributions `t̄^f` log-spaced on
    /// `[1e-2, 1e2]` (30).
    pub fn default_for(family: LutFamily) -> Self {
        Self {
            family,
            tbar: logspace(1e-2, 1e2, 60),
            vbar: linspace(0.0, 50.0, 51),
            tbar_f: match family {
                LutFamily::Flux => vec![],
                LutFamily::Contribution => logspace(1e-2, 1e2, 30),
            },
            tol: DEFAULT_TOL,
            ref_order: DEFAULT_REF_ORDER,
            schedule: default_schedule(DEFAULT_REF_ORDER),
            probes: ProbeSet::default(),
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    /// Replaces the grids with `n_t × n_v (× n_tf)` points over the same
    /// ranges.
    pub fn with_grid_sizes(mut self, n_t: usize, n_v: usize, n_tf: usize) -> Self {
        self.tbar = logspace(1e-2, 1e2, n_t);
        self.vbar = linspace(0.0, 50.0, n_v);
        if self.family == LutFamily::Contribution {
            self.tbar_f = logspace(1e-2, 1e2, n_tf);
        }
        self
    }

    fn validate(&self) -> Result<()> {
        let sorted = |a: &[f64]| !a.is_empty() && a.windows(2).all(|w| w[0] < w[1]) && a.iter().all(|v| v.is_finite());
        if !sorted(&self.tbar) || !sorted(&self.vbar) {
            return Err(Error::Validation(
                "LUT grids must be non-empty and strictly increasing".into(),
            ));
        }
        match self.family {
            LutFamily::Flux if !self.tbar_f.is_empty() => {
                return Err(Error::Validation("flux tables have no t̄^f axis".into()))
            }
            LutFamily::Contribution if !sorted(&self.tbar_f) => {
                return Err(Error::Validation(
                    "contribution t̄^f grid must be non-empty and increasing".into(),
                ))
            }
            _ => {}
        }
        if self.tbar[0] < 0.0 || self.vbar[0] < 0.0 || self.tbar_f.first().is_some_and(|&v| v < 0.0) {
            return Err(Error::Validation("LUT grids must be non-negative".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Validation(format!(
                "tolerance must be positive, got {}",
                self.tol
            )));
        }
        if self.ref_order == 0 || self.ref_order > u16::MAX as usize {
            return Err(Error::Validation(format!("bad reference order {}", self.ref_order)));
        }
        if self.schedule.is_empty()
            || self.schedule[0] == 0
            || !self.schedule.windows(2).all(|w| w[0] < w[1])
            || *self.schedule.last().unwrap() > self.ref_order
        {
            return Err(Error::Validation(
                "order schedule must be strictly increasing, positive and capped by the reference order".into(),
            ));
        }
        if self.probes.is_empty() {
            return Err(Error::Validation("empty probe set".into()));
        }
        Ok(())
    }
}

/// Table of required orders. Flat layout: flux `[t̄][v̄]`, contribution
/// `[t̄^f][t̄][v̄]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureLut {
    pub(crate) family: LutFamily,
    pub(crate) tbar: Vec<f64>,
    pub(crate) vbar: Vec<f64>,
    pub(crate) tbar_f: Vec<f64>,
    pub(crate) orders: Vec<u16>,
    pub(crate) tol: f64,
    pub(crate) ref_order: u16,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LookupResult {
    pub order: usize,
    /// The query fell outside the table and was clamped to its boundary.
    pub clamped: bool,
}

impl QuadratureLut {
    pub fn family(&self) -> LutFamily {
        self.family
    }
    pub fn tbar_axis(&self) -> &[f64] {
        &self.tbar
    }
    pub fn vbar_axis(&self) -> &[f64] {
        &self.vbar
    }
    pub fn tbar_f_axis(&self) -> &[f64] {
        &self.tbar_f
    }
    pub fn orders(&self) -> &[u16] {
        &self.orders
    }
    pub fn tol(&self) -> f64 {
        self.tol
    }
    pub fn ref_order(&self) -> usize {
        self.ref_order as usize
    }

    fn index(&self, itf: usize, it: usize, iv: usize) -> usize {
        (itf * self.tbar.len() + it) * self.vbar.len() + iv
    }

    /// Stored order at a flux grid point.
    pub fn flux_order(&self, it: usize, iv: usize) -> usize {
        self.orders[self.index(0, it, iv)] as usize
    }

    /// Stored order at a contribution grid point.
    pub fn contribution_order(&self, itf: usize, it: usize, iv: usize) -> usize {
        self.orders[self.index(itf, it, iv)] as usize
    }

    /// Grid coordinates `(t̄^f, t̄, v̄)` of a flat index (`t̄^f` is NaN for flux).
    pub fn point(&self, flat: usize) -> (f64, f64, f64) {
        let nv = self.vbar.len();
        let nt = self.tbar.len();
        let iv = flat % nv;
        let it = (flat / nv) % nt;
        let itf = flat / (nv * nt);
        let tf = self.tbar_f.get(itf).copied().unwrap_or(f64::NAN);
        (tf, self.tbar[it], self.vbar[iv])
    }

    /// Order for the active-segment integral at `(t̄, v̄)`.
    pub fn lookup_flux(&self, tbar: f64, vbar: f64) -> LookupResult {
        if self.family != LutFamily::Flux {
            return self.degraded();
        }
        self.lookup_inner(None, tbar, vbar)
    }

    /// Order for a completed-segment integral at `(t̄, t̄^f, v̄)`.
    pub fn lookup_contribution(&self, tbar: f64, tbar_f: f64, vbar: f64) -> LookupResult {
        if self.family != LutFamily::Contribution {
            return self.degraded();
        }
        self.lookup_inner(Some(tbar_f), tbar, vbar)
    }

    fn degraded(&self) -> LookupResult {
        LookupResult {
            order: self.ref_order(),
            clamped: true,
        }
    }

    fn lookup_inner(&self, tbar_f: Option<f64>, tbar: f64, vbar: f64) -> LookupResult {
        let (ct, clamp_t) = nearest(&self.tbar, tbar);
        let (cv, clamp_v) = nearest(&self.vbar, vbar);
        let (ctf, clamp_tf) = match tbar_f {
            Some(tf) => nearest(&self.tbar_f, tf),
            None => (Nearest::One(0), false),
        };
        let mut best = 0u16;
        for itf in ctf.iter() {
            for it in ct.iter() {
                for iv in cv.iter() {
                    best = best.max(self.orders[self.index(itf, it, iv)]);
                }
            }
        }
        LookupResult {
            order: (best as usize + LOOKUP_MARGIN).min(self.ref_order()),
            clamped: clamp_t || clamp_v || clamp_tf,
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Nearest {
    One(usize),
    /// Equidistant; the caller takes the larger order.
    Tie(usize),
}

impl Nearest {
    fn iter(self) -> impl Iterator<Item = usize> {
        match self {
            Nearest::One(i) => i..i + 1,
            Nearest::Tie(i) => i..i + 2,
        }
    }
}

fn nearest(axis: &[f64], v: f64) -> (Nearest, bool) {
    let last = axis.len() - 1;
    if v.is_nan() {
        return (Nearest::One(last), true);
    }
    if v <= axis[0] {
        return (Nearest::One(0), v < axis[0]);
    }
    if v >= axis[last] {
        return (Nearest::One(last), v > axis[last]);
    }
    let hi = axis.partition_point(|&a| a < v);
    let lo = hi - 1;
    let (dl, dh) = (v - axis[lo], axis[hi] - v);
    let n = if dl < dh {
        Nearest::One(lo)
    } else if dh < dl {
        Nearest::One(hi)
    } else {
        Nearest::Tie(lo)
    };
    (n, false)
}

/// Integrals `∫_0^L g(τ; probe) dτ` for every probe at once, with
/// `L = t̄` (flux) or `L = t̄^f` (contribution).
fn probe_integrals(
    family: LutFamily,
    q: &Quadrature,
    tbar: f64,
    vbar: f64,
    tbar_f: f64,
    probes: &Probes,
    out: &mut Vec<f64>,
) {
    let (nx, ny, nz) = (probes.x.len(), probes.y.len(), probes.z.len());
    out.clear();
    out.resize(nx * ny * nz, 0.0);
    let upper = match family {
        LutFamily::Flux => tbar,
        LutFamily::Contribution => tbar_f,
    };
    if upper == 0.0 {
        return;
    }
    let mut ex = vec![0.0; nx];
    let mut eyz = vec![0.0; ny * nz];
    let t2 = tbar * tbar;
    for (tau, w) in q.mapped(upper) {
        let tau2 = tau * tau;
        let (c, a, b) = match family {
            LutFamily::Flux => {
                let a = 1.0 + tau2;
                (w / a, a, tau2)
            }
            LutFamily::Contribution => {
                let b = tau2 + t2;
                let a = 1.0 + b;
                (w * tau / (b.sqrt() * a), a, b)
            }
        };
        let shift = vbar * tau2;
        for (e, &x) in ex.iter_mut().zip(&probes.x) {
            let d = x + shift;
            *e = (-d * d / a).exp();
        }
        for (j, &y) in probes.y.iter().enumerate() {
            let ey = c * (-y * y / a).exp();
            for (k, &z) in probes.z.iter().enumerate() {
                let ez = if z == 0.0 { 1.0 } else { (-z * z / b).exp() };
                eyz[j * nz + k] = ey * ez;
            }
        }
        for (jk, &f) in eyz.iter().enumerate() {
            if f == 0.0 {
                continue;
            }
            let row = &mut out[jk * nx..(jk + 1) * nx];
            for (o, &e) in row.iter_mut().zip(&ex) {
                *o += f * e;
            }
        }
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Runs the table generation over every grid point (in parallel).
pub fn build_lut(cfg: &LutConfig) -> Result<QuadratureLut> {
    cfg.validate()?;
    let reference = cached(cfg.ref_order)?;
    let rules = cfg.schedule.iter().map(|&m| cached(m)).collect::<Result<Vec<_>>>()?;
    let tf_axis: Vec<f64> = match cfg.family {
        LutFamily::Flux => vec![f64::NAN],
        LutFamily::Contribution => cfg.tbar_f.clone(),
    };
    let (nt, nv) = (cfg.tbar.len(), cfg.vbar.len());
    let total = tf_axis.len() * nt * nv;

    let orders = (0..total)
        .into_par_iter()
        .map_init(
            || (Vec::new(), Vec::new()),
            |(ref_buf, buf), flat| {
                let iv = flat % nv;
                let it = (flat / nv) % nt;
                let tf = tf_axis[flat / (nv * nt)];
                let (t, v) = (cfg.tbar[it], cfg.vbar[iv]);
                let probes = cfg.probes.at(cfg.family, t, v, tf);
                probe_integrals(cfg.family, &reference, t, v, tf, &probes, ref_buf);
                for rule in &rules {
                    probe_integrals(cfg.family, rule, t, v, tf, &probes, buf);
                    if max_abs_diff(ref_buf, buf) < cfg.tol {
                        return Ok(rule.order() as u16);
                    }
                }
                Err(Error::Build(format!(
                    "{} table: no scheduled order meets tol {} at t̄ = {t}, v̄ = {v}{}",
                    cfg.family.name(),
                    cfg.tol,
                    if tf.is_nan() {
                        String::new()
                    } else {
                        format!(", t̄^f = {tf}")
                    }
                )))
            },
        )
        .collect::<Result<Vec<u16>>>()?;

    Ok(QuadratureLut {
        family: cfg.family,
        tbar: cfg.tbar.clone(),
        vbar: cfg.vbar.clone(),
        tbar_f: cfg.tbar_f.clone(),
        orders,
        tol: cfg.tol,
        ref_order: cfg.ref_order as u16,
    })
}

/// Outcome of re-verifying a table.
#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub family: LutFamily,
    pub points: usize,
    /// Flat indices that failed together with their measured deviation.
    pub failures: Vec<(usize, f64)>,
    /// Largest deviation divided by the table's tolerance.
    pub worst_ratio: f64,
}

impl AuditReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Recomputes the reference integrals at every grid point and checks that
/// the stored order meets the stored tolerance over the probe set.
pub fn audit_lut(lut: &QuadratureLut, probes: &ProbeSet) -> Result<AuditReport> {
    let reference = cached(lut.ref_order())?;
    let (nt, nv) = (lut.tbar.len(), lut.vbar.len());
    let results: Vec<(usize, f64, bool)> = (0..lut.orders.len())
        .into_par_iter()
        .map_init(
            || (Vec::new(), Vec::new()),
            |(ref_buf, buf), flat| -> Result<(usize, f64, bool)> {
                let iv = flat % nv;
                let it = (flat / nv) % nt;
                let tf = match lut.family {
                    LutFamily::Flux => f64::NAN,
                    LutFamily::Contribution => lut.tbar_f[flat / (nv * nt)],
                };
                let (t, v) = (lut.tbar[it], lut.vbar[iv]);
                let order = lut.orders[flat] as usize;
                if order == 0 || order > lut.ref_order() {
                    return Ok((flat, f64::INFINITY, false));
                }
                let pr = probes.at(lut.family, t, v, tf);
                probe_integrals(lut.family, &reference, t, v, tf, &pr, ref_buf);
                probe_integrals(lut.family, &*cached(order)?, t, v, tf, &pr, buf);
                let err = max_abs_diff(ref_buf, buf);
                Ok((flat, err, err < lut.tol))
            },
        )
        .collect::<Result<_>>()?;
    let worst = results.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(AuditReport {
        family: lut.family,
        points: results.len(),
        failures: results.iter().filter(|r| !r.2).map(|r| (r.0, r.1)).collect(),
        worst_ratio: worst / lut.tol,
    })
}
