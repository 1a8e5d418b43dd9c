//! Gauss–Legendre rules, the required-order look-up tables and their file
//! format.

pub(crate) mod lut;
mod lut_io;

pub use lut::{
    audit_lut, build_lut, default_schedule, AuditReport, LookupResult, LutConfig, LutFamily, ProbeSet, QuadratureLut,
    DEFAULT_REF_ORDER, DEFAULT_TOL, LOOKUP_MARGIN,
};
pub use lut_io::{load_lut, save_lut, LUT_MAGIC};

use std::sync::{Arc, OnceLock};

use crate::error::{Error, Result};

/// Largest order [`gauss_legendre`] will generate.
pub const MAX_ORDER: usize = 1024;

/// Nodes and weights of an `order`-point Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Quadrature {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights mapped onto `[0, t]`, weights including the `t/2`
    /// Jacobian.
    pub fn mapped(&self, t: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let h = 0.5 * t;
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&s, &w)| (h * (s + 1.0), h * w))
    }
}

/// Legendre polynomial `p_n(x)` and its derivative, by the three-term
/// recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { p0 } else { p1 };
    let dp = if n == 0 {
        0.0
    } else {
        n as f64 * (x * p1 - p0) / (x * x - 1.0)
    };
    (p, dp)
}

/// Generates the rule of the given order by Newton iteration on the
/// Legendre recurrence from Chebyshev-like initial guesses.
pub fn gauss_legendre(order: usize) -> Result<Quadrature> {
    if order == 0 {
        return Err(Error::Validation("quadrature order must be at least 1".into()));
    }
    if order > MAX_ORDER {
        return Err(Error::Capacity {
            requested: order,
            cap: MAX_ORDER,
        });
    }
    let n = order;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // i-th largest root
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-15 * x.abs().max(1e-300) {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d.is_finite() {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(Quadrature { nodes, weights })
}

/// `∫_0^t f(s) ds` with the rule mapped onto `[0, t]`. Returns 0 for `t == 0`.
pub fn integrate(q: &Quadrature, t: f64, mut f: impl FnMut(f64) -> f64) -> Result<f64> {
    if t == 0.0 {
        return Ok(0.0);
    }
    if !(t > 0.0) {
        return Err(Error::Domain(format!("upper limit must be non-negative, got {t}")));
    }
    let mut acc = 0.0;
    for (s, w) in q.mapped(t) {
        let v = f(s);
        if !v.is_finite() {
            return Err(Error::Numerical { node: s, value: v });
        }
        acc += w * v;
    }
    Ok(acc)
}

static CACHE: [OnceLock<Arc<Quadrature>>; MAX_ORDER + 1] = [const { OnceLock::new() }; MAX_ORDER + 1];

/// Shared, lazily generated rule of the given order.
pub fn cached(order: usize) -> Result<Arc<Quadrature>> {
    if order == 0 || order > MAX_ORDER {
        // surfaces the same error as direct generation
        return gauss_legendre(order).map(Arc::new);
    }
    if let Some(q) = CACHE[order].get() {
        return Ok(q.clone());
    }
    let q = Arc::new(gauss_legendre(order)?);
    Ok(CACHE[order].get_or_init(|| q).clone())
}
