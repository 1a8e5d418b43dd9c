use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use super::terms::{is_heating, lookup_keys, TermPlan};
use crate::error::{Error, Result};
use crate::frame::FrameKind;
use crate::material::MaterialParams;
use crate::path::BeamPath;
use crate::quadrature::{cached, LutFamily, QuadratureLut, DEFAULT_REF_ORDER};

/// How quadrature orders are chosen per term.
#[derive(Debug, Clone)]
pub enum OrderPolicy {
    /// The same order for every integral.
    Fixed(usize),
    /// Nearest-grid-point lookup in the two tables.
    Lut {
        flux: Arc<QuadratureLut>,
        contribution: Arc<QuadratureLut>,
    },
}

impl OrderPolicy {
    pub fn reference() -> Self {
        OrderPolicy::Fixed(DEFAULT_REF_ORDER)
    }

    pub fn from_luts(flux: QuadratureLut, contribution: QuadratureLut) -> Result<Self> {
        if flux.family() != LutFamily::Flux || contribution.family() != LutFamily::Contribution {
            return Err(Error::Validation("LUT families swapped or mismatched".into()));
        }
        Ok(OrderPolicy::Lut {
            flux: Arc::new(flux),
            contribution: Arc::new(contribution),
        })
    }

    /// The same tables, but every lookup replaced by the reference order.
    pub fn forced_reference(&self) -> Self {
        match self {
            OrderPolicy::Fixed(m) => OrderPolicy::Fixed(*m),
            OrderPolicy::Lut { flux, .. } => OrderPolicy::Fixed(flux.ref_order()),
        }
    }
}

/// A single-point evaluation request.
#[derive(Debug, Clone)]
pub struct EvalRequest {
    pub path: BeamPath,
    pub material: MaterialParams,
    pub point: [f64; 3],
    pub time: f64,
    pub policy: OrderPolicy,
}

/// Temperature at one point and time.
pub fn evaluate(req: &EvalRequest) -> Result<f64> {
    Evaluator::new(req.path.clone(), req.material, req.policy.clone()).evaluate(req.point, req.time)
}

/// Evaluates the superposed solution for a path. Shareable across threads.
#[derive(Debug)]
pub struct Evaluator {
    path: BeamPath,
    material: MaterialParams,
    policy: OrderPolicy,
    clamped: AtomicUsize,
}

/// All terms active at one time, planned once and evaluated per point.
#[derive(Debug, Clone)]
pub struct TimePlan {
    u_init: f64,
    terms: Vec<TermPlan>,
}

impl TimePlan {
    /// Temperature in kelvin. `point[2]` must be `<= 0`; not rechecked here.
    pub fn eval(&self, point: [f64; 3]) -> f64 {
        let mut u = self.u_init;
        for t in &self.terms {
            u += t.eval(point);
        }
        u
    }

    /// Number of integrals summed per point.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }
}

impl Evaluator {
    pub fn new(path: BeamPath, material: MaterialParams, policy: OrderPolicy) -> Self {
        Self {
            path,
            material,
            policy,
            clamped: AtomicUsize::new(0),
        }
    }

    pub fn path(&self) -> &BeamPath {
        &self.path
    }

    pub fn material(&self) -> &MaterialParams {
        &self.material
    }

    pub fn policy(&self) -> &OrderPolicy {
        &self.policy
    }

    /// Lookups so far that fell outside a table.
    pub fn clamped_lookups(&self) -> usize {
        self.clamped.load(Ordering::Relaxed)
    }

    fn order_for(&self, kind: FrameKind, keys: (f64, f64, f64)) -> usize {
        let (tbar, tbar_f, vbar) = keys;
        match &self.policy {
            OrderPolicy::Fixed(m) => *m,
            OrderPolicy::Lut { flux, contribution } => {
                let r = match kind {
                    FrameKind::Flux => flux.lookup_flux(tbar, vbar),
                    FrameKind::Contribution => contribution.lookup_contribution(tbar, tbar_f, vbar),
                };
                if r.clamped && self.clamped.fetch_add(1, Ordering::Relaxed) == 0 {
                    log::warn!(
                        "{} lookup outside table (t̄ = {tbar:.4}, t̄^f = {tbar_f:.4}, v̄ = {vbar:.4}); clamped",
                        match kind {
                            FrameKind::Flux => "flux",
                            FrameKind::Contribution => "contribution",
                        }
                    );
                }
                r.order
            }
        }
    }

    /// Plans every term active at time `t`.
    pub fn plan(&self, t: f64) -> Result<TimePlan> {
        let end = self.path.end_time();
        // times produced by grid arithmetic may overshoot the end by an ulp
        let t = if t > end && t - end <= 1e-12 * end.abs() {
            end
        } else {
            t
        };
        let n = self.path.locate(t)?;
        let segs = self.path.segments();
        let mut terms = Vec::with_capacity(n + 1);
        for seg in &segs[..n] {
            if !is_heating(seg, &self.material) {
                continue;
            }
            let keys = lookup_keys(seg, &self.material, FrameKind::Contribution, t);
            let q = cached(self.order_for(FrameKind::Contribution, keys))?;
            terms.push(TermPlan::contribution(seg, &self.material, t, &q)?);
        }
        let active = &segs[n];
        if is_heating(active, &self.material) {
            let keys = lookup_keys(active, &self.material, FrameKind::Flux, t);
            let q = cached(self.order_for(FrameKind::Flux, keys))?;
            terms.push(TermPlan::flux(active, &self.material, t, &q)?);
        }
        Ok(TimePlan {
            u_init: self.path.u_init(),
            terms,
        })
    }

    pub fn evaluate(&self, point: [f64; 3], t: f64) -> Result<f64> {
        check_point(point)?;
        Ok(self.plan(t)?.eval(point))
    }

    pub fn evaluate_many(&self, points: &[[f64; 3]], t: f64) -> Result<Vec<f64>> {
        points.iter().try_for_each(|p| check_point(*p))?;
        let plan = self.plan(t)?;
        Ok(points.iter().map(|&p| plan.eval(p)).collect())
    }
}

fn check_point(p: [f64; 3]) -> Result<()> {
    if p.iter().any(|c| !c.is_finite()) || p[2] > 0.0 {
        return Err(Error::Domain(format!(
            "evaluation point {p:?} not in the closed lower half-space"
        )));
    }
    Ok(())
}
