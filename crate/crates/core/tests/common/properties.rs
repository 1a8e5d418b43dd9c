//! Randomised invariants of the assembled solution. Each check takes the
//! number of cases so the acceptance run and the property target share
//! one definition.

use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use pbfheat::frame::temperature_scale;
use pbfheat::quadrature::DEFAULT_TOL;
use pbfheat::{BeamPath, Evaluator, MaterialParams, OrderPolicy, Segment};

use super::{material, tables};

/// A random horizontal path of one to three contiguous melt segments, the
/// evaluation time and a point near the heated track.
#[derive(Debug, Clone)]
pub struct Case {
    pub path: BeamPath,
    pub time: f64,
    pub point: [f64; 3],
}

prop_compose! {
    fn seg_params()(power in 20.0..200.0f64, sigma in 5e-5..3e-4f64, speed in 0.2..3.0f64, len in 2e-4..3e-3f64)
        -> (f64, f64, f64, f64) {
        (power, sigma, speed, len)
    }
}

pub fn case() -> impl Strategy<Value = Case> {
    case_to_depth(3e-4)
}

/// Points on the heated surface only.
pub fn surface_case() -> impl Strategy<Value = Case> {
    case_to_depth(0.0)
}

fn case_to_depth(max_depth: f64) -> impl Strategy<Value = Case> {
    (
        prop::collection::vec(seg_params(), 1..=3),
        -2e-3..2e-3f64,
        0.02..1.0f64,
        -1.0..1.0f64,
        -1.0..1.0f64,
        0.0..1.0f64,
    )
        .prop_map(move |(params, y0, frac, px, py, pz)| {
            let mut segs = Vec::new();
            let (mut t, mut x) = (0.0, -1e-3);
            for (power, sigma, speed, len) in params {
                let s = Segment::traverse(t, [x, y0], [x + len, y0], power, sigma, speed).unwrap();
                t = s.t_f();
                x += len;
                segs.push(s);
            }
            let path = BeamPath::new(segs, 1000.0).unwrap();
            let time = frac * path.end_time();
            let n = path.locate(time).unwrap();
            let c = path.segments()[n].position_at(time);
            let point = [c[0] + 1e-3 * px, y0 + 5e-4 * py, -max_depth * pz];
            Case { path, time, point }
        })
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    })
}

fn u(path: &BeamPath, m: MaterialParams, policy: OrderPolicy, p: [f64; 3], t: f64) -> Result<f64, TestCaseError> {
    Evaluator::new(path.clone(), m, policy)
        .evaluate(p, t)
        .map_err(|e| TestCaseError::fail(e.to_string()))
}

fn check(cases: u32, f: impl Fn(Case) -> Result<(), TestCaseError>) -> Result<(), String> {
    runner(cases).run(&case(), f).map_err(|e| e.to_string())
}

pub fn y_symmetry(cases: u32) -> Result<(), String> {
    check(cases, |c| {
        let y0 = c.path.segments()[0].start()[1];
        let d = c.point[1] - y0;
        let pol = OrderPolicy::Fixed(200);
        let a = u(
            &c.path,
            material(),
            pol.clone(),
            [c.point[0], y0 + d, c.point[2]],
            c.time,
        )?;
        let b = u(&c.path, material(), pol, [c.point[0], y0 - d, c.point[2]], c.time)?;
        prop_assert!((a - b).abs() <= 4.0 * f64::EPSILON * a, "{} vs {}", a, b);
        Ok(())
    })
}

pub fn depth_monotone(cases: u32) -> Result<(), String> {
    check(cases, |c| {
        let pol = OrderPolicy::Fixed(200);
        let mut last = f64::INFINITY;
        for k in 0..6 {
            let z = c.point[2] - k as f64 * 5e-5;
            let v = u(&c.path, material(), pol.clone(), [c.point[0], c.point[1], z], c.time)?;
            prop_assert!(v <= last + 1e-9, "u rose with depth: {} after {}", v, last);
            last = v;
        }
        Ok(())
    })
}

pub fn positivity(cases: u32) -> Result<(), String> {
    check(cases, |c| {
        let v = u(&c.path, material(), OrderPolicy::Fixed(100), c.point, c.time)?;
        prop_assert!(v >= c.path.u_init(), "{} below initial temperature", v);
        Ok(())
    })
}

pub fn power_linearity(cases: u32) -> Result<(), String> {
    check(cases, |c| {
        let pol = OrderPolicy::Fixed(200);
        let base = u(&c.path, material(), pol.clone(), c.point, c.time)? - c.path.u_init();
        let scaled = c.path.scaled_power(2.5).unwrap();
        let rise = u(&scaled, material(), pol, c.point, c.time)? - c.path.u_init();
        prop_assert!(
            (rise - 2.5 * base).abs() <= 1e-12 * rise.abs().max(1.0),
            "{} vs {}",
            rise,
            2.5 * base
        );
        Ok(())
    })
}

pub fn translation(cases: u32) -> Result<(), String> {
    check(cases, |c| {
        let (dx, dy) = (3.7e-3, -1.3e-3);
        let pol = OrderPolicy::Fixed(200);
        let a = u(&c.path, material(), pol.clone(), c.point, c.time)?;
        let moved = c.path.translated(dx, dy).unwrap();
        let b = u(
            &moved,
            material(),
            pol,
            [c.point[0] + dx, c.point[1] + dy, c.point[2]],
            c.time,
        )?;
        prop_assert!((a - b).abs() <= 1e-9, "{} vs {}", a, b);
        Ok(())
    })
}

pub fn rotation(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&(case(), 0.0..std::f64::consts::TAU), |(c, angle)| {
            let pol = OrderPolicy::reference();
            let a = u(&c.path, material(), pol.clone(), c.point, c.time)?;
            let (s, co) = angle.sin_cos();
            let p = [
                co * c.point[0] - s * c.point[1],
                s * c.point[0] + co * c.point[1],
                c.point[2],
            ];
            let b = u(&c.path.rotated(angle).unwrap(), material(), pol, p, c.time)?;
            prop_assert!((a - b).abs() <= 1e-10, "{} vs {} (angle {})", a, b, angle);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn refinement(c: &Case, m: usize, policy: OrderPolicy) -> Result<(), TestCaseError> {
    let mat = material();
    let a = u(&c.path, mat, policy.clone(), c.point, c.time)?;
    let b = u(&c.path.refined(m).unwrap(), mat, policy, c.point, c.time)?;
    let t_max = c
        .path
        .segments()
        .iter()
        .map(|s| temperature_scale(s.power(), s.sigma(), &mat))
        .fold(0.0, f64::max);
    let bound = 10.0 * DEFAULT_TOL * t_max;
    prop_assert!((a - b).abs() <= bound, "{} vs {} (bound {})", a, b, bound);
    Ok(())
}

/// Table-driven orders, on the surface where the tables are audited.
pub fn partition_refinement(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&(surface_case(), 2usize..=5), |(c, m)| {
            refinement(&c, m, tables().policy())
        })
        .map_err(|e| e.to_string())
}

/// Reference order, at any depth.
pub fn partition_refinement_reference(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&(case(), 2usize..=5), |(c, m)| {
            refinement(&c, m, OrderPolicy::reference())
        })
        .map_err(|e| e.to_string())
}

/// Forcing the reference order everywhere moves surface temperatures by
/// less than `TOL · T_max`.
pub fn lookup_degradation(cases: u32) -> Result<(), String> {
    runner(cases)
        .run(&surface_case(), |c| {
            let mat = material();
            let pol = tables().policy();
            let a = u(&c.path, mat, pol.clone(), c.point, c.time)?;
            let b = u(&c.path, mat, pol.forced_reference(), c.point, c.time)?;
            let t_max = c
                .path
                .segments()
                .iter()
                .map(|s| temperature_scale(s.power(), s.sigma(), &mat))
                .fold(0.0, f64::max);
            prop_assert!((a - b).abs() < DEFAULT_TOL * t_max, "{} vs {}", a, b);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

/// Every property, by name.
pub type Check = fn(u32) -> Result<(), String>;

pub fn all() -> [(&'static str, Check); 8] {
    [
        ("y-symmetry", y_symmetry),
        ("depth monotonicity", depth_monotone),
        ("positivity", positivity),
        ("power linearity", power_linearity),
        ("translation invariance", translation),
        ("rotation equivariance", rotation),
        ("partition refinement (table orders, surface)", partition_refinement),
        (
            "partition refinement (reference order, any depth)",
            partition_refinement_reference,
        ),
    ]
}
