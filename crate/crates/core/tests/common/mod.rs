#![allow(dead_code)]

pub mod properties;

use std::path::PathBuf;
use std::sync::{Arc, OnceLock};

use pbfheat::quadrature::{build_lut, load_lut, save_lut, LutConfig, LutFamily, QuadratureLut};
use pbfheat::{load_path, parse_material, BeamPath, MaterialParams, OrderPolicy};

pub fn material() -> MaterialParams {
    MaterialParams::from_diffusivity(4430.0, 20.0, 8.4495e-6).unwrap()
}

pub fn example_material() -> MaterialParams {
    parse_material(&pbfheat::scenarios::example_material_text())
        .unwrap()
        .material
}

pub fn path(text: &str) -> BeamPath {
    load_path(text, 1000.0).unwrap()
}

fn cache_file(family: LutFamily) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(format!("{}.lut", family.name()))
}

fn matches(lut: &QuadratureLut, cfg: &LutConfig) -> bool {
    lut.family() == cfg.family
        && lut.tol() == cfg.tol
        && lut.ref_order() == cfg.ref_order
        && lut.tbar_axis() == cfg.tbar.as_slice()
        && lut.vbar_axis() == cfg.vbar.as_slice()
        && (cfg.family == LutFamily::Flux || lut.tbar_f_axis() == cfg.tbar_f.as_slice())
}

/// Default-size table, built once and kept in the cargo test scratch
/// directory between runs.
pub fn default_lut(family: LutFamily) -> QuadratureLut {
    let cfg = LutConfig::default_for(family);
    let file = cache_file(family);
    if let Ok(bytes) = std::fs::read(&file) {
        if let Ok(lut) = load_lut(&bytes) {
            if matches(&lut, &cfg) {
                return lut;
            }
        }
    }
    let lut = build_lut(&cfg).unwrap();
    let _ = std::fs::write(&file, save_lut(&lut));
    lut
}

pub struct Tables {
    pub flux: Arc<QuadratureLut>,
    pub contribution: Arc<QuadratureLut>,
}

impl Tables {
    pub fn policy(&self) -> OrderPolicy {
        OrderPolicy::Lut {
            flux: self.flux.clone(),
            contribution: self.contribution.clone(),
        }
    }
}

pub fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| Tables {
        flux: Arc::new(default_lut(LutFamily::Flux)),
        contribution: Arc::new(default_lut(LutFamily::Contribution)),
    })
}

/// Largest relative error of the `M`-point rule over `cases` random
/// polynomials of degree at most `2M - 1` with positive coefficients,
/// integrated over `[0, 1]`, for every `M` in `orders`.
pub fn quadrature_exactness(orders: std::ops::RangeInclusive<usize>, cases: usize, seed: u64) -> f64 {
    use proptest::prelude::*;
    use proptest::strategy::ValueTree;
    use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

    let rng = TestRng::from_seed(RngAlgorithm::ChaCha, &{
        let mut s = [0u8; 32];
        s[..8].copy_from_slice(&seed.to_le_bytes());
        s
    });
    let mut runner = TestRunner::new_with_rng(Config::default(), rng);
    let mut worst = 0.0f64;
    for m in orders {
        let q = pbfheat::gauss_legendre(m).unwrap();
        let strat = (0..2 * m).prop_flat_map(|deg| prop::collection::vec(1e-3..1.0f64, deg + 1));
        for _ in 0..cases {
            let coeffs = strat.new_tree(&mut runner).unwrap().current();
            let exact: f64 = coeffs.iter().enumerate().map(|(k, c)| c / (k + 1) as f64).sum();
            let approx = pbfheat::integrate(&q, 1.0, |x| coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)).unwrap();
            worst = worst.max((approx - exact).abs() / exact);
        }
    }
    worst
}
