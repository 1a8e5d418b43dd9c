use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use anyhow::{anyhow, Context};
use log::info;
use pbfheat::field::{sha256_hex, solve_field, FieldGrid, Provenance, TimeSelect};
use pbfheat::heatmap::{auto_range, emit_ppm};
use pbfheat::quadrature::{audit_lut, build_lut, load_lut, save_lut, ProbeSet};
use pbfheat::scenarios::{self, Hourglass};
use pbfheat::solver::single_line;
use pbfheat::validation::{convolution_audit, default_probes, fd_solve, semigroup_audit, ConvolutionGrid, FdConfig};
use pbfheat::{
    gauss_legendre, load_path, parse_material, BeamPath, Error, Evaluator, FieldResult, LutConfig, LutFamily,
    MaterialParams, OrderPolicy, QuadratureLut,
};

use crate::args::{AuditArgs, AuditKind, ExampleArgs, ExampleId, GenLutArgs, HeatmapArgs, LutArgs, SolveArgs};

/// An error tagged with the process exit code it maps to.
pub enum Failure {
    Usage(anyhow::Error),
    Invalid(anyhow::Error),
    Io(anyhow::Error),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Invalid(_) => 2,
            Failure::Io(_) => 3,
        }
    }

    pub fn error(&self) -> &anyhow::Error {
        match self {
            Failure::Usage(e) | Failure::Invalid(e) | Failure::Io(e) => e,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) => Failure::Io(e.into()),
            other => Failure::Invalid(other.into()),
        }
    }
}

/// Bundled inputs of the reference scenarios.
pub const MATERIAL: &str = include_str!("../data/material.mat");
pub const EXAMPLE1_SINGLE: &str = include_str!("../data/example1_single.path");
pub const EXAMPLE1_SPLIT: &str = include_str!("../data/example1_split.path");
pub const EXAMPLE2: &str = include_str!("../data/example2.path");
pub const EXAMPLE3: &str = include_str!("../data/example3.path");

type Res<T> = std::result::Result<T, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(anyhow!(msg.into()))
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Invalid(anyhow!(msg.into()))
}

fn read(path: &Path) -> Res<Vec<u8>> {
    fs::read(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::Io)
}

fn read_text(path: &Path) -> Res<String> {
    String::from_utf8(read(path)?).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> Res<()> {
    fs::write(path, bytes)
        .with_context(|| format!("writing {}", path.display()))
        .map_err(Failure::Io)
}

fn create_dir(dir: &Path) -> Res<()> {
    fs::create_dir_all(dir)
        .with_context(|| format!("creating {}", dir.display()))
        .map_err(Failure::Io)
}

fn lut_file(dir: &Path, family: LutFamily) -> std::path::PathBuf {
    dir.join(format!("{}.lut", family.name()))
}

fn lut_id(family: LutFamily, bytes: &[u8]) -> String {
    format!("{}:{}", family.name(), &sha256_hex(bytes)[..16])
}

/// Order policy and table identifiers for provenance.
struct Tables {
    policy: OrderPolicy,
    ids: Vec<String>,
    tol: Option<f64>,
}

fn load_table(dir: &Path, family: LutFamily) -> Res<(QuadratureLut, String)> {
    let file = lut_file(dir, family);
    let bytes = fs::read(&file)
        .with_context(|| {
            format!(
                "reading {} (run `pbfheat gen-lut` or pass --force-ref-order)",
                file.display()
            )
        })
        .map_err(Failure::Io)?;
    let lut = load_lut(&bytes).map_err(|e| invalid(format!("{}: {e}", file.display())))?;
    if lut.family() != family {
        return Err(invalid(format!(
            "{} holds the {} table",
            file.display(),
            lut.family().name()
        )));
    }
    Ok((lut, lut_id(family, &bytes)))
}

fn tables(args: &LutArgs) -> Res<Tables> {
    if args.force_ref_order {
        return Ok(Tables {
            policy: OrderPolicy::reference(),
            ids: vec![format!("fixed:{}", pbfheat::quadrature::DEFAULT_REF_ORDER)],
            tol: None,
        });
    }
    let (flux, fid) = load_table(&args.lut_dir, LutFamily::Flux)?;
    let (contribution, cid) = load_table(&args.lut_dir, LutFamily::Contribution)?;
    let tol = flux.tol().max(contribution.tol());
    Ok(Tables {
        policy: OrderPolicy::from_luts(flux, contribution)?,
        ids: vec![fid, cid],
        tol: Some(tol),
    })
}

fn parse_sizes(s: &str) -> Res<(usize, usize, usize)> {
    let parts: Vec<&str> = s.split(':').collect();
    let nums = parts
        .iter()
        .map(|p| p.trim().parse::<usize>())
        .collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| usage(format!("--sizes `{s}`: {e}")))?;
    match nums[..] {
        [t, v, f] if t >= 2 && v >= 2 && f >= 2 => Ok((t, v, f)),
        _ => Err(usage(format!(
            "--sizes expects n_t:n_v:n_tf, each at least 2, got `{s}`"
        ))),
    }
}

fn histogram(lut: &QuadratureLut) -> String {
    let mut counts = std::collections::BTreeMap::new();
    for &m in lut.orders() {
        *counts.entry(m).or_insert(0usize) += 1;
    }
    counts
        .iter()
        .map(|(m, n)| format!("  order {m:>4}: {n}"))
        .collect::<Vec<_>>()
        .join("\n")
}

pub fn gen_lut(a: GenLutArgs) -> Res<()> {
    if a.ref_order < 2 || a.ref_order > pbfheat::quadrature::MAX_ORDER {
        return Err(usage(format!(
            "--ref-order must be in 2..={}, got {}",
            pbfheat::quadrature::MAX_ORDER,
            a.ref_order
        )));
    }
    let sizes = a.sizes.as_deref().map(parse_sizes).transpose()?;
    create_dir(&a.lut_dir)?;
    for family in [LutFamily::Flux, LutFamily::Contribution] {
        let mut cfg = LutConfig::default_for(family).with_tol(a.tol);
        if let Some((t, v, f)) = sizes {
            cfg = cfg.with_grid_sizes(t, v, f);
        }
        cfg.ref_order = a.ref_order;
        cfg.schedule = pbfheat::quadrature::default_schedule(a.ref_order);
        let start = Instant::now();
        info!("building {} table", family.name());
        let lut = build_lut(&cfg)?;
        let bytes = save_lut(&lut);
        let file = lut_file(&a.lut_dir, family);
        write(&file, &bytes)?;
        println!(
            "{} table: {} points in {:.1} s -> {} ({})",
            family.name(),
            lut.orders().len(),
            start.elapsed().as_secs_f64(),
            file.display(),
            lut_id(family, &bytes)
        );
        println!("{}", histogram(&lut));
    }
    Ok(())
}

fn load_inputs(path: &Path, material: &Path) -> Res<(BeamPath, MaterialParams, Provenance)> {
    let path_text = read_text(path)?;
    let mat_text = read_text(material)?;
    let mat = parse_material(&mat_text).map_err(|e| invalid(format!("{}: {e}", material.display())))?;
    let beam = load_path(&path_text, mat.u_init).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    let prov = Provenance {
        path_sha256: sha256_hex(path_text.as_bytes()),
        material_sha256: sha256_hex(mat_text.as_bytes()),
        ..Provenance::default()
    };
    Ok((beam, mat.material, prov))
}

fn report_clamps(eval: &Evaluator) {
    let n = eval.clamped_lookups();
    if n > 0 {
        log::warn!("{n} table lookups fell outside the tables and were clamped");
    }
}

pub fn solve(a: SolveArgs) -> Res<()> {
    let (beam, material, mut prov) = load_inputs(&a.path, &a.material)?;
    let grid = FieldGrid::from_specs(&a.grid, &a.times).map_err(|e| usage(format!("{e}")))?;
    let t = tables(&a.lut)?;
    prov.lut_ids = t.ids;
    prov.tol = t.tol;
    let eval = Evaluator::new(beam, material, t.policy);
    let start = Instant::now();
    let field = solve_field(&eval, &grid, prov)?;
    info!(
        "{} values in {:.2} s",
        field.values.len(),
        start.elapsed().as_secs_f64()
    );
    report_clamps(&eval);
    let csv = field.to_csv();
    match &a.out {
        Some(p) => write(p, csv.as_bytes())?,
        None => std::io::stdout()
            .lock()
            .write_all(csv.as_bytes())
            .context("writing to stdout")
            .map_err(Failure::Io)?,
    }
    if let Some(p) = &a.max_out {
        write(p, field.max_csv().as_bytes())?;
    }
    Ok(())
}

/// Solves a bundled scenario on a surface grid and optionally saves its
/// inputs and outputs.
fn run_scenario(
    name: &str,
    path_text: &str,
    spec: &str,
    times: impl FnOnce(&BeamPath) -> Vec<f64>,
    a: &ExampleArgs,
) -> Res<FieldResult> {
    let mat_text = MATERIAL;
    let mat = parse_material(mat_text)?;
    let beam = load_path(path_text, mat.u_init)?;
    let t = tables(&a.lut)?;
    let ts = times(&beam);
    let g = FieldGrid::from_specs(spec, "1")?;
    let grid = FieldGrid::new(g.xs, g.ys, g.zs, ts)?;
    let prov = Provenance {
        path_sha256: sha256_hex(path_text.as_bytes()),
        material_sha256: sha256_hex(mat_text.as_bytes()),
        lut_ids: t.ids,
        tol: t.tol,
        timestamp: None,
    };
    let eval = Evaluator::new(beam, mat.material, t.policy);
    let start = Instant::now();
    let field = solve_field(&eval, &grid, prov)?;
    println!(
        "{}x{} grid, {} time steps, {:.1} s",
        grid.xs.len(),
        grid.ys.len(),
        grid.ts.len(),
        start.elapsed().as_secs_f64()
    );
    report_clamps(&eval);
    if let Some(dir) = &a.out {
        create_dir(dir)?;
        write(&dir.join(format!("{name}.path")), path_text.as_bytes())?;
        write(&dir.join("material.mat"), mat_text.as_bytes())?;
        write(&dir.join(format!("{name}_max.csv")), field.max_csv().as_bytes())?;
        let plane = field.plane(TimeSelect::Max, 0)?;
        let (lo, hi) = auto_range(&plane);
        write(&dir.join(format!("{name}_max.ppm")), &emit_ppm(&plane, lo, hi)?)?;
        println!("wrote inputs, max-field CSV and heatmap to {}", dir.display());
    }
    Ok(field)
}

fn example1(a: &ExampleArgs) -> Res<()> {
    let mat = parse_material(MATERIAL)?;
    let m = mat.material;
    let split = Evaluator::new(load_path(EXAMPLE1_SPLIT, mat.u_init)?, m, OrderPolicy::Fixed(800));
    let q = gauss_legendre(800)?;
    let points = scenarios::example1_points();
    let start = Instant::now();
    let mut sup = 0.0f64;
    let mut peak = f64::MIN;
    for &t in &scenarios::example1_times() {
        let plan = split.plan(t)?;
        for &p in &points {
            let u = plan.eval(p);
            let reference = single_line(100.0, 1e-4, 1.0, &m, mat.u_init, p, t, &q)?;
            sup = sup.max((u - reference).abs());
            peak = peak.max(reference);
        }
    }
    println!(
        "single segment vs four-segment split over 200 points x 200 times: sup |du| = {sup:.3e} K, peak {peak:.1} K, {:.1} s",
        start.elapsed().as_secs_f64()
    );
    if let Some(dir) = &a.out {
        create_dir(dir)?;
        write(&dir.join("example1_single.path"), EXAMPLE1_SINGLE.as_bytes())?;
        write(&dir.join("example1_split.path"), EXAMPLE1_SPLIT.as_bytes())?;
        write(&dir.join("material.mat"), MATERIAL.as_bytes())?;
    }
    if sup > 1e-9 {
        return Err(invalid(format!("partition mismatch {sup:.3e} K exceeds 1e-9 K")));
    }
    Ok(())
}

fn example2(a: &ExampleArgs) -> Res<()> {
    let (nx, ny, steps) = if a.full { (401, 81, 40) } else { (101, 21, 10) };
    let field = run_scenario(
        "example2",
        EXAMPLE2,
        &scenarios::domain_grid_spec(nx, ny),
        |p| scenarios::melt_times(p, steps),
        a,
    )?;
    let max = field.max_over_time();
    let g = &field.grid;
    let (mut left, mut right, mut arg) = (f64::MIN, f64::MIN, (0.0, f64::MIN));
    for (ix, &x) in g.xs.iter().enumerate() {
        for iy in 0..g.ys.len() {
            let v = max[g.index(0, ix, iy, 0)];
            if x < 0.01 {
                left = left.max(v);
            } else {
                right = right.max(v);
            }
            if v > arg.1 {
                arg = (x, v);
            }
        }
    }
    println!(
        "peak {:.0} K at x = {:.2} mm; left half {left:.0} K, right half {right:.0} K",
        arg.1,
        arg.0 * 1e3
    );
    if !(arg.0 < 0.01 && left > right) {
        return Err(invalid("peak temperature not in the small-spot half"));
    }
    Ok(())
}

fn example3(a: &ExampleArgs) -> Res<()> {
    let h = Hourglass::default();
    let (nx, ny, dx) = if a.full { (401, 81, 5e-5) } else { (101, 21, 2e-4) };
    let field = run_scenario(
        "example3",
        EXAMPLE3,
        &scenarios::domain_grid_spec(nx, ny),
        |p| scenarios::times_by_travel(p, dx),
        a,
    )?;
    let (c, o) = (h.centre_peak(&field), h.outer_line_peak(&field));
    println!("centre {c:.0} K vs outer lines {o:.0} K, ratio {:.3}", c / o);
    if c < 1.10 * o {
        return Err(invalid(format!("centre/outer ratio {:.3} below 1.10", c / o)));
    }
    Ok(())
}

pub fn example(a: ExampleArgs) -> Res<()> {
    match a.id {
        ExampleId::One => example1(&a),
        ExampleId::Two => example2(&a),
        ExampleId::Three => example3(&a),
    }
}

pub fn audit(a: AuditArgs) -> Res<()> {
    let mat = parse_material(MATERIAL)?;
    let m = mat.material;
    match a.kind {
        AuditKind::Lut => {
            let mut failed = false;
            for family in [LutFamily::Flux, LutFamily::Contribution] {
                let (lut, id) = load_table(&a.lut_dir, family)?;
                let start = Instant::now();
                let r = audit_lut(&lut, &ProbeSet::default())?;
                println!(
                    "{id}: {} points, {} failures, worst error/TOL {:.4}, {:.1} s",
                    r.points,
                    r.failures.len(),
                    r.worst_ratio,
                    start.elapsed().as_secs_f64()
                );
                for (flat, dev) in r.failures.iter().take(10) {
                    println!("  point {:?}: deviation {dev:.3e}", lut.point(*flat));
                }
                failed |= !r.passed();
            }
            if failed {
                return Err(invalid("table audit found points above tolerance"));
            }
        }
        AuditKind::Semigroup => {
            let mut worst = 0.0f64;
            for (tp, tq, t) in [(0.0, 1e-3, 2e-3), (0.0, 1e-5, 5e-3), (1e-3, 4e-3, 4.1e-3)] {
                let r = semigroup_audit(m.kappa(), tp, tq, t)?;
                println!(
                    "t_p = {tp:e}, t_q = {tq:e}, t = {t:e}: 1-D {:.3e}, 3-D {:.3e}",
                    r.max_rel_1d, r.max_rel_3d
                );
                worst = worst.max(r.max_rel());
            }
            if worst >= 1e-9 {
                return Err(invalid(format!("kernel composition deviation {worst:.3e} >= 1e-9")));
            }
        }
        AuditKind::Convolution => {
            let beam = load_path(EXAMPLE1_SPLIT, mat.u_init)?;
            let seg = &beam.segments()[0];
            let grid = ConvolutionGrid {
                spacing: a.spacing.unwrap_or(ConvolutionGrid::default().spacing),
                ..ConvolutionGrid::default()
            };
            let start = Instant::now();
            let r = convolution_audit(seg, &m, 5e-3, grid, &default_probes(seg))?;
            for ((p, n), an) in r.probes.iter().zip(&r.numerical).zip(&r.analytical) {
                println!(
                    "  ({:.3e}, {:.3e}, {:.3e}): convolution {n:.6} K, term {an:.6} K",
                    p[0], p[1], p[2]
                );
            }
            println!(
                "max deviation / peak {:.3e}, {} samples, {:.1} s",
                r.max_rel_dev,
                r.samples,
                start.elapsed().as_secs_f64()
            );
            if r.max_rel_dev >= 1e-3 {
                return Err(invalid("convolution deviates from the closed form by 1e-3 or more"));
            }
        }
        AuditKind::Fd => {
            let (power, sigma, t) = (100.0, 1e-4, 5e-4);
            let h = a.spacing.unwrap_or(1e-5);
            let cfg = FdConfig::stationary_quarter(m, power, sigma, mat.u_init, 1e-3, h, t)?;
            let start = Instant::now();
            let r = fd_solve(&cfg)?;
            let fd = r.surface_temperature(0, 0);
            let q = gauss_legendre(800)?;
            let exact = single_line(power, sigma, 0.0, &m, mat.u_init, [0.5 * h, 0.5 * h, 0.0], t, &q)?;
            let err = (fd - exact).abs() / (exact - mat.u_init);
            println!(
                "cell {h:e} m: FD {fd:.2} K, analytic {exact:.2} K, rise error {err:.3e}, far-face rise {:.1e} K, energy error {:.1e}, {:.1} s",
                r.boundary_rise,
                r.energy_error(),
                start.elapsed().as_secs_f64()
            );
            if err >= 0.02 || r.boundary_rise >= 1e-3 || r.energy_error() >= 0.01 {
                return Err(invalid("finite-difference cross-check outside its bounds"));
            }
        }
    }
    Ok(())
}

fn parse_range(s: &str) -> Res<(f64, f64)> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| usage(format!("--range expects lo:hi, got `{s}`")))?;
    let lo: f64 = lo.trim().parse().map_err(|e| usage(format!("--range `{s}`: {e}")))?;
    let hi: f64 = hi.trim().parse().map_err(|e| usage(format!("--range `{s}`: {e}")))?;
    if !lo.is_finite() || !hi.is_finite() || lo >= hi {
        return Err(usage(format!("--range needs finite lo < hi, got `{s}`")));
    }
    Ok((lo, hi))
}

pub fn heatmap(a: HeatmapArgs) -> Res<()> {
    let time = match a.time.as_str() {
        "max" => TimeSelect::Max,
        s => TimeSelect::Index(
            s.parse()
                .map_err(|_| usage(format!("--time expects `max` or an index, got `{s}`")))?,
        ),
    };
    let range = a.range.as_deref().map(parse_range).transpose()?;
    let text = read_text(&a.field)?;
    let field = FieldResult::from_csv(&text).map_err(|e| invalid(format!("{}: {e}", a.field.display())))?;
    let iz = a.z_index.unwrap_or(field.grid.zs.len() - 1);
    let plane = field.plane(time, iz)?;
    let (lo, hi) = range.unwrap_or_else(|| auto_range(&plane));
    write(&a.out, &emit_ppm(&plane, lo, hi)?)
}
