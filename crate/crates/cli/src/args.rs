use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "pbfheat",
    version,
    about = "Analytical temperature fields for scanned Gaussian beams"
)]
pub struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Log progress to stderr.
    #[arg(short, long, global = true)]
    pub verbose: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the two quadrature-order tables.
    GenLut(GenLutArgs),
    /// Evaluate a path over a space-time grid.
    Solve(SolveArgs),
    /// Reproduce one of the three reference scenarios.
    Example(ExampleArgs),
    /// Run an independent check.
    Audit(AuditArgs),
    /// Render a slice of a field CSV as a PPM image.
    Heatmap(HeatmapArgs),
}

#[derive(Debug, Args)]
pub struct LutArgs {
    /// Directory holding flux.lut and contribution.lut.
    #[arg(long, default_value = "luts")]
    pub lut_dir: PathBuf,

    /// Ignore the tables and use the reference order for every integral.
    #[arg(long)]
    pub force_ref_order: bool,
}

#[derive(Debug, Args)]
pub struct GenLutArgs {
    /// Absolute tolerance on the dimensionless integrals.
    #[arg(long, default_value_t = pbfheat::quadrature::DEFAULT_TOL, value_parser = positive)]
    pub tol: f64,

    #[arg(long, default_value = "luts")]
    pub lut_dir: PathBuf,

    #[arg(long, default_value_t = pbfheat::quadrature::DEFAULT_REF_ORDER)]
    pub ref_order: usize,

    /// Grid sizes `n_t:n_v:n_tf` instead of the defaults (60:51:30).
    #[arg(long)]
    pub sizes: Option<String>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Path file (`pbfpath 1`).
    #[arg(long)]
    pub path: PathBuf,

    /// Material file (`pbfmat 1`).
    #[arg(long)]
    pub material: PathBuf,

    /// Spatial grid in metres, `x0:x1:nx,y0:y1:ny,z0:z1:nz`; a bare value is
    /// a single point.
    #[arg(long)]
    pub grid: String,

    /// Evaluation times in seconds, `t0:t1:nt` or a single value.
    #[arg(long)]
    pub times: String,

    #[command(flatten)]
    pub lut: LutArgs,

    /// Field CSV; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Also write the maximum over time as CSV.
    #[arg(long)]
    pub max_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExampleId {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    #[value(name = "3")]
    Three,
}

#[derive(Debug, Args)]
pub struct ExampleArgs {
    pub id: ExampleId,

    /// Full resolution (401 x 81 grid) instead of the quarter-resolution
    /// gating run.
    #[arg(long)]
    pub full: bool,

    #[command(flatten)]
    pub lut: LutArgs,

    /// Directory for the path and material files, the max-field CSV and a
    /// heatmap.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AuditKind {
    Lut,
    Semigroup,
    Convolution,
    Fd,
}

#[derive(Debug, Args)]
pub struct AuditArgs {
    pub kind: AuditKind,

    #[arg(long, default_value = "luts")]
    pub lut_dir: PathBuf,

    /// Convolution grid spacing or FD cell size, in metres.
    #[arg(long, value_parser = positive)]
    pub spacing: Option<f64>,
}

#[derive(Debug, Args)]
pub struct HeatmapArgs {
    /// Field CSV written by `solve`.
    #[arg(long)]
    pub field: PathBuf,

    /// `max` or a time index.
    #[arg(long, default_value = "max")]
    pub time: String,

    /// Depth index into the z axis (0 = deepest).
    #[arg(long)]
    pub z_index: Option<usize>,

    /// Colour range `lo:hi` in kelvin; defaults to the slice's own range.
    #[arg(long)]
    pub range: Option<String>,

    #[arg(long)]
    pub out: PathBuf,
}

fn positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("must be a positive number, got {s}"))
    }
}
