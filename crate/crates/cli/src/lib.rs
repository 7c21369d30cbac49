//! Command-line front end: `planes4 <bounds|wirtinger|annulus|scan|plateau>`.
//!
//! Every run writes `manifest.txt`, `results.csv` and `report.txt` into the
//! `--out` directory. Exit status is 0 on success, 1 for configuration or
//! input errors and 2 for numerical failures or violated invariants.

mod commands;
mod config;
pub mod output;

use std::f64::consts::PI;
use std::path::PathBuf;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};

pub use commands::columns;

#[derive(Debug)]
pub enum Failure {
    Config(String),
    Numerical(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 1,
            Failure::Numerical(_) => 2,
        }
    }
}

impl From<planes4::Error> for Failure {
    fn from(e: planes4::Error) -> Self {
        if e.is_numerical() {
            Failure::Numerical(e.to_string())
        } else {
            Failure::Config(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Config(e.to_string())
    }
}

/// Accepts a plain number, `pi`, `pi/k` or `m*pi/k`.
fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase();
    if let Ok(v) = t.parse::<f64>() {
        return Ok(v);
    }
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a, b.parse::<f64>().map_err(|_| format!("bad angle `{s}`"))?),
        None => (t.as_str(), 1.0),
    };
    let mult = match num.strip_suffix("pi") {
        Some("") => 1.0,
        Some(m) => m
            .trim_end_matches('*')
            .parse::<f64>()
            .map_err(|_| format!("bad angle `{s}`"))?,
        None => return Err(format!("bad angle `{s}`")),
    };
    Ok(mult * PI / den)
}

#[derive(Args, Clone, Debug)]
pub struct Common {
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Seed for every random draw of the run.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Flat key=value file with the same keys as the long flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Clone, Debug)]
pub struct BoundsArgs {
    #[command(flatten)]
    pub common: Common,
    /// Smaller characteristic angle (number, `pi/k` or `m*pi/k`).
    #[arg(long, value_parser = parse_angle, default_value = "pi/2")]
    pub alpha1: f64,
    /// Larger characteristic angle.
    #[arg(long, value_parser = parse_angle, default_value = "pi/2")]
    pub alpha2: f64,
    /// End of an alpha1 sweep; needs --steps > 1.
    #[arg(long, value_parser = parse_angle)]
    pub alpha1_max: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub steps: usize,
    /// Grid points per angle of the plane search.
    #[arg(long, default_value_t = 48)]
    pub grid: usize,
    /// Grid cells refined by pattern search.
    #[arg(long, default_value_t = 16)]
    pub starts: usize,
    #[arg(long, default_value_t = 200)]
    pub refine_steps: usize,
}

#[derive(Args, Clone, Debug)]
pub struct WirtingerArgs {
    #[command(flatten)]
    pub common: Common,
    /// Draws from the equality set and from the unit simple 2-vectors each.
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// Membership tolerance.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Random draws with a projection sum below this must not be members.
    #[arg(long, default_value_t = 0.99)]
    pub threshold: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum AnnulusMode {
    /// Radial problem: value δ r0 on the inner circle, 0 outside.
    Log,
    /// Fourier boundary data on the annulus r0 < |x| < 1/r0.
    Fourier,
}

#[derive(Args, Clone, Debug)]
pub struct AnnulusArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value_t = AnnulusMode::Log)]
    pub mode: AnnulusMode,
    #[arg(long, default_value_t = 0.1)]
    pub r0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub delta: f64,
    /// Fraction for the level constant C(eps).
    #[arg(long)]
    pub eps: Option<f64>,
    /// Mean of the Fourier data.
    #[arg(long, default_value_t = 0.0)]
    pub mean: f64,
    /// Cosine coefficients A1,A2,...
    #[arg(long, value_delimiter = ',', default_value = "1")]
    pub a: Vec<f64>,
    /// Sine coefficients B1,B2,...; padded with zeros.
    #[arg(long, value_delimiter = ',')]
    pub b: Vec<f64>,
    /// Also solve the finite-difference problem.
    #[arg(long)]
    pub fd: bool,
    #[arg(long, default_value_t = 128)]
    pub radial: usize,
    #[arg(long, default_value_t = 512)]
    pub angular: usize,
}

#[derive(Args, Clone, Debug)]
pub struct ScanArgs {
    #[command(flatten)]
    pub common: Common,
    /// MESH4 file to sample.
    #[arg(long)]
    pub mesh: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    pub eps: f64,
    /// Smallest scale examined; defaults to twice the resolution.
    #[arg(long)]
    pub floor: Option<f64>,
    /// Sample spacing on the mesh.
    #[arg(long, default_value_t = 1.0 / 128.0)]
    pub resolution: f64,
    #[arg(long, value_parser = parse_angle, default_value = "pi/2")]
    pub alpha1: f64,
    #[arg(long, value_parser = parse_angle, default_value = "pi/2")]
    pub alpha2: f64,
    /// Translation grid points per axis.
    #[arg(long, default_value_t = 5)]
    pub grid: usize,
}

#[derive(Args, Clone, Debug)]
pub struct PlateauArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_parser = parse_angle, default_value = "pi/2")]
    pub alpha1: f64,
    #[arg(long, value_parser = parse_angle, default_value = "pi/2")]
    pub alpha2: f64,
    /// Boundary segments per circle.
    #[arg(long, default_value_t = 256)]
    pub segments: usize,
    /// Pinch radii of the sweep; 0 is the plain union of disks.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    pub pinch: Vec<f64>,
    #[arg(long, default_value_t = 400)]
    pub max_iters: usize,
    /// Initial line-search step.
    #[arg(long, default_value_t = 1.0)]
    pub step: f64,
    #[arg(long, default_value_t = 1e-8)]
    pub tol_grad: f64,
    /// Shadow rasterization resolution (cells per unit length).
    #[arg(long, default_value_t = 512)]
    pub resolution: usize,
    /// Skip the projection certificate.
    #[arg(long)]
    pub no_certificate: bool,
    /// Write every optimized mesh as MESH4.
    #[arg(long)]
    pub write_mesh: bool,
}

#[derive(Subcommand, Clone, Debug)]
pub enum Command {
    /// Supremum of the projection sum over the Grassmannian.
    Bounds(BoundsArgs),
    /// Sample the equality set of the orthogonal projection bound.
    Wirtinger(WirtingerArgs),
    /// Dirichlet energies on annuli against their bounds.
    Annulus(AnnulusArgs),
    /// Dyadic flatness scan of a mesh against a pair of planes.
    Scan(ScanArgs),
    /// Area descent on unions of disks and pinched competitors.
    Plateau(PlateauArgs),
}

#[derive(Parser, Debug)]
#[command(name = "planes4", version, about = "Experiments on unions of two planes in R^4")]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

fn command_with_help() -> clap::Command {
    let mut cmd = Cli::command();
    for name in ["bounds", "wirtinger", "annulus", "scan", "plateau"] {
        let text = output::column_help(columns(name));
        cmd = cmd.mut_subcommand(name, |c| c.after_long_help(text));
    }
    cmd
}

fn set_threads() {
    if let Some(n) = std::env::var("PLANES4_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit status.
pub fn run_command<S: AsRef<str>>(argv: &[S]) -> i32 {
    let argv: Vec<String> = argv.iter().map(|s| s.as_ref().to_string()).collect();
    let argv = match config::splice_config(&argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    let matches = match command_with_help().try_get_matches_from(&argv) {
        Ok(m) => m,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return 1;
        }
    };
    set_threads();
    match commands::run(&cli.command) {
        Ok(()) => 0,
        Err(f) => {
            match &f {
                Failure::Config(m) => eprintln!("error: {m}"),
                Failure::Numerical(m) => eprintln!("numerical failure: {m}"),
            }
            f.exit_code()
        }
    }
}
