//! The `plcert` command-line tool: loads piecewise affine maps from JSON,
//! runs the analyses in the `plcert` library and prints versioned JSON
//! reports.
//!
//! Exit codes: 0 success (and `certified_surjective` for `certify`), 1 the
//! subdivision failed validation, 2 unreadable or malformed input or flags,
//! 3 `not_certified`, 4 `certified_not_surjective`, 5 the analysis itself
//! failed (for example a singular selection on an unbounded cell).

pub mod args;
pub mod envelope;
pub mod render;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use plcert::certify::{self, Verdict};
use plcert::oracle::{self, FanSpec2D, GenSpec1D};
use plcert::{degree, PlFunction, Rational, ValidationReport};
use serde::de::DeserializeOwned;
use serde::Serialize;

use args::BoxArg;
use envelope::{digest, ReportEnvelope};

#[derive(Debug, Parser)]
#[command(name = "plcert", version, about = "Exact analysis of piecewise affine maps R^n -> R^n")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct Sampling {
    /// Regular values sampled beyond the far value.
    #[arg(long, default_value_t = certify::DEFAULT_TRIALS)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the subdivision and continuity of a map.
    Validate {
        path: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify surjectivity from the orientation on unbounded cells.
    Certify {
        path: PathBuf,
        #[command(flatten)]
        sampling: Sampling,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Mapping degree with its supporting regular values.
    Degree {
        path: PathBuf,
        #[command(flatten)]
        sampling: Sampling,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact preimages of a point, e.g. `--target 1/2,3`.
    Preimages {
        path: PathBuf,
        #[arg(long)]
        target: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve for preimages of every grid point in a box.
    Oracle {
        path: PathBuf,
        /// `[lo,hi]` for every coordinate, or `[a,b]x[c,d]`.
        #[arg(long = "box")]
        bounds: String,
        #[arg(long, default_value = "1")]
        resolution: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a validated map from a spec file or from a seed.
    Gen {
        #[arg(long, value_enum)]
        kind: GenKind,
        /// JSON spec (GenSpec1D for `1d`, FanSpec2D otherwise).
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Random instance when no spec is given.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Upper bound on breakpoints for random `1d` maps.
        #[arg(long, default_value_t = 8)]
        breakpoints: usize,
        /// Sectors for random fans.
        #[arg(long, default_value_t = 6)]
        sectors: usize,
        /// Winding number of random fans; 0 draws a mixed-orientation fan.
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        winding: i64,
        /// Radius at which `star-fan` cuts each sector.
        #[arg(long, default_value = "1")]
        scale: String,
        /// Apply a seeded perturbation of the bounded cells.
        #[arg(long)]
        perturb: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Draw a planar map as SVG.
    Render {
        path: PathBuf,
        #[arg(long = "box")]
        bounds: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum GenKind {
    #[value(name = "1d")]
    OneD,
    Fan,
    StarFan,
}

/// Why a command stopped short of a normal report.
#[derive(Debug)]
pub enum Failure {
    Input(String),
    Invalid(ValidationReport),
    Analysis(plcert::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Invalid(_) => 1,
            Failure::Input(_) => 2,
            Failure::Analysis(_) => 5,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Input(m) => write!(f, "{m}"),
            Failure::Invalid(r) => write!(f, "map failed validation: {}", r.kinds().join(", ")),
            Failure::Analysis(e) => write!(f, "{e}"),
        }
    }
}

impl From<plcert::Error> for Failure {
    fn from(e: plcert::Error) -> Self {
        Failure::Analysis(e)
    }
}

/// Parses JSON, reporting the field path and line/column on failure.
pub fn parse_json<T: DeserializeOwned>(text: &str, origin: &str) -> Result<T, Failure> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        Failure::Input(format!("{origin}: at `{path}`: {inner}"))
    })
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

pub fn load_function(path: &Path) -> Result<PlFunction, Failure> {
    parse_json(&read(path)?, &path.display().to_string())
}

fn load_validated(path: &Path) -> Result<PlFunction, Failure> {
    load_function(path)?.validated().map_err(Failure::Invalid)
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("{}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| Failure::Input(format!("stdout: {e}")))
        }
    }
}

fn report<T: Serialize>(
    command: &str,
    f: &PlFunction,
    payload: T,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let env = ReportEnvelope::new(command, digest(f), payload);
    let mut text = serde_json::to_string_pretty(&env).expect("report types serialize");
    text.push('\n');
    emit(&text, out)
}

fn input<T>(r: Result<T, String>) -> Result<T, Failure> {
    r.map_err(Failure::Input)
}

/// Runs one command and returns its exit code.
pub fn run(cli: Cli) -> Result<i32, Failure> {
    match cli.command {
        Command::Validate { path, out } => {
            let mut f = load_function(&path)?;
            let r = f.validate();
            let code = if r.ok { 0 } else { 1 };
            report("validate", &f, r, out.as_deref())?;
            Ok(code)
        }
        Command::Certify {
            path,
            sampling,
            out,
        } => {
            let f = load_validated(&path)?;
            let cert = certify::certify_surjective(&f, sampling.trials, sampling.seed)?;
            let code = match cert.verdict {
                Verdict::CertifiedSurjective => 0,
                Verdict::NotCertified => 3,
                Verdict::CertifiedNotSurjective => 4,
            };
            report("certify", &f, cert, out.as_deref())?;
            Ok(code)
        }
        Command::Degree {
            path,
            sampling,
            out,
        } => {
            let f = load_validated(&path)?;
            let ev = degree::global_degree(&f, sampling.trials, sampling.seed)?;
            report("degree", &f, ev, out.as_deref())?;
            Ok(0)
        }
        Command::Preimages { path, target, out } => {
            let f = load_validated(&path)?;
            let y = input(args::parse_target(&target))?;
            if y.dim() != f.dim() {
                return Err(Failure::Input(format!(
                    "target has {} coordinates but the map lives in dimension {}",
                    y.dim(),
                    f.dim()
                )));
            }
            let set = degree::preimages(&f, &y)?;
            report("preimages", &f, set, out.as_deref())?;
            Ok(0)
        }
        Command::Oracle {
            path,
            bounds,
            resolution,
            out,
        } => {
            let f = load_validated(&path)?;
            let grid = input(BoxArg::parse(&bounds).and_then(|b| b.for_dim(f.dim())))?;
            let step = input(args::parse_rational(&resolution))?;
            let r = oracle::grid_surjectivity_oracle(&f, &grid, &step)?;
            report("oracle", &f, r, out.as_deref())?;
            Ok(0)
        }
        Command::Gen {
            kind,
            spec,
            seed,
            breakpoints,
            sectors,
            winding,
            scale,
            perturb,
            out,
        } => {
            let mut f = generate(kind, spec.as_deref(), seed, breakpoints, sectors, winding, &scale)?;
            if let Some(s) = perturb {
                f = oracle::perturb_bounded(&f, s)?.function;
            }
            let mut text = serde_json::to_string_pretty(&f).expect("maps serialize");
            text.push('\n');
            emit(&text, out.as_deref())?;
            Ok(0)
        }
        Command::Render { path, bounds, out } => {
            let f = load_validated(&path)?;
            let grid = input(BoxArg::parse(&bounds).and_then(|b| b.for_dim(f.dim())))?;
            let svg = render::render_svg(&f, &grid)?;
            emit(&svg, out.as_deref())?;
            Ok(0)
        }
    }
}

fn generate(
    kind: GenKind,
    spec: Option<&Path>,
    seed: u64,
    breakpoints: usize,
    sectors: usize,
    winding: i64,
    scale: &str,
) -> Result<PlFunction, Failure> {
    fn load<T: DeserializeOwned>(p: &Path) -> Result<T, Failure> {
        parse_json(&read(p)?, &p.display().to_string())
    }
    let fan = |spec: Option<&Path>| -> Result<FanSpec2D, Failure> {
        match spec {
            Some(p) => load(p),
            None if winding == 0 => Ok(FanSpec2D::random_mixed(seed, sectors)?),
            None => Ok(FanSpec2D::random_coherent(seed, sectors, winding)?),
        }
    };
    Ok(match kind {
        GenKind::OneD => {
            let spec: GenSpec1D = match spec {
                Some(p) => load(p)?,
                None => GenSpec1D::random(seed, breakpoints),
            };
            oracle::gen_1d(&spec)?
        }
        GenKind::Fan => oracle::gen_fan_2d(&fan(spec)?)?,
        GenKind::StarFan => {
            let s: Rational = input(args::parse_rational(scale))?;
            oracle::gen_star_fan_2d(&fan(spec)?, &s)?
        }
    })
}

/// Sizes rayon's global pool from `PLCERT_THREADS` when set.
pub fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var("PLCERT_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::Input(format!("PLCERT_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Input(format!("thread pool: {e}")))
}
