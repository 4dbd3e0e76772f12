//! Command-line grammar and dispatch.

use std::ffi::OsString;
use std::path::PathBuf;

use aqec_core::simulation::{Engine, Strategy};
use clap::{Args, Parser, Subcommand};

use crate::config::{ExperimentConfig, Kind};
use crate::run::{self, to_json};
use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "aqec", version, about = "Adaptive asymmetric quantum error correction simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact and leading-order uncorrectable-error rate of a code.
    Pfail(Flags),
    /// Run a trial ensemble and write results.csv, summary.json and figure.svg.
    Simulate {
        #[command(subcommand)]
        experiment: Simulation,
    },
    /// Closed-form and Monte Carlo analyses; prints JSON.
    Analyze {
        #[command(subcommand)]
        analysis: Analysis,
    },
    /// Render figure.svg from a results.csv.
    Report {
        /// Results file written by `simulate`.
        input: PathBuf,
        /// Output SVG path; defaults to figure.svg next to the input.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum Simulation {
    /// Fixed-angle dephasing with the angle-grid estimator.
    Dephasing(Flags),
    /// Dephasing whose angle follows a Gaussian random walk.
    Drift(Flags),
    /// Fixed oriented Pauli channel with the randomized channel grid.
    Unital(Flags),
}

#[derive(Debug, Subcommand)]
pub enum Analysis {
    /// Optimal-orientation lifetime gain over the Haar average.
    Copt(Flags),
    /// Minimum distance from a channel to random grids of several sizes.
    GridSpacing(Flags),
    /// Power-law fit of mean lifetime against p from a results file.
    Fit {
        /// Results file; same as `--input`.
        #[arg(value_name = "INPUT")]
        file: Option<PathBuf>,
        #[command(flatten)]
        flags: Flags,
    },
}

/// Flags shared by every experiment. Each overrides the matching key of
/// `--config`.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// TOML experiment file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Code name, e.g. 15-1-7-3 or n-k-dx-dz.
    #[arg(long)]
    pub code: Option<String>,
    /// Comma-separated total error rates.
    #[arg(long, value_delimiter = ',')]
    pub p: Option<Vec<f64>>,
    /// X-error rate for pfail.
    #[arg(long)]
    pub px: Option<f64>,
    /// Y-error rate for pfail.
    #[arg(long)]
    pub py: Option<f64>,
    /// Z-error rate for pfail.
    #[arg(long)]
    pub pz: Option<f64>,
    /// Eccentricities k1,k2,k3.
    #[arg(long, value_delimiter = ',')]
    pub ecc: Option<Vec<f64>>,
    /// Dephasing angle, or `random`.
    #[arg(long)]
    pub theta0: Option<String>,
    /// Per-cycle variance of the dephasing-angle walk.
    #[arg(long = "kappa-sq")]
    pub kappa_sq: Option<f64>,
    /// Angle-grid cells.
    #[arg(long)]
    pub cells: Option<usize>,
    /// Channel-grid size; a comma list of sizes for grid-spacing.
    #[arg(long, value_delimiter = ',')]
    pub points: Option<Vec<u64>>,
    /// Comma-separated thresholds for the grid-spacing CDF.
    #[arg(long, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    /// Trials per error rate.
    #[arg(long)]
    pub trials: Option<u64>,
    /// Base seed; trial i uses a hash of (seed, i).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; all cores by default.
    #[arg(long)]
    pub threads: Option<usize>,
    /// Censoring limit in cycles.
    #[arg(long = "max-cycles")]
    pub max_cycles: Option<u64>,
    /// per-cycle or fast-forward.
    #[arg(long, value_parser = parse_engine)]
    pub engine: Option<Engine>,
    /// adaptive, fixed or oracle.
    #[arg(long, value_parser = parse_strategy)]
    pub strategy: Option<Strategy>,
    /// Monte Carlo samples for copt.
    #[arg(long = "mc-samples")]
    pub mc_samples: Option<u64>,
    /// Results file for fit.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Print the resolved config as TOML and exit.
    #[arg(long = "print-config")]
    pub print_config: bool,
}

fn parse_engine(s: &str) -> Result<Engine, String> {
    match s {
        "per-cycle" => Ok(Engine::PerCycle),
        "fast-forward" => Ok(Engine::FastForward),
        _ => Err(format!("expected per-cycle or fast-forward, got `{s}`")),
    }
}

fn parse_strategy(s: &str) -> Result<Strategy, String> {
    match s {
        "adaptive" => Ok(Strategy::Adaptive),
        "fixed" => Ok(Strategy::Fixed),
        "oracle" => Ok(Strategy::Oracle),
        _ => Err(format!("expected adaptive, fixed or oracle, got `{s}`")),
    }
}

impl Flags {
    /// File keys, if any, overridden by the flags given.
    pub fn resolve(&self, kind: Kind) -> Result<ExperimentConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::from_file(path, Some(kind))?,
            None => ExperimentConfig::defaults(kind),
        };
        if let Some(v) = &self.code {
            cfg.code = v.clone();
        }
        if let Some(v) = &self.p {
            cfg.p = v.clone();
        }
        if self.px.is_some() {
            cfg.px = self.px;
        }
        if self.py.is_some() {
            cfg.py = self.py;
        }
        if self.pz.is_some() {
            cfg.pz = self.pz;
        }
        if let Some(v) = &self.ecc {
            let e: [f64; 3] = v
                .as_slice()
                .try_into()
                .map_err(|_| CliError::Config(format!("--ecc needs three values, got {}", v.len())))?;
            cfg.ecc = Some(e);
        }
        if let Some(v) = &self.theta0 {
            cfg.theta0 = match v.as_str() {
                "random" => None,
                s => Some(
                    s.parse()
                        .map_err(|_| CliError::Config(format!("--theta0 must be a number or `random`, got `{s}`")))?,
                ),
            };
        }
        if let Some(v) = self.kappa_sq {
            cfg.kappa_sq = v;
        }
        if self.cells.is_some() {
            cfg.cells = self.cells;
        }
        if let Some(v) = &self.points {
            if kind == Kind::GridSpacing {
                cfg.grid_sizes = v.clone();
            } else {
                match v.as_slice() {
                    [n] => cfg.points = *n as usize,
                    _ => return Err(CliError::Config("--points takes a single size for this experiment".into())),
                }
            }
        }
        if let Some(v) = &self.eps {
            cfg.eps = v.clone();
        }
        if let Some(v) = self.trials {
            cfg.trials = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.threads {
            cfg.threads = v;
        }
        if let Some(v) = self.max_cycles {
            cfg.max_cycles = v;
        }
        if let Some(v) = self.engine {
            cfg.engine = v;
        }
        if let Some(v) = self.strategy {
            cfg.strategy = v;
        }
        if let Some(v) = self.mc_samples {
            cfg.mc_samples = v;
        }
        if self.input.is_some() {
            cfg.input = self.input.clone();
        }
        if let Some(v) = &self.out {
            cfg.out = v.clone();
        }
        Ok(cfg)
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("aqec: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let (kind, flags) = match cli.command {
        Command::Report { input, out } => {
            let out = out.unwrap_or_else(|| input.with_file_name("figure.svg"));
            run::report(&input, &out)?;
            println!("{}", out.display());
            return Ok(());
        }
        Command::Pfail(f) => (Kind::Pfail, f),
        Command::Simulate { experiment } => match experiment {
            Simulation::Dephasing(f) => (Kind::Dephasing, f),
            Simulation::Drift(f) => (Kind::Drift, f),
            Simulation::Unital(f) => (Kind::Unital, f),
        },
        Command::Analyze { analysis } => match analysis {
            Analysis::Copt(f) => (Kind::Copt, f),
            Analysis::GridSpacing(f) => (Kind::GridSpacing, f),
            Analysis::Fit { file, mut flags } => {
                if file.is_some() {
                    flags.input = file;
                }
                (Kind::Fit, flags)
            }
        },
    };
    let cfg = flags.resolve(kind)?;
    if flags.print_config {
        cfg.validate()?;
        print!("{}", cfg.to_toml());
        return Ok(());
    }
    match kind {
        Kind::Pfail => print!("{}", to_json(&run::pfail(&cfg)?)),
        Kind::Copt => print!("{}", to_json(&run::copt(&cfg)?)),
        Kind::GridSpacing => print!("{}", to_json(&run::grid_spacing(&cfg)?)),
        Kind::Fit => print!("{}", to_json(&run::fit(&cfg)?)),
        Kind::Dephasing | Kind::Drift | Kind::Unital => {
            let summary = run::run_simulation(&cfg)?;
            println!(
                "wrote {} trials to {}",
                summary.total_trials,
                cfg.out.join("results.csv").display()
            );
        }
    }
    Ok(())
}
