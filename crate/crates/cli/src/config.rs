//! Experiment configuration: a TOML file of flat keys, overridden by flags.
//!
//! Grammar (all keys optional unless the kind needs them):
//!
//! ```toml
//! kind = "dephasing"        # pfail | dephasing | drift | unital | copt | grid-spacing | fit
//! code = "15-1-7-3"         # catalog name or n-k-dx-dz
//! p = [0.01, 0.003]         # total error rates, one ensemble each
//! trials = 1000
//! seed = 7                  # 64-bit; values above 2^63 - 1 as a string
//! threads = 4               # worker threads; defaults to all cores
//! out = "aqec-out"
//! max-cycles = 4611686018427387904
//! engine = "per-cycle"      # or "fast-forward"
//! strategy = "adaptive"     # or "fixed", "oracle"
//! theta0 = 0.3              # dephasing angle; random when absent
//! kappa-sq = 0.0            # per-cycle drift variance (kind = drift)
//! cells = 334               # angle cells; ceil(1/p) when absent
//! points = 2500             # channel-grid size (kind = unital)
//! ecc = [0.7, 0.2, 0.1]     # eccentricities (unital, copt, grid-spacing)
//! px = 0.007                # pfail rates
//! py = 0.002
//! pz = 0.001
//! mc-samples = 1000000      # copt Monte Carlo samples
//! grid-sizes = [100, 1000]  # grid-spacing study sizes
//! eps = [0.1, 0.2, 0.3]     # grid-spacing CDF thresholds
//! input = "results.csv"     # fit input
//! ```

use std::fmt;
use std::path::{Path, PathBuf};

use aqec_core::channel::Eccentricities;
use aqec_core::codes::AsymmetricCode;
use aqec_core::simulation::{Engine, Strategy, DEFAULT_MAX_CYCLES};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Pfail,
    Dephasing,
    Drift,
    Unital,
    Copt,
    GridSpacing,
    Fit,
}

impl Kind {
    pub fn is_simulation(self) -> bool {
        matches!(self, Kind::Dephasing | Kind::Drift | Kind::Unital)
    }

    pub fn name(self) -> &'static str {
        match self {
            Kind::Pfail => "pfail",
            Kind::Dephasing => "dephasing",
            Kind::Drift => "drift",
            Kind::Unital => "unital",
            Kind::Copt => "copt",
            Kind::GridSpacing => "grid-spacing",
            Kind::Fit => "fit",
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub const DEFAULT_TRIALS: u64 = 1000;
pub const DEFAULT_POINTS: usize = 2500;
pub const DEFAULT_MC_SAMPLES: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct ExperimentConfig {
    pub kind: Kind,
    #[serde(default = "default_code")]
    pub code: String,
    #[serde(default)]
    pub p: Vec<f64>,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default, with = "wide_u64")]
    pub seed: u64,
    #[serde(default = "default_threads")]
    pub threads: usize,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default = "default_max_cycles", with = "wide_u64")]
    pub max_cycles: u64,
    #[serde(default)]
    pub engine: Engine,
    #[serde(default)]
    pub strategy: Strategy,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta0: Option<f64>,
    #[serde(default)]
    pub kappa_sq: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cells: Option<usize>,
    #[serde(default = "default_points")]
    pub points: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ecc: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub px: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub py: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pz: Option<f64>,
    #[serde(default = "default_mc_samples")]
    pub mc_samples: u64,
    #[serde(default = "default_grid_sizes")]
    pub grid_sizes: Vec<u64>,
    #[serde(default = "default_eps")]
    pub eps: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
}

fn default_code() -> String {
    "15-1-7-3".into()
}
fn default_trials() -> u64 {
    DEFAULT_TRIALS
}
fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}
fn default_out() -> PathBuf {
    PathBuf::from("aqec-out")
}
fn default_max_cycles() -> u64 {
    DEFAULT_MAX_CYCLES
}
fn default_points() -> usize {
    DEFAULT_POINTS
}
fn default_mc_samples() -> u64 {
    DEFAULT_MC_SAMPLES
}
fn default_grid_sizes() -> Vec<u64> {
    vec![100, 1000, 10_000]
}
fn default_eps() -> Vec<f64> {
    vec![0.1, 0.2, 0.3]
}

/// TOML integers are signed 64-bit; larger values travel as strings.
mod wide_u64 {
    use serde::{de, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &u64, s: S) -> Result<S::Ok, S::Error> {
        match i64::try_from(*v) {
            Ok(i) => s.serialize_i64(i),
            Err(_) => s.serialize_str(&v.to_string()),
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Int(i64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<u64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Int(i) => u64::try_from(i).map_err(|_| de::Error::custom(format!("expected a non-negative integer, got {i}"))),
            Repr::Str(s) => s
                .trim()
                .parse()
                .map_err(|_| de::Error::custom(format!("expected a 64-bit unsigned integer, got `{s}`"))),
        }
    }
}

impl ExperimentConfig {
    /// Defaults for `kind`, before any file or flag.
    pub fn defaults(kind: Kind) -> Self {
        Self {
            kind,
            code: default_code(),
            p: Vec::new(),
            trials: DEFAULT_TRIALS,
            seed: 0,
            threads: default_threads(),
            out: default_out(),
            max_cycles: DEFAULT_MAX_CYCLES,
            engine: Engine::default(),
            strategy: Strategy::default(),
            theta0: None,
            kappa_sq: 0.0,
            cells: None,
            points: DEFAULT_POINTS,
            ecc: None,
            px: None,
            py: None,
            pz: None,
            mc_samples: DEFAULT_MC_SAMPLES,
            grid_sizes: default_grid_sizes(),
            eps: default_eps(),
            input: None,
        }
    }

    /// Parses a config document. `kind` fills in a missing `kind` key and
    /// must agree with a present one.
    pub fn from_toml_str(text: &str, kind: Option<Kind>) -> Result<Self, CliError> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| CliError::Config(e.to_string()))?;
        // appended rather than prepended so reported line numbers stay put
        let doc = match (table.contains_key("kind"), kind) {
            (false, Some(k)) => format!("{text}\nkind = \"{k}\"\n"),
            (false, None) => return Err(CliError::Config("missing key `kind`".into())),
            (true, _) => text.to_string(),
        };
        let cfg: Self = toml::from_str(&doc).map_err(|e| CliError::Config(e.to_string()))?;
        if let Some(k) = kind {
            if cfg.kind != k {
                return Err(CliError::Config(format!(
                    "config file has kind = \"{}\" but the command runs `{k}`",
                    cfg.kind
                )));
            }
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path, kind: Option<Kind>) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml_str(&text, kind).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    /// Canonical TOML form; parsing it back yields an equal config.
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Canonical TOML without the execution-only keys `threads` and `out`,
    /// which do not change results.
    pub fn experiment_toml(&self) -> String {
        let mut table = toml::Table::try_from(self).expect("config serializes");
        table.remove("threads");
        table.remove("out");
        toml::to_string(&table).expect("config serializes")
    }

    pub fn parsed_code(&self) -> Result<AsymmetricCode, CliError> {
        self.code
            .parse()
            .map_err(|e| CliError::Config(format!("key `code`: {e}")))
    }

    pub fn eccentricities(&self) -> Result<Eccentricities, CliError> {
        let [a, b, c] = self.ecc.ok_or_else(|| missing(self.kind, "ecc"))?;
        Eccentricities::new(a, b, c).map_err(|e| CliError::Config(format!("key `ecc`: {e}")))
    }

    /// Angle cells used at error rate `p`.
    pub fn cells_for(&self, p: f64) -> usize {
        self.cells.unwrap_or_else(|| ((1.0 / p).ceil() as usize).max(2))
    }

    /// Checks the keys `kind` needs.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |key: &str, msg: String| Err(CliError::Config(format!("key `{key}`: {msg}")));
        self.parsed_code()?;
        if self.trials == 0 && self.kind.is_simulation() {
            return bad("trials", "must be at least 1".into());
        }
        if self.threads == 0 {
            return bad("threads", "must be at least 1".into());
        }
        if self.kind.is_simulation() {
            if self.p.is_empty() {
                return Err(missing(self.kind, "p"));
            }
            let hi = if self.kind == Kind::Unital { 0.5 } else { 1.0 };
            if let Some(p) = self.p.iter().find(|&&p| !(p > 0.0 && p <= hi)) {
                return bad("p", format!("every rate must lie in (0, {hi}], got {p}"));
            }
            if self.max_cycles == 0 || self.max_cycles > aqec_core::simulation::MAX_CYCLES_LIMIT {
                return bad("max-cycles", format!("must lie in [1, 2^63], got {}", self.max_cycles));
            }
        }
        match self.kind {
            Kind::Pfail => {
                for (key, v) in [("px", self.px), ("py", self.py), ("pz", self.pz)] {
                    if v.is_none() {
                        return Err(missing(self.kind, key));
                    }
                }
            }
            Kind::Dephasing | Kind::Drift => {
                if let Some(t) = self.theta0 {
                    if !t.is_finite() {
                        return bad("theta0", "must be finite".into());
                    }
                }
                if matches!(self.cells, Some(c) if c < 2) {
                    return bad("cells", "must be at least 2".into());
                }
                if self.kind == Kind::Dephasing && self.kappa_sq != 0.0 {
                    return bad("kappa-sq", "must be 0 for dephasing; use the drift experiment".into());
                }
                if self.kind == Kind::Drift {
                    if !(self.kappa_sq > 0.0 && self.kappa_sq.is_finite()) {
                        return bad("kappa-sq", format!("drift needs a positive variance, got {}", self.kappa_sq));
                    }
                    if self.engine == Engine::FastForward {
                        return bad("engine", "drift runs only on the per-cycle engine".into());
                    }
                }
            }
            Kind::Unital => {
                self.eccentricities()?;
                if self.points == 0 {
                    return bad("points", "must be at least 1".into());
                }
            }
            Kind::Copt => {
                self.eccentricities()?;
                if self.mc_samples < aqec_core::analysis::MIN_COPT_SAMPLES {
                    return bad(
                        "mc-samples",
                        format!("must be at least {}", aqec_core::analysis::MIN_COPT_SAMPLES),
                    );
                }
            }
            Kind::GridSpacing => {
                self.eccentricities()?;
                if self.grid_sizes.is_empty() || self.grid_sizes.contains(&0) {
                    return bad("grid-sizes", "must be a non-empty list of positive sizes".into());
                }
                if self.trials == 0 {
                    return bad("trials", "must be at least 1".into());
                }
            }
            Kind::Fit => {
                if self.input.is_none() {
                    return Err(missing(self.kind, "input"));
                }
            }
        }
        Ok(())
    }
}

fn missing(kind: Kind, key: &str) -> CliError {
    CliError::Config(format!("missing key `{key}` required for kind = \"{kind}\""))
}
