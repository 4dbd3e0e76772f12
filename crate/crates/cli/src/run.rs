//! Executes experiments: simulation ensembles streamed to disk, and the
//! closed-form and Monte Carlo analyses.

use std::path::{Path, PathBuf};

use aqec_core::analysis::{
    c_opt_numeric, grid_spacing_study, haar_lifetime_bound_closed, lifetime_stats, optimal_lifetime_coefficient,
    power_law_fit, unital_baseline_lifetime, FitResult, GridSpacingRow, LifetimeSummary, McEstimate,
};
use aqec_core::channel::PauliRates;
use aqec_core::codes::{p_fail_exact, p_fail_leading};
use aqec_core::seed::mix64;
use aqec_core::simulation::{
    run_dephasing, run_ensemble_chunked, run_unital_trial, DephasingTrialConfig, EnsembleConfig, Theta0,
    TrialRecord, TrialResult, UnitalTrialConfig,
};
use serde::Serialize;

use crate::config::{ExperimentConfig, Kind};
use crate::report::read_and_plot;
use crate::results::{read_results, ResultRow, ResultWriter, SCHEMA_VERSION};
use crate::CliError;

/// Trials between flushes of `results.csv`.
pub const FLUSH_EVERY: u64 = 100;

/// Monte Carlo orientations behind each normalized-lifetime denominator.
pub const BASELINE_SAMPLES: u64 = 200_000;

#[derive(Clone, Debug, Serialize)]
pub struct GroupSummary {
    pub experiment_id: String,
    pub p: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_cells: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_points: Option<usize>,
    pub n_trials: u64,
    pub n_censored: u64,
    pub grid_restarts: u64,
    /// `None` when every trial was censored.
    pub lifetime: Option<LifetimeSummary>,
    pub mean_estimator_error: Option<f64>,
    /// Haar-average non-adaptive lifetime (unital only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub baseline_lifetime: Option<McEstimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub normalized_mean: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FitSummary {
    #[serde(flatten)]
    pub fit: FitResult,
    pub effective_distance: f64,
}

impl From<FitResult> for FitSummary {
    fn from(fit: FitResult) -> Self {
        Self {
            effective_distance: fit.effective_distance(),
            fit,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunSummary {
    pub schema_version: u32,
    pub kind: Kind,
    pub code: String,
    pub total_trials: u64,
    pub groups: Vec<GroupSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitSummary>,
    pub config: ExperimentConfig,
}

/// Runs a simulation experiment into `cfg.out`: `results.csv`,
/// `summary.json`, `figure.svg` and the canonical `config.toml`.
pub fn run_simulation(cfg: &ExperimentConfig) -> Result<RunSummary, CliError> {
    cfg.validate()?;
    let code = cfg.parsed_code()?;
    let out = &cfg.out;
    std::fs::create_dir_all(out).map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", out.display())))?;
    write_file(&out.join("config.toml"), &cfg.to_toml())?;
    let mut writer = ResultWriter::create(&out.join("results.csv"), cfg)?;

    let mut groups = Vec::new();
    let mut total = 0u64;
    for (i, &p) in cfg.p.iter().enumerate() {
        let id = format!("{}-{i}", cfg.kind);
        let ens = EnsembleConfig {
            trials: cfg.trials,
            base_seed: mix64(cfg.seed, i as u64),
            parallelism: cfg.threads,
        };
        let trial = trial_fn(cfg, code, p)?;
        let mut failure = None;
        let records = run_ensemble_chunked(&ens, FLUSH_EVERY, trial, |chunk: &[TrialRecord]| {
            for rec in chunk {
                match &rec.outcome {
                    Ok(r) => writer
                        .write(&ResultRow::from_trial(&id, rec.index, p, r))
                        .map_err(|e| aqec_core::Error::Numerical(e.to_string()))?,
                    Err(msg) => {
                        failure.get_or_insert_with(|| format!("{id} trial {} (seed {}): {msg}", rec.index, rec.seed));
                    }
                }
            }
            writer.flush().map_err(|e| aqec_core::Error::Numerical(e.to_string()))
        })
        .map_err(|e| CliError::Runtime(e.to_string()))?;
        if let Some(msg) = failure {
            return Err(CliError::Runtime(msg));
        }
        let results: Vec<TrialResult> = records.into_iter().filter_map(|r| r.outcome.ok()).collect();
        total += results.len() as u64;
        let group = summarize_group(cfg, &id, p, &results)?;
        eprintln!(
            "{id}: p = {p}, {} trials, mean lifetime {}",
            group.n_trials,
            group.lifetime.map_or("n/a (all censored)".into(), |l| format!("{:.4e}", l.mean))
        );
        groups.push(group);
    }
    writer.flush()?;
    drop(writer);

    let fit = fit_groups(cfg.kind, &groups);
    let summary = RunSummary {
        schema_version: SCHEMA_VERSION,
        kind: cfg.kind,
        code: cfg.code.clone(),
        total_trials: total,
        groups,
        fit,
        config: cfg.clone(),
    };
    write_file(&out.join("summary.json"), &to_json(&summary))?;
    let svg = read_and_plot(&out.join("results.csv"))?;
    write_file(&out.join("figure.svg"), &svg)?;
    Ok(summary)
}

type TrialFn = Box<dyn Fn(u64) -> aqec_core::Result<TrialResult> + Sync>;

fn trial_fn(cfg: &ExperimentConfig, code: aqec_core::codes::AsymmetricCode, p: f64) -> Result<TrialFn, CliError> {
    match cfg.kind {
        Kind::Dephasing | Kind::Drift => {
            let mut t = DephasingTrialConfig::new(code, p, cfg.cells_for(p));
            t.theta0 = cfg.theta0.map_or(Theta0::Random, Theta0::Value);
            t.kappa_sq = cfg.kappa_sq;
            t.engine = cfg.engine;
            t.strategy = cfg.strategy;
            t.max_cycles = cfg.max_cycles;
            t.validate().map_err(|e| CliError::Config(e.to_string()))?;
            Ok(Box::new(move |seed| run_dephasing(&t.with_seed(seed))))
        }
        Kind::Unital => {
            let mut t = UnitalTrialConfig::new(code, p, cfg.eccentricities()?, cfg.points);
            t.strategy = cfg.strategy;
            t.max_cycles = cfg.max_cycles;
            t.validate().map_err(|e| CliError::Config(e.to_string()))?;
            Ok(Box::new(move |seed| run_unital_trial(&t.with_seed(seed))))
        }
        k => Err(CliError::Config(format!("`{k}` is not a simulation"))),
    }
}

fn summarize_group(cfg: &ExperimentConfig, id: &str, p: f64, results: &[TrialResult]) -> Result<GroupSummary, CliError> {
    let n_censored = results.iter().filter(|r| r.censored).count() as u64;
    let lifetime = match lifetime_stats(results) {
        Ok(s) => Some(s),
        Err(aqec_core::Error::AllCensored(_)) => None,
        Err(e) => return Err(CliError::Runtime(e.to_string())),
    };
    let errs: Vec<f64> = results.iter().filter_map(|r| r.estimator_error).collect();
    let mean_estimator_error = (!errs.is_empty()).then(|| errs.iter().sum::<f64>() / errs.len() as f64);
    let unital = cfg.kind == Kind::Unital;
    let baseline_lifetime = if unital {
        Some(
            unital_baseline_lifetime(&cfg.parsed_code()?, p, cfg.eccentricities()?, BASELINE_SAMPLES, cfg.seed)
                .map_err(|e| CliError::Runtime(e.to_string()))?,
        )
    } else {
        None
    };
    Ok(GroupSummary {
        experiment_id: id.to_string(),
        p,
        n_cells: (!unital).then(|| cfg.cells_for(p)),
        n_points: unital.then_some(cfg.points),
        n_trials: results.len() as u64,
        n_censored,
        grid_restarts: results.iter().filter(|r| r.grid_restarted).count() as u64,
        normalized_mean: match (&lifetime, &baseline_lifetime) {
            (Some(l), Some(b)) => Some(l.mean / b.value),
            _ => None,
        },
        lifetime,
        mean_estimator_error,
        baseline_lifetime,
    })
}

/// Power-law fit of mean lifetime against `p` for dephasing sweeps with at
/// least three uncensored rates.
fn fit_groups(kind: Kind, groups: &[GroupSummary]) -> Option<FitSummary> {
    if kind == Kind::Unital {
        return None;
    }
    let pts: Vec<(f64, f64)> = groups.iter().filter_map(|g| Some((g.p, g.lifetime?.mean))).collect();
    power_law_fit(&pts).ok().map(FitSummary::from)
}

#[derive(Clone, Debug, Serialize)]
pub struct PfailReport {
    pub code: String,
    pub px: f64,
    pub py: f64,
    pub pz: f64,
    pub p_fail_exact: f64,
    pub p_fail_leading: f64,
}

pub fn pfail(cfg: &ExperimentConfig) -> Result<PfailReport, CliError> {
    cfg.validate()?;
    let code = cfg.parsed_code()?;
    let (px, py, pz) = (cfg.px.unwrap(), cfg.py.unwrap(), cfg.pz.unwrap());
    let rates = PauliRates::new(px, py, pz).map_err(|e| CliError::Config(e.to_string()))?;
    Ok(PfailReport {
        code: code.name(),
        px,
        py,
        pz,
        p_fail_exact: p_fail_exact(&code, &rates),
        p_fail_leading: p_fail_leading(&code, &rates),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CoptReport {
    pub code: String,
    pub ecc: [f64; 3],
    pub c_opt: f64,
    pub std_error: f64,
    pub n_samples: u64,
    /// Closed-form sphere average of `(1 − kx)^{−2}` with `k₂` lowered to `k₃`.
    pub closed_form_average: f64,
    pub optimal_coefficient: f64,
}

pub fn copt(cfg: &ExperimentConfig) -> Result<CoptReport, CliError> {
    cfg.validate()?;
    let code = cfg.parsed_code()?;
    let ecc = cfg.eccentricities()?;
    let est = c_opt_numeric(&code, ecc, cfg.mc_samples, cfg.seed).map_err(|e| CliError::Runtime(e.to_string()))?;
    Ok(CoptReport {
        code: code.name(),
        ecc: ecc.as_array(),
        c_opt: est.value,
        std_error: est.std_error,
        n_samples: est.n_samples,
        closed_form_average: haar_lifetime_bound_closed(ecc),
        optimal_coefficient: optimal_lifetime_coefficient(ecc),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GridSpacingReport {
    pub ecc: [f64; 3],
    pub trials: u64,
    pub rows: Vec<GridSpacingRow>,
    /// Log-log slope of mean minimum distance against grid size.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slope: Option<f64>,
}

pub fn grid_spacing(cfg: &ExperimentConfig) -> Result<GridSpacingReport, CliError> {
    cfg.validate()?;
    let ecc = cfg.eccentricities()?;
    let rows = grid_spacing_study(ecc, &cfg.grid_sizes, cfg.trials, &cfg.eps, cfg.seed)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.n_points as f64, r.mean_min_distance)).collect();
    Ok(GridSpacingReport {
        ecc: ecc.as_array(),
        trials: cfg.trials,
        slope: power_law_fit(&pts).ok().map(|f| f.slope),
        rows,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct FitPoint {
    pub p: f64,
    pub mean_lifetime: f64,
    pub n_trials: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct FitReport {
    pub input: PathBuf,
    pub points: Vec<FitPoint>,
    pub fit: FitSummary,
}

/// Fits mean uncensored lifetime against `p` over the rows of a results file.
pub fn fit(cfg: &ExperimentConfig) -> Result<FitReport, CliError> {
    cfg.validate()?;
    let input = cfg.input.clone().expect("validated");
    let file = read_results(&input)?;
    let mut by_p: Vec<(f64, Vec<f64>)> = Vec::new();
    for r in file.rows.iter().filter(|r| !r.censored) {
        match by_p.iter_mut().find(|(p, _)| *p == r.p) {
            Some((_, v)) => v.push(r.lifetime_cycles as f64),
            None => by_p.push((r.p, vec![r.lifetime_cycles as f64])),
        }
    }
    by_p.sort_by(|a, b| b.0.total_cmp(&a.0));
    let points: Vec<FitPoint> = by_p
        .iter()
        .map(|(p, v)| FitPoint {
            p: *p,
            mean_lifetime: v.iter().sum::<f64>() / v.len() as f64,
            n_trials: v.len(),
        })
        .collect();
    let pairs: Vec<(f64, f64)> = points.iter().map(|f| (f.p, f.mean_lifetime)).collect();
    let fit = power_law_fit(&pairs).map_err(|e| CliError::Runtime(format!("{}: {e}", input.display())))?;
    Ok(FitReport {
        input,
        points,
        fit: fit.into(),
    })
}

/// Renders the figure of a results file to `out`.
pub fn report(input: &Path, out: &Path) -> Result<(), CliError> {
    let svg = read_and_plot(input)?;
    write_file(out, &svg)
}

pub fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))
}
