//! Figures from results files: lifetime against error rate for dephasing
//! experiments, normalized lifetime against estimator error for unital ones.

use std::collections::BTreeMap;
use std::path::Path;

use aqec_core::analysis::{expected_code_performance, unital_baseline_lifetime};

use crate::config::{ExperimentConfig, Kind};
use crate::results::{read_results, ResultsFile};
use crate::run::BASELINE_SAMPLES;
use crate::svg::{render, Axis, Plot, Point};
use crate::CliError;

/// Samples of the overlaid code-performance curve.
const CURVE_POINTS: usize = 100;

pub fn read_and_plot(path: &Path) -> Result<String, CliError> {
    figure_for(&read_results(path)?)
}

pub fn figure_for(file: &ResultsFile) -> Result<String, CliError> {
    let plot = match &file.config {
        Some(cfg) if cfg.kind == Kind::Unital => unital_plot(cfg, file)?,
        cfg => lifetime_plot(cfg.as_ref().map(|c| c.kind), file),
    };
    Ok(render(&plot))
}

fn lifetime_plot(kind: Option<Kind>, file: &ResultsFile) -> Plot {
    let title = match kind {
        Some(k) => format!("{k}: lifetime against error rate"),
        None => "lifetime against error rate".into(),
    };
    Plot {
        title,
        x: Axis {
            label: "error rate p".into(),
            log: true,
        },
        y: Axis {
            label: "lifetime (cycles)".into(),
            log: true,
        },
        points: file
            .rows
            .iter()
            .map(|r| Point {
                x: r.p,
                y: r.lifetime_cycles as f64,
                censored: r.censored,
            })
            .collect(),
        curve: None,
    }
}

/// Normalized lifetime against the MLE's Frobenius error, with the
/// expected code-performance curve of the experiment's code and channel.
fn unital_plot(cfg: &ExperimentConfig, file: &ResultsFile) -> Result<Plot, CliError> {
    let code = cfg.parsed_code()?;
    let ecc = cfg.eccentricities()?;
    let mut baselines: BTreeMap<u64, f64> = BTreeMap::new();
    let mut points = Vec::with_capacity(file.rows.len());
    for r in &file.rows {
        let base = match baselines.get(&r.p.to_bits()) {
            Some(&b) => b,
            None => {
                let b = unital_baseline_lifetime(&code, r.p, ecc, BASELINE_SAMPLES, cfg.seed)
                    .map_err(|e| CliError::Config(format!("p = {}: {e}", r.p)))?
                    .value;
                baselines.insert(r.p.to_bits(), b);
                b
            }
        };
        points.push(Point {
            x: r.estimator_error.unwrap_or(f64::NAN),
            y: r.lifetime_cycles as f64 / base,
            censored: r.censored,
        });
    }
    let k1 = ecc.sorted_desc()[0];
    let hi = points
        .iter()
        .map(|p| p.x)
        .filter(|x| x.is_finite())
        .fold(1.0f64, f64::max);
    let curve: Vec<(f64, f64)> = (0..=CURVE_POINTS)
        .filter_map(|i| {
            let e = hi * i as f64 / CURVE_POINTS as f64;
            expected_code_performance(code.tz(), k1, e).ok().map(|c| (e, c))
        })
        .collect();
    Ok(Plot {
        title: format!("unital {}: normalized lifetime against MLE error", code.name()),
        x: Axis {
            label: "MLE Frobenius error".into(),
            log: false,
        },
        y: Axis {
            label: "normalized lifetime".into(),
            log: true,
        },
        points,
        curve: Some(("expected code performance".into(), curve)),
    })
}
