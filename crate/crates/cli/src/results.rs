//! `results.csv`: one row per trial under a versioned column schema.
//!
//! The file opens with `#` comment lines carrying the schema version and
//! the canonical experiment config as TOML (minus execution-only keys, so
//! the bytes depend only on the experiment), then a header row.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use aqec_core::simulation::TrialResult;

use crate::config::ExperimentConfig;
use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

pub const COLUMNS: [&str; 11] = [
    "experiment_id",
    "trial_id",
    "seed",
    "p",
    "lifetime_cycles",
    "censored",
    "estimator_error",
    "failure_wx",
    "failure_wy",
    "failure_wz",
    "n_updates",
];

#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub experiment_id: String,
    pub trial_id: u64,
    pub seed: u64,
    pub p: f64,
    pub lifetime_cycles: u64,
    pub censored: bool,
    pub estimator_error: Option<f64>,
    pub failure: Option<[u32; 3]>,
    pub n_updates: u64,
}

impl ResultRow {
    pub fn from_trial(experiment_id: &str, trial_id: u64, p: f64, r: &TrialResult) -> Self {
        Self {
            experiment_id: experiment_id.to_string(),
            trial_id,
            seed: r.seed,
            p,
            lifetime_cycles: r.lifetime_cycles,
            censored: r.censored,
            estimator_error: r.estimator_error,
            failure: r.failure_triple.map(|t| [t.wx, t.wy, t.wz]),
            n_updates: r.n_posterior_updates,
        }
    }

    fn fields(&self) -> [String; 11] {
        let w = |i: usize| self.failure.map_or(String::new(), |f| f[i].to_string());
        [
            self.experiment_id.clone(),
            self.trial_id.to_string(),
            self.seed.to_string(),
            float17(self.p),
            self.lifetime_cycles.to_string(),
            self.censored.to_string(),
            self.estimator_error.map_or(String::new(), float17),
            w(0),
            w(1),
            w(2),
            self.n_updates.to_string(),
        ]
    }

    fn parse(rec: &csv::StringRecord, line: u64) -> Result<Self, CliError> {
        let bad = |col: &str, v: &str| CliError::Config(format!("line {line}: column `{col}` has bad value `{v}`"));
        let get = |i: usize| rec.get(i).unwrap_or("");
        let num = |i: usize| get(i).parse::<u64>().map_err(|_| bad(COLUMNS[i], get(i)));
        let float = |i: usize| get(i).parse::<f64>().map_err(|_| bad(COLUMNS[i], get(i)));
        let opt_w = |i: usize| -> Result<Option<u32>, CliError> {
            match get(i) {
                "" => Ok(None),
                v => v.parse().map(Some).map_err(|_| bad(COLUMNS[i], v)),
            }
        };
        let ws = [opt_w(7)?, opt_w(8)?, opt_w(9)?];
        let failure = match ws {
            [Some(x), Some(y), Some(z)] => Some([x, y, z]),
            [None, None, None] => None,
            _ => return Err(bad("failure_wx", "partial failure triple")),
        };
        Ok(Self {
            experiment_id: get(0).to_string(),
            trial_id: num(1)?,
            seed: num(2)?,
            p: float(3)?,
            lifetime_cycles: num(4)?,
            censored: get(5).parse().map_err(|_| bad(COLUMNS[5], get(5)))?,
            estimator_error: match get(6) {
                "" => None,
                _ => Some(float(6)?),
            },
            failure,
            n_updates: num(10)?,
        })
    }
}

/// Round-trippable float text with 17 significant digits.
pub fn float17(x: f64) -> String {
    format!("{x:.16e}")
}

/// Streams rows to `results.csv`; call [`ResultWriter::flush`] to make a
/// partial file durable.
pub struct ResultWriter {
    inner: csv::Writer<BufWriter<File>>,
}

impl ResultWriter {
    pub fn create(path: &Path, cfg: &ExperimentConfig) -> Result<Self, CliError> {
        let file = File::create(path).map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", path.display())))?;
        let mut out = BufWriter::new(file);
        let io = |e: std::io::Error| CliError::Runtime(format!("cannot write {}: {e}", path.display()));
        writeln!(out, "# schema_version: {SCHEMA_VERSION}").map_err(io)?;
        for line in cfg.experiment_toml().lines() {
            writeln!(out, "# config: {line}").map_err(io)?;
        }
        let mut inner = csv::WriterBuilder::new().from_writer(out);
        inner
            .write_record(COLUMNS)
            .map_err(|e| CliError::Runtime(e.to_string()))?;
        Ok(Self { inner })
    }

    pub fn write(&mut self, row: &ResultRow) -> Result<(), CliError> {
        self.inner
            .write_record(row.fields())
            .map_err(|e| CliError::Runtime(e.to_string()))
    }

    pub fn flush(&mut self) -> Result<(), CliError> {
        self.inner.flush().map_err(|e| CliError::Runtime(e.to_string()))
    }
}

/// Contents of a results file.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultsFile {
    pub config: Option<ExperimentConfig>,
    pub rows: Vec<ResultRow>,
}

/// Reads a results file. A zero-byte file is an empty result set; any other
/// header or version mismatch is a schema error.
pub fn read_results(path: &Path) -> Result<ResultsFile, CliError> {
    let file = File::open(path).map_err(|e| CliError::Config(format!("cannot open {}: {e}", path.display())))?;
    let mut version = None;
    let mut config_lines = Vec::new();
    let mut body = String::new();
    let mut body_start = 0u64;
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        if let Some(c) = line.strip_prefix('#') {
            let c = c.trim_start();
            if let Some(v) = c.strip_prefix("schema_version:") {
                version = Some(v.trim().to_string());
            } else if let Some(t) = c.strip_prefix("config: ") {
                config_lines.push(t.to_string());
            } else if let Some(t) = c.strip_prefix("config:") {
                config_lines.push(t.to_string());
            }
            continue;
        }
        if body.is_empty() {
            body_start = i as u64 + 1;
        }
        body.push_str(&line);
        body.push('\n');
    }
    if version.is_none() && body.trim().is_empty() {
        return Ok(ResultsFile { config: None, rows: Vec::new() });
    }
    match version.as_deref() {
        Some(v) if v == SCHEMA_VERSION.to_string() => {}
        Some(v) => {
            return Err(CliError::Config(format!(
                "{}: schema_version {v} is not supported (expected {SCHEMA_VERSION})",
                path.display()
            )))
        }
        None => return Err(CliError::Config(format!("{}: missing `# schema_version` line", path.display()))),
    }
    let config = if config_lines.is_empty() {
        None
    } else {
        Some(ExperimentConfig::from_toml_str(&config_lines.join("\n"), None)?)
    };
    let mut reader = csv::ReaderBuilder::new().from_reader(body.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?
        .clone();
    if header.iter().ne(COLUMNS.iter().copied()) {
        return Err(CliError::Config(format!(
            "{}: header does not match schema {SCHEMA_VERSION}; expected {}",
            path.display(),
            COLUMNS.join(",")
        )));
    }
    let mut rows = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let line = body_start + 1 + i as u64;
        let rec = rec.map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if rec.len() != COLUMNS.len() {
            return Err(CliError::Config(format!(
                "{}: line {line} has {} columns, expected {}",
                path.display(),
                rec.len(),
                COLUMNS.len()
            )));
        }
        rows.push(ResultRow::parse(&rec, line)?);
    }
    Ok(ResultsFile { config, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Kind;

    fn row(i: u64) -> ResultRow {
        ResultRow {
            experiment_id: "dephasing-0".into(),
            trial_id: i,
            seed: u64::MAX - i,
            p: 0.1 + 0.2,
            lifetime_cycles: 12345 + i,
            censored: i == 1,
            estimator_error: (i != 2).then_some(1.0 / 3.0),
            failure: (i != 1).then_some([0, 1, 3]),
            n_updates: 7,
        }
    }

    #[test]
    fn float_text_round_trips() {
        for x in [0.1 + 0.2, 1e-300, 3e-3, 2.0f64.sqrt(), 123456789.123] {
            assert_eq!(float17(x).parse::<f64>().unwrap(), x);
        }
        assert_eq!(float17(0.003), "3.0000000000000001e-3");
    }

    #[test]
    fn write_then_read() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("results.csv");
        let mut cfg = ExperimentConfig::defaults(Kind::Dephasing);
        cfg.p = vec![0.3];
        let mut w = ResultWriter::create(&path, &cfg).unwrap();
        let rows: Vec<ResultRow> = (0..3).map(row).collect();
        for r in &rows {
            w.write(r).unwrap();
        }
        w.flush().unwrap();
        drop(w);
        let back = read_results(&path).unwrap();
        assert_eq!(back.rows, rows);
        let back_cfg = back.config.unwrap();
        assert_eq!(back_cfg.experiment_toml(), cfg.experiment_toml());
    }

    #[test]
    fn schema_errors() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("r.csv");
        std::fs::write(&path, "# schema_version: 1\na,b\n").unwrap();
        assert!(read_results(&path).unwrap_err().to_string().contains("header"));
        std::fs::write(&path, "# schema_version: 9\n").unwrap();
        assert!(read_results(&path).is_err());
        std::fs::write(&path, "").unwrap();
        assert!(read_results(&path).unwrap().rows.is_empty());
        let header = COLUMNS.join(",");
        std::fs::write(&path, format!("# schema_version: 1\n{header}\nx,notanumber,1,0.1,5,false,,,,,0\n")).unwrap();
        let msg = read_results(&path).unwrap_err().to_string();
        assert!(msg.contains("trial_id") && msg.contains("line 3"), "{msg}");
    }
}
