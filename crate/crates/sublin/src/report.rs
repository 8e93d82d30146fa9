//! JSON and CSV renderings of a finished run.

use std::collections::BTreeMap;
use std::fs::OpenOptions;
use std::path::Path;

use serde::Serialize;
use sublin_core::pipeline::EstimateReport;

use crate::config::RunConfig;

pub const SCHEMA: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verification {
    pub mu_exact: usize,
    /// The true value lies in the reported interval, and any witness is a matching of the input.
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DichotomySummary {
    pub branch: &'static str,
    pub mu_h: usize,
    pub proxy: f64,
    pub witness: Option<Vec<[u32; 2]>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepJson {
    pub name: &'static str,
    pub matrix_queries: u64,
    pub list_queries: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JsonReport {
    pub schema: u32,
    pub config: BTreeMap<&'static str, String>,
    pub mode: String,
    pub pipeline: &'static str,
    pub n: usize,
    pub m: usize,
    pub epsilon: f64,
    pub gamma: f64,
    pub scale: f64,
    pub estimator_scale: f64,
    pub beta: u32,
    pub seed: u64,
    pub alpha: f64,
    pub lower: f64,
    pub upper: f64,
    pub steps: Vec<StepJson>,
    pub matrix_queries: u64,
    pub list_queries: u64,
    pub ops: usize,
    pub rounds: u64,
    pub h_size: usize,
    pub v_small: usize,
    pub mu_star: f64,
    pub m_star: f64,
    pub delta_star: f64,
    pub early_exit: Option<&'static str>,
    pub coarse_retries: u32,
    pub estimator_samples: u64,
    pub wall_ms: Option<f64>,
    pub notes: Vec<String>,
    pub verification: Option<Verification>,
    pub dichotomy: Option<DichotomySummary>,
}

/// Everything a finished `estimate` run reports.
#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub config: RunConfig,
    /// Edge count of the instance, read offline for the report only.
    pub m: usize,
    pub report: EstimateReport,
    pub verification: Option<Verification>,
    pub dichotomy: Option<DichotomySummary>,
}

#[derive(Clone, Debug, PartialEq, Serialize, serde::Deserialize)]
pub struct CsvRow {
    pub mode: String,
    pub n: usize,
    pub m: usize,
    pub eps: f64,
    pub gamma: f64,
    pub scale: f64,
    pub seed: u64,
    pub alpha: f64,
    pub lower: f64,
    pub upper: f64,
    pub mu_exact: Option<usize>,
    pub q_matrix: u64,
    pub q_list: u64,
    pub ops: usize,
    pub ms: Option<f64>,
}

pub const CSV_COLUMNS: &[&str] = &[
    "mode", "n", "m", "eps", "gamma", "scale", "seed", "alpha", "lower", "upper", "mu_exact", "q_matrix", "q_list",
    "ops", "ms",
];

impl RunOutcome {
    pub fn to_json(&self) -> JsonReport {
        let r = &self.report;
        JsonReport {
            schema: SCHEMA,
            config: self.config.pairs().into_iter().collect(),
            mode: self.config.mode.as_str().into(),
            pipeline: r.mode.as_str(),
            n: r.n,
            m: self.m,
            epsilon: r.epsilon,
            gamma: r.gamma,
            scale: r.scale,
            estimator_scale: r.estimator_scale,
            beta: r.beta,
            seed: r.seed,
            alpha: r.alpha,
            lower: r.lower,
            upper: r.upper,
            steps: r
                .steps
                .iter()
                .map(|s| StepJson {
                    name: s.name,
                    matrix_queries: s.queries.matrix_queries,
                    list_queries: s.queries.list_queries,
                })
                .collect(),
            matrix_queries: r.total.matrix_queries,
            list_queries: r.total.list_queries,
            ops: r.ops,
            rounds: r.rounds,
            h_size: r.h_size,
            v_small: r.v_small,
            mu_star: r.mu_star,
            m_star: r.m_star,
            delta_star: r.delta_star,
            early_exit: r.early_exit,
            coarse_retries: r.coarse_retries,
            estimator_samples: r.estimator_samples,
            wall_ms: r.wall_ms,
            notes: r.notes.clone(),
            verification: self.verification.clone(),
            dichotomy: self.dichotomy.clone(),
        }
    }

    pub fn to_csv_row(&self) -> CsvRow {
        csv_row(
            self.config.mode.as_str(),
            self.m,
            &self.report,
            self.verification.as_ref().map(|v| v.mu_exact),
        )
    }
}

pub fn csv_row(mode: &str, m: usize, r: &EstimateReport, mu_exact: Option<usize>) -> CsvRow {
    CsvRow {
        mode: mode.into(),
        n: r.n,
        m,
        eps: r.epsilon,
        gamma: r.gamma,
        scale: r.scale,
        seed: r.seed,
        alpha: r.alpha,
        lower: r.lower,
        upper: r.upper,
        mu_exact,
        q_matrix: r.total.matrix_queries,
        q_list: r.total.list_queries,
        ops: r.ops,
        ms: r.wall_ms,
    }
}

/// Writes `rows` to a fresh CSV file with a header.
pub fn write_csv(path: &Path, rows: &[CsvRow]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Appends `rows`, writing the header only when the file is new or empty.
pub fn append_csv(path: &Path, rows: &[CsvRow]) -> Result<(), csv::Error> {
    let fresh = std::fs::metadata(path).map_or(true, |m| m.len() == 0);
    let file = OpenOptions::new().create(true).append(true).open(path)?;
    let mut w = csv::WriterBuilder::new().has_headers(fresh).from_writer(file);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}
