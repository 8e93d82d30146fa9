//! Size sweeps: one pipeline run per `(n, seed)` on random graphs of fixed average degree.

use rayon::prelude::*;
use sublin_core::generate::{generate, GraphKind};
use sublin_core::pipeline::{self, Mode, PipelineConfig, PipelineError};
use sublin_core::Seed;

use crate::report::{csv_row, CsvRow};
use crate::stats::log_log_slope;

#[derive(Clone, Debug)]
pub struct SweepSpec {
    pub ns: Vec<usize>,
    pub seeds: Vec<u64>,
    /// Expected average degree of the Erdős–Rényi instances.
    pub avg_degree: f64,
    pub mode: Mode,
    pub config: PipelineConfig,
}

#[derive(Debug, thiserror::Error)]
pub enum SweepError {
    #[error("the seed list is empty")]
    NoSeeds,
    #[error("the size list is empty")]
    NoSizes,
    #[error("sizes must be strictly increasing and at least 2")]
    NotMonotone,
    #[error("average degree must lie in [0, n - 1]")]
    BadDegree,
    #[error("n = {n}, seed {seed}: {source}")]
    Run { n: usize, seed: u64, source: PipelineError },
    #[error(transparent)]
    Generate(#[from] sublin_core::generate::GenerateError),
}

#[derive(Clone, Debug)]
pub struct SweepResult {
    /// Sorted by `(n, seed)`.
    pub rows: Vec<CsvRow>,
    /// Log-log slope of the query count of the swept model against `n`.
    pub slope: f64,
}

impl SweepResult {
    /// Mean query count of the swept model per `n`.
    pub fn means(&self, mode: Mode) -> Vec<(usize, f64)> {
        let mut out: Vec<(usize, f64, u32)> = Vec::new();
        for r in &self.rows {
            let q = queries(mode, r) as f64;
            match out.last_mut() {
                Some(last) if last.0 == r.n => {
                    last.1 += q;
                    last.2 += 1;
                }
                _ => out.push((r.n, q, 1)),
            }
        }
        out.into_iter().map(|(n, s, c)| (n, s / f64::from(c))).collect()
    }
}

fn queries(mode: Mode, r: &CsvRow) -> u64 {
    match mode {
        Mode::Matrix => r.q_matrix,
        Mode::List | Mode::Hybrid => r.q_list,
    }
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult, SweepError> {
    if spec.seeds.is_empty() {
        return Err(SweepError::NoSeeds);
    }
    if spec.ns.is_empty() {
        return Err(SweepError::NoSizes);
    }
    if spec.ns[0] < 2 || spec.ns.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SweepError::NotMonotone);
    }
    if !(spec.avg_degree >= 0.0 && spec.avg_degree <= (spec.ns[0] - 1) as f64) {
        return Err(SweepError::BadDegree);
    }
    let jobs: Vec<(usize, u64)> = spec
        .ns
        .iter()
        .flat_map(|&n| spec.seeds.iter().map(move |&s| (n, s)))
        .collect();
    let mut rows = jobs
        .par_iter()
        .map(|&(n, seed)| {
            let p = spec.avg_degree / (n - 1) as f64;
            let g = generate(
                &GraphKind::ErdosRenyi { n, p },
                Seed::new(seed).derive_index("sweep", n as u64),
            )?;
            let cfg = PipelineConfig { seed, ..spec.config };
            let start = std::time::Instant::now();
            let mut r = pipeline::run(&g, spec.mode, &cfg)
                .map_err(|source| SweepError::Run { n, seed, source })?
                .report;
            r.wall_ms = Some(start.elapsed().as_secs_f64() * 1e3);
            Ok(csv_row(spec.mode.as_str(), g.m(), &r, None))
        })
        .collect::<Result<Vec<_>, SweepError>>()?;
    rows.sort_by_key(|r| (r.n, r.seed));
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| (r.n as f64, queries(spec.mode, r).max(1) as f64))
        .collect();
    Ok(SweepResult {
        rows,
        slope: log_log_slope(&pts),
    })
}
