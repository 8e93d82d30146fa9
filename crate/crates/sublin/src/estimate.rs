//! The `estimate` subcommand as a library call.

use std::time::Instant;

use sublin_core::exact::{is_matching, max_matching_exact, ExactError};
use sublin_core::pipeline::{self, estimate_with_plugin, run_dichotomy, DichotomyOutcome, ExactPlugin, PipelineError};
use sublin_core::{Graph, MatrixOracle};

use crate::config::{ConfigErrorOrInstance, RunConfig, RunMode};
use crate::report::{DichotomySummary, RunOutcome, Verification};

#[derive(Debug, thiserror::Error)]
pub enum EstimateError {
    #[error(transparent)]
    Setup(#[from] ConfigErrorOrInstance),
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error("verification: {0}")]
    Exact(#[from] ExactError),
}

/// Builds the configured instance and runs it.
pub fn execute(cfg: &RunConfig) -> Result<RunOutcome, EstimateError> {
    let g = cfg.graph()?;
    execute_on(cfg, &g)
}

/// Runs the configured pipeline on `g`. The estimators see `g` only through oracles;
/// `--verify` then reads it directly for the exact value.
pub fn execute_on(cfg: &RunConfig, g: &Graph) -> Result<RunOutcome, EstimateError> {
    let pc = cfg.pipeline();
    let start = Instant::now();
    let (mut report, dichotomy) = match cfg.mode {
        RunMode::Matrix | RunMode::List | RunMode::Hybrid => (pipeline::run(g, cfg.pipeline_mode(), &pc)?.report, None),
        RunMode::Plugin => {
            let o = MatrixOracle::new(g);
            (
                estimate_with_plugin(&o, &pc, &mut ExactPlugin { q: cfg.plugin_q })?.report,
                None,
            )
        }
        RunMode::Dichotomy => {
            let d = run_dichotomy(g, cfg.base, &pc)?;
            let witness = match &d.outcome {
                DichotomyOutcome::MatchingWitness(m) => Some(m.iter().map(|e| [e.u(), e.v()]).collect()),
                DichotomyOutcome::ValueEstimate { .. } => None,
            };
            let summary = DichotomySummary {
                branch: d.outcome.branch(),
                mu_h: d.mu_h,
                proxy: d.proxy,
                witness,
            };
            (d.run.report, Some(summary))
        }
    };
    report.wall_ms = Some(start.elapsed().as_secs_f64() * 1e3);

    let verification = if cfg.verify {
        let mu = max_matching_exact(g)?.size;
        let witness_ok = dichotomy.as_ref().and_then(|d| d.witness.as_ref()).is_none_or(|w| {
            let edges: Vec<_> = w.iter().map(|&[u, v]| sublin_core::Edge::new(u, v)).collect();
            is_matching(&edges) && edges.iter().all(|e| g.has_edge(e.u(), e.v()))
        });
        Some(Verification {
            mu_exact: mu,
            pass: witness_ok && report.contains(mu as f64),
        })
    } else {
        None
    };
    Ok(RunOutcome {
        config: cfg.clone(),
        m: g.m(),
        report,
        verification,
        dichotomy,
    })
}
