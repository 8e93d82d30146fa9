//! End-to-end estimators.
//!
//! * Matrix model: estimate `m`, build `H` with `μ* = n, m* = m̂, Δ* = n`, classify
//!   `V_small` with uniform partners, then estimate `μ(G_small)`. Reported interval
//!   `[α, 1.5α + c εn]`.
//! * List model: exact degrees, coarse `λ`, build `H` with `μ* = λ, m* = m, Δ* = Δ`,
//!   classify with list slots, estimate. Interval `[α, (1.5 + c ε) α]`.
//! * Hybrid: as the list model but with `Δ* = d` and everything restricted to
//!   `V* = {v : deg_v ≤ d/ε}`. Interval `[α, 1.5α + c εn]`.
//!
//! `c` is [`PipelineConfig::slack`].

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::edbs::{build_edbs, BuildError, Edbs, EdbsError, Params, SchematicParams, SmallAccess, SmallSubgraph};
use crate::exact::{maximum_mate, ExactError};
use crate::graph::{Edge, Graph, Vertex};
use crate::local::{
    coarse_estimate, estimate_mu_yoshida, yoshida_levels, Fallback, LayeredOracle, LocalConfig, OracleError, RankSource,
};
use crate::math;
use crate::oracle::{ListOracle, MatrixOracle, QueryCounters, QueryError};
use crate::sampling::{
    build_degree_table, check_epsilon, check_scale, classify_v_small, estimate_edge_count, sample_edge_list,
    sample_edge_matrix, ClassifyMode, ClassifyParams, ClassifyStrategy, SamplingError, SmallVertexSet, VStar,
};
use crate::seed::Seed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Matrix,
    List,
    Hybrid,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Matrix => "matrix",
            Mode::List => "list",
            Mode::Hybrid => "hybrid",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "matrix" => Ok(Mode::Matrix),
            "list" => Ok(Mode::List),
            "hybrid" => Ok(Mode::Hybrid),
            _ => Err(alloc::format!("unknown mode `{s}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Edbs(#[from] EdbsError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error("invalid configuration: {0}")]
    Invalid(&'static str),
    #[error("plugin failed: {0}")]
    Plugin(String),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PipelineConfig {
    pub epsilon: f64,
    /// Multiplier on the polylogarithmic sampling constants.
    pub scale: f64,
    /// Separate multiplier for the final estimator's sample count; `scale` when unset.
    pub estimator_scale: Option<f64>,
    /// Explicit `γ`; otherwise `gamma_c · ε²`.
    pub gamma: Option<f64>,
    pub gamma_c: f64,
    pub c_beta: f64,
    /// Explicit `β`; otherwise derived from `c_beta`.
    pub beta: Option<u32>,
    /// Constant on the `εn` / `ε` term of the reported interval.
    pub slack: f64,
    pub classify: ClassifyStrategy,
    /// Local oracle settings for the final estimator. The fallback degree is replaced by
    /// the pipeline's bound on the degree of `G_small`.
    pub local: LocalConfig,
    pub seed: u64,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            epsilon: 0.25,
            scale: 1.0,
            estimator_scale: None,
            gamma: None,
            gamma_c: 0.125,
            c_beta: crate::edbs::DEFAULT_C_BETA,
            beta: None,
            slack: 6.0,
            classify: ClassifyStrategy::Auto,
            local: LocalConfig::default(),
            seed: 0,
        }
    }
}

impl PipelineConfig {
    pub fn gamma(&self) -> f64 {
        self.gamma.unwrap_or(self.gamma_c * self.epsilon * self.epsilon)
    }

    pub fn estimator_scale(&self) -> f64 {
        self.estimator_scale.unwrap_or(self.scale)
    }

    pub fn params(&self) -> Result<Params, EdbsError> {
        match self.beta {
            Some(b) => Params::with_beta(self.epsilon, b),
            None => Params::with_c_beta(self.epsilon, self.c_beta),
        }
    }

    fn validate(&self) -> Result<(), PipelineError> {
        check_epsilon(self.epsilon)?;
        if self.epsilon > 0.25 {
            return Err(PipelineError::Invalid("the pipelines take epsilon in (0, 1/4]"));
        }
        check_scale(self.scale)?;
        check_scale(self.estimator_scale())?;
        let g = self.gamma();
        if !(g > 0.0 && g < 1.0) {
            return Err(PipelineError::Invalid("gamma must lie in (0, 1)"));
        }
        if !(self.slack >= 0.0) {
            return Err(PipelineError::Invalid("slack must be non-negative"));
        }
        Ok(())
    }
}

/// `(lower, upper)` for an estimate `alpha`.
pub fn interval(mode: Mode, alpha: f64, epsilon: f64, n: usize, slack: f64) -> (f64, f64) {
    match mode {
        Mode::Matrix | Mode::Hybrid => (alpha, 1.5 * alpha + slack * epsilon * n as f64),
        Mode::List => (alpha, (1.5 + slack * epsilon) * alpha),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepCount {
    pub name: &'static str,
    pub queries: QueryCounters,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EstimateReport {
    pub mode: Mode,
    pub n: usize,
    pub epsilon: f64,
    pub scale: f64,
    pub estimator_scale: f64,
    pub gamma: f64,
    pub beta: u32,
    pub seed: u64,
    pub alpha: f64,
    pub lower: f64,
    pub upper: f64,
    pub steps: Vec<StepCount>,
    pub total: QueryCounters,
    /// Insert and delete operations performed on `H`.
    pub ops: usize,
    pub rounds: u64,
    pub h_size: usize,
    pub v_small: usize,
    pub mu_star: f64,
    pub m_star: f64,
    pub delta_star: f64,
    /// Reason for returning 0 before building `H`, if any.
    pub early_exit: Option<&'static str>,
    /// Doublings of the coarse estimator's sample count.
    pub coarse_retries: u32,
    pub estimator_samples: u64,
    /// Filled in by callers that measure time.
    pub wall_ms: Option<f64>,
    pub notes: Vec<String>,
}

impl EstimateReport {
    fn new(mode: Mode, n: usize, cfg: &PipelineConfig, beta: u32) -> Self {
        EstimateReport {
            mode,
            n,
            epsilon: cfg.epsilon,
            scale: cfg.scale,
            estimator_scale: cfg.estimator_scale(),
            gamma: cfg.gamma(),
            beta,
            seed: cfg.seed,
            alpha: 0.0,
            lower: 0.0,
            upper: 0.0,
            steps: Vec::new(),
            total: QueryCounters::default(),
            ops: 0,
            rounds: 0,
            h_size: 0,
            v_small: 0,
            mu_star: 0.0,
            m_star: 0.0,
            delta_star: 0.0,
            early_exit: None,
            coarse_retries: 0,
            estimator_samples: 0,
            wall_ms: None,
            notes: Vec::new(),
        }
    }

    fn finish(&mut self, alpha: f64, slack: f64) {
        self.alpha = alpha;
        let (lo, hi) = interval(self.mode, alpha, self.epsilon, self.n, slack);
        self.lower = lo;
        self.upper = hi;
        self.total = self.steps.iter().fold(QueryCounters::default(), |a, s| a + s.queries);
    }

    /// Whether `mu` lies in the reported interval.
    pub fn contains(&self, mu: f64) -> bool {
        self.lower <= mu + 1e-9 && mu <= self.upper + 1e-9
    }
}

/// A report together with the intermediate objects, for verification.
#[derive(Clone, Debug)]
pub struct PipelineRun {
    pub report: EstimateReport,
    pub edbs: Option<Edbs>,
    pub small: Option<SmallVertexSet>,
    pub vstar: Option<VStar>,
}

/// What a Step 4 plugin gets to know besides `G_small`.
#[derive(Clone, Copy, Debug)]
pub struct PluginContext {
    pub epsilon: f64,
    pub scale: f64,
    /// Upper bound on the degree of `G_small`.
    pub max_degree: f64,
    pub seed: Seed,
    pub local: LocalConfig,
}

/// A `(1, εn)` estimator of `μ(G_small)` with advertised query exponent `q`.
pub trait ValuePlugin {
    fn exponent(&self) -> f64;
    fn estimate(
        &mut self,
        g: &mut SmallSubgraph<'_, '_>,
        universe: &[Vertex],
        ctx: &PluginContext,
    ) -> Result<PluginEstimate, PipelineError>;
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PluginEstimate {
    pub value: f64,
    pub samples: u64,
}

/// The vertex-sampling estimator over the layered matching oracle.
#[derive(Clone, Copy, Debug, Default)]
pub struct YoshidaPlugin;

impl ValuePlugin for YoshidaPlugin {
    fn exponent(&self) -> f64 {
        1.0
    }

    fn estimate(
        &mut self,
        g: &mut SmallSubgraph<'_, '_>,
        universe: &[Vertex],
        ctx: &PluginContext,
    ) -> Result<PluginEstimate, PipelineError> {
        let local = LocalConfig {
            fallback: match ctx.local.fallback {
                Fallback::Never => Fallback::Never,
                Fallback::ComponentCap { .. } => Fallback::ComponentCap {
                    max_degree: math::to_count(math::ceil(ctx.max_degree)),
                },
            },
            ..ctx.local
        };
        let ranks = RankSource::new(ctx.seed.derive("estimator-ranks"));
        let mut oracle = LayeredOracle::new(g, ranks, yoshida_levels(ctx.epsilon), local);
        let mut rng = ctx.seed.derive("estimator-samples").rng();
        let est = estimate_mu_yoshida(&mut oracle, universe, ctx.max_degree, ctx.epsilon, ctx.scale, &mut rng)?;
        Ok(PluginEstimate {
            value: est.value,
            samples: est.samples,
        })
    }
}

/// Materialises `G_small` and returns its exact maximum matching size.
#[derive(Clone, Copy, Debug)]
pub struct ExactPlugin {
    /// Exponent to advertise.
    pub q: f64,
}

impl ValuePlugin for ExactPlugin {
    fn exponent(&self) -> f64 {
        self.q
    }

    fn estimate(
        &mut self,
        g: &mut SmallSubgraph<'_, '_>,
        universe: &[Vertex],
        _ctx: &PluginContext,
    ) -> Result<PluginEstimate, PipelineError> {
        let mut index = hashbrown::HashMap::new();
        for (i, &v) in universe.iter().enumerate() {
            index.insert(v, i);
        }
        let mut adj = Vec::with_capacity(universe.len());
        for &v in universe {
            adj.push(
                g.neighbors_of(v)?
                    .iter()
                    .filter_map(|w| index.get(w).copied())
                    .collect(),
            );
        }
        let mate = maximum_mate(&adj, alloc::vec![usize::MAX; universe.len()]);
        let size = mate.iter().filter(|&&m| m != usize::MAX).count() / 2;
        Ok(PluginEstimate {
            value: size as f64,
            samples: 0,
        })
    }
}

struct Steps<F: Fn() -> QueryCounters> {
    read: F,
    last: QueryCounters,
    out: Vec<StepCount>,
}

impl<F: Fn() -> QueryCounters> Steps<F> {
    fn new(read: F) -> Self {
        let last = read();
        Steps {
            read,
            last,
            out: Vec::new(),
        }
    }

    fn mark(&mut self, name: &'static str) {
        let now = (self.read)();
        self.out.push(StepCount {
            name,
            queries: now - self.last,
        });
        self.last = now;
    }
}

/// Degree bound on `G_small`: `β + (1 + ε)(Δ*)^γ / ε`, capped by `cap`.
fn small_degree_bound(beta: u32, epsilon: f64, delta_star: f64, gamma: f64, cap: f64) -> f64 {
    let b = f64::from(beta) + (1.0 + epsilon) * math::powf(delta_star.max(1.0), gamma) / epsilon;
    b.min(cap).max(1.0)
}

pub fn estimate_matrix(o: &MatrixOracle<'_>, cfg: &PipelineConfig) -> Result<PipelineRun, PipelineError> {
    matrix_pipeline(o, cfg, &mut YoshidaPlugin)
}

/// The matrix pipeline with `γ = 1/(1 + q)` and Step 4 delegated to `plugin`.
pub fn estimate_with_plugin(
    o: &MatrixOracle<'_>,
    cfg: &PipelineConfig,
    plugin: &mut dyn ValuePlugin,
) -> Result<PipelineRun, PipelineError> {
    let cfg = PipelineConfig {
        gamma: Some(1.0 / (1.0 + plugin.exponent())),
        ..*cfg
    };
    matrix_pipeline(o, &cfg, plugin)
}

fn matrix_pipeline(
    o: &MatrixOracle<'_>,
    cfg: &PipelineConfig,
    plugin: &mut dyn ValuePlugin,
) -> Result<PipelineRun, PipelineError> {
    cfg.validate()?;
    let params = cfg.params()?;
    let n = o.n();
    let seed = Seed::new(cfg.seed);
    let eps = cfg.epsilon;
    let mut report = EstimateReport::new(Mode::Matrix, n, cfg, params.beta());
    let mut steps = Steps::new(|| o.counters());

    let est = estimate_edge_count(o, eps, cfg.scale, &mut seed.derive("step1").rng())?;
    steps.mark("edge-count");
    report.m_star = est.m_hat;
    report.mu_star = n as f64;
    report.delta_star = n as f64;
    if est.m_hat <= 4.0 * eps * n as f64 {
        report.early_exit = Some("edge estimate at most 4 eps n");
        report.steps = steps.out;
        report.finish(0.0, cfg.slack);
        return Ok(PipelineRun {
            report,
            edbs: None,
            small: None,
            vstar: None,
        });
    }

    let sp = SchematicParams {
        mu_star: n as f64,
        m_star: est.m_hat,
        delta_star: n as f64,
        gamma: cfg.gamma(),
        scale: cfg.scale,
    };
    let mut rng = seed.derive("step2").rng();
    let built = build_edbs(n, &sp, params, || {
        sample_edge_matrix(o, est.m_hat, &mut rng).map(|x| x.0)
    })?;
    steps.mark("edbs");
    report.rounds = built.rounds;
    let h = built.edbs;

    let cp = ClassifyParams {
        epsilon: eps,
        gamma: cfg.gamma(),
        delta_star: n as f64,
        scale: cfg.scale,
        strategy: cfg.classify,
    };
    let small = classify_v_small(ClassifyMode::Matrix(o), &h, &cp, &mut seed.derive("step3").rng())?;
    steps.mark("classify");

    let universe: Vec<Vertex> = small.members().collect();
    let ctx = PluginContext {
        epsilon: eps,
        scale: cfg.estimator_scale(),
        max_degree: small_degree_bound(params.beta(), eps, n as f64, cfg.gamma(), (n.max(2) - 1) as f64),
        seed: seed.derive("step4"),
        local: cfg.local,
    };
    let value = {
        let mut sg = SmallSubgraph::new(&h, &small, SmallAccess::Matrix(o));
        plugin.estimate(&mut sg, &universe, &ctx)?
    };
    steps.mark("estimate");

    report.ops = h.op_log().len();
    report.h_size = h.len();
    report.v_small = universe.len();
    report.estimator_samples = value.samples;
    report.steps = steps.out;
    report.finish(value.value, cfg.slack);
    Ok(PipelineRun {
        report,
        edbs: Some(h),
        small: Some(small),
        vstar: None,
    })
}

pub fn estimate_list(o: &ListOracle<'_>, cfg: &PipelineConfig) -> Result<PipelineRun, PipelineError> {
    list_pipeline(o, cfg, false)
}

pub fn estimate_hybrid(o: &ListOracle<'_>, cfg: &PipelineConfig) -> Result<PipelineRun, PipelineError> {
    list_pipeline(o, cfg, true)
}

fn list_pipeline(o: &ListOracle<'_>, cfg: &PipelineConfig, hybrid: bool) -> Result<PipelineRun, PipelineError> {
    cfg.validate()?;
    let params = cfg.params()?;
    let n = o.n();
    let seed = Seed::new(cfg.seed);
    let eps = cfg.epsilon;
    let mode = if hybrid { Mode::Hybrid } else { Mode::List };
    let mut report = EstimateReport::new(mode, n, cfg, params.beta());
    let mut steps = Steps::new(|| o.counters());

    let dt = build_degree_table(o)?;
    steps.mark("degrees");
    let m = dt.m();
    report.m_star = m as f64;
    let delta_star = if hybrid {
        dt.avg_degree()
    } else {
        f64::from(dt.max_degree())
    };
    report.delta_star = delta_star;
    if m == 0 {
        report.early_exit = Some("no edges");
        report.steps = steps.out;
        report.finish(0.0, cfg.slack);
        return Ok(PipelineRun {
            report,
            edbs: None,
            small: None,
            vstar: None,
        });
    }

    let coarse = coarse_estimate(o, &dt, eps, cfg.scale, seed.derive("step2"))?;
    steps.mark("coarse");
    report.mu_star = coarse.lambda;
    report.coarse_retries = coarse.retries;
    if coarse.retries > 0 {
        report.notes.push(alloc::format!(
            "coarse estimate retried {} times with doubled samples",
            coarse.retries
        ));
    }

    let sp = SchematicParams {
        mu_star: coarse.lambda,
        m_star: m as f64,
        delta_star,
        gamma: cfg.gamma(),
        scale: cfg.scale,
    };
    let mut rng = seed.derive("step3").rng();
    let built = build_edbs(n, &sp, params, || sample_edge_list(&dt, o, &mut rng))?;
    steps.mark("edbs");
    report.rounds = built.rounds;
    let h = built.edbs;

    let vstar = if hybrid {
        Some(VStar::from_degrees(&dt, eps))
    } else {
        None
    };
    let cp = ClassifyParams {
        epsilon: eps,
        gamma: cfg.gamma(),
        delta_star,
        scale: cfg.scale,
        strategy: cfg.classify,
    };
    let mode_c = match &vstar {
        Some(vs) => ClassifyMode::Hybrid(o, &dt, vs),
        None => ClassifyMode::List(o, &dt),
    };
    let small = classify_v_small(mode_c, &h, &cp, &mut seed.derive("step4").rng())?;
    steps.mark("classify");

    let universe: Vec<Vertex> = small.members().collect();
    let cap = match &vstar {
        Some(vs) => f64::from(vs.degree_cap()),
        None => f64::from(dt.max_degree()),
    };
    let ctx = PluginContext {
        epsilon: eps,
        scale: cfg.estimator_scale(),
        max_degree: small_degree_bound(params.beta(), eps, delta_star, cfg.gamma(), cap),
        seed: seed.derive("step5"),
        local: cfg.local,
    };
    let value = {
        let access = match &vstar {
            Some(vs) => SmallAccess::Hybrid(o, &dt, vs),
            None => SmallAccess::List(o, &dt),
        };
        let mut sg = SmallSubgraph::new(&h, &small, access);
        YoshidaPlugin.estimate(&mut sg, &universe, &ctx)?
    };
    steps.mark("estimate");

    report.ops = h.op_log().len();
    report.h_size = h.len();
    report.v_small = universe.len();
    report.estimator_samples = value.samples;
    report.steps = steps.out;
    report.finish(value.value, cfg.slack);
    Ok(PipelineRun {
        report,
        edbs: Some(h),
        small: Some(small),
        vstar,
    })
}

/// Runs the pipeline for `mode` on `g`, which it reads only through a fresh oracle.
pub fn run(g: &Graph, mode: Mode, cfg: &PipelineConfig) -> Result<PipelineRun, PipelineError> {
    match mode {
        Mode::Matrix => estimate_matrix(&MatrixOracle::new(g), cfg),
        Mode::List => estimate_list(&ListOracle::new(g), cfg),
        Mode::Hybrid => estimate_hybrid(&ListOracle::new(g), cfg),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DichotomyOutcome {
    MatchingWitness(Vec<Edge>),
    ValueEstimate { alpha: f64, lower: f64, upper: f64 },
}

#[derive(Clone, Debug)]
pub struct DichotomyRun {
    pub outcome: DichotomyOutcome,
    pub run: PipelineRun,
    /// `μ(H)`, or 0 when no `H` was built.
    pub mu_h: usize,
    /// Online stand-in for `μ(G)`: `λ` in the list models, `α` in the matrix model.
    pub proxy: f64,
}

/// Maximum matching of the explicit subgraph `H`.
pub fn max_matching_of(h: &Edbs) -> Vec<Edge> {
    let adj: Vec<Vec<usize>> = (0..h.n() as Vertex)
        .map(|v| h.neighbors(v).iter().map(|&w| w as usize).collect())
        .collect();
    let mate = maximum_mate(&adj, alloc::vec![usize::MAX; h.n()]);
    let mut out: Vec<Edge> = mate
        .iter()
        .enumerate()
        .filter(|&(x, &y)| y != usize::MAX && x < y)
        .map(|(x, &y)| Edge::new(x as Vertex, y as Vertex))
        .collect();
    out.sort_unstable();
    out
}

/// Runs the pipeline, then returns a maximum matching of `H` when
/// `μ(H) ≥ ε · proxy`, and the value estimate otherwise.
pub fn run_dichotomy(g: &Graph, mode: Mode, cfg: &PipelineConfig) -> Result<DichotomyRun, PipelineError> {
    let run = run(g, mode, cfg)?;
    let proxy = match mode {
        Mode::Matrix => run.report.alpha,
        Mode::List | Mode::Hybrid => run.report.mu_star,
    };
    let (mu_h, witness) = match &run.edbs {
        Some(h) => {
            let m = max_matching_of(h);
            (m.len(), Some(m))
        }
        None => (0, None),
    };
    let outcome = match witness {
        Some(m) if mu_h > 0 && mu_h as f64 >= cfg.epsilon * proxy => DichotomyOutcome::MatchingWitness(m),
        _ => DichotomyOutcome::ValueEstimate {
            alpha: run.report.alpha,
            lower: run.report.lower,
            upper: run.report.upper,
        },
    };
    Ok(DichotomyRun {
        outcome,
        run,
        mu_h,
        proxy,
    })
}

impl DichotomyOutcome {
    pub fn branch(&self) -> &'static str {
        match self {
            DichotomyOutcome::MatchingWitness(_) => "witness",
            DichotomyOutcome::ValueEstimate { .. } => "value",
        }
    }
}

impl fmt::Display for DichotomyOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DichotomyOutcome::MatchingWitness(m) => write!(f, "witness of {} edges", m.len()),
            DichotomyOutcome::ValueEstimate { alpha, lower, upper } => {
                write!(f, "value {alpha} in [{lower}, {upper}]")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::{generate, GraphKind};

    fn tiny() -> PipelineConfig {
        PipelineConfig {
            scale: 0.01,
            estimator_scale: Some(1e-5),
            seed: 3,
            ..PipelineConfig::default()
        }
    }

    #[test]
    fn empty_graph_all_modes() {
        let g = generate(&GraphKind::Empty { n: 20 }, Seed::new(0)).unwrap();
        for mode in [Mode::Matrix, Mode::List, Mode::Hybrid] {
            let r = run(&g, mode, &tiny()).unwrap().report;
            assert_eq!(r.alpha, 0.0);
            assert!(r.early_exit.is_some());
            assert_eq!(
                r.total,
                r.steps.iter().fold(QueryCounters::default(), |a, s| a + s.queries)
            );
        }
    }

    #[test]
    fn deterministic() {
        let g = generate(&GraphKind::ErdosRenyi { n: 40, p: 0.2 }, Seed::new(1)).unwrap();
        for mode in [Mode::Matrix, Mode::List, Mode::Hybrid] {
            let a = run(&g, mode, &tiny()).unwrap().report;
            let b = run(&g, mode, &tiny()).unwrap().report;
            assert_eq!(a, b);
        }
    }

    #[test]
    fn mode_parse() {
        assert_eq!("hybrid".parse::<Mode>(), Ok(Mode::Hybrid));
        assert!("x".parse::<Mode>().is_err());
    }
}
