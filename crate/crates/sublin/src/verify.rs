//! The invariant battery behind `sublin verify`.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;
use sublin_core::edbs::{build_edbs, check_phi_monotone, Edbs, Params, SchematicParams};
use sublin_core::exact::{h_union_u, is_matching, matching_size, max_matching_exact, offline_layered};
use sublin_core::generate::{generate, GraphKind};
use sublin_core::local::{Fallback, LayeredOracle, ListAccess, LocalConfig, RankSource};
use sublin_core::pipeline::{self, Mode, PipelineConfig};
use sublin_core::sampling::{build_degree_table, sample_edge_list};
use sublin_core::{Edge, Graph, ListOracle, MatrixOracle, QueryCounters, Seed, Vertex};

/// A deliberate corruption, used to check that the battery catches it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Deletes an edge of `H` that is not overfull after the build, which lowers `Φ`.
    PhiDecrease,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckResult {
    pub module: &'static str,
    pub invariant: &'static str,
    pub instance: String,
    pub seed: u64,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}/{} instance={} seed={}",
            if self.passed { "PASS" } else { "FAIL" },
            self.module,
            self.invariant,
            self.instance,
            self.seed
        )?;
        if !self.detail.is_empty() {
            write!(f, ": {}", self.detail)?;
        }
        Ok(())
    }
}

pub fn default_instances() -> Vec<(String, GraphKind)> {
    [
        GraphKind::Petersen,
        GraphKind::Path { n: 9 },
        GraphKind::Empty { n: 5 },
        GraphKind::RandomRegular { n: 40, d: 3 },
        GraphKind::ErdosRenyi { n: 60, p: 0.1 },
        GraphKind::RandomBipartite {
            left: 20,
            right: 20,
            p: 0.15,
        },
        GraphKind::Lollipop { clique: 8, path: 30 },
        GraphKind::HiddenPerfectMatching { n: 12, epsilon: 0.5 },
    ]
    .into_iter()
    .map(|k| (crate::config::InstanceSpec::Generated(k.clone()).to_string(), k))
    .collect()
}

/// Instance source for the battery: generated graphs are rebuilt per seed, files are fixed.
#[derive(Clone, Debug)]
pub enum BatteryInstance {
    Kind(String, GraphKind),
    Fixed(String, Graph),
}

pub struct Battery {
    pub instances: Vec<BatteryInstance>,
    pub seeds: Vec<u64>,
    pub fault: Option<Fault>,
}

impl Default for Battery {
    fn default() -> Self {
        Battery {
            instances: default_instances()
                .into_iter()
                .map(|(s, k)| BatteryInstance::Kind(s, k))
                .collect(),
            seeds: vec![0, 1, 2],
            fault: None,
        }
    }
}

struct Ctx<'a> {
    name: &'a str,
    seed: u64,
    out: Vec<CheckResult>,
}

impl Ctx<'_> {
    fn check(&mut self, module: &'static str, invariant: &'static str, passed: bool, detail: impl FnOnce() -> String) {
        self.out.push(CheckResult {
            module,
            invariant,
            instance: self.name.to_string(),
            seed: self.seed,
            passed,
            detail: if passed { String::new() } else { detail() },
        });
    }
}

/// Largest instance the exact and offline checks are run on.
const EXACT_LIMIT: usize = 300;

impl Battery {
    /// Runs every check; results are sorted by instance, seed and check name.
    pub fn run(&self) -> Vec<CheckResult> {
        let jobs: Vec<(usize, u64)> = (0..self.instances.len())
            .flat_map(|i| self.seeds.iter().map(move |&s| (i, s)))
            .collect();
        let mut out: Vec<CheckResult> = jobs
            .par_iter()
            .flat_map_iter(|&(i, seed)| {
                let (name, g) = match &self.instances[i] {
                    BatteryInstance::Kind(name, k) => (name.as_str(), generate(k, Seed::new(seed))),
                    BatteryInstance::Fixed(name, g) => (name.as_str(), Ok(g.clone())),
                };
                let mut ctx = Ctx {
                    name,
                    seed,
                    out: Vec::new(),
                };
                match g {
                    Ok(g) => run_checks(&g, self.fault, &mut ctx),
                    Err(e) => ctx.check("graph-core", "generate", false, || e.to_string()),
                }
                ctx.out
            })
            .collect();
        out.sort_by(|a, b| {
            (&a.instance, a.seed, a.module, a.invariant).cmp(&(&b.instance, b.seed, b.module, b.invariant))
        });
        out
    }
}

fn run_checks(g: &Graph, fault: Option<Fault>, ctx: &mut Ctx<'_>) {
    let n = g.n();
    let truth: BTreeSet<Edge> = g.edges().collect();

    let mo = MatrixOracle::new(g);
    let mut seen = BTreeSet::new();
    let mut calls = 0;
    for u in 0..n as Vertex {
        for v in u + 1..n as Vertex {
            calls += 1;
            if mo.query(u, v).unwrap_or(false) {
                seen.insert(Edge::new(u, v));
            }
        }
    }
    ctx.check(
        "graph-core",
        "matrix-replay",
        seen == truth && mo.queries() == calls,
        || {
            format!(
                "{} edges recovered of {}, {} queries for {calls} calls",
                seen.len(),
                truth.len(),
                mo.queries()
            )
        },
    );

    let lo = ListOracle::new(g);
    let mut seen = BTreeSet::new();
    let mut slots = 0;
    let mut calls = 0;
    for v in 0..n as Vertex {
        for i in 1..=n {
            calls += 1;
            match lo.query(v, i) {
                Ok(Some(w)) => {
                    slots += 1;
                    seen.insert(Edge::new(v, w));
                }
                _ => break,
            }
        }
    }
    // Every edge appears once in each endpoint's list.
    let symmetric = slots == 2 * seen.len();
    ctx.check(
        "graph-core",
        "list-replay",
        seen == truth && symmetric && lo.queries() == calls,
        || format!("{} edges recovered of {}, {slots} list slots", seen.len(), truth.len()),
    );

    if n > EXACT_LIMIT {
        return;
    }
    let exact = match max_matching_exact(g) {
        Ok(m) => m,
        Err(e) => {
            ctx.check("exact-verify", "blossom-certified", false, || e.to_string());
            return;
        }
    };
    let mu = exact.size;
    ctx.check(
        "exact-verify",
        "blossom-certified",
        is_matching(&exact.edges) && exact.edges.len() == mu,
        String::new,
    );

    let ranks = RankSource::new(Seed::new(ctx.seed).derive("verify-ranks"));
    let k = 3;
    let st = offline_layered(g, k, &ranks);
    let mk = st.final_matching().len();
    ctx.check(
        "exact-verify",
        "layered-bound",
        (k as usize + 1) * mk >= k as usize * mu,
        || format!("|M_k| = {mk}, mu = {mu}"),
    );

    if g.stats().max_degree <= 8 && n <= 100 {
        let mut o = LayeredOracle::new(
            ListAccess::new(&lo, None),
            ranks,
            k,
            LocalConfig {
                fallback: Fallback::Never,
                ..LocalConfig::default()
            },
        );
        let local: Result<Vec<Edge>, _> = g
            .edges()
            .filter_map(|e| o.in_matching(k, e).map(|b| b.then_some(e)).transpose())
            .collect();
        ctx.check(
            "local-oracles",
            "offline-equivalence",
            local.as_ref().ok() == Some(&st.matchings[k as usize]),
            || format!("{local:?}"),
        );
    }

    let params = Params::with_beta(0.25, 8).expect("valid parameters");
    let h = build_h(g, params, ctx.seed, fault);
    match h {
        Ok(h) => {
            ctx.check("edbs", "no-overfull", h.is_valid(), || {
                format!("{} overfull edges", h.overfull_edges().len())
            });
            ctx.check(
                "edbs",
                "potential-monotone",
                check_phi_monotone(h.op_log()).is_ok(),
                || {
                    let i = check_phi_monotone(h.op_log()).unwrap_err();
                    let op = &h.op_log()[i];
                    format!(
                        "operation {i} ({:?} {}) left 2*phi at {}",
                        op.kind, op.edge, op.phi2_after
                    )
                },
            );
            ctx.check("edbs", "potential-consistent", h.phi2() == h.recompute_phi2(), || {
                format!("tracked {} recomputed {}", h.phi2(), h.recompute_phi2())
            });
            let b = u64::from(params.beta());
            let ops = h.op_log().len() as u64;
            ctx.check("edbs", "op-bound", ops <= 3 * b * b * mu as u64 + b * b, || {
                format!("{ops} operations")
            });
            let sparse = matching_size(n, &h_union_u(g, &h));
            ctx.check("edbs", "sparsifier", mu as f64 <= 1.75 * sparse as f64 + 1e-9, || {
                format!("mu {mu}, mu(H u U) {sparse}")
            });
        }
        Err(e) => ctx.check("edbs", "build", false, || e),
    }

    let cfg = PipelineConfig {
        scale: 0.02,
        estimator_scale: Some(1e-4),
        seed: ctx.seed,
        ..PipelineConfig::default()
    };
    for mode in [Mode::Matrix, Mode::List, Mode::Hybrid] {
        let a = pipeline::run(g, mode, &cfg);
        let b = pipeline::run(g, mode, &cfg);
        match (a, b) {
            (Ok(a), Ok(b)) => {
                let sum = a
                    .report
                    .steps
                    .iter()
                    .fold(QueryCounters::default(), |x, s| x + s.queries);
                ctx.check("pipelines", "query-decomposition", sum == a.report.total, || {
                    format!("{mode}: steps {sum:?}, total {:?}", a.report.total)
                });
                ctx.check("pipelines", "determinism", a.report == b.report, || {
                    format!("{mode}: reports differ")
                });
            }
            (Err(e), _) | (_, Err(e)) => ctx.check("pipelines", "run", false, || format!("{mode}: {e}")),
        }
    }
}

fn build_h(g: &Graph, params: Params, seed: u64, fault: Option<Fault>) -> Result<Edbs, String> {
    let lo = ListOracle::new(g);
    let dt = build_degree_table(&lo).map_err(|e| e.to_string())?;
    let m = dt.m() as f64;
    let sp = SchematicParams {
        mu_star: (m / 2.0).max(1.0),
        m_star: m,
        delta_star: 8.0,
        gamma: 0.1,
        scale: 0.2,
    };
    let mut rng = Seed::new(seed).derive("verify-edbs").rng();
    let mut h = if m > 0.0 {
        build_edbs(g.n(), &sp, params, || sample_edge_list(&dt, &lo, &mut rng))
            .map_err(|e| e.to_string())?
            .edbs
    } else {
        Edbs::new(g.n(), params)
    };
    if fault == Some(Fault::PhiDecrease) {
        if let Some(e) = h.edges().into_iter().find(|&e| !h.is_overfull(e)) {
            h.delete_unchecked(e);
        }
    }
    Ok(h)
}
