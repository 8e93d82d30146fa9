//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits nonzero if any
//! criterion fails. Pass criterion numbers as arguments to run a subset:
//! `cargo test -p sublin --test acceptance -- 7 13`.

use std::collections::HashSet;
use std::time::Instant;

use sublin::stats::chi_square_uniform;
use sublin::sweep::{run_sweep, SweepSpec};
use sublin_core::edbs::{build_edbs, check_phi_monotone, Edbs, OpKind, Params, SchematicParams};
use sublin_core::exact::{
    h_union_u, is_matching, matching_size, max_matching_exact, offline_greedy_mis, offline_layered, small_edges,
};
use sublin_core::generate::{generate, GraphKind};
use sublin_core::local::{
    estimate_mu_yoshida, mis_member, Fallback, LayeredOracle, ListAccess, LocalConfig, MisMemo, MisStats, RankSource,
};
use sublin_core::pipeline::{self, run_dichotomy, DichotomyOutcome, Mode, PipelineConfig};
use sublin_core::sampling::{
    build_degree_table, classify_v_small, estimate_edge_count, sample_edge_list, sample_edge_matrix, ClassifyMode,
    ClassifyParams, ClassifyStrategy, VStar,
};
use sublin_core::{Edge, Graph, ListOracle, MatrixOracle, Seed, Vertex};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn mu(g: &Graph) -> usize {
    max_matching_exact(g).expect("instances respect the exact cap").size
}

fn lean(seed: u64) -> PipelineConfig {
    PipelineConfig {
        scale: 0.1,
        estimator_scale: Some(1e-5),
        seed,
        ..PipelineConfig::default()
    }
}

/// Maximum degree capped at `cap` by dropping edges greedily.
fn cap_degree(g: &Graph, cap: u32) -> Graph {
    let mut deg = vec![0u32; g.n()];
    g.filter_edges(|e| {
        let ok = deg[e.u() as usize] < cap && deg[e.v() as usize] < cap;
        if ok {
            deg[e.u() as usize] += 1;
            deg[e.v() as usize] += 1;
        }
        ok
    })
}

fn overfull_by_scan(h: &Edbs) -> usize {
    let beta = h.params().beta();
    h.edges()
        .into_iter()
        .filter(|&e| h.degree(e.u()) + h.degree(e.v()) > beta)
        .count()
}

fn c1_edbs_validity() -> Outcome {
    let mut builds = 0;
    let mut bad = 0;
    for s in 0..60u64 {
        let kind = match s % 3 {
            0 => GraphKind::ErdosRenyi { n: 150, p: 0.08 },
            1 => GraphKind::RandomRegular { n: 150, d: 10 },
            _ => GraphKind::RandomBipartite {
                left: 80,
                right: 80,
                p: 0.1,
            },
        };
        let g = generate(&kind, Seed::new(s)).unwrap();
        let mode = [Mode::Matrix, Mode::List, Mode::Hybrid][(s / 3 % 3) as usize];
        let beta = [None, Some(8), Some(16)][(s % 3) as usize];
        let pr = pipeline::run(&g, mode, &PipelineConfig { beta, ..lean(s) }).unwrap();
        let h = pr.edbs.expect("instances have edges");
        builds += 1;
        if overfull_by_scan(&h) > 0 || !h.overfull_edges().is_empty() {
            bad += 1;
        }
    }
    outcome(bad == 0, format!("{builds} pipeline builds, {bad} with overfull edges"))
}

/// Replays a build log through the checked operations: every operation must be legal,
/// must match the logged potential, and must raise `2Φ` by at least 2.
fn replay(h: &Edbs) -> Result<(), String> {
    check_phi_monotone(h.op_log()).map_err(|i| format!("log step {i} is not increasing"))?;
    let mut r = Edbs::new(h.n(), *h.params());
    for (i, op) in h.op_log().iter().enumerate() {
        let delta = match op.kind {
            OpKind::Insert => r.insert(op.edge),
            OpKind::Delete => r.delete(op.edge),
        }
        .map_err(|e| format!("step {i}: {e}"))?;
        if delta < 2 || r.phi2() != op.phi2_after {
            return Err(format!(
                "step {i}: delta {delta}, 2phi {} vs logged {}",
                r.phi2(),
                op.phi2_after
            ));
        }
        if i % 512 == 0 && r.phi2() != r.recompute_phi2() {
            return Err(format!("step {i}: tracked potential drifted"));
        }
    }
    if r.edges() != h.edges() || r.phi2() != r.recompute_phi2() {
        return Err("replay ended in a different state".into());
    }
    Ok(())
}

fn build_list(g: &Graph, params: Params, seed: u64, scale: f64) -> Edbs {
    let lo = ListOracle::new(g);
    let dt = build_degree_table(&lo).unwrap();
    let m = dt.m() as f64;
    let mu_star = (m / f64::from(dt.max_degree().max(1))).max(1.0);
    let sp = SchematicParams {
        mu_star,
        m_star: m,
        delta_star: f64::from(dt.max_degree()),
        gamma: 0.0078125,
        scale,
    };
    let mut rng = Seed::new(seed).derive("acceptance-edbs").rng();
    build_edbs(g.n(), &sp, params, || sample_edge_list(&dt, &lo, &mut rng))
        .unwrap()
        .edbs
}

fn c2_potential() -> Outcome {
    let mut ops = 0usize;
    let mut builds = 0;
    let mut s = 0u64;
    while ops < 100_000 {
        let g = generate(&GraphKind::RandomRegular { n: 300, d: 12 }, Seed::new(s)).unwrap();
        let beta = [8, 12, 16][(s % 3) as usize];
        let h = build_list(&g, Params::with_beta(0.25, beta).unwrap(), s, 0.5);
        if let Err(e) = replay(&h) {
            return outcome(false, format!("seed {s}, beta {beta}: {e}"));
        }
        ops += h.op_log().len();
        builds += 1;
        s += 1;
    }
    outcome(
        true,
        format!("{ops} operations over {builds} builds, each raised 2*phi by >= 2"),
    )
}

fn bound_instance(s: u64) -> (Graph, f64, Option<u32>) {
    let n = 100 + (s as usize * 29) % 201;
    let kind = match s % 3 {
        0 => GraphKind::ErdosRenyi { n, p: 10.0 / n as f64 },
        1 => GraphKind::RandomRegular { n: n + n % 2, d: 6 },
        _ => GraphKind::RandomBipartite {
            left: n / 2,
            right: n - n / 2,
            p: 16.0 / n as f64,
        },
    };
    let g = generate(&kind, Seed::new(s)).unwrap();
    let eps = if s.is_multiple_of(2) { 0.2 } else { 0.25 };
    let beta = match (s / 2 % 3, s % 2) {
        (0, _) => None,
        (1, 0) => Some(10),
        (1, _) => Some(8),
        (_, 0) => Some(20),
        _ => Some(16),
    };
    (g, eps, beta)
}

fn bound_h(g: &Graph, eps: f64, beta: Option<u32>, s: u64) -> Edbs {
    let params = match beta {
        Some(b) => Params::with_beta(eps, b).unwrap(),
        None => Params::new(eps).unwrap(),
    };
    build_list(g, params, s, 1.0)
}

fn c3_op_bound() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut fails = 0;
    for s in 0..100u64 {
        let (g, eps, beta) = bound_instance(s);
        let h = bound_h(&g, eps, beta, s);
        let b = u64::from(h.params().beta());
        let limit = 3 * b * b * mu(&g) as u64 + b * b;
        let ops = h.op_log().len() as u64;
        worst = worst.max(ops as f64 / limit as f64);
        if ops > limit {
            fails += 1;
        }
    }
    outcome(
        fails == 0,
        format!("100 instances, {fails} over the bound, max ops/bound {worst:.4}"),
    )
}

fn c4_sparsifier() -> Outcome {
    let mut fails = 0;
    let mut worst: f64 = 0.0;
    for s in 0..100u64 {
        let (g, eps, beta) = bound_instance(s);
        let h = bound_h(&g, eps, beta, s);
        let m = mu(&g) as f64;
        let sparse = matching_size(g.n(), &h_union_u(&g, &h)) as f64;
        worst = worst.max(m / sparse);
        if m > (1.5 + eps) * sparse + 1e-9 {
            fails += 1;
        }
    }
    outcome(
        fails == 0,
        format!("100 instances, {fails} violations, max mu(G)/mu(H u U) {worst:.4}"),
    )
}

fn c5_oracle_equivalence() -> Outcome {
    let never = LocalConfig {
        fallback: Fallback::Never,
        ..LocalConfig::default()
    };
    let mut matching_ok = 0;
    for s in 0..50u64 {
        let kind = match s % 3 {
            0 => GraphKind::RandomRegular { n: 60, d: 3 },
            1 => GraphKind::ErdosRenyi { n: 60, p: 0.07 },
            _ => GraphKind::RandomBipartite {
                left: 30,
                right: 30,
                p: 0.1,
            },
        };
        let g = cap_degree(&generate(&kind, Seed::new(s)).unwrap(), 6);
        let k = 1 + (s % 4) as u32;
        let ranks = RankSource::new(Seed::new(1000 + s));
        let st = offline_layered(&g, k, &ranks);
        let lo = ListOracle::new(&g);
        let mut o = LayeredOracle::new(ListAccess::new(&lo, None), ranks, k, never);
        let local: Vec<Edge> = g.edges().filter(|&e| o.in_matching(k, e).unwrap()).collect();
        if local == st.matchings[k as usize] {
            matching_ok += 1;
        }
    }
    let mut mis_ok = 0;
    for s in 0..100u64 {
        let n = 20 + (s as usize * 37) % 181;
        let g = generate(&GraphKind::ErdosRenyi { n, p: 5.0 / n as f64 }, Seed::new(s)).unwrap();
        let ranks = RankSource::new(Seed::new(s));
        let mut memo = MisMemo::default();
        let local: Vec<bool> = (0..n as Vertex)
            .map(|v| {
                mis_member(
                    &v,
                    |x: &Vertex| Ok(g.neighbors(*x).to_vec()),
                    |x| ranks.rank_vertex(0, *x),
                    &mut memo,
                    &mut MisStats::default(),
                    u64::MAX,
                )
                .unwrap()
            })
            .collect();
        if local == offline_greedy_mis(&g, &ranks, 0) {
            mis_ok += 1;
        }
    }
    outcome(
        matching_ok == 50 && mis_ok == 100,
        format!("matching {matching_ok}/50, MIS {mis_ok}/100"),
    )
}

fn c6_estimator() -> Outcome {
    let eps = 0.25;
    let mut good = 0;
    let mut max_t = 0;
    for s in 0..100u64 {
        let d = [3usize, 5, 8][(s % 3) as usize];
        let g = generate(&GraphKind::RandomRegular { n: 500, d }, Seed::new(s)).unwrap();
        let m = mu(&g) as f64;
        let lo = ListOracle::new(&g);
        let cfg = LocalConfig {
            fallback: Fallback::ComponentCap { max_degree: d as u64 },
            ..LocalConfig::default()
        };
        let k = sublin_core::local::yoshida_levels(eps);
        let mut o = LayeredOracle::new(ListAccess::new(&lo, None), RankSource::new(Seed::new(s)), k, cfg);
        let universe: Vec<Vertex> = (0..500).collect();
        let est = estimate_mu_yoshida(
            &mut o,
            &universe,
            d as f64,
            eps,
            1e-3,
            &mut Seed::new(s).derive("c6").rng(),
        )
        .unwrap();
        max_t = max_t.max(est.samples);
        if est.value >= m / (1.0 + eps) && est.value <= m {
            good += 1;
        }
    }
    outcome(
        good >= 90 && max_t <= 100_000,
        format!("{good}/100 in [mu/(1+eps), mu], T <= {max_t}"),
    )
}

fn c7_sandwiches() -> Outcome {
    let eps = 0.25;
    let mut lines = Vec::new();
    let mut pass = true;
    for mode in [Mode::Matrix, Mode::Hybrid, Mode::List] {
        let mut good = 0;
        for s in 0..50u64 {
            let g = match mode {
                Mode::List => generate(&GraphKind::RandomRegular { n: 200, d: 8 }, Seed::new(s)).unwrap(),
                _ => generate(&GraphKind::ErdosRenyi { n: 200, p: 0.15 }, Seed::new(s)).unwrap(),
            };
            let m = mu(&g) as f64;
            let cfg = PipelineConfig {
                estimator_scale: Some(1e-4),
                seed: s,
                ..PipelineConfig::default()
            };
            let r = pipeline::run(&g, mode, &cfg).unwrap().report;
            let upper = match mode {
                Mode::List => (1.5 + 6.0 * eps) * r.alpha,
                _ => 1.5 * r.alpha + 6.0 * eps * 200.0,
            };
            if r.alpha <= m && m <= upper + 1e-9 {
                good += 1;
            }
        }
        pass &= good >= 45;
        lines.push(format!("{mode} {good}/50"));
    }
    outcome(pass, lines.join(", "))
}

fn c8_edge_count() -> Outcome {
    let eps = 0.25;
    let mut good = 0;
    for s in 0..100u64 {
        let n = [64usize, 128, 256][(s % 3) as usize];
        let p = [0.02, 0.1, 0.3][(s / 3 % 3) as usize];
        let g = generate(&GraphKind::ErdosRenyi { n, p }, Seed::new(s)).unwrap();
        let o = MatrixOracle::new(&g);
        let est = estimate_edge_count(&o, eps, 1.0, &mut Seed::new(s).derive("c8").rng()).unwrap();
        let m = g.m() as f64;
        if m <= est.m_hat && est.m_hat <= (1.0 + eps) * m + 2.0 * eps * n as f64 {
            good += 1;
        }
    }
    outcome(good >= 95, format!("{good}/100"))
}

fn c9_samplers() -> Outcome {
    // Ten edges with degrees from 1 to 4.
    let edges = [
        (0, 1),
        (0, 2),
        (0, 3),
        (0, 4),
        (1, 2),
        (4, 5),
        (5, 6),
        (6, 7),
        (7, 8),
        (8, 9),
    ];
    let g = Graph::from_edges(10, edges)
        .unwrap()
        .with_list_order(sublin_core::ListOrder::PerVertexRandom, Seed::new(1));
    let index: Vec<Edge> = g.edges().collect();
    let slot = |e: Edge| index.iter().position(|&f| f == e).unwrap();
    let mut matrix_ok = 0;
    let mut list_ok = 0;
    for b in 0..100u64 {
        let mo = MatrixOracle::new(&g);
        let mut rng = Seed::new(b).derive("c9-matrix").rng();
        let mut counts = [0u64; 10];
        for _ in 0..10_000 {
            counts[slot(sample_edge_matrix(&mo, 10.0, &mut rng).unwrap().0)] += 1;
        }
        if chi_square_uniform(&counts).unwrap() > 0.01 {
            matrix_ok += 1;
        }
        let lo = ListOracle::new(&g);
        let dt = build_degree_table(&lo).unwrap();
        let mut rng = Seed::new(b).derive("c9-list").rng();
        let mut counts = [0u64; 10];
        for _ in 0..10_000 {
            counts[slot(sample_edge_list(&dt, &lo, &mut rng).unwrap())] += 1;
        }
        if chi_square_uniform(&counts).unwrap() > 0.01 {
            list_ok += 1;
        }
    }
    outcome(
        matrix_ok >= 95 && list_ok >= 95,
        format!("matrix {matrix_ok}/100, list {list_ok}/100 batches with p > 0.01"),
    )
}

/// Vertex 0 of a 6-regular graph keeps `u_degree` of its edges out of `H`.
fn planted(u_degree: usize, seed: u64) -> (Graph, Edbs) {
    let g = generate(&GraphKind::RandomRegular { n: 100, d: 6 }, Seed::new(seed)).unwrap();
    let mut h = Edbs::new(100, Params::new(0.25).unwrap());
    for &w in &g.neighbors(0)[u_degree..] {
        h.insert(Edge::new(0, w)).unwrap();
    }
    (g, h)
}

fn c10_classification() -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    for mode in ["matrix", "list", "hybrid"] {
        let mut rate = [0usize; 2];
        for (side, u_degree) in [3usize, 6].into_iter().enumerate() {
            for s in 0..100u64 {
                let (g, h) = planted(u_degree, s);
                let lo = ListOracle::new(&g);
                let mo = MatrixOracle::new(&g);
                let dt = build_degree_table(&lo).unwrap();
                let vs = VStar::from_degrees(&dt, 0.25);
                let (cmode, delta_star, scale) = match mode {
                    "matrix" => (ClassifyMode::Matrix(&mo), 100.0, 0.01),
                    "list" => (ClassifyMode::List(&lo, &dt), 6.0, 0.05),
                    _ => (ClassifyMode::Hybrid(&lo, &dt, &vs), dt.avg_degree(), 0.05),
                };
                let p = ClassifyParams {
                    epsilon: 0.25,
                    gamma: 0.0078125,
                    delta_star,
                    scale,
                    strategy: ClassifyStrategy::Sampled,
                };
                let small = classify_v_small(cmode, &h, &p, &mut Seed::new(s).derive("c10").rng()).unwrap();
                // Low U-degree must be kept, high U-degree dropped.
                if small.contains(0) == (side == 0) {
                    rate[side] += 1;
                }
            }
        }
        pass &= rate[0] >= 95 && rate[1] >= 95;
        lines.push(format!("{mode} kept {}/100 dropped {}/100", rate[0], rate[1]));
    }
    outcome(pass, lines.join(", "))
}

fn c11_degree_bound() -> Outcome {
    let mut runs = 0;
    let mut bad = 0;
    let mut worst: f64 = 0.0;
    for s in 0..45u64 {
        let g = match s % 3 {
            0 => generate(&GraphKind::ErdosRenyi { n: 200, p: 0.1 }, Seed::new(s)).unwrap(),
            1 => generate(&GraphKind::RandomRegular { n: 200, d: 12 }, Seed::new(s)).unwrap(),
            _ => generate(&GraphKind::Lollipop { clique: 20, path: 180 }, Seed::new(s)).unwrap(),
        };
        let mode = [Mode::Matrix, Mode::List, Mode::Hybrid][(s / 3 % 3) as usize];
        let beta = [None, Some(8), Some(16)][(s / 9 % 3) as usize];
        let cfg = PipelineConfig {
            beta,
            estimator_scale: Some(1e-5),
            seed: s,
            ..PipelineConfig::default()
        };
        let pr = pipeline::run(&g, mode, &cfg).unwrap();
        let (h, small) = (pr.edbs.unwrap(), pr.small.unwrap());
        let r = &pr.report;
        let bound = f64::from(r.beta) + (1.0 + r.epsilon) * r.delta_star.max(1.0).powf(r.gamma) / r.epsilon;
        let mut deg = vec![0u32; g.n()];
        for e in small_edges(&g, &h, &small) {
            deg[e.u() as usize] += 1;
            deg[e.v() as usize] += 1;
        }
        for v in small.members() {
            worst = worst.max(f64::from(deg[v as usize]) / bound);
            if f64::from(deg[v as usize]) > bound {
                bad += 1;
            }
        }
        runs += 1;
    }
    outcome(
        bad == 0,
        format!("{runs} runs, {bad} vertices over the bound, max degree/bound {worst:.3}"),
    )
}

fn c12_dichotomy() -> Outcome {
    let eps = 0.25;
    let mut disjunction = 0;
    let mut witnesses = 0;
    let mut valid = 0;
    for s in 0..50u64 {
        let g = generate(
            &GraphKind::RandomBipartite {
                left: 100,
                right: 100,
                p: 0.05,
            },
            Seed::new(s),
        )
        .unwrap();
        let mode = [Mode::List, Mode::Matrix, Mode::Hybrid][(s % 3) as usize];
        let beta = [None, Some(8), Some(16)][(s / 3 % 3) as usize];
        let d = run_dichotomy(&g, mode, &PipelineConfig { beta, ..lean(s) }).unwrap();
        let h = d.run.edbs.as_ref().unwrap();
        let m = mu(&g) as f64;
        let mu_h = matching_size(g.n(), &h.edges()) as f64;
        let mu_hu = matching_size(g.n(), &h_union_u(&g, h)) as f64;
        if (mu_h >= eps * m || mu_hu >= (1.0 - 5.0 * eps) * m) && mu_h as usize == d.mu_h {
            disjunction += 1;
        }
        if let DichotomyOutcome::MatchingWitness(w) = &d.outcome {
            witnesses += 1;
            let in_h = w.iter().all(|&e| h.contains(e) && g.has_edge(e.u(), e.v()));
            let disjoint = w.iter().flat_map(|e| [e.u(), e.v()]).collect::<HashSet<_>>().len() == 2 * w.len();
            if in_h && disjoint && is_matching(w) {
                valid += 1;
            }
        }
    }
    outcome(
        disjunction == 50 && valid == witnesses,
        format!("disjunction {disjunction}/50, valid witnesses {valid}/{witnesses}"),
    )
}

fn c13_scaling() -> Outcome {
    let spec = SweepSpec {
        ns: vec![256, 512, 1024, 2048],
        seeds: vec![0, 1],
        avg_degree: 8.0,
        mode: Mode::Matrix,
        config: PipelineConfig {
            epsilon: 0.25,
            scale: 1.0,
            estimator_scale: Some(1e-4),
            ..PipelineConfig::default()
        },
    };
    let res = run_sweep(&spec).unwrap();
    let means: Vec<String> = res
        .means(Mode::Matrix)
        .iter()
        .map(|(n, q)| format!("{n}:{q:.3e}"))
        .collect();
    outcome(
        res.slope < 2.0,
        format!(
            "slope {:.4} (target <= 1.97); mean queries {}",
            res.slope,
            means.join(" ")
        ),
    )
}

type Criterion = (u32, &'static str, fn() -> Outcome);

const CRITERIA: &[Criterion] = &[
    (1, "edbs validity", c1_edbs_validity),
    (2, "potential monotonicity", c2_potential),
    (3, "operation bound", c3_op_bound),
    (4, "sparsifier bound", c4_sparsifier),
    (5, "oracle equivalence", c5_oracle_equivalence),
    (6, "estimator concentration", c6_estimator),
    (7, "pipeline sandwiches", c7_sandwiches),
    (8, "edge-count estimate", c8_edge_count),
    (9, "sampler uniformity", c9_samplers),
    (10, "small-vertex classification", c10_classification),
    (11, "small-subgraph degree bound", c11_degree_bound),
    (12, "dichotomy", c12_dichotomy),
    (13, "scaling exhibit", c13_scaling),
];

fn main() {
    let wanted: Vec<u32> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let selected: Vec<&Criterion> = CRITERIA
        .iter()
        .filter(|c| wanted.is_empty() || wanted.contains(&c.0))
        .collect();
    let results: Vec<(Outcome, f64)> = std::thread::scope(|scope| {
        let handles: Vec<_> = selected
            .iter()
            .map(|&&(_, _, f)| {
                std::thread::Builder::new()
                    .stack_size(256 << 20)
                    .spawn_scoped(scope, move || {
                        let t = Instant::now();
                        let o = f();
                        (o, t.elapsed().as_secs_f64())
                    })
                    .expect("spawn")
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| (outcome(false, "panicked".into()), 0.0)))
            .collect()
    });
    let mut failed = 0;
    for (&&(id, name, _), (o, secs)) in selected.iter().zip(&results) {
        println!(
            "{} {id:>2} {name}: {} [{secs:.1}s]",
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    println!("acceptance: {} passed, {failed} failed", results.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
