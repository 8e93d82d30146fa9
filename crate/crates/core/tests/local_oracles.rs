use std::collections::{BTreeSet, HashMap as StdMap, HashSet};

use sublin_core::exact::{
    is_matching, max_matching_exact, offline_greedy_matching, offline_greedy_mis, offline_layered,
};
use sublin_core::generate::{generate, GraphKind};
use sublin_core::local::{
    coarse_estimate, estimate_mu_yoshida, mis_member, Fallback, LayeredOracle, ListAccess, LocalConfig, MisMemo,
    MisStats, OracleError, OracleKind, PathKey, RankSource,
};
use sublin_core::sampling::build_degree_table;
use sublin_core::{Edge, Graph, ListOracle, Seed, Vertex};

fn never() -> LocalConfig {
    LocalConfig {
        fallback: Fallback::Never,
        ..LocalConfig::default()
    }
}

fn mis_all(g: &Graph, ranks: &RankSource) -> Vec<bool> {
    let mut memo = MisMemo::default();
    let mut stats = MisStats::default();
    (0..g.n() as Vertex)
        .map(|v| {
            mis_member(
                &v,
                |x: &Vertex| Ok(g.neighbors(*x).to_vec()),
                |x| ranks.rank_vertex(0, *x),
                &mut memo,
                &mut stats,
                u64::MAX,
            )
            .unwrap()
        })
        .collect()
}

/// Ranks under which `want` holds, found by scanning seeds.
fn ranks_where(want: impl Fn(&RankSource) -> bool) -> RankSource {
    (0..10_000u64)
        .map(|s| RankSource::new(Seed::new(s)))
        .find(|r| want(r))
        .unwrap()
}

#[test]
fn mis_examples() {
    let iso = Graph::from_edges(1, []).unwrap();
    assert_eq!(mis_all(&iso, &RankSource::new(Seed::new(0))), vec![true]);

    let path = generate(&GraphKind::Path { n: 3 }, Seed::new(0)).unwrap();
    let r = ranks_where(|r| r.rank_vertex(0, 0) < r.rank_vertex(0, 1) && r.rank_vertex(0, 1) < r.rank_vertex(0, 2));
    assert_eq!(mis_all(&path, &r), vec![true, false, true]);

    let tri = generate(&GraphKind::Cycle { n: 3 }, Seed::new(0)).unwrap();
    for s in 0..20 {
        let r = RankSource::new(Seed::new(s));
        let got = mis_all(&tri, &r);
        let min = (0..3).min_by_key(|&v| r.rank_vertex(0, v)).unwrap();
        assert_eq!(got.iter().filter(|&&b| b).count(), 1);
        assert!(got[min as usize]);
    }
}

#[test]
fn mis_oracle_equals_offline_greedy() {
    for s in 0..100u64 {
        let n = 20 + (s as usize * 37) % 181;
        let g = generate(&GraphKind::ErdosRenyi { n, p: 4.0 / n as f64 }, Seed::new(s)).unwrap();
        let r = RankSource::new(Seed::new(s + 7));
        assert_eq!(mis_all(&g, &r), offline_greedy_mis(&g, &r, 0), "seed {s}");
    }
}

#[test]
fn mis_cap_is_a_diagnostic() {
    let g = generate(&GraphKind::Path { n: 200 }, Seed::new(0)).unwrap();
    let r = RankSource::new(Seed::new(0));
    let mut memo = MisMemo::default();
    let res = (0..200).try_for_each(|v: Vertex| {
        mis_member(
            &v,
            |x: &Vertex| Ok(g.neighbors(*x).to_vec()),
            |x| r.rank_vertex(0, *x),
            &mut memo,
            &mut MisStats::default(),
            1,
        )
        .map(|_| ())
    });
    assert!(matches!(res, Err(OracleError::ResourceCap { cap: 1 })));
}

fn oracle<'a, 'g>(
    lo: &'a ListOracle<'g>,
    r: RankSource,
    k: u32,
    cfg: LocalConfig,
) -> LayeredOracle<ListAccess<'a, 'g>> {
    LayeredOracle::new(ListAccess::new(lo, None), r, k, cfg)
}

fn oracle_matching<A: sublin_core::local::NeighborAccess>(g: &Graph, o: &mut LayeredOracle<A>, k: u32) -> Vec<Edge> {
    g.edges().filter(|&e| o.in_matching(k, e).unwrap()).collect()
}

#[test]
fn single_edge_is_always_matched() {
    let g = Graph::from_edges(2, [(0, 1)]).unwrap();
    let lo = ListOracle::new(&g);
    let mut o = oracle(&lo, RankSource::new(Seed::new(3)), 4, never());
    for i in 1..=4 {
        assert!(o.in_matching(i, Edge::new(0, 1)).unwrap());
    }
    assert_eq!(
        o.paths_through_edge(1, Edge::new(0, 1)).unwrap(),
        vec![PathKey::new(vec![0, 1])]
    );
}

#[test]
fn three_edge_path_flips_at_level_two() {
    let g = generate(&GraphKind::Path { n: 4 }, Seed::new(0)).unwrap();
    let (e1, e2, e3) = (Edge::new(0, 1), Edge::new(1, 2), Edge::new(2, 3));
    let r = ranks_where(|r| r.rank_edge(1, e2) < r.rank_edge(1, e1) && r.rank_edge(1, e2) < r.rank_edge(1, e3));
    let lo = ListOracle::new(&g);
    let mut o = oracle(&lo, r, 2, never());
    assert!(o.in_matching(1, e2).unwrap());
    assert!(!o.in_matching(1, e1).unwrap());
    assert!(!o.in_matching(1, e3).unwrap());
    assert_eq!(
        o.paths_through_vertex(2, 0).unwrap(),
        vec![PathKey::new(vec![0, 1, 2, 3])]
    );
    assert_eq!(oracle_matching(&g, &mut o, 2), vec![e1, e3]);
}

/// All augmenting paths with `2i - 1` edges w.r.t. `m`, by brute-force DFS over simple paths.
fn brute_force_paths(g: &Graph, m: &[Edge], i: usize) -> BTreeSet<PathKey> {
    let len = 2 * i - 1;
    let matched: HashSet<Edge> = m.iter().copied().collect();
    let covered: HashSet<Vertex> = m.iter().flat_map(|e| [e.u(), e.v()]).collect();
    let mut out = BTreeSet::new();
    fn dfs(
        g: &Graph,
        len: usize,
        path: &mut Vec<Vertex>,
        matched: &HashSet<Edge>,
        covered: &HashSet<Vertex>,
        out: &mut BTreeSet<PathKey>,
    ) {
        if path.len() == len + 1 {
            if !covered.contains(path.last().unwrap()) {
                out.insert(PathKey::new(path.clone()));
            }
            return;
        }
        let x = *path.last().unwrap();
        for &y in g.neighbors(x) {
            let j = path.len() - 1;
            if path.contains(&y) || matched.contains(&Edge::new(x, y)) != (j % 2 == 1) {
                continue;
            }
            path.push(y);
            dfs(g, len, path, matched, covered, out);
            path.pop();
        }
    }
    for a in 0..g.n() as Vertex {
        if !covered.contains(&a) {
            dfs(g, len, &mut vec![a], &matched, &covered, &mut out);
        }
    }
    out
}

#[test]
fn path_enumeration_matches_brute_force() {
    for (s, kind) in [
        GraphKind::Complete { n: 4 },
        GraphKind::Complete { n: 5 },
        GraphKind::ErdosRenyi { n: 14, p: 0.3 },
        GraphKind::RandomRegular { n: 16, d: 3 },
        GraphKind::Cycle { n: 9 },
    ]
    .into_iter()
    .enumerate()
    {
        let g = generate(&kind, Seed::new(s as u64)).unwrap();
        let r = RankSource::new(Seed::new(40 + s as u64));
        let st = offline_layered(&g, 3, &r);
        let lo = ListOracle::new(&g);
        let mut o = oracle(&lo, r, 3, never());
        for i in 1..=3usize {
            let all = brute_force_paths(&g, &st.matchings[i - 1], i);
            for x in 0..g.n() as Vertex {
                let want: Vec<PathKey> = all.iter().filter(|p| p.contains_vertex(x)).cloned().collect();
                assert_eq!(
                    o.paths_through_vertex(i as u32, x).unwrap(),
                    want,
                    "{kind:?} i={i} x={x}"
                );
            }
            for e in g.edges() {
                let want: Vec<PathKey> = all.iter().filter(|p| p.edges().any(|f| f == e)).cloned().collect();
                assert_eq!(o.paths_through_edge(i as u32, e).unwrap(), want, "{kind:?} i={i} e={e}");
            }
        }
    }
}

fn equivalence_instance(s: u64) -> (Graph, u32) {
    let kind = match s % 4 {
        0 => GraphKind::RandomRegular { n: 60, d: 3 },
        1 => GraphKind::RandomRegular { n: 40, d: 5 },
        2 => GraphKind::ErdosRenyi { n: 50, p: 0.06 },
        _ => GraphKind::RandomBipartite {
            left: 25,
            right: 30,
            p: 0.08,
        },
    };
    let g = generate(&kind, Seed::new(s)).unwrap();
    // Trim to maximum degree 6.
    let mut deg = vec![0u32; g.n()];
    let g = g.filter_edges(|e| {
        if deg[e.u() as usize] < 6 && deg[e.v() as usize] < 6 {
            deg[e.u() as usize] += 1;
            deg[e.v() as usize] += 1;
            true
        } else {
            false
        }
    });
    (g, 1 + (s % 4) as u32)
}

#[test]
fn layered_oracle_equals_offline_process() {
    for s in 0..50u64 {
        let (g, k) = equivalence_instance(s);
        assert!(g.n() <= 60 && g.stats().max_degree <= 6);
        let r = RankSource::new(Seed::new(500 + s));
        let st = offline_layered(&g, k, &r);
        let lo = ListOracle::new(&g);
        let mut o = oracle(&lo, r, k, never());
        for i in 0..=k {
            assert_eq!(
                oracle_matching(&g, &mut o, i),
                st.matchings[i as usize],
                "seed {s} level {i}"
            );
        }
    }
}

#[test]
fn memo_free_answers_are_identical() {
    for s in 0..10u64 {
        let (g, k) = equivalence_instance(s);
        let r = RankSource::new(Seed::new(s));
        let lo = ListOracle::new(&g);
        let mut with = oracle(&lo, r, k, never());
        let mut without = oracle(
            &lo,
            r,
            k,
            LocalConfig {
                memoize: false,
                ..never()
            },
        );
        assert_eq!(oracle_matching(&g, &mut with, k), oracle_matching(&g, &mut without, k));
        assert!(without.stats().total_nodes >= with.stats().total_nodes);
    }
}

#[test]
fn component_fallback_agrees_with_recursion() {
    let mut builds = 0;
    for s in 0..20u64 {
        let (g, k) = equivalence_instance(s);
        let r = RankSource::new(Seed::new(s));
        let lo = ListOracle::new(&g);
        let mut rec = oracle(&lo, r, k, never());
        let cfg = LocalConfig {
            fallback: Fallback::ComponentCap { max_degree: 6 },
            ..LocalConfig::default()
        };
        let mut comp = oracle(&lo, r, k, cfg);
        assert_eq!(
            oracle_matching(&g, &mut rec, k),
            oracle_matching(&g, &mut comp, k),
            "seed {s}"
        );
        builds += comp.stats().component_builds;
    }
    assert!(builds > 0);
}

#[test]
fn oracle_matchings_are_valid_and_near_maximum() {
    for s in 0..30u64 {
        let n = 50 + (s as usize * 53) % 151;
        let g = generate(&GraphKind::RandomRegular { n: n + n % 2, d: 3 }, Seed::new(s)).unwrap();
        let k = 1 + (s % 3) as u32;
        let lo = ListOracle::new(&g);
        let mut o = oracle(&lo, RankSource::new(Seed::new(s)), k, never());
        let m = oracle_matching(&g, &mut o, k);
        assert!(is_matching(&m));
        let mu = max_matching_exact(&g).unwrap().size;
        assert!((k as usize + 1) * m.len() >= k as usize * mu);
    }
}

#[test]
fn level_one_is_greedy_maximal_matching() {
    let g = generate(&GraphKind::ErdosRenyi { n: 60, p: 0.08 }, Seed::new(2)).unwrap();
    let r = RankSource::new(Seed::new(2));
    let lo = ListOracle::new(&g);
    let mut o = oracle(&lo, r, 1, never());
    assert_eq!(oracle_matching(&g, &mut o, 1), offline_greedy_matching(&g, &r, 1));
}

#[test]
fn vertex_status_examples() {
    let g = Graph::from_edges(3, [(1, 2)]).unwrap();
    let lo = ListOracle::new(&g);
    let mut o = oracle(&lo, RankSource::new(Seed::new(0)), 2, never());
    assert!(!o.vertex_matched(0).unwrap());

    let pm = generate(&GraphKind::PerfectMatching { pairs: 6 }, Seed::new(0)).unwrap();
    let lo = ListOracle::new(&pm);
    let mut o = oracle(&lo, RankSource::new(Seed::new(0)), 3, never());
    assert!((0..12).all(|v| o.vertex_matched(v).unwrap()));

    let g = generate(&GraphKind::ErdosRenyi { n: 40, p: 0.08 }, Seed::new(9)).unwrap();
    let r = RankSource::new(Seed::new(9));
    let st = offline_layered(&g, 4, &r);
    let covered: HashSet<Vertex> = st.matchings[4].iter().flat_map(|e| [e.u(), e.v()]).collect();
    let lo = ListOracle::new(&g);
    let mut o = oracle(&lo, r, 4, never());
    for v in 0..40 {
        assert_eq!(o.vertex_matched(v).unwrap(), covered.contains(&v));
    }
}

#[test]
fn estimator_edge_cases() {
    let g = generate(&GraphKind::Empty { n: 10 }, Seed::new(0)).unwrap();
    let lo = ListOracle::new(&g);
    let mut o = oracle(&lo, RankSource::new(Seed::new(0)), 32, LocalConfig::default());
    let universe: Vec<Vertex> = (0..10).collect();
    let est = estimate_mu_yoshida(&mut o, &universe, 1.0, 0.25, 1e-4, &mut Seed::new(0).rng()).unwrap();
    assert_eq!(est.value, 0.0);
    let none = estimate_mu_yoshida(&mut o, &[], 1.0, 0.25, 1e-4, &mut Seed::new(0).rng()).unwrap();
    assert_eq!((none.value, none.samples), (0.0, 0));

    let pm = generate(&GraphKind::PerfectMatching { pairs: 10 }, Seed::new(0)).unwrap();
    let lo = ListOracle::new(&pm);
    let mut o = oracle(&lo, RankSource::new(Seed::new(0)), 32, LocalConfig::default());
    let universe: Vec<Vertex> = (0..20).collect();
    let est = estimate_mu_yoshida(&mut o, &universe, 1.0, 0.25, 1e-3, &mut Seed::new(1).rng()).unwrap();
    assert_eq!(est.matched, est.samples);
    assert!((est.value - 20.0 * 0.875 / 2.0).abs() < 1e-9);
}

#[test]
fn coarse_estimate_examples() {
    let empty = generate(&GraphKind::Empty { n: 7 }, Seed::new(0)).unwrap();
    let lo = ListOracle::new(&empty);
    let dt = build_degree_table(&lo).unwrap();
    assert_eq!(coarse_estimate(&lo, &dt, 0.25, 1.0, Seed::new(0)).unwrap().lambda, 0.0);

    let pm = generate(&GraphKind::PerfectMatching { pairs: 500 }, Seed::new(0)).unwrap();
    let lo = ListOracle::new(&pm);
    let dt = build_degree_table(&lo).unwrap();
    let c = coarse_estimate(&lo, &dt, 0.25, 0.01, Seed::new(4)).unwrap();
    assert!(!c.exact_scan);
    assert!(c.lambda <= 500.0 && c.lambda >= 500.0 * 0.75, "{c:?}");

    let p5 = generate(&GraphKind::Path { n: 5 }, Seed::new(0)).unwrap();
    for s in 0..100 {
        let lo = ListOracle::new(&p5);
        let dt = build_degree_table(&lo).unwrap();
        let c = coarse_estimate(&lo, &dt, 0.25, 1.0, Seed::new(s)).unwrap();
        assert!(c.lambda <= 2.0 && 2.0 <= 2.25 * c.lambda, "seed {s}: {c:?}");
    }
}

#[test]
fn coarse_estimate_is_sandwiched_on_random_graphs() {
    for s in 0..20 {
        let g = generate(&GraphKind::RandomRegular { n: 300, d: 4 }, Seed::new(s)).unwrap();
        let mu = max_matching_exact(&g).unwrap().size as f64;
        let lo = ListOracle::new(&g);
        let dt = build_degree_table(&lo).unwrap();
        let c = coarse_estimate(&lo, &dt, 0.25, 0.05, Seed::new(s)).unwrap();
        assert!(c.lambda <= mu && mu <= 2.25 * c.lambda, "seed {s}: {c:?} mu {mu}");
    }
}

#[test]
fn recursion_volume_depends_on_degree_not_size() {
    let mut means = Vec::new();
    for n in [100usize, 400, 1600] {
        let mut total = 0u64;
        let mut queries = 0u64;
        for s in 0..5u64 {
            let g = generate(&GraphKind::RandomRegular { n, d: 3 }, Seed::new(s)).unwrap();
            let lo = ListOracle::new(&g);
            let cfg = LocalConfig {
                memoize: false,
                ..never()
            };
            let mut o = oracle(&lo, RankSource::new(Seed::new(s)), 2, cfg);
            let edges: Vec<Edge> = g.edges().collect();
            let mut rng = Seed::new(s).derive("pick").rng();
            for _ in 0..100 {
                let e = edges[rand::Rng::random_range(&mut rng, 0..edges.len())];
                o.in_matching(2, e).unwrap();
            }
            total += o.stats().total_nodes;
            queries += 100;
        }
        means.push(total as f64 / queries as f64);
    }
    let (lo, hi) = means.iter().fold((f64::MAX, 0.0f64), |(a, b), &m| (a.min(m), b.max(m)));
    assert!(hi <= 2.0 * lo, "{means:?}");
}

#[test]
fn resource_cap_and_trace() {
    let g = generate(&GraphKind::RandomRegular { n: 40, d: 3 }, Seed::new(1)).unwrap();
    let lo = ListOracle::new(&g);
    let mut o = oracle(
        &lo,
        RankSource::new(Seed::new(1)),
        3,
        LocalConfig { node_cap: 5, ..never() },
    );
    let e = g.edges().next().unwrap();
    assert!(matches!(o.in_matching(3, e), Err(OracleError::ResourceCap { cap: 5 })));

    let mut o = oracle(
        &lo,
        RankSource::new(Seed::new(1)),
        2,
        LocalConfig { trace: true, ..never() },
    );
    o.in_matching(2, e).unwrap();
    let t = o.trace();
    assert_eq!(
        (t[0].kind, t[0].level, t[0].key.as_slice()),
        (OracleKind::Matching, 2, [e.u(), e.v()].as_slice())
    );
    let kinds: StdMap<String, usize> = t.iter().fold(StdMap::new(), |mut m, x| {
        *m.entry(format!("{:?}", x.kind)).or_default() += 1;
        m
    });
    assert!(kinds.len() == 3, "{kinds:?}");
}
