//! Local computation oracles.
//!
//! * [`mis_member`]: membership in the greedy maximal independent set for a rank order.
//! * [`LayeredOracle`]: membership of an edge in `M_i`, where `M_0 = ∅` and `M_i` is
//!   `M_{i-1}` with a greedy maximal set `A_i` of vertex-disjoint augmenting paths of
//!   length `2i - 1` flipped. `A_i` is the greedy MIS, by rank, of the graph whose
//!   vertices are those paths and whose edges join paths sharing a vertex.
//! * [`coarse_estimate`] and [`estimate_mu_yoshida`]: vertex-sampling estimators on top.
//!
//! Ranks are a keyed hash of `(seed, level, element)`, so they do not depend on the
//! order in which an oracle happens to look at elements. Ties are broken by the key.

use alloc::collections::{BTreeSet, VecDeque};
use alloc::rc::Rc;
use alloc::vec;
use alloc::vec::Vec;
use core::hash::Hash;

use hashbrown::{HashMap, HashSet};
use rand::Rng as _;

use crate::exact::{layered_on, LayeredOptions};
use crate::graph::{Edge, Vertex};
use crate::math;
use crate::oracle::{ListOracle, QueryError};
use crate::sampling::DegreeTable;
use crate::seed::{mix64, Rng, Seed};

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error("oracle tree exceeded {cap} nodes for one top-level query")]
    ResourceCap { cap: u64 },
    #[error("level {level} is above the oracle's maximum level {max}")]
    LevelTooHigh { level: u32, max: u32 },
}

/// Seeded random ranks realising the permutations `π_0, π_1, …`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RankSource {
    seed: u64,
}

impl RankSource {
    pub fn new(seed: Seed) -> Self {
        RankSource {
            seed: seed.derive("ranks").value(),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    fn rank_slice(&self, level: u32, xs: &[Vertex]) -> u64 {
        let mut h = mix64(self.seed ^ mix64(u64::from(level) ^ 0xa076_1d64_78bd_642f));
        for &x in xs {
            h = mix64(h ^ u64::from(x));
        }
        mix64(h ^ xs.len() as u64)
    }

    pub fn rank_vertex(&self, level: u32, v: Vertex) -> u64 {
        self.rank_slice(level, &[v])
    }

    pub fn rank_edge(&self, level: u32, e: Edge) -> u64 {
        self.rank_slice(level, &[e.u(), e.v()])
    }

    pub fn rank_path(&self, level: u32, p: &PathKey) -> u64 {
        self.rank_slice(level, &p.0)
    }
}

/// A path as its vertex sequence, oriented so the sequence is lexicographically smaller
/// than its reverse.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PathKey(Rc<[Vertex]>);

impl PathKey {
    pub fn new(mut seq: Vec<Vertex>) -> Self {
        if seq.iter().rev().lt(seq.iter()) {
            seq.reverse();
        }
        PathKey(seq.into())
    }

    pub fn from_edge(e: Edge) -> Self {
        PathKey(Rc::from([e.u(), e.v()].as_slice()))
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.0
    }

    pub fn edge_count(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.0.windows(2).map(|w| Edge::new(w[0], w[1]))
    }

    pub fn contains_vertex(&self, v: Vertex) -> bool {
        self.0.contains(&v)
    }
}

/// Call counts for the greedy-MIS oracle.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MisStats {
    pub calls: u64,
    pub neighbor_fetches: u64,
}

/// Answers of [`mis_member`], keyed by element.
pub type MisMemo<K> = HashMap<K, bool>;

/// Whether `root` is in the greedy MIS for the order `(rank, key)`.
///
/// `neighbors` must return the neighbours of an element in the conflict graph. Answers
/// are stored in `memo`, which may be shared across calls with the same ranks. The
/// search is iterative, so deep rank chains cannot overflow the stack; `node_cap` bounds
/// the number of elements expanded by this call.
pub fn mis_member<K, N, R>(
    root: &K,
    mut neighbors: N,
    rank: R,
    memo: &mut MisMemo<K>,
    stats: &mut MisStats,
    node_cap: u64,
) -> Result<bool, OracleError>
where
    K: Clone + Eq + Hash + Ord,
    N: FnMut(&K) -> Result<Vec<K>, OracleError>,
    R: Fn(&K) -> u64,
{
    struct Frame<K> {
        key: K,
        lower: Vec<K>,
        next: usize,
    }
    if let Some(&ans) = memo.get(root) {
        return Ok(ans);
    }
    let mut expanded = 0u64;
    let mut open = |key: K, stats: &mut MisStats, expanded: &mut u64| -> Result<Frame<K>, OracleError> {
        *expanded += 1;
        if *expanded > node_cap {
            return Err(OracleError::ResourceCap { cap: node_cap });
        }
        stats.calls += 1;
        stats.neighbor_fetches += 1;
        let r = (rank(&key), key.clone());
        let mut lower: Vec<(u64, K)> = neighbors(&key)?
            .into_iter()
            .map(|w| (rank(&w), w))
            .filter(|x| *x < r)
            .collect();
        lower.sort_unstable();
        Ok(Frame {
            key,
            lower: lower.into_iter().map(|x| x.1).collect(),
            next: 0,
        })
    };
    let mut stack = vec![open(root.clone(), stats, &mut expanded)?];
    while let Some(top) = stack.last_mut() {
        if top.next == top.lower.len() {
            memo.insert(top.key.clone(), true);
            stack.pop();
            continue;
        }
        let c = &top.lower[top.next];
        match memo.get(c) {
            Some(true) => {
                memo.insert(top.key.clone(), false);
                stack.pop();
            }
            Some(false) => top.next += 1,
            None => {
                let c = c.clone();
                let f = open(c, stats, &mut expanded)?;
                stack.push(f);
            }
        }
    }
    Ok(memo[root])
}

/// Adjacency-list access for the local oracles: full neighbour lists of a vertex.
pub trait NeighborAccess {
    fn neighbors(&mut self, v: Vertex) -> Result<Vec<Vertex>, OracleError>;
}

/// [`NeighborAccess`] over a list oracle. With a degree table each neighbour list costs
/// exactly `deg_v` list queries; without one it costs `deg_v + 1`.
pub struct ListAccess<'a, 'g> {
    oracle: &'a ListOracle<'g>,
    degrees: Option<&'a DegreeTable>,
}

impl<'a, 'g> ListAccess<'a, 'g> {
    pub fn new(oracle: &'a ListOracle<'g>, degrees: Option<&'a DegreeTable>) -> Self {
        ListAccess { oracle, degrees }
    }
}

impl NeighborAccess for ListAccess<'_, '_> {
    fn neighbors(&mut self, v: Vertex) -> Result<Vec<Vertex>, OracleError> {
        let mut out = Vec::new();
        match self.degrees {
            Some(dt) => {
                for i in 1..=dt.degree(v) as usize {
                    out.push(self.oracle.query(v, i)?.expect("degree table is exact"));
                }
            }
            None => {
                for i in 1..self.oracle.n() {
                    match self.oracle.query(v, i)? {
                        Some(w) => out.push(w),
                        None => break,
                    }
                }
            }
        }
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fallback {
    /// Always recurse.
    Never,
    /// Answer level-`i` queries by solving the whole connected component offline when it
    /// has at most `max_degree^(2i)` vertices.
    ComponentCap { max_degree: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LocalConfig {
    /// Keep answers across top-level queries. When off, every memo table is cleared at
    /// the start of each top-level query.
    pub memoize: bool,
    pub fallback: Fallback,
    /// Ceiling on oracle-tree nodes per top-level query.
    pub node_cap: u64,
    /// Ceiling on enumerated paths per level in a component fallback.
    pub path_budget: u64,
    /// Record one [`TraceEntry`] per oracle call.
    pub trace: bool,
}

impl Default for LocalConfig {
    fn default() -> Self {
        LocalConfig {
            memoize: true,
            fallback: Fallback::ComponentCap { max_degree: 2 },
            node_cap: 10_000_000,
            path_budget: 2_000_000,
            trace: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleKind {
    /// `O_i`: edge membership in `M_i`.
    Matching,
    /// `H_i`: path membership in `A_i`.
    PathMis,
    /// Partner of a vertex in `M_i`.
    Mate,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEntry {
    pub kind: OracleKind,
    pub level: u32,
    pub key: Vec<Vertex>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OracleStats {
    /// `matching_calls[i]` counts `O_i` calls.
    pub matching_calls: Vec<u64>,
    pub path_calls: Vec<u64>,
    pub mate_calls: Vec<u64>,
    /// Neighbour lists fetched from the underlying access.
    pub neighbor_fetches: u64,
    pub component_builds: u64,
    pub top_level_queries: u64,
    pub total_nodes: u64,
    pub max_nodes_per_query: u64,
}

struct Component {
    size: usize,
    /// `levels[i]` is `M_i` restricted to the component.
    levels: Vec<HashSet<Edge>>,
}

/// The layered augmenting-path oracle over an adjacency-list access.
pub struct LayeredOracle<A: NeighborAccess> {
    access: A,
    ranks: RankSource,
    k: u32,
    config: LocalConfig,
    nbrs: HashMap<Vertex, Rc<[Vertex]>>,
    memo_o: HashMap<(u32, Edge), bool>,
    memo_h: HashMap<(u32, PathKey), bool>,
    memo_mate: HashMap<(u32, Vertex), Option<Vertex>>,
    memo_matched: HashMap<Vertex, bool>,
    comp_of: HashMap<Vertex, usize>,
    comps: Vec<Component>,
    too_big: HashMap<Vertex, u64>,
    stats: OracleStats,
    nodes: u64,
    trace: Vec<TraceEntry>,
}

impl<A: NeighborAccess> LayeredOracle<A> {
    /// Oracle for levels `0..=k`.
    pub fn new(access: A, ranks: RankSource, k: u32, config: LocalConfig) -> Self {
        LayeredOracle {
            access,
            ranks,
            k,
            config,
            nbrs: HashMap::new(),
            memo_o: HashMap::new(),
            memo_h: HashMap::new(),
            memo_mate: HashMap::new(),
            memo_matched: HashMap::new(),
            comp_of: HashMap::new(),
            comps: Vec::new(),
            too_big: HashMap::new(),
            stats: OracleStats {
                matching_calls: vec![0; k as usize + 1],
                path_calls: vec![0; k as usize + 1],
                mate_calls: vec![0; k as usize + 1],
                ..OracleStats::default()
            },
            nodes: 0,
            trace: Vec::new(),
        }
    }

    pub fn max_level(&self) -> u32 {
        self.k
    }

    pub fn ranks(&self) -> &RankSource {
        &self.ranks
    }

    pub fn stats(&self) -> &OracleStats {
        &self.stats
    }

    pub fn trace(&self) -> &[TraceEntry] {
        &self.trace
    }

    pub fn access(&self) -> &A {
        &self.access
    }

    pub fn access_mut(&mut self) -> &mut A {
        &mut self.access
    }

    pub fn into_access(self) -> A {
        self.access
    }

    pub fn clear_memo(&mut self) {
        self.memo_o.clear();
        self.memo_h.clear();
        self.memo_mate.clear();
        self.memo_matched.clear();
        self.comp_of.clear();
        self.comps.clear();
        self.too_big.clear();
    }

    fn begin(&mut self, level: u32) -> Result<(), OracleError> {
        if level > self.k {
            return Err(OracleError::LevelTooHigh { level, max: self.k });
        }
        if !self.config.memoize {
            self.clear_memo();
        }
        self.stats.top_level_queries += 1;
        self.nodes = 0;
        Ok(())
    }

    fn end(&mut self) {
        self.stats.max_nodes_per_query = self.stats.max_nodes_per_query.max(self.nodes);
    }

    fn tick(&mut self, kind: OracleKind, level: u32, key: &[Vertex]) -> Result<(), OracleError> {
        self.nodes += 1;
        self.stats.total_nodes += 1;
        if self.nodes > self.config.node_cap {
            return Err(OracleError::ResourceCap {
                cap: self.config.node_cap,
            });
        }
        let slot = match kind {
            OracleKind::Matching => &mut self.stats.matching_calls,
            OracleKind::PathMis => &mut self.stats.path_calls,
            OracleKind::Mate => &mut self.stats.mate_calls,
        };
        slot[level as usize] += 1;
        if self.config.trace {
            self.trace.push(TraceEntry {
                kind,
                level,
                key: key.to_vec(),
            });
        }
        Ok(())
    }

    fn neighbors(&mut self, v: Vertex) -> Result<Rc<[Vertex]>, OracleError> {
        if let Some(l) = self.nbrs.get(&v) {
            return Ok(l.clone());
        }
        self.stats.neighbor_fetches += 1;
        let l: Rc<[Vertex]> = self.access.neighbors(v)?.into();
        self.nbrs.insert(v, l.clone());
        Ok(l)
    }

    /// Whether `e` is in `M_level`. `e` must be an edge of the accessed graph.
    pub fn in_matching(&mut self, level: u32, e: Edge) -> Result<bool, OracleError> {
        self.begin(level)?;
        let r = self.o(level, e);
        self.end();
        r
    }

    /// Whether the augmenting path `p` (with `2 level - 1` edges) is in `A_level`.
    pub fn path_selected(&mut self, level: u32, p: &PathKey) -> Result<bool, OracleError> {
        self.begin(level)?;
        let r = self.h(level, p);
        self.end();
        r
    }

    /// Partner of `v` in `M_level`.
    pub fn mate(&mut self, level: u32, v: Vertex) -> Result<Option<Vertex>, OracleError> {
        self.begin(level)?;
        let r = self.mate_of(level, v);
        self.end();
        r
    }

    /// Whether `v` is covered by `M_k` for the oracle's top level `k`.
    pub fn vertex_matched(&mut self, v: Vertex) -> Result<bool, OracleError> {
        if let Some(&b) = self.memo_matched.get(&v) {
            if self.config.memoize {
                return Ok(b);
            }
        }
        self.begin(self.k)?;
        let r = self.mate_of(self.k, v).map(|m| m.is_some());
        self.end();
        if let Ok(b) = r {
            self.memo_matched.insert(v, b);
        }
        r
    }

    /// Augmenting paths of level `level` through vertex `x`, in key order.
    pub fn paths_through_vertex(&mut self, level: u32, x: Vertex) -> Result<Vec<PathKey>, OracleError> {
        self.begin(level)?;
        let r = self.aug_through_vertex(level, x).map(|s| s.into_iter().collect());
        self.end();
        r
    }

    /// Augmenting paths of level `level` containing edge `e`, in key order.
    pub fn paths_through_edge(&mut self, level: u32, e: Edge) -> Result<Vec<PathKey>, OracleError> {
        self.begin(level)?;
        let r = self.aug_through_edge(level, e).map(|s| s.into_iter().collect());
        self.end();
        r
    }

    fn o(&mut self, i: u32, e: Edge) -> Result<bool, OracleError> {
        if i == 0 {
            return Ok(false);
        }
        self.tick(OracleKind::Matching, i, &[e.u(), e.v()])?;
        if let Some(&b) = self.memo_o.get(&(i, e)) {
            return Ok(b);
        }
        let ans = match self.component_answer(i, e)? {
            Some(b) => b,
            None => {
                let prev = self.o(i - 1, e)?;
                let mut flipped = false;
                for p in self.aug_through_edge(i, e)? {
                    if self.h(i, &p)? {
                        flipped = true;
                        break;
                    }
                }
                prev ^ flipped
            }
        };
        self.memo_o.insert((i, e), ans);
        Ok(ans)
    }

    fn h(&mut self, i: u32, p: &PathKey) -> Result<bool, OracleError> {
        self.tick(OracleKind::PathMis, i, p.vertices())?;
        if let Some(&b) = self.memo_h.get(&(i, p.clone())) {
            return Ok(b);
        }
        let me = (self.ranks.rank_path(i, p), p.clone());
        let mut lower: Vec<(u64, PathKey)> = Vec::new();
        let mut seen: BTreeSet<PathKey> = BTreeSet::new();
        for &x in p.vertices() {
            for q in self.aug_through_vertex(i, x)? {
                if seen.insert(q.clone()) {
                    let rq = (self.ranks.rank_path(i, &q), q);
                    if rq < me {
                        lower.push(rq);
                    }
                }
            }
        }
        lower.sort_unstable();
        let mut ans = true;
        for (_, q) in lower {
            if self.h(i, &q)? {
                ans = false;
                break;
            }
        }
        self.memo_h.insert((i, p.clone()), ans);
        Ok(ans)
    }

    fn mate_of(&mut self, i: u32, v: Vertex) -> Result<Option<Vertex>, OracleError> {
        if i == 0 {
            return Ok(None);
        }
        self.tick(OracleKind::Mate, i, &[v])?;
        if let Some(&m) = self.memo_mate.get(&(i, v)) {
            return Ok(m);
        }
        let mut ans = None;
        for &w in self.neighbors(v)?.iter() {
            if self.o(i, Edge::new(v, w))? {
                ans = Some(w);
                break;
            }
        }
        self.memo_mate.insert((i, v), ans);
        Ok(ans)
    }

    fn aug_through_edge(&mut self, i: u32, e: Edge) -> Result<BTreeSet<PathKey>, OracleError> {
        let len = 2 * i as usize - 1;
        let matched = self.o(i - 1, e)?;
        let mut out = BTreeSet::new();
        for t in 0..len {
            if (t % 2 == 1) != matched {
                continue;
            }
            let mut seq = vec![0; len + 1];
            seq[t] = e.u();
            seq[t + 1] = e.v();
            if t == 0 && self.mate_of(i - 1, e.u())?.is_some() {
                continue;
            }
            if t + 1 == len && self.mate_of(i - 1, e.v())?.is_some() {
                continue;
            }
            self.fill(i, &mut seq, t, t + 1, &mut out)?;
        }
        Ok(out)
    }

    fn aug_through_vertex(&mut self, i: u32, x: Vertex) -> Result<BTreeSet<PathKey>, OracleError> {
        let len = 2 * i as usize - 1;
        let mut out = BTreeSet::new();
        let free = self.mate_of(i - 1, x)?.is_none();
        for t in 0..=len {
            if (t == 0 || t == len) && !free {
                continue;
            }
            let mut seq = vec![0; len + 1];
            seq[t] = x;
            self.fill(i, &mut seq, t, t, &mut out)?;
        }
        Ok(out)
    }

    /// Extends the alternating segment `seq[lo..=hi]` to a full augmenting path, left end
    /// first. Edge `j` joins positions `j` and `j + 1` and is matched iff `j` is odd.
    fn fill(
        &mut self,
        i: u32,
        seq: &mut Vec<Vertex>,
        lo: usize,
        hi: usize,
        out: &mut BTreeSet<PathKey>,
    ) -> Result<(), OracleError> {
        let len = seq.len() - 1;
        let (from, edge, to) = if lo > 0 {
            (seq[lo], lo - 1, lo - 1)
        } else if hi < len {
            (seq[hi], hi, hi + 1)
        } else {
            out.insert(PathKey::new(seq.clone()));
            return Ok(());
        };
        let mate = self.mate_of(i - 1, from)?;
        let candidates: Vec<Vertex> = if edge % 2 == 1 {
            mate.into_iter().collect()
        } else {
            self.neighbors(from)?
                .iter()
                .copied()
                .filter(|&w| Some(w) != mate)
                .collect()
        };
        for c in candidates {
            if seq[lo..=hi].contains(&c) {
                continue;
            }
            if (to == 0 || to == len) && self.mate_of(i - 1, c)?.is_some() {
                continue;
            }
            seq[to] = c;
            let (nlo, nhi) = if to < lo { (to, hi) } else { (lo, to) };
            self.fill(i, seq, nlo, nhi, out)?;
        }
        Ok(())
    }

    fn component_answer(&mut self, i: u32, e: Edge) -> Result<Option<bool>, OracleError> {
        let max_degree = match self.config.fallback {
            Fallback::Never => return Ok(None),
            Fallback::ComponentCap { max_degree } => max_degree.max(1),
        };
        if let Some(&c) = self.comp_of.get(&e.u()) {
            return Ok(Some(self.comps[c].levels[i as usize].contains(&e)));
        }
        let cap = max_degree.checked_pow(2 * i).unwrap_or(u64::MAX);
        if self.too_big.get(&e.u()).is_some_and(|&b| b >= cap) {
            return Ok(None);
        }
        // Breadth-first search, abandoned once more than `cap` vertices are seen.
        let mut index: HashMap<Vertex, usize> = HashMap::new();
        let mut ids = vec![e.u()];
        index.insert(e.u(), 0);
        let mut queue = VecDeque::from([e.u()]);
        let mut adj: Vec<Vec<usize>> = Vec::new();
        let mut lists: Vec<Rc<[Vertex]>> = Vec::new();
        while let Some(x) = queue.pop_front() {
            let l = self.neighbors(x)?;
            for &w in l.iter() {
                if !index.contains_key(&w) {
                    if ids.len() as u64 >= cap {
                        self.too_big.insert(e.u(), cap);
                        return Ok(None);
                    }
                    index.insert(w, ids.len());
                    ids.push(w);
                    queue.push_back(w);
                }
            }
            lists.push(l);
        }
        // `lists` follows BFS order, which is the order of `ids`.
        for l in &lists {
            adj.push(l.iter().map(|w| index[w]).collect());
        }
        self.stats.component_builds += 1;
        let opts = LayeredOptions {
            stop_when_maximum: true,
            path_budget: Some(self.config.path_budget),
        };
        let st = layered_on(&ids, &adj, self.k, &self.ranks, opts);
        let levels = st.matchings.into_iter().map(|m| m.into_iter().collect()).collect();
        let c = self.comps.len();
        self.comps.push(Component {
            size: ids.len(),
            levels,
        });
        for &v in &ids {
            self.comp_of.insert(v, c);
        }
        Ok(Some(self.comps[c].levels[i as usize].contains(&e)))
    }

    /// Sizes of the components solved offline so far.
    pub fn component_sizes(&self) -> Vec<usize> {
        self.comps.iter().map(|c| c.size).collect()
    }
}

/// Levels for a top-level `(1 + ε)` matching.
pub fn top_levels(epsilon: f64) -> u32 {
    math::ceil_tol(1.0 / epsilon) as u32
}

/// Levels for the internal `ε/8` accuracy of the vertex-sampling estimator.
pub fn yoshida_levels(epsilon: f64) -> u32 {
    math::ceil_tol(8.0 / epsilon) as u32
}

#[derive(Clone, Debug, PartialEq)]
pub struct MuEstimate {
    pub value: f64,
    pub samples: u64,
    pub matched: u64,
    pub levels: u32,
    pub universe: usize,
}

/// Sample count `T = ⌈scale · Δ · ln n · 10⁵ / ε²⌉`, at least 1.
pub fn yoshida_samples(n_eff: usize, max_degree: f64, epsilon: f64, scale: f64) -> u64 {
    if n_eff == 0 {
        return 0;
    }
    let t = math::ceil(scale * max_degree * math::ln(n_eff as f64) * 1e5 / (epsilon * epsilon));
    math::to_count(t).max(1)
}

/// Samples `T` vertices of `universe` with repetition and returns
/// `X · n_eff · (1 - ε/2) / (2T)` where `X` counts samples matched in `M_k`.
pub fn estimate_mu_yoshida<A: NeighborAccess>(
    oracle: &mut LayeredOracle<A>,
    universe: &[Vertex],
    max_degree: f64,
    epsilon: f64,
    scale: f64,
    rng: &mut Rng,
) -> Result<MuEstimate, OracleError> {
    let n_eff = universe.len();
    let t = yoshida_samples(n_eff, max_degree, epsilon, scale);
    let mut matched = 0u64;
    for _ in 0..t {
        let v = universe[rng.random_range(0..n_eff)];
        if oracle.vertex_matched(v)? {
            matched += 1;
        }
    }
    let value = if t == 0 {
        0.0
    } else {
        matched as f64 * n_eff as f64 * (1.0 - epsilon / 2.0) / (2.0 * t as f64)
    };
    Ok(MuEstimate {
        value,
        samples: t,
        matched,
        levels: oracle.max_level(),
        universe: n_eff,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoarseEstimate {
    pub lambda: f64,
    pub samples: u64,
    pub matched: u64,
    /// All vertices were inspected, so `lambda` is the greedy matching size exactly.
    pub exact_scan: bool,
    /// Times the sample count was doubled because the estimate came out zero.
    pub retries: u32,
}

/// Estimates the size of a random greedy maximal matching (greedy MIS on the line graph)
/// by vertex sampling, scaled down so that `λ ≤ μ ≤ (2 + ε) λ` with high probability.
pub fn coarse_estimate(
    oracle: &ListOracle<'_>,
    degrees: &DegreeTable,
    epsilon: f64,
    scale: f64,
    seed: Seed,
) -> Result<CoarseEstimate, OracleError> {
    let n = degrees.n();
    let m = degrees.m();
    if m == 0 {
        return Ok(CoarseEstimate {
            lambda: 0.0,
            samples: 0,
            matched: 0,
            exact_scan: true,
            retries: 0,
        });
    }
    let delta = epsilon / 5.0;
    let (nf, mf, dmax) = (n as f64, m as f64, f64::from(degrees.max_degree()));
    // Matched vertices make up at least 2m / ((2Δ - 1) n) of V.
    let p_low = 2.0 * mf / ((2.0 * dmax - 1.0) * nf);
    let mut t = math::to_count(math::ceil(
        scale * 6.0 * math::ln(nf.max(2.0)) / (delta * delta * p_low),
    ))
    .max(1);

    let ranks = RankSource::new(seed.derive("coarse"));
    let mut access = ListAccess::new(oracle, Some(degrees));
    let mut lists: HashMap<Vertex, Rc<[Vertex]>> = HashMap::new();
    let mut memo: HashMap<Edge, bool> = HashMap::new();
    let mut stats = MisStats::default();
    let mut matched_memo: HashMap<Vertex, bool> = HashMap::new();
    let mut rng = seed.derive("coarse-samples").rng();

    let mut is_matched = |v: Vertex| -> Result<bool, OracleError> {
        if let Some(&b) = matched_memo.get(&v) {
            return Ok(b);
        }
        let mut fetch = |x: Vertex| -> Result<Rc<[Vertex]>, OracleError> {
            if let Some(l) = lists.get(&x) {
                return Ok(l.clone());
            }
            let l: Rc<[Vertex]> = access.neighbors(x)?.into();
            lists.insert(x, l.clone());
            Ok(l)
        };
        let own = fetch(v)?;
        let mut b = false;
        for &w in own.iter() {
            let e = Edge::new(v, w);
            let line_neighbors = |f: &Edge| -> Result<Vec<Edge>, OracleError> {
                let mut out = Vec::new();
                for x in [f.u(), f.v()] {
                    for &y in fetch(x)?.iter() {
                        let g = Edge::new(x, y);
                        if g != *f {
                            out.push(g);
                        }
                    }
                }
                Ok(out)
            };
            if mis_member(
                &e,
                line_neighbors,
                |f| ranks.rank_edge(1, *f),
                &mut memo,
                &mut stats,
                10_000_000,
            )? {
                b = true;
                break;
            }
        }
        matched_memo.insert(v, b);
        Ok(b)
    };

    let mut retries = 0;
    loop {
        if t >= n as u64 {
            let mut matched = 0;
            for v in 0..n as Vertex {
                if is_matched(v)? {
                    matched += 1;
                }
            }
            return Ok(CoarseEstimate {
                lambda: matched as f64 / 2.0,
                samples: n as u64,
                matched,
                exact_scan: true,
                retries,
            });
        }
        let mut matched = 0;
        for _ in 0..t {
            if is_matched(rng.random_range(0..n as Vertex))? {
                matched += 1;
            }
        }
        if matched > 0 {
            let lambda = matched as f64 * nf / (2.0 * t as f64) / (1.0 + delta);
            return Ok(CoarseEstimate {
                lambda,
                samples: t,
                matched,
                exact_scan: false,
                retries,
            });
        }
        retries += 1;
        t = t.saturating_mul(2);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{offline_greedy_mis, offline_layered};
    use crate::generate::{generate, GraphKind};
    use crate::graph::Graph;

    #[test]
    fn path_key_normalises() {
        let a = PathKey::new(vec![3, 1, 2]);
        let b = PathKey::new(vec![2, 1, 3]);
        assert_eq!(a, b);
        assert_eq!(a.vertices(), &[2, 1, 3]);
        assert_eq!(a.edge_count(), 2);
        assert_eq!(PathKey::from_edge(Edge::new(4, 1)), PathKey::new(vec![4, 1]));
    }

    #[test]
    fn mis_matches_offline_on_a_small_graph() {
        let g = generate(&GraphKind::ErdosRenyi { n: 30, p: 0.2 }, Seed::new(5)).unwrap();
        let ranks = RankSource::new(Seed::new(9));
        let want = offline_greedy_mis(&g, &ranks, 0);
        let mut memo = HashMap::new();
        let mut stats = MisStats::default();
        for v in 0..30 {
            let got = mis_member(
                &v,
                |x: &Vertex| Ok(g.neighbors(*x).to_vec()),
                |x| ranks.rank_vertex(0, *x),
                &mut memo,
                &mut stats,
                u64::MAX,
            )
            .unwrap();
            assert_eq!(got, want[v as usize]);
        }
    }

    #[test]
    fn oracle_matches_offline_on_a_cycle() {
        let g = generate(&GraphKind::Cycle { n: 11 }, Seed::new(0)).unwrap();
        let lo = ListOracle::new(&g);
        let ranks = RankSource::new(Seed::new(2));
        let cfg = LocalConfig {
            fallback: Fallback::Never,
            ..LocalConfig::default()
        };
        let mut o = LayeredOracle::new(ListAccess::new(&lo, None), ranks, 3, cfg);
        let st = offline_layered(&g, 3, &ranks);
        for i in 0..=3 {
            let got: Vec<Edge> = g.edges().filter(|&e| o.in_matching(i, e).unwrap()).collect();
            assert_eq!(got, st.matchings[i as usize]);
        }
    }

    #[test]
    fn single_edge() {
        let g = Graph::from_edges(2, [(0, 1)]).unwrap();
        let lo = ListOracle::new(&g);
        let mut o = LayeredOracle::new(
            ListAccess::new(&lo, None),
            RankSource::new(Seed::new(1)),
            2,
            LocalConfig::default(),
        );
        assert!(o.in_matching(1, Edge::new(0, 1)).unwrap());
        assert!(o.in_matching(2, Edge::new(0, 1)).unwrap());
        assert!(matches!(
            o.in_matching(3, Edge::new(0, 1)),
            Err(OracleError::LevelTooHigh { .. })
        ));
    }

    #[test]
    fn level_counts() {
        assert_eq!(top_levels(0.25), 4);
        assert_eq!(yoshida_levels(0.25), 32);
        assert_eq!(yoshida_levels(0.2), 40);
    }
}
