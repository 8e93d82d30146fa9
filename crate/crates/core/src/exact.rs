//! Ground truth for verification: exact maximum matching, offline greedy MIS, the
//! offline layered augmenting-path process, and offline versions of the sets `U` and
//! `E_small`. Everything here reads the [`Graph`] directly and is never called by an
//! estimator, except that the local oracles reuse the component-level routines on
//! subgraphs they have already paid to explore.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use crate::edbs::Edbs;
use crate::graph::{Edge, Graph, Vertex};
use crate::local::{PathKey, RankSource};
use crate::sampling::SmallVertexSet;

pub const DEFAULT_EXACT_CAP: usize = 2000;

const NONE: usize = usize::MAX;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatching {
    pub edges: Vec<Edge>,
    pub size: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("n = {n} exceeds the exact-matching cap {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("certification found an augmenting path")]
    NotCertified,
}

pub fn max_matching_exact(g: &Graph) -> Result<ExactMatching, ExactError> {
    max_matching_exact_with_cap(g, DEFAULT_EXACT_CAP)
}

pub fn max_matching_exact_with_cap(g: &Graph, cap: usize) -> Result<ExactMatching, ExactError> {
    if g.n() > cap {
        return Err(ExactError::CapExceeded { n: g.n(), cap });
    }
    let adj: Vec<Vec<usize>> = (0..g.n() as Vertex)
        .map(|v| g.neighbors(v).iter().map(|&w| w as usize).collect())
        .collect();
    let mate = Blossom::new(&adj).solve(vec![NONE; g.n()])?;
    let edges = mate_edges(&mate, |x| x as Vertex);
    Ok(ExactMatching {
        size: edges.len(),
        edges,
    })
}

/// Exact matching size of the graph on `0..n` with the given edges.
pub fn matching_size(n: usize, edges: &[Edge]) -> usize {
    let g = Graph::from_edge_list(n, edges).expect("edge list must be simple");
    max_matching_exact_with_cap(&g, usize::MAX).expect("uncapped").size
}

/// Maximum matching on local indices, starting from `initial` (a valid matching).
pub(crate) fn maximum_mate(adj: &[Vec<usize>], initial: Vec<usize>) -> Vec<usize> {
    Blossom::new(adj).solve(initial).expect("blossom search is exact")
}

fn mate_edges(mate: &[usize], id: impl Fn(usize) -> Vertex) -> Vec<Edge> {
    let mut out: Vec<Edge> = mate
        .iter()
        .enumerate()
        .filter(|&(x, &y)| y != NONE && x < y)
        .map(|(x, &y)| Edge::new(id(x), id(y)))
        .collect();
    out.sort_unstable();
    out
}

/// True iff no two edges share an endpoint.
pub fn is_matching(edges: &[Edge]) -> bool {
    let mut seen = hashbrown::HashSet::new();
    edges.iter().all(|e| seen.insert(e.u()) && seen.insert(e.v()))
}

/// Edmonds' blossom search, one BFS tree per free root.
struct Blossom<'a> {
    adj: &'a [Vec<usize>],
    mate: Vec<usize>,
    parent: Vec<usize>,
    base: Vec<usize>,
    used: Vec<bool>,
    in_blossom: Vec<bool>,
    on_path: Vec<bool>,
    queue: VecDeque<usize>,
}

impl<'a> Blossom<'a> {
    fn new(adj: &'a [Vec<usize>]) -> Self {
        let n = adj.len();
        Blossom {
            adj,
            mate: vec![NONE; n],
            parent: vec![NONE; n],
            base: (0..n).collect(),
            used: vec![false; n],
            in_blossom: vec![false; n],
            on_path: vec![false; n],
            queue: VecDeque::new(),
        }
    }

    fn solve(mut self, initial: Vec<usize>) -> Result<Vec<usize>, ExactError> {
        let n = self.adj.len();
        self.mate = initial;
        // Greedy warm start on top of the given matching.
        for v in 0..n {
            if self.mate[v] == NONE {
                if let Some(&w) = self.adj[v].iter().find(|&&w| self.mate[w] == NONE) {
                    self.mate[v] = w;
                    self.mate[w] = v;
                }
            }
        }
        // A free vertex with no augmenting path never gains one later, so one pass suffices.
        for root in 0..n {
            if self.mate[root] == NONE {
                if let Some(end) = self.find_path(root) {
                    self.augment(end);
                }
            }
        }
        for root in 0..n {
            if self.mate[root] == NONE && self.find_path(root).is_some() {
                return Err(ExactError::NotCertified);
            }
        }
        Ok(self.mate)
    }

    fn augment(&mut self, mut v: usize) {
        while v != NONE {
            let pv = self.parent[v];
            let next = self.mate[pv];
            self.mate[v] = pv;
            self.mate[pv] = v;
            v = next;
        }
    }

    fn lca(&mut self, mut a: usize, mut b: usize) -> usize {
        self.on_path.iter_mut().for_each(|x| *x = false);
        loop {
            a = self.base[a];
            self.on_path[a] = true;
            if self.mate[a] == NONE {
                break;
            }
            a = self.parent[self.mate[a]];
        }
        loop {
            b = self.base[b];
            if self.on_path[b] {
                return b;
            }
            b = self.parent[self.mate[b]];
        }
    }

    fn mark_path(&mut self, mut v: usize, b: usize, mut child: usize) {
        while self.base[v] != b {
            self.in_blossom[self.base[v]] = true;
            self.in_blossom[self.base[self.mate[v]]] = true;
            self.parent[v] = child;
            child = self.mate[v];
            v = self.parent[self.mate[v]];
        }
    }

    fn find_path(&mut self, root: usize) -> Option<usize> {
        let n = self.adj.len();
        self.used.iter_mut().for_each(|x| *x = false);
        self.parent.iter_mut().for_each(|x| *x = NONE);
        for (i, b) in self.base.iter_mut().enumerate() {
            *b = i;
        }
        self.used[root] = true;
        self.queue.clear();
        self.queue.push_back(root);
        while let Some(v) = self.queue.pop_front() {
            for idx in 0..self.adj[v].len() {
                let to = self.adj[v][idx];
                if self.base[v] == self.base[to] || self.mate[v] == to {
                    continue;
                }
                if to == root || (self.mate[to] != NONE && self.parent[self.mate[to]] != NONE) {
                    let cur = self.lca(v, to);
                    self.in_blossom.iter_mut().for_each(|x| *x = false);
                    self.mark_path(v, cur, to);
                    self.mark_path(to, cur, v);
                    for i in 0..n {
                        if self.in_blossom[self.base[i]] {
                            self.base[i] = cur;
                            if !self.used[i] {
                                self.used[i] = true;
                                self.queue.push_back(i);
                            }
                        }
                    }
                } else if self.parent[to] == NONE {
                    self.parent[to] = v;
                    if self.mate[to] == NONE {
                        return Some(to);
                    }
                    let m = self.mate[to];
                    self.used[m] = true;
                    self.queue.push_back(m);
                }
            }
        }
        None
    }
}

/// Greedy MIS over the vertices of `g`, scanning in increasing `(rank, id)` order.
pub fn offline_greedy_mis(g: &Graph, ranks: &RankSource, level: u32) -> Vec<bool> {
    let mut order: Vec<Vertex> = (0..g.n() as Vertex).collect();
    order.sort_unstable_by_key(|&v| (ranks.rank_vertex(level, v), v));
    let mut inside = vec![false; g.n()];
    for v in order {
        if !g.neighbors(v).iter().any(|&w| inside[w as usize]) {
            inside[v as usize] = true;
        }
    }
    inside
}

/// Greedy maximal matching: greedy MIS on the line graph with edge ranks.
pub fn offline_greedy_matching(g: &Graph, ranks: &RankSource, level: u32) -> Vec<Edge> {
    let mut edges: Vec<Edge> = g.edges().collect();
    edges.sort_unstable_by_key(|&e| (ranks.rank_edge(level, e), e));
    let mut used = vec![false; g.n()];
    let mut out = Vec::new();
    for e in edges {
        let (u, v) = (e.u() as usize, e.v() as usize);
        if !used[u] && !used[v] {
            used[u] = true;
            used[v] = true;
            out.push(e);
        }
    }
    out.sort_unstable();
    out
}

/// `M_0 … M_k` and the chosen path sets `A_1 … A_k` of the layered process.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OfflineLayeredState {
    /// `matchings[i]` is `M_i`, sorted. `matchings[0]` is empty.
    pub matchings: Vec<Vec<Edge>>,
    /// `chosen[i - 1]` is `A_i`, in selection order.
    pub chosen: Vec<Vec<PathKey>>,
    /// Level at which the path budget ran out and the rest was finished by an exact
    /// maximum matching, if that happened.
    pub finished_exactly_at: Option<u32>,
}

impl OfflineLayeredState {
    pub fn final_matching(&self) -> &[Edge] {
        self.matchings.last().map(Vec::as_slice).unwrap_or(&[])
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct LayeredOptions {
    /// Skip the remaining levels once the matching is maximum; no augmenting paths exist
    /// then, so the result is unchanged.
    pub stop_when_maximum: bool,
    /// Ceiling on enumerated augmenting paths per level; beyond it the process completes
    /// with an exact maximum matching seeded by the current one.
    pub path_budget: Option<u64>,
}

pub fn offline_layered(g: &Graph, k: u32, ranks: &RankSource) -> OfflineLayeredState {
    offline_layered_with(g, k, ranks, LayeredOptions::default())
}

pub fn offline_layered_with(g: &Graph, k: u32, ranks: &RankSource, opts: LayeredOptions) -> OfflineLayeredState {
    let ids: Vec<Vertex> = (0..g.n() as Vertex).collect();
    let adj: Vec<Vec<usize>> = ids
        .iter()
        .map(|&v| g.neighbors(v).iter().map(|&w| w as usize).collect())
        .collect();
    layered_on(&ids, &adj, k, ranks, opts)
}

/// The layered process on a graph given by local indices `0..ids.len()` whose global
/// vertex ids are `ids`. Paths and ranks use global ids.
pub(crate) fn layered_on(
    ids: &[Vertex],
    adj: &[Vec<usize>],
    k: u32,
    ranks: &RankSource,
    opts: LayeredOptions,
) -> OfflineLayeredState {
    let n = ids.len();
    let mut mate = vec![NONE; n];
    let mu = if opts.stop_when_maximum {
        Some(mate_edges(&maximum_mate(adj, vec![NONE; n]), |x| ids[x]).len())
    } else {
        None
    };
    let mut state = OfflineLayeredState {
        matchings: vec![Vec::new()],
        chosen: Vec::new(),
        finished_exactly_at: None,
    };
    let mut size = 0usize;
    for level in 1..=k {
        if mu == Some(size) || state.finished_exactly_at.is_some() {
            state.matchings.push(state.matchings[level as usize - 1].clone());
            state.chosen.push(Vec::new());
            continue;
        }
        let len = 2 * level as usize - 1;
        let paths = match augmenting_paths(ids, adj, &mate, len, opts.path_budget) {
            Some(p) => p,
            None => {
                mate = maximum_mate(adj, mate);
                state.finished_exactly_at = Some(level);
                state.matchings.push(mate_edges(&mate, |x| ids[x]));
                state.chosen.push(Vec::new());
                size = state.matchings[level as usize].len();
                continue;
            }
        };
        let mut keyed: Vec<(u64, PathKey, Vec<usize>)> = paths
            .into_iter()
            .map(|p| {
                let key = PathKey::new(p.iter().map(|&x| ids[x]).collect());
                (ranks.rank_path(level, &key), key, p)
            })
            .collect();
        keyed.sort_unstable_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
        let mut used = vec![false; n];
        let mut chosen = Vec::new();
        for (_, key, p) in keyed {
            if p.iter().any(|&x| used[x]) {
                continue;
            }
            p.iter().for_each(|&x| used[x] = true);
            for j in (0..p.len() - 1).step_by(2) {
                mate[p[j]] = p[j + 1];
                mate[p[j + 1]] = p[j];
            }
            chosen.push(key);
        }
        size += chosen.len();
        state.matchings.push(mate_edges(&mate, |x| ids[x]));
        state.chosen.push(chosen);
    }
    state
}

/// All augmenting paths with `len` edges, each reported once from its endpoint with the
/// smaller global id. Returns `None` when `budget` is exceeded.
fn augmenting_paths(
    ids: &[Vertex],
    adj: &[Vec<usize>],
    mate: &[usize],
    len: usize,
    budget: Option<u64>,
) -> Option<Vec<Vec<usize>>> {
    let n = ids.len();
    let bound = finish_bounds(adj, mate, len);
    let mut out = Vec::new();
    let mut path = Vec::with_capacity(len + 1);
    let mut on_path = vec![false; n];
    let mut steps = 0u64;
    for a in 0..n {
        if mate[a] != NONE || bound[2 * a] > len {
            continue;
        }
        path.clear();
        path.push(a);
        on_path[a] = true;
        let ok = extend(
            ids,
            adj,
            mate,
            &bound,
            len,
            &mut path,
            &mut on_path,
            &mut out,
            &mut steps,
            budget,
        );
        on_path[a] = false;
        if !ok {
            return None;
        }
    }
    Some(out)
}

#[allow(clippy::too_many_arguments)]
fn extend(
    ids: &[Vertex],
    adj: &[Vec<usize>],
    mate: &[usize],
    bound: &[usize],
    len: usize,
    path: &mut Vec<usize>,
    on_path: &mut [bool],
    out: &mut Vec<Vec<usize>>,
    steps: &mut u64,
    budget: Option<u64>,
) -> bool {
    *steps += 1;
    if budget.is_some_and(|b| *steps > b) {
        return false;
    }
    let t = path.len() - 1;
    let x = path[t];
    if t == len {
        if mate[x] == NONE && ids[path[0]] < ids[x] {
            out.push(path.clone());
        }
        return true;
    }
    let remaining = len - t;
    if t % 2 == 1 {
        let y = mate[x];
        if y == NONE || on_path[y] || 1 + bound[2 * y] > remaining {
            return true;
        }
        path.push(y);
        on_path[y] = true;
        let ok = extend(ids, adj, mate, bound, len, path, on_path, out, steps, budget);
        on_path[y] = false;
        path.pop();
        return ok;
    }
    for &y in &adj[x] {
        if y == mate[x] || on_path[y] {
            continue;
        }
        // After a non-matching edge into y: either y is a free endpoint, or the walk
        // continues along y's matching edge.
        let need = if mate[y] == NONE { 1 } else { 1 + bound[2 * y + 1] };
        if need > remaining {
            continue;
        }
        if mate[y] == NONE && remaining != 1 {
            continue;
        }
        path.push(y);
        on_path[y] = true;
        let ok = extend(ids, adj, mate, bound, len, path, on_path, out, steps, budget);
        on_path[y] = false;
        path.pop();
        if !ok {
            return false;
        }
    }
    true
}

/// Lower bounds on the number of edges needed to finish an alternating walk at a free
/// vertex. Index `2x` is for a walk whose next edge from `x` is non-matching, `2x + 1`
/// for one whose next edge is `x`'s matching edge. Values above `cap` are clamped.
fn finish_bounds(adj: &[Vec<usize>], mate: &[usize], cap: usize) -> Vec<usize> {
    let n = adj.len();
    let inf = cap + 1;
    let mut b = vec![inf; 2 * n];
    for _ in 0..=cap {
        let mut changed = false;
        for x in 0..n {
            let mut best = inf;
            for &y in &adj[x] {
                if y == mate[x] {
                    continue;
                }
                let c = if mate[y] == NONE { 1 } else { 1 + b[2 * y + 1] };
                best = best.min(c);
            }
            if best < b[2 * x] {
                b[2 * x] = best;
                changed = true;
            }
            if mate[x] != NONE {
                let c = (1 + b[2 * mate[x]]).min(inf);
                if c < b[2 * x + 1] {
                    b[2 * x + 1] = c;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    b
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FractionalCheck {
    /// Every vertex carries total weight at most 1 and all weights are non-negative.
    pub valid: bool,
    pub size: f64,
    pub mu: usize,
    /// `valid` and `size ≤ 1.5 μ`.
    pub holds: bool,
}

/// Checks that `weights` is a fractional matching of `g` of size at most `1.5 μ(g)`.
pub fn check_fractional_bound(g: &Graph, weights: &[(Edge, f64)]) -> FractionalCheck {
    const TOL: f64 = 1e-9;
    let mut load = vec![0.0f64; g.n()];
    let mut valid = true;
    let mut size = 0.0;
    for &(e, w) in weights {
        if w < 0.0 || !g.has_edge(e.u(), e.v()) {
            valid = false;
        }
        load[e.u() as usize] += w;
        load[e.v() as usize] += w;
        size += w;
    }
    valid &= load.iter().all(|&l| l <= 1.0 + TOL);
    let mu = max_matching_exact_with_cap(g, usize::MAX).expect("uncapped").size;
    FractionalCheck {
        valid,
        size,
        mu,
        holds: valid && size <= 1.5 * mu as f64 + TOL,
    }
}

/// Underfull edges of `g` outside `h`.
pub fn underfull_edges(g: &Graph, h: &Edbs) -> Vec<Edge> {
    g.edges().filter(|&e| !h.contains(e) && h.is_underfull(e)).collect()
}

/// `H ∪ U` as an edge list.
pub fn h_union_u(g: &Graph, h: &Edbs) -> Vec<Edge> {
    g.edges().filter(|&e| h.contains(e) || h.is_underfull(e)).collect()
}

/// Edges of `H ∪ U` with both endpoints in `small`.
pub fn small_edges(g: &Graph, h: &Edbs, small: &SmallVertexSet) -> Vec<Edge> {
    h_union_u(g, h)
        .into_iter()
        .filter(|e| small.contains(e.u()) && small.contains(e.v()))
        .collect()
}
