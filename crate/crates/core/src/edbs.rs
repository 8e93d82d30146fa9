//! Edge-degree bounded subgraphs.
//!
//! `H ⊆ E` is an EDBS when no edge of `H` has `deg_u(H) + deg_v(H) > β`. An edge outside
//! `H` is underfull when that sum is below `(1 - ε)β`. [`build_edbs`] samples edges in
//! rounds, inserts underfull ones, deletes overfull ones until none remain, and stops
//! after the first round without an insertion.
//!
//! The potential `Φ = Σ_v deg(v)(β - ½) − Σ_{e∈H} deg_e` rises on every legal operation.
//! It is stored doubled so it stays an integer.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write as _;

use hashbrown::{HashMap, HashSet};

use crate::graph::{Edge, Vertex};
use crate::local::{NeighborAccess, OracleError};
use crate::math;
use crate::oracle::{ListOracle, MatrixOracle, QueryError};
use crate::sampling::{DegreeTable, SamplingError, SmallVertexSet, VStar};

pub const DEFAULT_C_BETA: f64 = 32.0;

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum EdbsError {
    #[error("invalid parameter: {0}")]
    InvalidParam(&'static str),
    #[error("insert of {edge}: {reason}")]
    BadInsert { edge: Edge, reason: &'static str },
    #[error("delete of {edge}: {reason}")]
    BadDelete { edge: Edge, reason: &'static str },
    #[error("vertex {v} out of range for n = {n}")]
    VertexOutOfRange { v: Vertex, n: usize },
    #[error("dump line {line}: {reason}")]
    Dump { line: usize, reason: String },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Params {
    epsilon: f64,
    beta: u32,
    eps_beta: u32,
}

impl Params {
    /// `β = ⌈32/ε³⌉`, raised until `εβ` is a positive integer.
    pub fn new(epsilon: f64) -> Result<Self, EdbsError> {
        Self::with_c_beta(epsilon, DEFAULT_C_BETA)
    }

    pub fn with_c_beta(epsilon: f64, c_beta: f64) -> Result<Self, EdbsError> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(EdbsError::InvalidParam("epsilon must lie in (0, 1)"));
        }
        if !(c_beta > 0.0) {
            return Err(EdbsError::InvalidParam("c_beta must be positive"));
        }
        let start = math::ceil_tol(c_beta / (epsilon * epsilon * epsilon)).max(1.0);
        if start > f64::from(u32::MAX / 2) {
            return Err(EdbsError::InvalidParam("beta too large"));
        }
        let mut beta = start as u32;
        loop {
            if let Ok(p) = Self::with_beta(epsilon, beta) {
                return Ok(p);
            }
            beta = beta
                .checked_add(1)
                .ok_or(EdbsError::InvalidParam("no beta with integral eps*beta"))?;
            if f64::from(beta) > start * 2.0 + 1.0 / epsilon + 2.0 {
                return Err(EdbsError::InvalidParam("no beta with integral eps*beta"));
            }
        }
    }

    /// Explicit `β`; `εβ` must be a positive integer and `β ≥ 2`.
    pub fn with_beta(epsilon: f64, beta: u32) -> Result<Self, EdbsError> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(EdbsError::InvalidParam("epsilon must lie in (0, 1)"));
        }
        if beta < 2 {
            return Err(EdbsError::InvalidParam("beta must be at least 2"));
        }
        let eb = epsilon * f64::from(beta);
        let r = math::round(eb);
        if (eb - r).abs() > 1e-9 || r < 1.0 {
            return Err(EdbsError::InvalidParam("eps*beta must be a positive integer"));
        }
        Ok(Params {
            epsilon,
            beta,
            eps_beta: r as u32,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn beta(&self) -> u32 {
        self.beta
    }

    /// `(1 - ε)β`; an edge is underfull when its edge degree is strictly below this.
    pub fn underfull_limit(&self) -> u32 {
        self.beta - self.eps_beta
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpKind {
    Insert,
    Delete,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Op {
    pub kind: OpKind,
    pub edge: Edge,
    /// `2Φ` after the operation.
    pub phi2_after: i64,
}

#[derive(Clone, Debug)]
pub struct Edbs {
    params: Params,
    edges: HashSet<Edge>,
    adj: Vec<Vec<Vertex>>,
    phi2: i64,
    log: Vec<Op>,
}

impl Edbs {
    pub fn new(n: usize, params: Params) -> Self {
        Edbs {
            params,
            edges: HashSet::new(),
            adj: alloc::vec![Vec::new(); n],
            phi2: 0,
            log: Vec::new(),
        }
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.edges.contains(&e)
    }

    pub fn degree(&self, v: Vertex) -> u32 {
        self.adj[v as usize].len() as u32
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v as usize]
    }

    /// `deg_u(H) + deg_v(H)`.
    pub fn edge_degree(&self, e: Edge) -> u32 {
        self.degree(e.u()) + self.degree(e.v())
    }

    pub fn is_underfull(&self, e: Edge) -> bool {
        self.edge_degree(e) < self.params.underfull_limit()
    }

    pub fn is_overfull(&self, e: Edge) -> bool {
        self.edge_degree(e) > self.params.beta
    }

    /// Edges in sorted order.
    pub fn edges(&self) -> Vec<Edge> {
        let mut v: Vec<Edge> = self.edges.iter().copied().collect();
        v.sort_unstable();
        v
    }

    pub fn op_log(&self) -> &[Op] {
        &self.log
    }

    /// `2Φ`, maintained incrementally.
    pub fn phi2(&self) -> i64 {
        self.phi2
    }

    /// `Φ` in its natural half-integer unit.
    pub fn phi(&self) -> f64 {
        self.phi2 as f64 / 2.0
    }

    /// `2Φ` recomputed from scratch.
    pub fn recompute_phi2(&self) -> i64 {
        let two_beta_minus_one = 2 * i64::from(self.params.beta) - 1;
        let vertex_part: i64 = self.adj.iter().map(|l| l.len() as i64).sum::<i64>() * two_beta_minus_one;
        let edge_part: i64 = self.edges.iter().map(|&e| i64::from(self.edge_degree(e))).sum();
        vertex_part - 2 * edge_part
    }

    pub fn overfull_edges(&self) -> Vec<Edge> {
        let mut v: Vec<Edge> = self.edges.iter().copied().filter(|&e| self.is_overfull(e)).collect();
        v.sort_unstable();
        v
    }

    /// Full scan: no overfull edge, degrees consistent with the edge set, and `2Φ`
    /// consistent with its definition.
    pub fn is_valid(&self) -> bool {
        let deg_sum: usize = self.adj.iter().map(Vec::len).sum();
        deg_sum == 2 * self.edges.len()
            && self
                .edges
                .iter()
                .all(|e| self.adj[e.u() as usize].contains(&e.v()) && self.adj[e.v() as usize].contains(&e.u()))
            && self.overfull_edges().is_empty()
            && self.phi2 == self.recompute_phi2()
    }

    fn check_edge(&self, e: Edge) -> Result<(), EdbsError> {
        let n = self.n();
        if e.v() as usize >= n {
            return Err(EdbsError::VertexOutOfRange { v: e.v(), n });
        }
        Ok(())
    }

    /// Inserts an underfull edge not in `H`. Returns the change in `2Φ`.
    pub fn insert(&mut self, e: Edge) -> Result<i64, EdbsError> {
        self.check_edge(e)?;
        if self.contains(e) {
            return Err(EdbsError::BadInsert {
                edge: e,
                reason: "edge already in H",
            });
        }
        if !self.is_underfull(e) {
            return Err(EdbsError::BadInsert {
                edge: e,
                reason: "edge is not underfull",
            });
        }
        Ok(self.insert_unchecked(e))
    }

    /// Deletes an overfull edge of `H`. Returns the change in `2Φ`.
    pub fn delete(&mut self, e: Edge) -> Result<i64, EdbsError> {
        self.check_edge(e)?;
        if !self.contains(e) {
            return Err(EdbsError::BadDelete {
                edge: e,
                reason: "edge not in H",
            });
        }
        if !self.is_overfull(e) {
            return Err(EdbsError::BadDelete {
                edge: e,
                reason: "edge is not overfull",
            });
        }
        Ok(self.delete_unchecked(e))
    }

    /// Inserts without checking preconditions. Used for fault injection in the
    /// verification battery; the change in `2Φ` may then be non-positive.
    #[doc(hidden)]
    pub fn insert_unchecked(&mut self, e: Edge) -> i64 {
        // With pre-insert degrees a, b: 2Φ gains 2(2β-1) from the two vertex degrees,
        // loses 2(a+1 + b+1) for e itself and 2 for each of the a + b neighbouring edges.
        let (a, b) = (i64::from(self.degree(e.u())), i64::from(self.degree(e.v())));
        let beta = i64::from(self.params.beta);
        let delta = 4 * beta - 6 - 4 * (a + b);
        self.edges.insert(e);
        self.adj[e.u() as usize].push(e.v());
        self.adj[e.v() as usize].push(e.u());
        self.phi2 += delta;
        self.log.push(Op {
            kind: OpKind::Insert,
            edge: e,
            phi2_after: self.phi2,
        });
        delta
    }

    #[doc(hidden)]
    pub fn delete_unchecked(&mut self, e: Edge) -> i64 {
        let (a, b) = (i64::from(self.degree(e.u())), i64::from(self.degree(e.v())));
        let beta = i64::from(self.params.beta);
        let delta = 4 * (a + b) - 4 * beta - 2;
        self.edges.remove(&e);
        for (x, y) in [(e.u(), e.v()), (e.v(), e.u())] {
            let l = &mut self.adj[x as usize];
            let pos = l.iter().position(|&w| w == y).expect("adjacency mirrors the edge set");
            l.swap_remove(pos);
        }
        self.phi2 += delta;
        self.log.push(Op {
            kind: OpKind::Delete,
            edge: e,
            phi2_after: self.phi2,
        });
        delta
    }

    /// Deletes overfull edges until none remain, starting from the endpoints of
    /// `around` and following the endpoints of every deleted edge. Returns the number
    /// of deletions.
    pub fn restore(&mut self, around: Edge) -> usize {
        let mut work: VecDeque<Vertex> = VecDeque::from([around.u(), around.v()]);
        let mut deleted = 0;
        while let Some(x) = work.pop_front() {
            let mut i = 0;
            while i < self.adj[x as usize].len() {
                let y = self.adj[x as usize][i];
                let e = Edge::new(x, y);
                if self.is_overfull(e) {
                    self.delete_unchecked(e);
                    deleted += 1;
                    work.push_back(x);
                    work.push_back(y);
                } else {
                    i += 1;
                }
            }
        }
        deleted
    }

    /// Text dump: a header, the operation log and the final edge set.
    pub fn to_dump(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "edbs n={} epsilon={} beta={}",
            self.n(),
            self.params.epsilon,
            self.params.beta
        );
        for op in &self.log {
            let tag = match op.kind {
                OpKind::Insert => '+',
                OpKind::Delete => '-',
            };
            let _ = writeln!(s, "{} {} {} {}", tag, op.edge.u(), op.edge.v(), op.phi2_after);
        }
        for e in self.edges() {
            let _ = writeln!(s, "h {} {}", e.u(), e.v());
        }
        s
    }

    /// Replays a dump, checking every operation's precondition, the logged `2Φ` values
    /// and the final edge set.
    pub fn from_dump(text: &str) -> Result<Edbs, EdbsError> {
        let bad = |line: usize, reason: String| EdbsError::Dump { line, reason };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or_else(|| bad(1, "empty dump".into()))?;
        let mut fields: HashMap<&str, &str> = HashMap::new();
        let mut words = header.split_whitespace();
        if words.next() != Some("edbs") {
            return Err(bad(1, "missing `edbs` header".into()));
        }
        for w in words {
            let (k, v) = w.split_once('=').ok_or_else(|| bad(1, format!("bad field `{w}`")))?;
            fields.insert(k, v);
        }
        let get = |k: &str| fields.get(k).copied().ok_or_else(|| bad(1, format!("missing `{k}`")));
        let n: usize = get("n")?.parse().map_err(|_| bad(1, "bad n".into()))?;
        let epsilon: f64 = get("epsilon")?.parse().map_err(|_| bad(1, "bad epsilon".into()))?;
        let beta: u32 = get("beta")?.parse().map_err(|_| bad(1, "bad beta".into()))?;
        let mut h = Edbs::new(n, Params::with_beta(epsilon, beta)?);
        let mut finals: Vec<Edge> = Vec::new();
        for (idx, line) in lines {
            let lineno = idx + 1;
            let parts: Vec<&str> = line.split_whitespace().collect();
            let num = |i: usize| -> Result<i64, EdbsError> {
                parts
                    .get(i)
                    .and_then(|p| p.parse().ok())
                    .ok_or_else(|| bad(lineno, "bad number".into()))
            };
            let vertex = |i: usize| -> Result<Vertex, EdbsError> {
                let x = num(i)?;
                if x < 0 || x as usize >= n {
                    return Err(bad(lineno, "vertex out of range".into()));
                }
                Ok(x as Vertex)
            };
            let edge = |_: ()| -> Result<Edge, EdbsError> {
                Edge::try_new(vertex(1)?, vertex(2)?).ok_or_else(|| bad(lineno, "self-loop".into()))
            };
            match parts.first().copied() {
                Some("+") | Some("-") => {
                    let e = edge(())?;
                    let logged = num(3)?;
                    if parts[0] == "+" {
                        h.insert(e).map_err(|err| bad(lineno, format!("{err}")))?;
                    } else {
                        h.delete(e).map_err(|err| bad(lineno, format!("{err}")))?;
                    }
                    if h.phi2 != logged {
                        return Err(bad(lineno, format!("logged 2Phi {logged}, replay gives {}", h.phi2)));
                    }
                }
                Some("h") => finals.push(edge(())?),
                _ => return Err(bad(lineno, format!("unrecognised line `{line}`"))),
            }
        }
        finals.sort_unstable();
        if finals != h.edges() {
            return Err(bad(0, "final edge set differs from the replayed log".into()));
        }
        Ok(h)
    }
}

/// Checks that every logged operation raised `2Φ` by at least 2. Returns the index of
/// the first violating operation.
pub fn check_phi_monotone(log: &[Op]) -> Result<(), usize> {
    let mut prev = 0i64;
    for (i, op) in log.iter().enumerate() {
        if op.phi2_after - prev < 2 {
            return Err(i);
        }
        prev = op.phi2_after;
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SchematicParams {
    pub mu_star: f64,
    pub m_star: f64,
    pub delta_star: f64,
    pub gamma: f64,
    pub scale: f64,
}

impl SchematicParams {
    /// `L = ⌈scale · 100 · m* · ln n / (μ* (Δ*)^γ)⌉`, or 0 when `m* ≤ 0`.
    pub fn round_length(&self, n: usize) -> Result<u64, EdbsError> {
        if !(self.m_star > 0.0) {
            return Ok(0);
        }
        if !(self.mu_star > 0.0) {
            return Err(EdbsError::InvalidParam("mu_star must be positive when m_star is"));
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(EdbsError::InvalidParam("gamma must lie in (0, 1)"));
        }
        let d = math::powf(self.delta_star.max(1.0), self.gamma);
        let l = self.scale * 100.0 * self.m_star * math::ln((n as f64).max(2.0)) / (self.mu_star * d);
        Ok(math::to_count(math::ceil(l)).max(1))
    }
}

#[derive(Clone, Debug)]
pub struct BuildOutcome {
    pub edbs: Edbs,
    pub rounds: u64,
    pub samples: u64,
    pub round_length: u64,
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum BuildError {
    #[error(transparent)]
    Sampling(#[from] SamplingError),
    #[error(transparent)]
    Edbs(#[from] EdbsError),
}

/// The round loop: each round draws `L` edges; underfull ones outside `H` are inserted
/// and `H` is restored. Stops after the first round with no insertion.
pub fn build_edbs<S>(n: usize, sp: &SchematicParams, params: Params, mut sampler: S) -> Result<BuildOutcome, BuildError>
where
    S: FnMut() -> Result<Edge, SamplingError>,
{
    let l = sp.round_length(n)?;
    let mut h = Edbs::new(n, params);
    let mut rounds = 0;
    let mut samples = 0;
    loop {
        rounds += 1;
        let mut dirty = false;
        for _ in 0..l {
            let e = sampler()?;
            samples += 1;
            if !h.contains(e) && h.is_underfull(e) {
                h.insert_unchecked(e);
                h.restore(e);
                dirty = true;
            }
        }
        if !dirty {
            break;
        }
    }
    Ok(BuildOutcome {
        edbs: h,
        rounds,
        samples,
        round_length: l,
    })
}

/// How a [`SmallSubgraph`] reaches the underlying graph.
#[derive(Clone, Copy)]
pub enum SmallAccess<'a, 'g> {
    Matrix(&'a MatrixOracle<'g>),
    List(&'a ListOracle<'g>, &'a DegreeTable),
    Hybrid(&'a ListOracle<'g>, &'a DegreeTable, &'a VStar),
}

/// `G_small`: the edges of `H ∪ U` with both endpoints in `V_small`, exposed through a
/// cached virtual adjacency list.
pub struct SmallSubgraph<'a, 'g> {
    h: &'a Edbs,
    small: &'a SmallVertexSet,
    access: SmallAccess<'a, 'g>,
    cache: HashMap<Vertex, Vec<Vertex>>,
}

impl<'a, 'g> SmallSubgraph<'a, 'g> {
    pub fn new(h: &'a Edbs, small: &'a SmallVertexSet, access: SmallAccess<'a, 'g>) -> Self {
        SmallSubgraph {
            h,
            small,
            access,
            cache: HashMap::new(),
        }
    }

    pub fn small(&self) -> &SmallVertexSet {
        self.small
    }

    fn keeps(&self, u: Vertex, v: Vertex) -> bool {
        let e = Edge::new(u, v);
        self.small.contains(u) && self.small.contains(v) && (self.h.contains(e) || self.h.is_underfull(e))
    }

    /// Membership of `{u, v}` in `E_small`. With `edge_known = None` the matrix backend
    /// spends one query to learn whether `{u, v} ∈ E`; list backends require the caller
    /// to pass `Some`.
    pub fn membership(&mut self, u: Vertex, v: Vertex, edge_known: Option<bool>) -> Result<bool, QueryError> {
        if u == v || !self.small.contains(u) || !self.small.contains(v) {
            return Ok(false);
        }
        let in_e = match (edge_known, self.access) {
            (Some(b), _) => b,
            (None, SmallAccess::Matrix(o)) => o.query(u, v)?,
            (None, _) => panic!("list-backed membership needs the edge status from the caller"),
        };
        Ok(in_e && self.keeps(u, v))
    }

    fn materialize(&mut self, v: Vertex) -> Result<&[Vertex], QueryError> {
        if !self.cache.contains_key(&v) {
            let mut out = Vec::new();
            match self.access {
                SmallAccess::Matrix(o) => {
                    for w in 0..o.n() as Vertex {
                        if w != v && o.query(v, w)? && self.keeps(v, w) {
                            out.push(w);
                        }
                    }
                }
                SmallAccess::List(o, dt) | SmallAccess::Hybrid(o, dt, _) => {
                    for i in 1..=dt.degree(v) as usize {
                        let w = o.query(v, i)?.expect("degree table is exact");
                        if self.keeps(v, w) {
                            out.push(w);
                        }
                    }
                }
            }
            self.cache.insert(v, out);
        }
        Ok(&self.cache[&v])
    }

    /// The `i`-th (1-based) `E_small` neighbour of `v`, or `None`. The first access to
    /// `v` scans all of `v`'s potential neighbours; later accesses are free.
    pub fn list_query(&mut self, v: Vertex, i: usize) -> Result<Option<Vertex>, QueryError> {
        if !self.small.contains(v) || i == 0 {
            return Ok(None);
        }
        Ok(self.materialize(v)?.get(i - 1).copied())
    }

    pub fn neighbors_of(&mut self, v: Vertex) -> Result<Vec<Vertex>, QueryError> {
        if !self.small.contains(v) {
            return Ok(Vec::new());
        }
        Ok(self.materialize(v)?.to_vec())
    }

    pub fn cached_vertices(&self) -> usize {
        self.cache.len()
    }
}

impl NeighborAccess for SmallSubgraph<'_, '_> {
    fn neighbors(&mut self, v: Vertex) -> Result<Vec<Vertex>, OracleError> {
        Ok(self.neighbors_of(v)?)
    }
}

impl NeighborAccess for &mut SmallSubgraph<'_, '_> {
    fn neighbors(&mut self, v: Vertex) -> Result<Vec<Vertex>, OracleError> {
        Ok(self.neighbors_of(v)?)
    }
}
