//! Query-model building blocks: edge-count estimation, uniform edge samplers for both
//! models, degree discovery, and the `V_small` classifier.
//!
//! Logarithms are natural. `scale` multiplies the polylogarithmic sampling constants.

use alloc::vec::Vec;

use rand::Rng as _;

use crate::edbs::Edbs;
use crate::graph::{Edge, Vertex};
use crate::math;
use crate::oracle::{ListOracle, MatrixOracle, QueryError};
use crate::seed::Rng;

#[derive(Clone, Copy, Debug, PartialEq, thiserror::Error)]
pub enum SamplingError {
    #[error(transparent)]
    Query(#[from] QueryError),
    #[error("no edge found in {attempts} attempts; the graph is likely empty")]
    LikelyEmpty { attempts: u64 },
    #[error("the graph has no edges")]
    EmptyGraph,
    #[error("invalid parameter: {0}")]
    InvalidParam(&'static str),
}

pub(crate) fn check_epsilon(epsilon: f64) -> Result<(), SamplingError> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(SamplingError::InvalidParam("epsilon must lie in (0, 1)"))
    }
}

pub(crate) fn check_scale(scale: f64) -> Result<(), SamplingError> {
    if scale > 0.0 && scale.is_finite() {
        Ok(())
    } else {
        Err(SamplingError::InvalidParam("scale must be positive"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeCountEstimate {
    pub m_hat: f64,
    /// Sampled pairs that were edges.
    pub hits: u64,
    /// Sampled pairs.
    pub samples: u64,
    pub epsilon: f64,
}

/// `S = ⌈scale · (100/ε³) · n · ln n⌉`.
pub fn edge_count_samples(n: usize, epsilon: f64, scale: f64) -> u64 {
    if n < 2 {
        return 0;
    }
    let nf = n as f64;
    math::to_count(math::ceil(
        scale * 100.0 / (epsilon * epsilon * epsilon) * nf * math::ln(nf),
    ))
}

/// Samples `S` ordered pairs from `V × V` with repetition and counts hits, where a hit is
/// `u < v` with `{u, v} ∈ E`, so each draw hits with probability `m / n²`. Only draws
/// with `u < v` spend a query. Returns `m̂ = (1 + ε) X n² / S + ε n`.
pub fn estimate_edge_count(
    o: &MatrixOracle<'_>,
    epsilon: f64,
    scale: f64,
    rng: &mut Rng,
) -> Result<EdgeCountEstimate, SamplingError> {
    check_epsilon(epsilon)?;
    check_scale(scale)?;
    let n = o.n();
    let s = edge_count_samples(n, epsilon, scale);
    let mut hits = 0u64;
    for _ in 0..s {
        let u = rng.random_range(0..n as Vertex);
        let v = rng.random_range(0..n as Vertex);
        if u < v && o.query(u, v)? {
            hits += 1;
        }
    }
    let nf = n as f64;
    let m_hat = if s == 0 {
        epsilon * nf
    } else {
        (1.0 + epsilon) * hits as f64 * nf * nf / s as f64 + epsilon * nf
    };
    Ok(EdgeCountEstimate {
        m_hat,
        hits,
        samples: s,
        epsilon,
    })
}

/// Attempt cap `64 n² / max(1, m̂)` for [`sample_edge_matrix`].
pub fn matrix_attempt_cap(n: usize, m_hat_floor: f64) -> u64 {
    let nf = n as f64;
    math::to_count(math::ceil(64.0 * nf * nf / m_hat_floor.max(1.0))).max(1)
}

/// Rejection sampling over uniform distinct pairs until one is an edge. Uniform on `E`.
/// Returns the edge and the number of attempts, each of which is one matrix query.
pub fn sample_edge_matrix(o: &MatrixOracle<'_>, m_hat_floor: f64, rng: &mut Rng) -> Result<(Edge, u64), SamplingError> {
    let n = o.n();
    let cap = matrix_attempt_cap(n, m_hat_floor);
    if n < 2 {
        return Err(SamplingError::LikelyEmpty { attempts: 0 });
    }
    for attempt in 1..=cap {
        let u = rng.random_range(0..n as Vertex);
        let mut v = rng.random_range(0..n as Vertex - 1);
        if v >= u {
            v += 1;
        }
        if o.query(u, v)? {
            return Ok((Edge::new(u, v), attempt));
        }
    }
    Err(SamplingError::LikelyEmpty { attempts: cap })
}

/// Exact degrees discovered through list queries.
#[derive(Clone, Debug, PartialEq)]
pub struct DegreeTable {
    degrees: Vec<u32>,
    /// `cumulative[v]` is the sum of degrees of vertices `< v`; length `n + 1`.
    cumulative: Vec<u64>,
    max_degree: u32,
    queries: u64,
}

/// Finds every degree by binary search for the largest `i` whose list query is not `⊥`.
pub fn build_degree_table(o: &ListOracle<'_>) -> Result<DegreeTable, SamplingError> {
    let n = o.n();
    let before = o.queries();
    let mut degrees = Vec::with_capacity(n);
    for v in 0..n as Vertex {
        // Invariant: deg ≥ lo and deg < hi.
        let (mut lo, mut hi) = (0usize, n);
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if o.query(v, mid)?.is_some() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        degrees.push(lo as u32);
    }
    let mut cumulative = Vec::with_capacity(n + 1);
    let mut acc = 0u64;
    cumulative.push(0);
    for &d in &degrees {
        acc += u64::from(d);
        cumulative.push(acc);
    }
    let max_degree = degrees.iter().copied().max().unwrap_or(0);
    Ok(DegreeTable {
        degrees,
        cumulative,
        max_degree,
        queries: o.queries() - before,
    })
}

impl DegreeTable {
    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    pub fn degree(&self, v: Vertex) -> u32 {
        self.degrees[v as usize]
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    pub fn m(&self) -> u64 {
        self.cumulative.last().copied().unwrap_or(0) / 2
    }

    pub fn max_degree(&self) -> u32 {
        self.max_degree
    }

    pub fn avg_degree(&self) -> f64 {
        if self.n() == 0 {
            0.0
        } else {
            2.0 * self.m() as f64 / self.n() as f64
        }
    }

    /// List queries spent building the table.
    pub fn queries(&self) -> u64 {
        self.queries
    }
}

/// Picks `v` with probability `deg_v / 2m` and a uniform index into its list, then makes
/// one list query. Uniform on `E`.
pub fn sample_edge_list(dt: &DegreeTable, o: &ListOracle<'_>, rng: &mut Rng) -> Result<Edge, SamplingError> {
    let total = dt.cumulative.last().copied().unwrap_or(0);
    if total == 0 {
        return Err(SamplingError::EmptyGraph);
    }
    let r = rng.random_range(0..total);
    // Largest v with cumulative[v] ≤ r.
    let v = dt.cumulative.partition_point(|&c| c <= r) - 1;
    let i = (r - dt.cumulative[v]) as usize + 1;
    let w = o.query(v as Vertex, i)?.expect("degree table is exact");
    Ok(Edge::new(v as Vertex, w))
}

/// The vertices eligible for classification in the hybrid mode: degree at most
/// `⌊d/ε⌋`.
#[derive(Clone, Debug, PartialEq)]
pub struct VStar {
    members: Vec<bool>,
    cap: u32,
}

impl VStar {
    pub fn from_degrees(dt: &DegreeTable, epsilon: f64) -> Self {
        let cap = math::floor(dt.avg_degree() / epsilon + 1e-9) as u32;
        VStar {
            members: dt.degrees().iter().map(|&d| d <= cap).collect(),
            cap,
        }
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.members[v as usize]
    }

    /// `⌊d/ε⌋`.
    pub fn degree_cap(&self) -> u32 {
        self.cap
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn excluded(&self) -> usize {
        self.members.len() - self.len()
    }
}

#[derive(Clone, Copy)]
pub enum ClassifyMode<'a, 'g> {
    /// Partners are uniform vertices; one matrix query each.
    Matrix(&'a MatrixOracle<'g>),
    /// Partners are list slots `1..=Δ`; slots past `deg_v` are misses.
    List(&'a ListOracle<'g>, &'a DegreeTable),
    /// As `List` with slots `1..=⌊d/ε⌋`, restricted to `V*`, counting only partners in `V*`.
    Hybrid(&'a ListOracle<'g>, &'a DegreeTable, &'a VStar),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ClassifyStrategy {
    /// Scan the whole partner population exactly when that is no more expensive than
    /// sampling it.
    #[default]
    Auto,
    /// Always sample.
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClassifyParams {
    pub epsilon: f64,
    pub gamma: f64,
    /// `Δ*`: `n` in matrix mode, `Δ` in list mode, `d` in hybrid mode.
    pub delta_star: f64,
    pub scale: f64,
    pub strategy: ClassifyStrategy,
}

impl ClassifyParams {
    /// Samples per vertex: `⌈scale · (100/ε) · (Δ*)^(1-γ) · ln n⌉`, with an extra `1/ε`
    /// in hybrid mode where the partner population is `d/ε` rather than `Δ*`.
    pub fn samples_per_vertex(&self, n: usize, hybrid: bool) -> u64 {
        let extra = if hybrid { 1.0 / self.epsilon } else { 1.0 };
        let k = self.scale * 100.0 / self.epsilon
            * extra
            * math::powf(self.delta_star, 1.0 - self.gamma)
            * math::ln((n as f64).max(2.0));
        math::to_count(math::ceil(k))
    }

    /// `τ = scale · (100/ε²) · ln n`.
    pub fn tau(&self, n: usize) -> f64 {
        self.scale * 100.0 / (self.epsilon * self.epsilon) * math::ln((n as f64).max(2.0))
    }

    /// `θ = (Δ*)^γ / ε`, the `U`-degree threshold the sampled test approximates.
    pub fn theta(&self) -> f64 {
        math::powf(self.delta_star, self.gamma) / self.epsilon
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ClassifyMethod {
    Sampled,
    Exhaustive,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SmallVertexSet {
    members: Vec<bool>,
    hits: Vec<u64>,
    method: Vec<Option<ClassifyMethod>>,
    samples_per_vertex: u64,
    tau: f64,
    theta: f64,
    population: u64,
}

impl SmallVertexSet {
    /// Every vertex is small. For tests and for graphs where classification is moot.
    pub fn all(n: usize) -> Self {
        SmallVertexSet {
            members: alloc::vec![true; n],
            hits: alloc::vec![0; n],
            method: alloc::vec![None; n],
            samples_per_vertex: 0,
            tau: 0.0,
            theta: 0.0,
            population: 0,
        }
    }

    pub fn from_members(members: Vec<bool>) -> Self {
        let n = members.len();
        SmallVertexSet {
            members,
            ..Self::all(n)
        }
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.members[v as usize]
    }

    pub fn members(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.members
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(v, _)| v as Vertex)
    }

    pub fn len(&self) -> usize {
        self.members.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Sampled hit count `X_v`, or the exact `U`-degree for exhaustively scanned vertices.
    pub fn hits(&self, v: Vertex) -> u64 {
        self.hits[v as usize]
    }

    pub fn method(&self, v: Vertex) -> Option<ClassifyMethod> {
        self.method[v as usize]
    }

    pub fn samples_per_vertex(&self) -> u64 {
        self.samples_per_vertex
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn population(&self) -> u64 {
        self.population
    }
}

/// Classifies vertices as small (few incident `U` edges) or not.
///
/// A partner `w` of `v` is a hit when `{v, w} ∈ E ∖ H` and is underfull w.r.t. `H`.
/// Sampled vertices are small iff `X_v ≤ τ`; exhaustively scanned vertices are small iff
/// `deg_v(U) ≤ θ`.
pub fn classify_v_small(
    mode: ClassifyMode<'_, '_>,
    h: &Edbs,
    params: &ClassifyParams,
    rng: &mut Rng,
) -> Result<SmallVertexSet, SamplingError> {
    let n = h.n();
    let hybrid = matches!(mode, ClassifyMode::Hybrid(..));
    let k = params.samples_per_vertex(n, hybrid);
    let tau = params.tau(n);
    let theta = params.theta();
    let population: u64 = match mode {
        ClassifyMode::Matrix(_) => n as u64,
        ClassifyMode::List(_, dt) => u64::from(dt.max_degree()),
        ClassifyMode::Hybrid(_, _, vs) => u64::from(vs.degree_cap()),
    };
    let exhaustive = params.strategy == ClassifyStrategy::Auto && k >= population;
    let hit = |v: Vertex, w: Vertex| {
        let e = Edge::new(v, w);
        !h.contains(e) && h.is_underfull(e)
    };

    let mut out = SmallVertexSet {
        members: alloc::vec![false; n],
        hits: alloc::vec![0; n],
        method: alloc::vec![None; n],
        samples_per_vertex: k,
        tau,
        theta,
        population,
    };
    for v in 0..n as Vertex {
        if let ClassifyMode::Hybrid(_, _, vs) = mode {
            if !vs.contains(v) {
                continue;
            }
        }
        let mut x = 0u64;
        if exhaustive {
            match mode {
                ClassifyMode::Matrix(o) => {
                    for w in 0..n as Vertex {
                        if w != v && o.query(v, w)? && hit(v, w) {
                            x += 1;
                        }
                    }
                }
                ClassifyMode::List(o, dt) | ClassifyMode::Hybrid(o, dt, _) => {
                    for i in 1..=dt.degree(v) as usize {
                        let w = o.query(v, i)?.expect("degree table is exact");
                        let eligible = match mode {
                            ClassifyMode::Hybrid(_, _, vs) => vs.contains(w),
                            _ => true,
                        };
                        if eligible && hit(v, w) {
                            x += 1;
                        }
                    }
                }
            }
            out.members[v as usize] = x as f64 <= theta;
            out.method[v as usize] = Some(ClassifyMethod::Exhaustive);
        } else {
            if population > 0 {
                for _ in 0..k {
                    let found = match mode {
                        ClassifyMode::Matrix(o) => {
                            let w = rng.random_range(0..n as Vertex);
                            w != v && o.query(v, w)? && hit(v, w)
                        }
                        ClassifyMode::List(o, dt) | ClassifyMode::Hybrid(o, dt, _) => {
                            let i = rng.random_range(1..=population) as usize;
                            if i > dt.degree(v) as usize {
                                false
                            } else {
                                let w = o.query(v, i)?.expect("degree table is exact");
                                let eligible = match mode {
                                    ClassifyMode::Hybrid(_, _, vs) => vs.contains(w),
                                    _ => true,
                                };
                                eligible && hit(v, w)
                            }
                        }
                    };
                    if found {
                        x += 1;
                    }
                }
            }
            out.members[v as usize] = x as f64 <= tau;
            out.method[v as usize] = Some(ClassifyMethod::Sampled);
        }
        out.hits[v as usize] = x;
    }
    Ok(out)
}
