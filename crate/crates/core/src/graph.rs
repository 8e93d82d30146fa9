//! Ground-truth graph storage.
//!
//! A [`Graph`] is simple and undirected with vertices `0..n`. It keeps each adjacency
//! list in the order the list oracle reveals it, plus a sorted copy for pair lookups.
//! Estimators never hold a `&Graph`; they receive an oracle wrapping one.

use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;

use crate::seed::Seed;

pub type Vertex = u32;

/// Undirected edge stored with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    u: Vertex,
    v: Vertex,
}

impl Edge {
    /// Normalises the endpoint order. Panics on a self-loop.
    pub fn new(a: Vertex, b: Vertex) -> Self {
        Self::try_new(a, b).expect("self-loop is not an edge")
    }

    pub fn try_new(a: Vertex, b: Vertex) -> Option<Self> {
        match a.cmp(&b) {
            core::cmp::Ordering::Less => Some(Edge { u: a, v: b }),
            core::cmp::Ordering::Greater => Some(Edge { u: b, v: a }),
            core::cmp::Ordering::Equal => None,
        }
    }

    pub fn u(self) -> Vertex {
        self.u
    }

    pub fn v(self) -> Vertex {
        self.v
    }

    pub fn endpoints(self) -> (Vertex, Vertex) {
        (self.u, self.v)
    }

    pub fn touches(self, x: Vertex) -> bool {
        self.u == x || self.v == x
    }

    /// The endpoint that is not `x`. `x` must be an endpoint.
    pub fn other(self, x: Vertex) -> Vertex {
        debug_assert!(self.touches(x));
        if self.u == x {
            self.v
        } else {
            self.u
        }
    }

    pub fn shares_endpoint(self, f: Edge) -> bool {
        self.touches(f.u) || self.touches(f.v)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.u, self.v)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("vertex {v} out of range for n = {n}")]
    VertexOutOfRange { v: Vertex, n: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("duplicate edge {0}")]
    DuplicateEdge(Edge),
    #[error("n = {0} exceeds the supported vertex range")]
    TooManyVertices(usize),
}

/// How adjacency lists are ordered for list queries.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum ListOrder {
    /// Every list sorted by vertex id.
    Global,
    /// Every list independently shuffled from a seeded stream.
    #[default]
    PerVertexRandom,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GraphStats {
    pub n: usize,
    pub m: usize,
    pub max_degree: u32,
    pub avg_degree: f64,
}

#[derive(Clone, Debug)]
pub struct Graph {
    adj: Vec<Vec<Vertex>>,
    sorted: Vec<Vec<Vertex>>,
    m: usize,
    order: ListOrder,
}

impl Graph {
    /// Builds a graph with lists in global order. Rejects self-loops, duplicate edges
    /// and out-of-range endpoints.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        if n > Vertex::MAX as usize {
            return Err(GraphError::TooManyVertices(n));
        }
        let mut adj: Vec<Vec<Vertex>> = alloc::vec![Vec::new(); n];
        let mut m = 0usize;
        for (a, b) in edges {
            for x in [a, b] {
                if x as usize >= n {
                    return Err(GraphError::VertexOutOfRange { v: x, n });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            adj[a as usize].push(b);
            adj[b as usize].push(a);
            m += 1;
        }
        let mut sorted = adj.clone();
        for (x, list) in sorted.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                return Err(GraphError::DuplicateEdge(Edge::new(x as Vertex, w[0])));
            }
        }
        Ok(Graph {
            adj: sorted.clone(),
            sorted,
            m,
            order: ListOrder::Global,
        })
    }

    pub fn from_edge_list(n: usize, edges: &[Edge]) -> Result<Self, GraphError> {
        Self::from_edges(n, edges.iter().map(|e| e.endpoints()))
    }

    /// Reorders the adjacency lists. `seed` is only used by [`ListOrder::PerVertexRandom`].
    pub fn with_list_order(mut self, order: ListOrder, seed: Seed) -> Self {
        match order {
            ListOrder::Global => self.adj.clone_from(&self.sorted),
            ListOrder::PerVertexRandom => {
                let mut rng = seed.derive("list-order").rng();
                for (list, sorted) in self.adj.iter_mut().zip(&self.sorted) {
                    list.clone_from(sorted);
                    list.shuffle(&mut rng);
                }
            }
        }
        self.order = order;
        self
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn list_order(&self) -> ListOrder {
        self.order
    }

    pub fn degree(&self, v: Vertex) -> u32 {
        self.adj[v as usize].len() as u32
    }

    /// Neighbours of `v` in list-oracle order.
    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v as usize]
    }

    pub fn has_edge(&self, a: Vertex, b: Vertex) -> bool {
        let (a, b) = (a as usize, b as usize);
        if a >= self.n() || b >= self.n() || a == b {
            return false;
        }
        let (x, y) = if self.sorted[a].len() <= self.sorted[b].len() {
            (a, b)
        } else {
            (b, a)
        };
        self.sorted[x].binary_search(&(y as Vertex)).is_ok()
    }

    /// All edges in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.sorted.iter().enumerate().flat_map(|(u, list)| {
            let u = u as Vertex;
            list.iter().filter(move |&&w| w > u).map(move |&w| Edge::new(u, w))
        })
    }

    /// Summary statistics. For verification and reporting only; estimators learn these
    /// through queries.
    pub fn stats(&self) -> GraphStats {
        let n = self.n();
        let max_degree = self.adj.iter().map(|l| l.len() as u32).max().unwrap_or(0);
        let avg_degree = if n == 0 { 0.0 } else { 2.0 * self.m as f64 / n as f64 };
        GraphStats {
            n,
            m: self.m,
            max_degree,
            avg_degree,
        }
    }

    /// Subgraph on the same vertex set keeping edges for which `keep` holds.
    pub fn filter_edges<F: FnMut(Edge) -> bool>(&self, mut keep: F) -> Graph {
        let edges: Vec<Edge> = self.edges().filter(|&e| keep(e)).collect();
        Graph::from_edge_list(self.n(), &edges).expect("subgraph of a simple graph is simple")
    }
}
