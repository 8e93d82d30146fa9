//! Counted query-model adapters.
//!
//! [`MatrixOracle`] answers `{u, v} ∈ E?` and [`ListOracle`] answers "the i-th neighbour
//! of v, or ⊥". Each call that passes argument validation increments the oracle's counter
//! by exactly one. The wrapped graph is private, so holding an oracle gives no other way
//! to read it.

use core::cell::Cell;
use core::ops::{Add, Sub};

use crate::graph::{Graph, Vertex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, thiserror::Error)]
pub enum QueryError {
    #[error("vertex {v} out of range for n = {n}")]
    VertexOutOfRange { v: Vertex, n: usize },
    #[error("matrix query on the pair ({0}, {0})")]
    SamePair(Vertex),
    #[error("list index {i} outside [1, {n}]")]
    IndexOutOfRange { i: usize, n: usize },
}

/// Snapshot of query counts by kind.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QueryCounters {
    pub matrix_queries: u64,
    pub list_queries: u64,
}

impl QueryCounters {
    pub fn total(self) -> u64 {
        self.matrix_queries + self.list_queries
    }
}

impl Add for QueryCounters {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        QueryCounters {
            matrix_queries: self.matrix_queries + o.matrix_queries,
            list_queries: self.list_queries + o.list_queries,
        }
    }
}

impl Sub for QueryCounters {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        QueryCounters {
            matrix_queries: self.matrix_queries - o.matrix_queries,
            list_queries: self.list_queries - o.list_queries,
        }
    }
}

fn check_vertex(g: &Graph, v: Vertex) -> Result<(), QueryError> {
    if (v as usize) < g.n() {
        Ok(())
    } else {
        Err(QueryError::VertexOutOfRange { v, n: g.n() })
    }
}

pub struct MatrixOracle<'g> {
    graph: &'g Graph,
    count: Cell<u64>,
}

impl<'g> MatrixOracle<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        MatrixOracle {
            graph,
            count: Cell::new(0),
        }
    }

    /// Number of vertices, which both query models reveal up front.
    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn query(&self, u: Vertex, v: Vertex) -> Result<bool, QueryError> {
        check_vertex(self.graph, u)?;
        check_vertex(self.graph, v)?;
        if u == v {
            return Err(QueryError::SamePair(u));
        }
        self.count.set(self.count.get() + 1);
        Ok(self.graph.has_edge(u, v))
    }

    pub fn queries(&self) -> u64 {
        self.count.get()
    }

    pub fn counters(&self) -> QueryCounters {
        QueryCounters {
            matrix_queries: self.count.get(),
            list_queries: 0,
        }
    }
}

pub struct ListOracle<'g> {
    graph: &'g Graph,
    count: Cell<u64>,
}

impl<'g> ListOracle<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        ListOracle {
            graph,
            count: Cell::new(0),
        }
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    /// The `i`-th neighbour of `v` (1-based), or `None` past the degree.
    pub fn query(&self, v: Vertex, i: usize) -> Result<Option<Vertex>, QueryError> {
        check_vertex(self.graph, v)?;
        if i == 0 || i > self.graph.n() {
            return Err(QueryError::IndexOutOfRange { i, n: self.graph.n() });
        }
        self.count.set(self.count.get() + 1);
        Ok(self.graph.neighbors(v).get(i - 1).copied())
    }

    pub fn queries(&self) -> u64 {
        self.count.get()
    }

    pub fn counters(&self) -> QueryCounters {
        QueryCounters {
            matrix_queries: 0,
            list_queries: self.count.get(),
        }
    }
}
