//! Instance generators. Every generator is a pure function of its kind, parameters and
//! seed, and returns lists in per-vertex random order. Reading graphs from files lives in the std crate.

use alloc::vec::Vec;

use hashbrown::HashSet;
use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::graph::{Edge, Graph, GraphError, ListOrder, Vertex};
use crate::math;
use crate::seed::Seed;

#[derive(Clone, Debug, PartialEq)]
pub enum GraphKind {
    Empty {
        n: usize,
    },
    Complete {
        n: usize,
    },
    /// Path on `n` vertices.
    Path {
        n: usize,
    },
    Cycle {
        n: usize,
    },
    /// Centre 0 joined to `leaves` leaves.
    Star {
        leaves: usize,
    },
    Petersen,
    ErdosRenyi {
        n: usize,
        p: f64,
    },
    /// Left side `0..left`, right side `left..left + right`.
    RandomBipartite {
        left: usize,
        right: usize,
        p: f64,
    },
    /// Sides `L`, `R` of size `n` joined by a perfect matching, plus a set `U` of
    /// `round(epsilon * n / 2)` vertices adjacent to every vertex of `L ∪ R`.
    HiddenPerfectMatching {
        n: usize,
        epsilon: f64,
    },
    RandomRegular {
        n: usize,
        d: usize,
    },
    /// Clique on `clique` vertices with a path of `path` further vertices hanging off it.
    Lollipop {
        clique: usize,
        path: usize,
    },
    /// `pairs` disjoint edges.
    PerfectMatching {
        pairs: usize,
    },
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum GenerateError {
    #[error("invalid parameter: {0}")]
    InvalidParam(&'static str),
    #[error("random regular pairing failed after {0} restarts")]
    PairingFailed(u32),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn check_p(p: f64) -> Result<(), GenerateError> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(GenerateError::InvalidParam("p must lie in [0, 1]"))
    }
}

fn check_n(n: usize) -> Result<(), GenerateError> {
    if n >= 1 {
        Ok(())
    } else {
        Err(GenerateError::InvalidParam("n must be at least 1"))
    }
}

pub fn generate(kind: &GraphKind, seed: Seed) -> Result<Graph, GenerateError> {
    let mut rng = seed.derive("generate").rng();
    let (n, edges): (usize, Vec<(Vertex, Vertex)>) = match *kind {
        GraphKind::Empty { n } => {
            check_n(n)?;
            (n, Vec::new())
        }
        GraphKind::Complete { n } => {
            check_n(n)?;
            let mut e = Vec::new();
            for u in 0..n as Vertex {
                for v in u + 1..n as Vertex {
                    e.push((u, v));
                }
            }
            (n, e)
        }
        GraphKind::Path { n } => {
            check_n(n)?;
            (n, (1..n as Vertex).map(|v| (v - 1, v)).collect())
        }
        GraphKind::Cycle { n } => {
            if n < 3 {
                return Err(GenerateError::InvalidParam("a cycle needs n >= 3"));
            }
            let mut e: Vec<_> = (1..n as Vertex).map(|v| (v - 1, v)).collect();
            e.push((0, n as Vertex - 1));
            (n, e)
        }
        GraphKind::Star { leaves } => (leaves + 1, (1..=leaves as Vertex).map(|v| (0, v)).collect()),
        GraphKind::Petersen => {
            let mut e = Vec::new();
            for i in 0..5 {
                e.push((i, (i + 1) % 5));
                e.push((i, i + 5));
                e.push((i + 5, (i + 2) % 5 + 5));
            }
            (10, e)
        }
        GraphKind::ErdosRenyi { n, p } => {
            check_n(n)?;
            check_p(p)?;
            let mut e = Vec::new();
            for u in 0..n as Vertex {
                for v in u + 1..n as Vertex {
                    if rng.random_bool(p) {
                        e.push((u, v));
                    }
                }
            }
            (n, e)
        }
        GraphKind::RandomBipartite { left, right, p } => {
            check_n(left + right)?;
            check_p(p)?;
            let mut e = Vec::new();
            for u in 0..left as Vertex {
                for v in left as Vertex..(left + right) as Vertex {
                    if rng.random_bool(p) {
                        e.push((u, v));
                    }
                }
            }
            (left + right, e)
        }
        GraphKind::HiddenPerfectMatching { n, epsilon } => {
            check_n(n)?;
            if !(epsilon > 0.0 && epsilon <= 1.0) {
                return Err(GenerateError::InvalidParam("epsilon must lie in (0, 1]"));
            }
            let u_size = math::round(epsilon * n as f64 / 2.0) as usize;
            let total = 2 * n + u_size;
            let mut e: Vec<_> = (0..n as Vertex).map(|l| (l, l + n as Vertex)).collect();
            for x in (2 * n) as Vertex..total as Vertex {
                for y in 0..(2 * n) as Vertex {
                    e.push((y, x));
                }
            }
            (total, e)
        }
        GraphKind::RandomRegular { n, d } => {
            check_n(n)?;
            if d >= n || (n * d) % 2 == 1 {
                return Err(GenerateError::InvalidParam("need d < n and n*d even"));
            }
            (n, random_regular(n, d, &mut rng)?)
        }
        GraphKind::Lollipop { clique, path } => {
            check_n(clique)?;
            let mut e = Vec::new();
            for u in 0..clique as Vertex {
                for v in u + 1..clique as Vertex {
                    e.push((u, v));
                }
            }
            for j in 0..path as Vertex {
                let v = clique as Vertex + j;
                e.push((v - 1, v));
            }
            (clique + path, e)
        }
        GraphKind::PerfectMatching { pairs } => {
            check_n(2 * pairs)?;
            (2 * pairs, (0..pairs as Vertex).map(|i| (2 * i, 2 * i + 1)).collect())
        }
    };
    Ok(Graph::from_edges(n, edges)?.with_list_order(ListOrder::PerVertexRandom, seed))
}

/// Steger–Wormald pairing: repeatedly join two random free points whose vertices are
/// distinct and not yet adjacent; restart when stuck.
fn random_regular(n: usize, d: usize, rng: &mut crate::Rng) -> Result<Vec<(Vertex, Vertex)>, GenerateError> {
    const MAX_RESTARTS: u32 = 1000;
    if d == 0 {
        return Ok(Vec::new());
    }
    'restart: for _ in 0..MAX_RESTARTS {
        let mut points: Vec<Vertex> = (0..n * d).map(|p| (p / d) as Vertex).collect();
        points.shuffle(rng);
        let mut seen: HashSet<Edge> = HashSet::new();
        let mut out = Vec::with_capacity(n * d / 2);
        while !points.is_empty() {
            let mut fails = 0u32;
            loop {
                let i = rng.random_range(0..points.len());
                let j = rng.random_range(0..points.len());
                let (a, b) = (points[i], points[j]);
                if i != j && a != b && !seen.contains(&Edge::new(a, b)) {
                    let (hi, lo) = if i > j { (i, j) } else { (j, i) };
                    points.swap_remove(hi);
                    points.swap_remove(lo);
                    seen.insert(Edge::new(a, b));
                    out.push((a, b));
                    break;
                }
                fails += 1;
                if fails > 200 {
                    let stuck = points.iter().enumerate().all(|(i, &a)| {
                        points[i + 1..]
                            .iter()
                            .all(|&b| a == b || seen.contains(&Edge::new(a, b)))
                    });
                    if stuck {
                        continue 'restart;
                    }
                    fails = 0;
                }
            }
        }
        return Ok(out);
    }
    Err(GenerateError::PairingFailed(MAX_RESTARTS))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_kinds() {
        let k4 = generate(&GraphKind::Complete { n: 4 }, Seed::new(0)).unwrap();
        assert_eq!((k4.n(), k4.m()), (4, 6));
        let p = generate(&GraphKind::Petersen, Seed::new(0)).unwrap();
        let s = p.stats();
        assert_eq!((s.n, s.m, s.max_degree), (10, 15, 3));
        assert!((0..10).all(|v| p.degree(v) == 3));
        let star = generate(&GraphKind::Star { leaves: 5 }, Seed::new(0)).unwrap();
        assert_eq!(star.degree(0), 5);
    }

    #[test]
    fn hidden_perfect_matching_shape() {
        let g = generate(&GraphKind::HiddenPerfectMatching { n: 10, epsilon: 0.4 }, Seed::new(1)).unwrap();
        assert_eq!(g.n(), 22);
        assert_eq!(g.m(), 10 + 2 * 20);
        for l in 0..10 {
            assert!(g.has_edge(l, l + 10));
            assert!(g.has_edge(l, 20) && g.has_edge(l + 10, 21));
        }
        assert!(!g.has_edge(20, 21));
    }

    #[test]
    fn regular_is_regular_and_deterministic() {
        let kind = GraphKind::RandomRegular { n: 61, d: 5 };
        assert!(generate(&kind, Seed::new(4)).is_err());
        let kind = GraphKind::RandomRegular { n: 60, d: 4 };
        let a = generate(&kind, Seed::new(4)).unwrap();
        let b = generate(&kind, Seed::new(4)).unwrap();
        assert!((0..60).all(|v| a.degree(v) == 4));
        assert!(a.edges().eq(b.edges()));
    }

    #[test]
    fn bad_params() {
        assert!(generate(&GraphKind::ErdosRenyi { n: 5, p: 1.5 }, Seed::new(0)).is_err());
        assert!(generate(&GraphKind::Empty { n: 0 }, Seed::new(0)).is_err());
    }
}
