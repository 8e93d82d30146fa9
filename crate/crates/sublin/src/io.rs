//! Plain-text graph files.
//!
//! ```text
//! # optional comments
//! 4 3
//! 0 1
//! 1 2
//! 2 3
//! ```
//!
//! The first line holds `n m`, each following line one edge `u v` with `u < v`.

use std::fs;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use sublin_core::{Graph, GraphError, Vertex};

#[derive(Debug, thiserror::Error)]
pub enum GraphFileError {
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("header declares {declared} edges but the file has {found}")]
    EdgeCount { declared: usize, found: usize },
    #[error("missing `n m` header")]
    MissingHeader,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn parse_pair(line: &str, lineno: usize) -> Result<(u64, u64), GraphFileError> {
    let bad = |msg: &str| GraphFileError::Parse {
        line: lineno,
        msg: msg.to_string(),
    };
    let mut it = line.split_whitespace();
    let a = it.next().ok_or_else(|| bad("expected two integers"))?;
    let b = it.next().ok_or_else(|| bad("expected two integers"))?;
    if it.next().is_some() {
        return Err(bad("trailing tokens"));
    }
    let a = a.parse().map_err(|_| bad("not a non-negative integer"))?;
    let b = b.parse().map_err(|_| bad("not a non-negative integer"))?;
    Ok((a, b))
}

pub fn read_graph<R: Read>(reader: R) -> Result<Graph, GraphFileError> {
    let mut header = None;
    let mut edges = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (a, b) = parse_pair(body, lineno)?;
        match header {
            None => header = Some((a as usize, b as usize)),
            Some((n, _)) => {
                if a >= b {
                    return Err(GraphFileError::Parse {
                        line: lineno,
                        msg: "edges must be written as `u v` with u < v".into(),
                    });
                }
                if b >= n as u64 {
                    return Err(GraphFileError::Parse {
                        line: lineno,
                        msg: format!("vertex {b} out of range for n = {n}"),
                    });
                }
                edges.push((a as Vertex, b as Vertex));
            }
        }
    }
    let (n, m) = header.ok_or(GraphFileError::MissingHeader)?;
    if edges.len() != m {
        return Err(GraphFileError::EdgeCount {
            declared: m,
            found: edges.len(),
        });
    }
    Ok(Graph::from_edges(n, edges)?)
}

pub fn write_graph<W: Write>(g: &Graph, mut w: W) -> std::io::Result<()> {
    writeln!(w, "{} {}", g.n(), g.m())?;
    for e in g.edges() {
        writeln!(w, "{} {}", e.u(), e.v())?;
    }
    w.flush()
}

pub fn load_graph(path: &Path) -> Result<Graph, GraphFileError> {
    read_graph(fs::File::open(path)?)
}

pub fn save_graph(g: &Graph, path: &Path) -> std::io::Result<()> {
    write_graph(g, std::io::BufWriter::new(fs::File::create(path)?))
}
