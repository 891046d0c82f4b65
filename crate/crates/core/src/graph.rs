//! Weighted graphs `(G; β, λ)` and the plain-text graph format.
//!
//! # File format
//!
//! UTF-8 text, one record per line. Lines whose first non-blank character is
//! `#` and blank lines are ignored. The remaining lines must be, in order:
//!
//! ```text
//! <n> <m>                 header: vertex and edge counts
//! v <index> <lambda>      exactly n lines, each index in [0, n) once
//! e <u> <v> <beta>        exactly m lines; the k-th line is edge k
//! ```
//!
//! Fields are separated by ASCII whitespace; reals are decimal. The parser
//! rejects duplicate vertex lines, duplicate or parallel edges, self-loops,
//! `λ ∉ (0, 1]` and `β ≤ 1`.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    lambda: Vec<f64>,
    beta: Vec<f64>,
    /// `adj[v]` lists `(neighbour, edge index)`, ordered by edge index.
    adj: Vec<Vec<(usize, usize)>>,
}

impl WeightedGraph {
    pub fn new(n: usize, edges: Vec<(usize, usize)>, lambda: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        if lambda.len() != n {
            return Err(Error::DimensionMismatch { expected: n, actual: lambda.len() });
        }
        if beta.len() != edges.len() {
            return Err(Error::DimensionMismatch { expected: edges.len(), actual: beta.len() });
        }
        for (v, &l) in lambda.iter().enumerate() {
            if !(l > 0.0 && l <= 1.0) {
                return Err(Error::InvalidParameter(format!("lambda[{v}] = {l} is outside (0, 1]")));
            }
        }
        for (e, &b) in beta.iter().enumerate() {
            if !(b > 1.0 && b.is_finite()) {
                return Err(Error::InvalidParameter(format!("beta[{e}] = {b} must be a finite value > 1")));
            }
        }
        let adj = build_adjacency(n, &edges)?;
        Ok(WeightedGraph { n, edges, lambda, beta, adj })
    }

    /// Uniform `β` on every edge and uniform `λ` on every vertex.
    pub fn uniform(n: usize, edges: Vec<(usize, usize)>, beta: f64, lambda: f64) -> Result<Self> {
        let m = edges.len();
        WeightedGraph::new(n, edges, vec![lambda; n], vec![beta; m])
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, usize)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn beta_max(&self) -> f64 {
        self.beta.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn beta_min(&self) -> f64 {
        self.beta.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn lambda_max(&self) -> f64 {
        self.lambda.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn lambda_min(&self) -> f64 {
        self.lambda.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Same topology with new parameters.
    pub fn with_parameters(&self, lambda: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        WeightedGraph::new(self.n, self.edges.clone(), lambda, beta)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut records = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

        let (hline, header) = records.next().ok_or(Error::Parse { line: 0, msg: "missing header".into() })?;
        let head: Vec<&str> = header.split_ascii_whitespace().collect();
        if head.len() != 2 {
            return Err(Error::Parse { line: hline, msg: "header must be `n m`".into() });
        }
        let n: usize = parse_field(hline, head[0], "n")?;
        let m: usize = parse_field(hline, head[1], "m")?;

        let mut lambda: Vec<Option<f64>> = vec![None; n];
        let mut edges = Vec::with_capacity(m);
        let mut beta = Vec::with_capacity(m);
        let mut seen_vertices = 0usize;

        for (line, rec) in records {
            let f: Vec<&str> = rec.split_ascii_whitespace().collect();
            match f[0] {
                "v" => {
                    if !edges.is_empty() {
                        return Err(Error::Parse { line, msg: "vertex line after edge lines".into() });
                    }
                    if f.len() != 3 {
                        return Err(Error::Parse { line, msg: "expected `v <index> <lambda>`".into() });
                    }
                    let v: usize = parse_field(line, f[1], "vertex index")?;
                    let l: f64 = parse_field(line, f[2], "lambda")?;
                    if v >= n {
                        return Err(Error::Parse { line, msg: format!("vertex {v} out of range") });
                    }
                    if lambda[v].replace(l).is_some() {
                        return Err(Error::Parse { line, msg: format!("duplicate vertex {v}") });
                    }
                    if !(l > 0.0 && l <= 1.0) {
                        return Err(Error::Parse { line, msg: format!("lambda {l} outside (0, 1]") });
                    }
                    seen_vertices += 1;
                }
                "e" => {
                    if seen_vertices != n {
                        return Err(Error::Parse { line, msg: format!("expected {n} vertex lines before edges") });
                    }
                    if f.len() != 4 {
                        return Err(Error::Parse { line, msg: "expected `e <u> <v> <beta>`".into() });
                    }
                    let u: usize = parse_field(line, f[1], "endpoint")?;
                    let v: usize = parse_field(line, f[2], "endpoint")?;
                    let b: f64 = parse_field(line, f[3], "beta")?;
                    if u >= n || v >= n {
                        return Err(Error::Parse { line, msg: format!("edge ({u}, {v}) out of range") });
                    }
                    if u == v {
                        return Err(Error::Parse { line, msg: format!("self-loop at {u}") });
                    }
                    if edges.iter().any(|&(a, c)| (a, c) == (u, v) || (a, c) == (v, u)) {
                        return Err(Error::Parse { line, msg: format!("duplicate edge ({u}, {v})") });
                    }
                    if !(b > 1.0 && b.is_finite()) {
                        return Err(Error::Parse { line, msg: format!("beta {b} must be > 1") });
                    }
                    if edges.len() == m {
                        return Err(Error::Parse { line, msg: format!("more than {m} edges") });
                    }
                    edges.push((u, v));
                    beta.push(b);
                }
                other => return Err(Error::Parse { line, msg: format!("unknown record {other:?}") }),
            }
        }
        if seen_vertices != n {
            return Err(Error::Parse { line: 0, msg: format!("expected {n} vertex lines, found {seen_vertices}") });
        }
        if edges.len() != m {
            return Err(Error::Parse { line: 0, msg: format!("expected {m} edge lines, found {}", edges.len()) });
        }
        let lambda = lambda.into_iter().map(|l| l.unwrap()).collect();
        WeightedGraph::new(n, edges, lambda, beta)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        WeightedGraph::parse(&std::fs::read_to_string(path)?)
    }

    /// Serialise in the graph file format. Reals use Rust's shortest
    /// round-trip representation, so `parse(to_text(g)) == g`.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.n, self.m());
        for (v, l) in self.lambda.iter().enumerate() {
            let _ = writeln!(s, "v {v} {l:?}");
        }
        for (&(u, v), b) in self.edges.iter().zip(&self.beta) {
            let _ = writeln!(s, "e {u} {v} {b:?}");
        }
        s
    }
}

fn parse_field<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T> {
    tok.parse().map_err(|_| Error::Parse { line, msg: format!("invalid {what} {tok:?}") })
}

fn build_adjacency(n: usize, edges: &[(usize, usize)]) -> Result<Vec<Vec<(usize, usize)>>> {
    let mut adj = vec![Vec::new(); n];
    let mut seen = std::collections::HashSet::with_capacity(edges.len());
    for (e, &(u, v)) in edges.iter().enumerate() {
        if u >= n || v >= n {
            return Err(Error::InvalidGraph(format!("edge {e} = ({u}, {v}) out of range")));
        }
        if u == v {
            return Err(Error::InvalidGraph(format!("edge {e} is a self-loop")));
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return Err(Error::InvalidGraph(format!("edge {e} = ({u}, {v}) is parallel to an earlier edge")));
        }
        adj[u].push((v, e));
        adj[v].push((u, e));
    }
    Ok(adj)
}

#[cfg(test)]
mod tests {
    use super::*;

    const K2: &str = "# two vertices\n2 1\nv 0 1\nv 1 0.5\n\ne 0 1 2\n";

    #[test]
    fn parse_k2() {
        let g = WeightedGraph::parse(K2).unwrap();
        assert_eq!((g.n(), g.m()), (2, 1));
        assert_eq!(g.lambda(), &[1.0, 0.5]);
        assert_eq!(g.beta(), &[2.0]);
        assert_eq!(g.neighbors(1), &[(0, 0)]);
        assert_eq!(WeightedGraph::parse(&g.to_text()).unwrap(), g);
    }

    #[test]
    fn parse_rejects_malformed() {
        let bad = [
            "2 1\nv 0 1\nv 0 1\ne 0 1 2\n",          // duplicate vertex
            "2 1\nv 0 1\nv 1 1\ne 0 0 2\n",          // self-loop
            "2 2\nv 0 1\nv 1 1\ne 0 1 2\ne 1 0 2\n", // parallel edge
            "2 1\nv 0 1\nv 1 1\ne 0 1 1\n",          // beta <= 1
            "2 1\nv 0 1.5\nv 1 1\ne 0 1 2\n",        // lambda > 1
            "2 1\nv 0 1\ne 0 1 2\nv 1 1\n",          // out of order
            "2 1\nv 0 1\nv 1 1\n",                   // missing edge
            "2 0\nv 0 1\nv 1 1\nx\n",                // unknown record
        ];
        for text in bad {
            assert!(WeightedGraph::parse(text).is_err(), "accepted {text:?}");
        }
    }

    #[test]
    fn constructor_validates() {
        assert!(WeightedGraph::uniform(2, vec![(0, 1)], 0.5, 1.0).is_err());
        assert!(WeightedGraph::uniform(2, vec![(0, 1)], 2.0, 0.0).is_err());
        assert!(WeightedGraph::uniform(2, vec![(0, 2)], 2.0, 1.0).is_err());
        let g = WeightedGraph::uniform(3, vec![(0, 1), (1, 2)], 3.0, 0.25).unwrap();
        assert_eq!(g.beta_max(), 3.0);
        assert_eq!(g.lambda_min(), 0.25);
    }
}
