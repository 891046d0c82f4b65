//! Built-in graph families and random instances for the verification suites.

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::rng::RngStream;

pub fn path(n: usize, beta: f64, lambda: f64) -> Result<WeightedGraph> {
    let edges = (1..n).map(|v| (v - 1, v)).collect();
    WeightedGraph::uniform(n, edges, beta, lambda)
}

pub fn cycle(n: usize, beta: f64, lambda: f64) -> Result<WeightedGraph> {
    if n < 3 {
        return Err(Error::InvalidParameter(format!("a cycle needs at least 3 vertices, got {n}")));
    }
    let edges = (0..n).map(|v| (v, (v + 1) % n)).collect();
    WeightedGraph::uniform(n, edges, beta, lambda)
}

/// `width × height` grid with free boundary; vertex `(x, y)` is `y * width + x`.
pub fn grid(width: usize, height: usize, beta: f64, lambda: f64) -> Result<WeightedGraph> {
    let mut edges = Vec::new();
    for y in 0..height {
        for x in 0..width {
            let v = y * width + x;
            if x + 1 < width {
                edges.push((v, v + 1));
            }
            if y + 1 < height {
                edges.push((v, v + width));
            }
        }
    }
    WeightedGraph::uniform(width * height, edges, beta, lambda)
}

pub fn complete(n: usize, beta: f64, lambda: f64) -> Result<WeightedGraph> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            edges.push((u, v));
        }
    }
    WeightedGraph::uniform(n, edges, beta, lambda)
}

/// `G(n, q)`: each pair `u < v` present independently with probability `q`.
pub fn erdos_renyi(n: usize, q: f64, beta: f64, lambda: f64, rng: &mut RngStream) -> Result<WeightedGraph> {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.bernoulli(q) {
                edges.push((u, v));
            }
        }
    }
    WeightedGraph::uniform(n, edges, beta, lambda)
}

/// Shape of random instances drawn by [`random_instance`].
#[derive(Clone, Debug)]
pub struct InstanceShape {
    pub min_vertices: usize,
    pub max_vertices: usize,
    pub max_edges: usize,
    pub beta_max: f64,
    /// Probability that a vertex gets `λ = 1` exactly.
    pub unit_lambda_prob: f64,
}

impl Default for InstanceShape {
    fn default() -> Self {
        InstanceShape { min_vertices: 1, max_vertices: 5, max_edges: 8, beta_max: 5.0, unit_lambda_prob: 0.2 }
    }
}

/// A random simple graph with `β_e ∈ (1, beta_max]` and `λ_v ∈ (0, 1]`.
///
/// The edge count is uniform on `0..=min(max_edges, n(n-1)/2)` and the edge
/// set a uniform subset of that size.
pub fn random_instance(shape: &InstanceShape, rng: &mut RngStream) -> WeightedGraph {
    let span = (shape.max_vertices - shape.min_vertices + 1) as u64;
    let n = shape.min_vertices + rng.below(span) as usize;
    let mut pairs = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            pairs.push((u, v));
        }
    }
    let m = rng.below(shape.max_edges.min(pairs.len()) as u64 + 1) as usize;
    // partial Fisher-Yates
    for i in 0..m {
        let j = i + rng.below((pairs.len() - i) as u64) as usize;
        pairs.swap(i, j);
    }
    let mut edges: Vec<_> = pairs[..m].to_vec();
    edges.sort_unstable();
    let beta = (0..m).map(|_| 1.0 + (shape.beta_max - 1.0) * (1.0 - rng.uniform())).collect();
    let lambda = (0..n)
        .map(|_| if rng.bernoulli(shape.unit_lambda_prob) { 1.0 } else { 1.0 - rng.uniform() })
        .collect();
    WeightedGraph::new(n, edges, lambda, beta).expect("generated instance is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_sizes() {
        assert_eq!(path(4, 2.0, 1.0).unwrap().m(), 3);
        assert_eq!(cycle(4, 2.0, 1.0).unwrap().m(), 4);
        assert_eq!(grid(3, 2, 2.0, 1.0).unwrap().m(), 7);
        assert_eq!(complete(5, 2.0, 1.0).unwrap().m(), 10);
        assert!(cycle(2, 2.0, 1.0).is_err());
    }

    #[test]
    fn random_instances_respect_shape() {
        let shape = InstanceShape { min_vertices: 2, max_vertices: 5, max_edges: 6, ..Default::default() };
        let mut rng = RngStream::new(3);
        for _ in 0..200 {
            let g = random_instance(&shape, &mut rng);
            assert!((2..=5).contains(&g.n()));
            assert!(g.m() <= 6);
            assert!(g.beta().iter().all(|&b| b > 1.0 && b <= 5.0));
            assert!(g.lambda().iter().all(|&l| l > 0.0 && l <= 1.0));
        }
    }
}
