//! Weights of the three models and connectivity in `(V, S)`.

use crate::bits::{EdgeSubset, SpinConfig};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::params::{SgParams, WrcParams};
use crate::weight::{ln_one_plus_exp, LogWeight};

/// Reusable breadth-first search over the spanning subgraph `(V, S)`.
///
/// Visited marks are generation stamps, so a query costs only the size of the
/// components it touches.
#[derive(Clone, Debug)]
pub struct Bfs {
    stamp: Vec<u32>,
    generation: u32,
    queue: Vec<usize>,
}

impl Bfs {
    pub fn new(n: usize) -> Self {
        Bfs { stamp: vec![0; n], generation: 0, queue: Vec::with_capacity(n) }
    }

    fn next_generation(&mut self) {
        self.generation = self.generation.wrapping_add(1);
        if self.generation == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.generation = 1;
        }
    }

    /// Explore the component of `start` in `(V, S ∖ {excluded})`, returning
    /// `ln ∏ λ` over it. Stops early and returns `None` if `stop` is reached.
    fn explore(
        &mut self,
        g: &WeightedGraph,
        s: &EdgeSubset,
        excluded: Option<usize>,
        start: usize,
        stop: Option<usize>,
        ln_lambda: &[f64],
    ) -> Option<f64> {
        self.next_generation();
        let gen = self.generation;
        self.queue.clear();
        self.queue.push(start);
        self.stamp[start] = gen;
        let mut acc = 0.0;
        let mut head = 0;
        while head < self.queue.len() {
            let v = self.queue[head];
            head += 1;
            acc += ln_lambda[v];
            for &(w, e) in g.neighbors(v) {
                if !s.get(e) || Some(e) == excluded || self.stamp[w] == gen {
                    continue;
                }
                if Some(w) == stop {
                    return None;
                }
                self.stamp[w] = gen;
                self.queue.push(w);
            }
        }
        Some(acc)
    }

    /// Connectivity of `u` and `v` in `(V, S ∖ {excluded})`, with the two
    /// component λ-products (taken from `ln_lambda`) when they are apart.
    pub fn connected_with(
        &mut self,
        g: &WeightedGraph,
        s: &EdgeSubset,
        excluded: Option<usize>,
        u: usize,
        v: usize,
        ln_lambda: &[f64],
    ) -> Connectivity {
        assert_ne!(u, v, "connectivity query needs distinct endpoints");
        match self.explore(g, s, excluded, u, Some(v), ln_lambda) {
            None => Connectivity::Connected,
            Some(ln_u) => {
                let ln_v = self.explore(g, s, excluded, v, None, ln_lambda).expect("no stop vertex");
                Connectivity::Disconnected { lambda_u: LogWeight::from_ln(ln_u), lambda_v: LogWeight::from_ln(ln_v) }
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Connectivity {
    Connected,
    /// Apart, with `∏_{w ∈ C_u} λ_w` and `∏_{w ∈ C_v} λ_w`.
    Disconnected { lambda_u: LogWeight, lambda_v: LogWeight },
}

impl Connectivity {
    pub fn is_connected(&self) -> bool {
        matches!(self, Connectivity::Connected)
    }
}

/// Connectivity of `u ≠ v` in `(V, S)` with the graph's own fields.
pub fn connected(g: &WeightedGraph, s: &EdgeSubset, u: usize, v: usize) -> Connectivity {
    let ln_lambda: Vec<f64> = g.lambda().iter().map(|l| l.ln()).collect();
    Bfs::new(g.n()).connected_with(g, s, None, u, v, &ln_lambda)
}

/// Connected components of `(V, S)`, each sorted, ordered by minimum vertex.
pub fn components(g: &WeightedGraph, s: &EdgeSubset) -> Vec<Vec<usize>> {
    let mut label = vec![usize::MAX; g.n()];
    let mut out = Vec::new();
    for start in 0..g.n() {
        if label[start] != usize::MAX {
            continue;
        }
        let id = out.len();
        let mut comp = vec![start];
        label[start] = id;
        let mut head = 0;
        while head < comp.len() {
            let v = comp[head];
            head += 1;
            for &(w, e) in g.neighbors(v) {
                if s.get(e) && label[w] == usize::MAX {
                    label[w] = id;
                    comp.push(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// Vertices of odd degree in `(V, S)`, ascending.
pub fn odd_vertices(g: &WeightedGraph, s: &EdgeSubset) -> Vec<usize> {
    let mut parity = vec![false; g.n()];
    for e in s.iter_ones() {
        let (u, v) = g.edge(e);
        parity[u] ^= true;
        parity[v] ^= true;
    }
    (0..g.n()).filter(|&v| parity[v]).collect()
}

/// Monochromatic edges `M(σ)`.
pub fn monochromatic(g: &WeightedGraph, sigma: &SpinConfig) -> EdgeSubset {
    EdgeSubset::from_indices(
        g.m(),
        g.edges().iter().enumerate().filter(|(_, &(u, v))| sigma.get(u) == sigma.get(v)).map(|(e, _)| e),
    )
}

fn check_width(actual: usize, expected: usize) -> Result<()> {
    if actual != expected {
        return Err(Error::DimensionMismatch { expected, actual });
    }
    Ok(())
}

/// `∏_{uv} β_uv^{[σ_u = σ_v]} ∏_u λ_u^{σ_u}`.
pub fn ising_weight(g: &WeightedGraph, sigma: &SpinConfig) -> Result<LogWeight> {
    check_width(sigma.len(), g.n())?;
    let mut ln = 0.0;
    for (&(u, v), b) in g.edges().iter().zip(g.beta()) {
        if sigma.get(u) == sigma.get(v) {
            ln += b.ln();
        }
    }
    for v in sigma.iter_ones() {
        ln += g.lambda()[v].ln();
    }
    Ok(LogWeight::from_ln(ln))
}

/// `∏_{e∈S} p_e ∏_{f∉S} (1-p_f) ∏_C (1 + ∏_{u∈C} λ_u)`.
pub fn wrc_weight(g: &WeightedGraph, w: &WrcParams, s: &EdgeSubset) -> Result<LogWeight> {
    w.check(g)?;
    check_width(s.len(), g.m())?;
    let mut ln = 0.0;
    for e in 0..g.m() {
        ln += if s.get(e) { w.ln_p()[e] } else { w.ln_q()[e] };
    }
    for comp in components(g, s) {
        let ln_prod: f64 = comp.iter().map(|&v| w.ln_lambda()[v]).sum();
        ln += ln_one_plus_exp(ln_prod);
    }
    Ok(LogWeight::from_ln(ln))
}

/// `∏_{e∈S} p_e ∏_{f∉S} (1-p_f) ∏_{v ∈ odd(S)} η_v`; zero when an odd
/// vertex has `η_v = 0`.
pub fn sg_weight(g: &WeightedGraph, sp: &SgParams, s: &EdgeSubset) -> Result<LogWeight> {
    sp.check(g)?;
    check_width(s.len(), g.m())?;
    let mut ln = 0.0;
    for e in 0..g.m() {
        let p = sp.p()[e];
        ln += if s.get(e) { p.ln() } else { (-p).ln_1p() };
    }
    for v in odd_vertices(g, s) {
        ln += sp.eta()[v].ln();
    }
    Ok(LogWeight::from_ln(ln))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use crate::params::params_from_ising;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn k2(lambda: f64) -> WeightedGraph {
        WeightedGraph::uniform(2, vec![(0, 1)], 2.0, lambda).unwrap()
    }

    #[test]
    fn ising_weights_k2() {
        let g = k2(1.0);
        let w = |bits: &[usize]| ising_weight(&g, &SpinConfig::from_indices(2, bits.iter().copied())).unwrap().value();
        assert_relative_eq!(w(&[]), 2.0, epsilon = 1e-14);
        assert_relative_eq!(w(&[1]), 1.0, epsilon = 1e-14);
        let g = k2(1.0 / 3.0);
        let s = SpinConfig::from_indices(2, [0, 1]);
        assert_relative_eq!(ising_weight(&g, &s).unwrap().value(), 2.0 / 9.0, epsilon = 1e-14);
    }

    #[test]
    fn wrc_weights_k2() {
        let g = k2(1.0);
        let w = params_from_ising(&g).unwrap().wrc;
        assert_relative_eq!(wrc_weight(&g, &w, &EdgeSubset::empty(1)).unwrap().value(), 2.0, epsilon = 1e-14);
        assert_relative_eq!(wrc_weight(&g, &w, &EdgeSubset::full(1)).unwrap().value(), 1.0, epsilon = 1e-14);
        let g = k2(1.0 / 3.0);
        let w = params_from_ising(&g).unwrap().wrc;
        assert_relative_eq!(wrc_weight(&g, &w, &EdgeSubset::full(1)).unwrap().value(), 5.0 / 9.0, epsilon = 1e-14);
    }

    #[test]
    fn sg_weights_k2() {
        let g = k2(1.0);
        let s = params_from_ising(&g).unwrap().sg;
        assert!(sg_weight(&g, &s, &EdgeSubset::full(1)).unwrap().is_zero());
        assert_relative_eq!(sg_weight(&g, &s, &EdgeSubset::empty(1)).unwrap().value(), 0.75, epsilon = 1e-14);
        let g = k2(1.0 / 3.0);
        let s = params_from_ising(&g).unwrap().sg;
        assert_relative_eq!(sg_weight(&g, &s, &EdgeSubset::full(1)).unwrap().value(), 1.0 / 16.0, epsilon = 1e-14);
    }

    #[test]
    fn weights_reject_wrong_width() {
        let g = k2(1.0);
        assert!(ising_weight(&g, &SpinConfig::empty(3)).is_err());
        let w = params_from_ising(&g).unwrap().wrc;
        assert!(wrc_weight(&g, &w, &EdgeSubset::empty(2)).is_err());
    }

    #[test]
    fn component_examples() {
        let g = generators::path(3, 2.0, 1.0).unwrap();
        assert_eq!(components(&g, &EdgeSubset::from_indices(2, [0])), vec![vec![0, 1], vec![2]]);
        assert_eq!(components(&g, &EdgeSubset::empty(2)).len(), 3);
        let c4 = generators::cycle(4, 2.0, 1.0).unwrap();
        assert_eq!(components(&c4, &EdgeSubset::full(4)), vec![vec![0, 1, 2, 3]]);
    }

    #[test]
    fn connectivity_examples() {
        let g = k2(1.0);
        assert!(connected(&g, &EdgeSubset::full(1), 0, 1).is_connected());
        match connected(&g, &EdgeSubset::empty(1), 0, 1) {
            Connectivity::Disconnected { lambda_u, lambda_v } => {
                assert_eq!((lambda_u.value(), lambda_v.value()), (1.0, 1.0));
            }
            c => panic!("{c:?}"),
        }
        let g = WeightedGraph::new(3, vec![(0, 1), (1, 2)], vec![1.0, 1.0 / 3.0, 1.0 / 3.0], vec![2.0, 2.0]).unwrap();
        match connected(&g, &EdgeSubset::from_indices(2, [1]), 0, 2) {
            Connectivity::Disconnected { lambda_u, lambda_v } => {
                assert_relative_eq!(lambda_u.value(), 1.0);
                assert_relative_eq!(lambda_v.value(), 1.0 / 9.0, epsilon = 1e-15);
            }
            c => panic!("{c:?}"),
        }
    }

    #[test]
    fn excluded_edge_is_ignored() {
        let g = k2(1.0);
        let mut bfs = Bfs::new(2);
        let ln = [0.0, 0.0];
        assert!(!bfs.connected_with(&g, &EdgeSubset::full(1), Some(0), 0, 1, &ln).is_connected());
    }

    fn graph_and_subset() -> impl Strategy<Value = (WeightedGraph, EdgeSubset)> {
        (any::<u64>(), any::<u64>()).prop_map(|(seed, bits)| {
            let mut rng = crate::rng::RngStream::new(seed);
            let shape = generators::InstanceShape { max_vertices: 7, max_edges: 12, ..Default::default() };
            let g = generators::random_instance(&shape, &mut rng);
            let s = EdgeSubset::from_index(g.m(), bits & ((1u64 << g.m()) - 1));
            (g, s)
        })
    }

    proptest! {
        #[test]
        fn components_partition((g, s) in graph_and_subset()) {
            let comps = components(&g, &s);
            let mut seen = vec![0; g.n()];
            for c in &comps {
                for &v in c {
                    seen[v] += 1;
                }
            }
            prop_assert!(seen.iter().all(|&k| k == 1));
            let label = |v: usize| comps.iter().position(|c| c.contains(&v)).unwrap();
            // no S-edge crosses two components (maximality)
            for e in s.iter_ones() {
                let (u, v) = g.edge(e);
                prop_assert_eq!(label(u), label(v));
            }
            // internal connectivity and agreement with connected()
            for u in 0..g.n() {
                for v in u + 1..g.n() {
                    prop_assert_eq!(connected(&g, &s, u, v).is_connected(), label(u) == label(v));
                }
            }
        }

        #[test]
        fn weights_positive_unless_odd_zero((g, s) in graph_and_subset()) {
            let mp = params_from_ising(&g).unwrap();
            prop_assert!(!wrc_weight(&g, &mp.wrc, &s).unwrap().is_zero());
            let zero = sg_weight(&g, &mp.sg, &s).unwrap().is_zero();
            let blocked = odd_vertices(&g, &s).iter().any(|&v| mp.sg.eta()[v] == 0.0);
            prop_assert_eq!(zero, blocked);
            for idx in 0..(1u64 << g.n()) {
                prop_assert!(!ising_weight(&g, &SpinConfig::from_index(g.n(), idx)).unwrap().is_zero());
            }
        }
    }
}
