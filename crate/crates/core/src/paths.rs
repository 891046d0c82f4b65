//! Canonical paths for the subgraph-world edge-flip chain.
//!
//! For states `X`, `Y` the symmetric difference `D = X ⊕ Y` is split into
//! `k` simple paths joining its `2k` odd vertices and a set of simple cycles.
//! Paths and cycles are ordered by their ascending edge-index sequences
//! (compared lexicographically), all paths before all cycles, and the
//! decomposition used is the lexicographically first sequence. It is built
//! greedily: at each stage the smallest removable path (then cycle) is taken.
//! Any simple path between two odd vertices, and any simple cycle of an even
//! remainder, extends to a full decomposition, so the greedy choice is the
//! lexicographic minimum.
//!
//! The decomposition depends only on `D`; that is what makes the
//! `(Z, Z', X ⊕ Y ⊕ Z) ↦ (X, Y)` encoding injective.

use std::collections::{HashMap, HashSet};

use serde::Serialize;

use crate::analysis::matrix::ef_sg_matrix;
use crate::analysis::spectral::{spectral, EIGEN_TOL};
use crate::bits::EdgeSubset;
use crate::error::{Error, Result};
use crate::exact::{enumerate_sg, state_count};
use crate::graph::WeightedGraph;
use crate::params::SgParams;
use crate::report::Check;

/// Above this many edges in `X ⊕ Y`, exhaustive minimisation is replaced by
/// shortest-path choices that still depend only on `X ⊕ Y`.
pub const EXHAUSTIVE_LIMIT: usize = 20;

/// Default bound on `m` for full congestion computations.
pub const DEFAULT_CONGESTION_MAX_EDGES: usize = 7;

/// A walk given by its vertex sequence and the edges between them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Walk {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
}

impl Walk {
    fn sorted_edges(&self) -> Vec<usize> {
        let mut e = self.edges.clone();
        e.sort_unstable();
        e
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Decomposition {
    /// Open paths, each oriented from its smaller-index end.
    pub paths: Vec<Walk>,
    /// Closed cycles, each starting (and ending) at its smallest vertex and
    /// leaving toward the smaller of its two neighbours.
    pub cycles: Vec<Walk>,
}

impl Decomposition {
    /// Edges in unwinding order.
    pub fn edge_order(&self) -> Vec<usize> {
        self.paths.iter().chain(&self.cycles).flat_map(|w| w.edges.iter().copied()).collect()
    }
}

/// Adjacency of the subgraph `D`, neighbours sorted by edge index.
fn sub_adjacency(g: &WeightedGraph, d: &EdgeSubset) -> Vec<Vec<(usize, usize)>> {
    let mut adj = vec![Vec::new(); g.n()];
    for e in d.iter_ones() {
        let (u, v) = g.edge(e);
        adj[u].push((v, e));
        adj[v].push((u, e));
    }
    adj
}

fn parity(adj: &[Vec<(usize, usize)>], v: usize) -> bool {
    adj[v].len() % 2 == 1
}

/// Smallest simple path (by sorted edge sequence) between two odd vertices.
fn min_path(adj: &[Vec<(usize, usize)>]) -> Walk {
    let n = adj.len();
    let mut best: Option<(Vec<usize>, Walk)> = None;
    let mut on_path = vec![false; n];
    let mut verts = Vec::new();
    let mut edges = Vec::new();
    fn dfs(
        adj: &[Vec<(usize, usize)>],
        v: usize,
        start: usize,
        on_path: &mut [bool],
        verts: &mut Vec<usize>,
        edges: &mut Vec<usize>,
        best: &mut Option<(Vec<usize>, Walk)>,
    ) {
        if v != start && v > start && parity(adj, v) {
            let walk = Walk { vertices: verts.clone(), edges: edges.clone() };
            let key = walk.sorted_edges();
            if best.as_ref().is_none_or(|(k, _)| key < *k) {
                *best = Some((key, walk));
            }
        }
        for &(w, e) in &adj[v] {
            if !on_path[w] {
                on_path[w] = true;
                verts.push(w);
                edges.push(e);
                dfs(adj, w, start, on_path, verts, edges, best);
                edges.pop();
                verts.pop();
                on_path[w] = false;
            }
        }
    }
    for s in (0..n).filter(|&s| parity(adj, s)) {
        on_path[s] = true;
        verts.push(s);
        dfs(adj, s, s, &mut on_path, &mut verts, &mut edges, &mut best);
        verts.pop();
        on_path[s] = false;
    }
    best.expect("an odd vertex has a partner in its component").1
}

/// Smallest simple cycle of an even, nonempty subgraph, as a vertex walk
/// from its minimum vertex (direction fixed later).
fn min_cycle(adj: &[Vec<(usize, usize)>]) -> Walk {
    let n = adj.len();
    let mut best: Option<(Vec<usize>, Walk)> = None;
    let mut on_path = vec![false; n];
    let mut verts = Vec::new();
    let mut edges = Vec::new();
    fn dfs(
        adj: &[Vec<(usize, usize)>],
        v: usize,
        start: usize,
        on_path: &mut [bool],
        verts: &mut Vec<usize>,
        edges: &mut Vec<usize>,
        best: &mut Option<(Vec<usize>, Walk)>,
    ) {
        for &(w, e) in &adj[v] {
            if w == start && edges.len() >= 2 && Some(&e) != edges.last() {
                let mut es = edges.clone();
                es.push(e);
                let mut vs = verts.clone();
                vs.push(start);
                let walk = Walk { vertices: vs, edges: es };
                let key = walk.sorted_edges();
                if best.as_ref().is_none_or(|(k, _)| key < *k) {
                    *best = Some((key, walk));
                }
            } else if w > start && !on_path[w] {
                on_path[w] = true;
                verts.push(w);
                edges.push(e);
                dfs(adj, w, start, on_path, verts, edges, best);
                edges.pop();
                verts.pop();
                on_path[w] = false;
            }
        }
    }
    for s in 0..n {
        if adj[s].is_empty() {
            continue;
        }
        on_path[s] = true;
        verts.push(s);
        dfs(adj, s, s, &mut on_path, &mut verts, &mut edges, &mut best);
        verts.pop();
        on_path[s] = false;
    }
    best.expect("a nonempty even graph has a cycle").1
}

/// Shortest path in `adj` (minus edge `skip`) from `from` to the nearest
/// vertex accepted by `is_target`, ties broken by discovery order over
/// ascending edge indices.
fn bfs_path(adj: &[Vec<(usize, usize)>], from: usize, skip: Option<usize>, is_target: impl Fn(usize) -> bool) -> Walk {
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; adj.len()];
    let mut seen = vec![false; adj.len()];
    seen[from] = true;
    let mut queue = std::collections::VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        if v != from && is_target(v) {
            let mut walk = Walk { vertices: vec![v], edges: Vec::new() };
            let mut cur = v;
            while let Some((prev, e)) = parent[cur] {
                walk.vertices.push(prev);
                walk.edges.push(e);
                cur = prev;
            }
            walk.vertices.reverse();
            walk.edges.reverse();
            return walk;
        }
        let mut nbrs: Vec<_> = adj[v].iter().filter(|&&(_, e)| Some(e) != skip).copied().collect();
        nbrs.sort_unstable_by_key(|&(_, e)| e);
        for (w, e) in nbrs {
            if !seen[w] {
                seen[w] = true;
                parent[w] = Some((v, e));
                queue.push_back(w);
            }
        }
    }
    unreachable!("target vertex is reachable")
}

/// Polynomial fallback for large differences: a shortest path from the
/// smallest odd vertex to its nearest odd partner, or the cycle closed by the
/// smallest edge at the smallest non-isolated vertex.
fn fallback_walk(adj: &[Vec<(usize, usize)>], closed: bool) -> Walk {
    if closed {
        let start = (0..adj.len()).find(|&v| !adj[v].is_empty()).expect("nonempty subgraph");
        let &(next, e) = adj[start].iter().min_by_key(|&&(_, e)| e).unwrap();
        // in an even graph `e` lies on a cycle, so `start` is reachable without it
        let mut walk = bfs_path(adj, next, Some(e), |v| v == start);
        walk.vertices.insert(0, start);
        walk.edges.insert(0, e);
        walk
    } else {
        let start = (0..adj.len()).find(|&v| parity(adj, v)).expect("odd vertex");
        bfs_path(adj, start, None, |v| parity(adj, v))
    }
}

fn remove(adj: &mut [Vec<(usize, usize)>], walk: &Walk) {
    for &e in &walk.edges {
        for list in adj.iter_mut() {
            list.retain(|&(_, f)| f != e);
        }
    }
}

fn orient_path(mut w: Walk) -> Walk {
    if w.vertices.first() > w.vertices.last() {
        w.vertices.reverse();
        w.edges.reverse();
    }
    w
}

/// Rotate a closed walk to start at its minimum vertex and leave toward the
/// smaller-index neighbour.
fn orient_cycle(w: Walk) -> Walk {
    let len = w.edges.len();
    let ring: Vec<usize> = w.vertices[..len].to_vec();
    let i = (0..len).min_by_key(|&i| ring[i]).unwrap();
    let rotate = |k: usize| (i + k) % len;
    let forward_nbr = ring[rotate(1)];
    let backward_nbr = ring[(i + len - 1) % len];
    let mut vertices = Vec::with_capacity(len + 1);
    let mut edges = Vec::with_capacity(len);
    if forward_nbr < backward_nbr {
        for k in 0..len {
            vertices.push(ring[rotate(k)]);
            edges.push(w.edges[rotate(k)]);
        }
    } else {
        for k in 0..len {
            let j = (i + len - k) % len;
            vertices.push(ring[j]);
            edges.push(w.edges[(j + len - 1) % len]);
        }
    }
    vertices.push(ring[i]);
    Walk { vertices, edges }
}

/// The canonical decomposition of `X ⊕ Y`.
pub fn decompose(g: &WeightedGraph, x: &EdgeSubset, y: &EdgeSubset) -> Decomposition {
    let d = x.symmetric_difference(y);
    let exhaustive = d.count_ones() <= EXHAUSTIVE_LIMIT;
    let mut adj = sub_adjacency(g, &d);
    let mut out = Decomposition::default();
    while (0..g.n()).any(|v| parity(&adj, v)) {
        let p = if exhaustive { min_path(&adj) } else { fallback_walk(&adj, false) };
        remove(&mut adj, &p);
        out.paths.push(orient_path(p));
    }
    while adj.iter().any(|l| !l.is_empty()) {
        let c = if exhaustive { min_cycle(&adj) } else { fallback_walk(&adj, true) };
        remove(&mut adj, &c);
        out.cycles.push(orient_cycle(c));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalPath {
    /// `Z_0 = X, …, Z_ℓ = Y`.
    pub states: Vec<EdgeSubset>,
    /// Edge toggled between `Z_i` and `Z_{i+1}`.
    pub flips: Vec<usize>,
}

impl CanonicalPath {
    pub fn len(&self) -> usize {
        self.flips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flips.is_empty()
    }
}

/// `γ_{X,Y}`: unwind the decomposition one edge at a time.
pub fn canonical_path(g: &WeightedGraph, x: &EdgeSubset, y: &EdgeSubset) -> CanonicalPath {
    let flips = decompose(g, x, y).edge_order();
    let mut states = Vec::with_capacity(flips.len() + 1);
    let mut z = x.clone();
    states.push(z.clone());
    for &e in &flips {
        z.flip(e);
        states.push(z.clone());
    }
    CanonicalPath { states, flips }
}

/// Recover `(X, Y)` from a transition `Z → Z'` of some `γ_{X,Y}` and the
/// encoding `U = X ⊕ Y ⊕ Z`.
pub fn reconstruct(g: &WeightedGraph, z: &EdgeSubset, z_next: &EdgeSubset, u: &EdgeSubset) -> Option<(EdgeSubset, EdgeSubset)> {
    let d = u.symmetric_difference(z);
    let flip = z.symmetric_difference(z_next);
    if flip.count_ones() != 1 {
        return None;
    }
    let e = flip.iter_ones().next().unwrap();
    let order = decompose(g, &EdgeSubset::empty(g.m()), &d).edge_order();
    let pos = order.iter().position(|&f| f == e)?;
    let mut x = z.clone();
    for &f in &order[..pos] {
        x.flip(f);
    }
    let y = x.symmetric_difference(&d);
    Some((x, y))
}

#[derive(Clone, Debug, Serialize)]
pub struct CongestionReport {
    pub rho: f64,
    /// `(Z, Z')` of the most congested transition, as hex.
    pub max_load_transition: (String, String),
    pub gap: f64,
    pub max_path_length: usize,
    pub bound_ok: bool,
    pub checks: Vec<Check>,
}

/// All canonical paths of the subgraph world `(g, s)`: flow validity, path
/// lengths, per-transition loads against `η_min^{-4} min(π(Z), π(Z'))`,
/// injectivity of the encoding, and `1/Gap ≤ ϱ`.
pub fn congestion(g: &WeightedGraph, s: &SgParams, max_edges: usize) -> Result<CongestionReport> {
    s.check(g)?;
    let eta_min = s.eta_min();
    if !(eta_min > 0.0) {
        return Err(Error::InvalidParameter("congestion needs every eta > 0".into()));
    }
    if g.m() > max_edges {
        return Err(Error::CapExceeded { states: 1u128 << (2 * g.m()), cap: 1u128 << (2 * max_edges) });
    }
    let size = state_count(g.m(), u128::MAX)? as usize;
    let pi = enumerate_sg(g, s, u128::MAX)?.probs;
    let cm = ef_sg_matrix(g, s, u128::MAX)?;

    let mut load: HashMap<(usize, usize), f64> = HashMap::new();
    let mut flow: Vec<f64> = vec![0.0; size * size];
    let mut seen_codes: HashSet<(usize, usize, u64)> = HashSet::new();
    let mut max_len = 0;
    let mut invalid_steps = 0u64;
    let mut collisions = 0u64;
    let mut bad_reconstructions = 0u64;
    for xi in 0..size {
        let x = EdgeSubset::from_index(g.m(), xi as u64);
        for yi in 0..size {
            let y = EdgeSubset::from_index(g.m(), yi as u64);
            let path = canonical_path(g, &x, &y);
            let w = pi[xi] * pi[yi];
            max_len = max_len.max(path.len());
            let (first, last) = (path.states[0].to_index() as usize, path.states.last().unwrap().to_index() as usize);
            flow[first * size + last] += w;
            let u_base = x.symmetric_difference(&y);
            for pair in path.states.windows(2) {
                let (zi, zj) = (pair[0].to_index() as usize, pair[1].to_index() as usize);
                if (pair[0].symmetric_difference(&pair[1])).count_ones() != 1 || cm.p[(zi, zj)] <= 0.0 {
                    invalid_steps += 1;
                }
                *load.entry((zi, zj)).or_insert(0.0) += w;
                let u = u_base.symmetric_difference(&pair[0]);
                if !seen_codes.insert((zi, zj, u.to_index())) {
                    collisions += 1;
                }
                if reconstruct(g, &pair[0], &pair[1], &u) != Some((x.clone(), y.clone())) {
                    bad_reconstructions += 1;
                }
            }
        }
    }

    let mut flow_residual: f64 = 0.0;
    for xi in 0..size {
        for yi in 0..size {
            flow_residual = flow_residual.max((flow[xi * size + yi] - pi[xi] * pi[yi]).abs());
        }
    }

    let scale = eta_min.powi(-4);
    let mut rho: f64 = 0.0;
    let mut argmax = (0, 0);
    let mut load_excess: f64 = 0.0;
    let mut worst_load = (0.0, 0.0);
    let mut keys: Vec<_> = load.keys().copied().collect();
    keys.sort_unstable();
    for key in keys {
        let l = load[&key];
        let (zi, zj) = key;
        let cap = scale * pi[zi].min(pi[zj]);
        if l - cap > load_excess {
            load_excess = l - cap;
            worst_load = (l, cap);
        }
        let r = max_len as f64 * l / (pi[zi] * cm.p[(zi, zj)]);
        if r > rho {
            rho = r;
            argmax = key;
        }
    }
    let rep = spectral(&cm)?;
    let support = pi.iter().filter(|&&p| p > 0.0).count();
    let inverse_gap = 1.0 / rep.gap;
    let gap_ok = support <= 1 || inverse_gap <= rho * (1.0 + EIGEN_TOL);
    let hex = |i: usize| EdgeSubset::from_index(g.m(), i as u64).to_hex();
    let checks = vec![
        Check::within("paths.flow_validity", flow_residual, 0.0, flow_residual, 1e-12),
        Check::at_most("paths.length_le_m", max_len as f64, g.m() as f64, 0.0),
        Check::count("paths.valid_transitions", invalid_steps, load.len() as u64),
        Check { check: "paths.load_bound".into(), lhs: worst_load.0, rhs: worst_load.1, residual: load_excess, pass: load_excess <= 1e-12 * scale },
        Check::count("paths.encoding_injective", collisions + bad_reconstructions, seen_codes.len() as u64),
        Check { check: "paths.inverse_gap_le_rho".into(), lhs: inverse_gap, rhs: rho, residual: (inverse_gap - rho).max(0.0), pass: gap_ok },
    ];
    Ok(CongestionReport {
        rho,
        max_load_transition: (hex(argmax.0), hex(argmax.1)),
        gap: rep.gap,
        max_path_length: max_len,
        bound_ok: checks.iter().all(|c| c.pass),
        checks,
    })
}
