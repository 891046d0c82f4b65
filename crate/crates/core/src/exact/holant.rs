//! Holant sums on the vertex/edge incidence graph and holographic transforms.
//!
//! The incidence graph `H` has one node per vertex of `G` (the `F` side), one
//! node per edge of `G` (the `G` side), and a variable on each of the `2m`
//! incidences. Incidence `2e` joins edge `e` to its first endpoint, `2e + 1`
//! to its second.

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::params::params_from_ising;
use crate::report::Check;
use crate::rng::RngStream;

use super::{enumerate_ising, enumerate_sg, IDENTITY_TOL};

/// A symmetric function of `d` Boolean inputs, `values[w]` at Hamming weight `w`.
#[derive(Clone, Debug, PartialEq)]
pub struct SymmetricSignature {
    values: Vec<f64>,
}

impl SymmetricSignature {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("a signature needs at least one value".into()));
        }
        if let Some(x) = values.iter().find(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(format!("non-finite signature value {x}")));
        }
        Ok(SymmetricSignature { values })
    }

    pub fn arity(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn at_weight(&self, w: usize) -> f64 {
        self.values[w]
    }

    /// Full `2^d` tensor, entry `x` at Hamming weight `popcount(x)`.
    pub fn to_tensor(&self) -> Vec<f64> {
        (0..1usize << self.arity()).map(|x| self.values[x.count_ones() as usize]).collect()
    }

    /// Read a symmetric signature back from a full tensor.
    pub fn from_tensor(arity: usize, tensor: &[f64]) -> Result<Self> {
        assert_eq!(tensor.len(), 1 << arity);
        let mut values = vec![f64::NAN; arity + 1];
        let mut deviation: f64 = 0.0;
        for (x, &t) in tensor.iter().enumerate() {
            let w = x.count_ones() as usize;
            if values[w].is_nan() {
                values[w] = t;
            } else {
                deviation = deviation.max((values[w] - t).abs() / values[w].abs().max(1.0));
            }
        }
        if deviation > 1e-12 {
            return Err(Error::NonSymmetricSignature { deviation });
        }
        SymmetricSignature::new(values)
    }

    /// Row-vector action `f M^{⊗d}`: `(fM)(y) = Σ_x f(x) ∏_i M[x_i][y_i]`.
    pub fn row_transform(&self, m: &[[f64; 2]; 2]) -> Result<Self> {
        let d = self.arity();
        let mut t = self.to_tensor();
        for axis in 0..d {
            contract_axis(&mut t, axis, m);
        }
        SymmetricSignature::from_tensor(d, &t)
    }

    /// Column-vector action `M^{⊗d} g`: `(Mg)(x) = Σ_y ∏_i M[x_i][y_i] g(y)`.
    pub fn column_transform(&self, m: &[[f64; 2]; 2]) -> Result<Self> {
        let mt = [[m[0][0], m[1][0]], [m[0][1], m[1][1]]];
        self.row_transform(&mt)
    }
}

/// `t'[.. y ..] = Σ_x t[.. x ..] m[x][y]` along bit `axis`.
fn contract_axis(t: &mut [f64], axis: usize, m: &[[f64; 2]; 2]) {
    let bit = 1usize << axis;
    for i in 0..t.len() {
        if i & bit == 0 {
            let (a0, a1) = (t[i], t[i | bit]);
            t[i] = a0 * m[0][0] + a1 * m[1][0];
            t[i | bit] = a0 * m[0][1] + a1 * m[1][1];
        }
    }
}

/// An invertible 2×2 basis change.
#[derive(Clone, Debug, PartialEq)]
pub struct HolTransform {
    t: [[f64; 2]; 2],
    inv: [[f64; 2]; 2],
}

impl HolTransform {
    pub fn new(t: [[f64; 2]; 2]) -> Result<Self> {
        let det = t[0][0] * t[1][1] - t[0][1] * t[1][0];
        let scale = t.iter().flatten().fold(0.0f64, |a, x| a.max(x.abs()));
        if !(det.abs() > 1e-12 * scale * scale) {
            return Err(Error::SingularTransform { det });
        }
        let inv = [[t[1][1] / det, -t[0][1] / det], [-t[1][0] / det, t[0][0] / det]];
        Ok(HolTransform { t, inv })
    }

    /// `[[1, 1], [1, -1]]`, which carries Ising signatures to subgraph-world ones.
    pub fn hadamard() -> Self {
        HolTransform::new([[1.0, 1.0], [1.0, -1.0]]).unwrap()
    }

    pub fn identity() -> Self {
        HolTransform::new([[1.0, 0.0], [0.0, 1.0]]).unwrap()
    }

    /// Entries uniform in `[-2, 2]`, resampled until `|det| ≥ 0.1`.
    pub fn random(rng: &mut RngStream) -> Self {
        loop {
            let mut t = [[0.0; 2]; 2];
            for x in t.iter_mut().flatten() {
                *x = 4.0 * rng.uniform() - 2.0;
            }
            if (t[0][0] * t[1][1] - t[0][1] * t[1][0]).abs() >= 0.1 {
                return HolTransform::new(t).unwrap();
            }
        }
    }

    pub fn matrix(&self) -> &[[f64; 2]; 2] {
        &self.t
    }

    pub fn inverse(&self) -> &[[f64; 2]; 2] {
        &self.inv
    }
}

/// The bipartite incidence structure of a graph.
#[derive(Clone, Debug)]
pub struct Incidence {
    /// `incidences[v]` lists the incidence variables at vertex `v`.
    incidences: Vec<Vec<usize>>,
    m: usize,
}

impl Incidence {
    pub fn of(g: &WeightedGraph) -> Self {
        let mut incidences = vec![Vec::new(); g.n()];
        for (e, &(u, v)) in g.edges().iter().enumerate() {
            incidences[u].push(2 * e);
            incidences[v].push(2 * e + 1);
        }
        Incidence { incidences, m: g.m() }
    }

    pub fn degree(&self, v: usize) -> usize {
        self.incidences[v].len()
    }

    pub fn vertex_count(&self) -> usize {
        self.incidences.len()
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }
}

/// `Σ_σ ∏_v f_v(σ|_v) ∏_e g_e(σ|_e)` over all `2^{2m}` incidence assignments.
pub fn holant(h: &Incidence, f: &[SymmetricSignature], g: &[SymmetricSignature], cap: u128) -> Result<f64> {
    check_shapes(h, f, g)?;
    let count = super::state_count(2 * h.edge_count(), cap)?;
    let mut total = 0.0;
    for sigma in 0..count {
        let mut term = 1.0;
        for (e, ge) in g.iter().enumerate() {
            term *= ge.at_weight((sigma >> (2 * e) & 3).count_ones() as usize);
        }
        if term == 0.0 {
            continue;
        }
        for (v, fv) in f.iter().enumerate() {
            let w = h.incidences[v].iter().filter(|&&i| sigma >> i & 1 == 1).count();
            term *= fv.at_weight(w);
        }
        total += term;
    }
    Ok(total)
}

/// Relative change of the Holant value under `F ↦ FT`, `G ↦ T⁻¹G`.
///
/// Both sides are evaluated in double-double arithmetic: for a general `T`
/// the transformed terms carry both signs and cancel by many orders of
/// magnitude, which plain `f64` cannot resolve to `IDENTITY_TOL`.
/// `T⁻¹G` is formed as `det(T)^{-2} adj(T)^{⊗2} G` so that the only inexact
/// division happens once, on the final value.
pub fn verify_hol_transform(
    h: &Incidence,
    f: &[SymmetricSignature],
    g: &[SymmetricSignature],
    t: &HolTransform,
    cap: u128,
) -> Result<Check> {
    check_shapes(h, f, g)?;
    let exact = |sig: &SymmetricSignature| sig.values().iter().map(|&x| Dd::from(x)).collect::<Vec<_>>();
    let before = holant_dd(h, &f.iter().map(exact).collect::<Vec<_>>(), &g.iter().map(exact).collect::<Vec<_>>(), cap)?;

    let m = t.matrix();
    let adj = [[m[1][1], -m[0][1]], [-m[1][0], m[0][0]]];
    let det = Dd::from(m[0][0]) * Dd::from(m[1][1]) - Dd::from(m[0][1]) * Dd::from(m[1][0]);
    let ft: Vec<Vec<Dd>> = f.iter().map(|fv| transform_symmetric(fv, m)).collect();
    // Column action M^{⊗2} g is the row action of Mᵀ.
    let adj_t = [[adj[0][0], adj[1][0]], [adj[0][1], adj[1][1]]];
    let gt: Vec<Vec<Dd>> = g.iter().map(|ge| transform_symmetric(ge, &adj_t)).collect();
    let scaled = holant_dd(h, &ft, &gt, cap)?;
    let after = scaled.to_f64() / det.to_f64().powi(2 * h.edge_count() as i32);

    let before = before.to_f64();
    let residual = if before == after { 0.0 } else { ((before - after) / before).abs() };
    Ok(Check::within("holant.transform_invariance", before, after, residual, IDENTITY_TOL))
}

fn check_shapes(h: &Incidence, f: &[SymmetricSignature], g: &[SymmetricSignature]) -> Result<()> {
    if f.len() != h.vertex_count() {
        return Err(Error::DimensionMismatch { expected: h.vertex_count(), actual: f.len() });
    }
    if g.len() != h.edge_count() {
        return Err(Error::DimensionMismatch { expected: h.edge_count(), actual: g.len() });
    }
    for (v, fv) in f.iter().enumerate() {
        if fv.arity() != h.degree(v) {
            return Err(Error::DimensionMismatch { expected: h.degree(v), actual: fv.arity() });
        }
    }
    if let Some(ge) = g.iter().find(|ge| ge.arity() != 2) {
        return Err(Error::DimensionMismatch { expected: 2, actual: ge.arity() });
    }
    Ok(())
}

/// Weight-indexed values of `f M^{⊗d}`, contracted in double-double.
fn transform_symmetric(f: &SymmetricSignature, m: &[[f64; 2]; 2]) -> Vec<Dd> {
    let d = f.arity();
    let mut t: Vec<Dd> = f.to_tensor().into_iter().map(Dd::from).collect();
    let md = m.map(|row| row.map(Dd::from));
    for axis in 0..d {
        let bit = 1usize << axis;
        for i in 0..t.len() {
            if i & bit == 0 {
                let (a0, a1) = (t[i], t[i | bit]);
                t[i] = a0 * md[0][0] + a1 * md[1][0];
                t[i | bit] = a0 * md[0][1] + a1 * md[1][1];
            }
        }
    }
    (0..=d).map(|w| t[(1usize << w) - 1]).collect()
}

fn holant_dd(h: &Incidence, f: &[Vec<Dd>], g: &[Vec<Dd>], cap: u128) -> Result<Dd> {
    let count = super::state_count(2 * h.edge_count(), cap)?;
    let mut total = Dd::ZERO;
    for sigma in 0..count {
        let mut term = Dd::ONE;
        for (e, ge) in g.iter().enumerate() {
            term = term * ge[(sigma >> (2 * e) & 3).count_ones() as usize];
        }
        if term.is_zero() {
            continue;
        }
        for (v, fv) in f.iter().enumerate() {
            let w = h.incidences[v].iter().filter(|&&i| sigma >> i & 1 == 1).count();
            term = term * fv[w];
        }
        total = total + term;
    }
    Ok(total)
}

/// Unevaluated sum `hi + lo` with `|lo| ≤ ulp(hi)/2`: about 106 significant bits.
#[derive(Clone, Copy, Debug, PartialEq)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    fn from(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    fn is_zero(self) -> bool {
        self.hi == 0.0
    }

    fn two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        let bb = s - a;
        Dd { hi: s, lo: (a - (s - bb)) + (b - bb) }
    }

    fn fast_two_sum(a: f64, b: f64) -> Dd {
        let s = a + b;
        Dd { hi: s, lo: b - (s - a) }
    }
}

impl std::ops::Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        let s = Dd::two_sum(self.hi, o.hi);
        let t = Dd::two_sum(self.lo, o.lo);
        let r = Dd::fast_two_sum(s.hi, s.lo + t.hi);
        Dd::fast_two_sum(r.hi, r.lo + t.lo)
    }
}

impl std::ops::Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl std::ops::Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        self + -o
    }
}

impl std::ops::Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p) + (self.hi * o.lo + self.lo * o.hi);
        Dd::fast_two_sum(p, e)
    }
}

/// `[1,0]^{⊗d} + λ[0,1]^{⊗d}` on each vertex.
pub fn ising_vertex_signatures(g: &WeightedGraph) -> Vec<SymmetricSignature> {
    (0..g.n())
        .map(|v| {
            let d = g.degree(v);
            let mut values = vec![0.0; d + 1];
            values[0] += 1.0;
            values[d] += g.lambda()[v];
            SymmetricSignature::new(values).unwrap()
        })
        .collect()
}

/// `[β, 1, β]` on each edge.
pub fn ising_edge_signatures(g: &WeightedGraph) -> Vec<SymmetricSignature> {
    g.beta().iter().map(|&b| SymmetricSignature::new(vec![b, 1.0, b]).unwrap()).collect()
}

/// `[1, η, 1, η, ...]` on each vertex.
pub fn sg_vertex_signatures(eta: &[f64], h: &Incidence) -> Vec<SymmetricSignature> {
    eta.iter()
        .enumerate()
        .map(|(v, &x)| {
            SymmetricSignature::new((0..=h.degree(v)).map(|w| if w % 2 == 0 { 1.0 } else { x }).collect()).unwrap()
        })
        .collect()
}

/// `[1 - p, 0, p]` on each edge.
pub fn sg_edge_signatures(p: &[f64]) -> Vec<SymmetricSignature> {
    p.iter().map(|&x| SymmetricSignature::new(vec![1.0 - x, 0.0, x]).unwrap()).collect()
}

/// `[1, 0, 1]` on each edge (the equality constraint).
pub fn equality_edge_signatures(m: usize) -> Vec<SymmetricSignature> {
    vec![SymmetricSignature::new(vec![1.0, 0.0, 1.0]).unwrap(); m]
}

fn signature_residual(a: &SymmetricSignature, b: &SymmetricSignature) -> f64 {
    a.values()
        .iter()
        .zip(b.values())
        .map(|(x, y)| (x - y).abs() / y.abs().max(1.0))
        .fold(0.0, f64::max)
}

/// The Ising → subgraph-world identities on `g`:
///
/// * `f_v T = (1+λ_v) [1, η_v, 1, ...]` for every vertex,
/// * `T⁻¹ [β,1,β] = β [1-p, 0, p]` for every edge,
/// * `Holant(F_Ising | G_Ising) = Z_Ising` and `Holant(F_sg | G_sg) = Z_sg`,
/// * invariance of the Ising Holant under `T`.
pub fn verify_ising_sg_transform(g: &WeightedGraph, cap: u128) -> Result<Vec<Check>> {
    let mp = params_from_ising(g)?;
    let h = Incidence::of(g);
    let t = HolTransform::hadamard();
    let fi = ising_vertex_signatures(g);
    let gi = ising_edge_signatures(g);
    let fs = sg_vertex_signatures(mp.sg.eta(), &h);
    let gs = sg_edge_signatures(mp.sg.p());

    let mut vertex_res: f64 = 0.0;
    for (v, (a, b)) in fi.iter().zip(&fs).enumerate() {
        let scaled: Vec<f64> = b.values().iter().map(|x| x * (1.0 + g.lambda()[v])).collect();
        vertex_res = vertex_res.max(signature_residual(&a.row_transform(t.matrix())?, &SymmetricSignature::new(scaled)?));
    }
    let mut edge_res: f64 = 0.0;
    for (e, (a, b)) in gi.iter().zip(&gs).enumerate() {
        let scaled: Vec<f64> = b.values().iter().map(|x| x * g.beta()[e]).collect();
        edge_res = edge_res.max(signature_residual(&a.column_transform(t.inverse())?, &SymmetricSignature::new(scaled)?));
    }
    let z_ising = enumerate_ising(g, cap)?.z();
    let z_sg = enumerate_sg(g, &mp.sg, cap)?.z();
    let hol_ising = holant(&h, &fi, &gi, cap)?;
    let hol_sg = holant(&h, &fs, &gs, cap)?;
    Ok(vec![
        Check::within("holant.vertex_signature_transform", vertex_res, 0.0, vertex_res, IDENTITY_TOL),
        Check::within("holant.edge_signature_transform", edge_res, 0.0, edge_res, IDENTITY_TOL),
        Check::relative("holant.ising_equals_z", hol_ising, z_ising, IDENTITY_TOL),
        Check::relative("holant.sg_equals_z", hol_sg, z_sg, IDENTITY_TOL),
        {
            let mut c = verify_hol_transform(&h, &fi, &gi, &t, cap)?;
            c.check = "holant.ising_transform_invariance".into();
            c
        },
    ])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::DEFAULT_ENUM_CAP;
    use crate::generators;
    use approx::assert_relative_eq;

    fn k2(lambda: f64) -> WeightedGraph {
        WeightedGraph::uniform(2, vec![(0, 1)], 2.0, lambda).unwrap()
    }

    #[test]
    fn ising_holant_on_k2() {
        let g = k2(1.0);
        let h = Incidence::of(&g);
        let z = holant(&h, &ising_vertex_signatures(&g), &ising_edge_signatures(&g), DEFAULT_ENUM_CAP).unwrap();
        assert_relative_eq!(z, 6.0, epsilon = 1e-12);
    }

    #[test]
    fn all_ones_counts_assignments() {
        let g = generators::cycle(4, 2.0, 1.0).unwrap();
        let h = Incidence::of(&g);
        let f: Vec<_> = (0..4).map(|v| SymmetricSignature::new(vec![1.0; h.degree(v) + 1]).unwrap()).collect();
        let e = vec![SymmetricSignature::new(vec![1.0; 3]).unwrap(); 4];
        assert_eq!(holant(&h, &f, &e, DEFAULT_ENUM_CAP).unwrap(), 256.0);
    }

    #[test]
    fn hadamard_identities() {
        for lambda in [1.0, 1.0 / 3.0, 0.8] {
            let checks = verify_ising_sg_transform(&k2(lambda), DEFAULT_ENUM_CAP).unwrap();
            assert!(checks.iter().all(|c| c.pass), "{checks:?}");
        }
        let g = WeightedGraph::new(3, vec![(0, 1), (1, 2), (0, 2)], vec![0.2, 1.0, 0.7], vec![1.5, 3.0, 2.2]).unwrap();
        assert!(verify_ising_sg_transform(&g, DEFAULT_ENUM_CAP).unwrap().iter().all(|c| c.pass));
    }

    #[test]
    fn equality_signature_halves() {
        let t = HolTransform::hadamard();
        let g = &equality_edge_signatures(1)[0];
        assert_eq!(g.column_transform(t.inverse()).unwrap().values(), &[0.5, 0.0, 0.5]);
    }

    #[test]
    fn counting_identity_via_holant() {
        // Holant(F1 | [1,0,1]) = ∏(1+λ) (1/2)^m Holant(F2 | [1,0,1]) on K2, λ = 1/3.
        let g = k2(1.0 / 3.0);
        let h = Incidence::of(&g);
        let eq = equality_edge_signatures(1);
        let lhs = holant(&h, &ising_vertex_signatures(&g), &eq, DEFAULT_ENUM_CAP).unwrap();
        let rhs = holant(&h, &sg_vertex_signatures(&[0.5, 0.5], &h), &eq, DEFAULT_ENUM_CAP).unwrap();
        assert_relative_eq!(lhs, 10.0 / 9.0, epsilon = 1e-12);
        assert_relative_eq!(lhs, (16.0 / 9.0) * 0.5 * rhs, epsilon = 1e-12);
    }

    #[test]
    fn identity_and_random_transforms() {
        let mut rng = RngStream::new(11);
        let g = WeightedGraph::new(3, vec![(0, 1), (1, 2)], vec![0.4, 1.0, 0.9], vec![2.0, 4.0]).unwrap();
        let h = Incidence::of(&g);
        let (f, e) = (ising_vertex_signatures(&g), ising_edge_signatures(&g));
        let c = verify_hol_transform(&h, &f, &e, &HolTransform::identity(), DEFAULT_ENUM_CAP).unwrap();
        assert_eq!(c.residual, 0.0);
        for _ in 0..20 {
            let t = HolTransform::random(&mut rng);
            assert!(verify_hol_transform(&h, &f, &e, &t, DEFAULT_ENUM_CAP).unwrap().pass);
        }
    }

    #[test]
    fn ill_conditioned_transform_on_dense_instance() {
        // |T⁻¹| entries near 16: plain f64 loses every significant digit here.
        let t = HolTransform::new([[-1.2443561813178596, 1.818093630831204], [0.12284677627003626, -0.0894985516123219]]).unwrap();
        let g = generators::complete(4, 3.0, 0.6).unwrap();
        let h = Incidence::of(&g);
        let (f, e) = (ising_vertex_signatures(&g), ising_edge_signatures(&g));
        let c = verify_hol_transform(&h, &f, &e, &t, DEFAULT_ENUM_CAP).unwrap();
        assert!(c.pass, "{c:?}");
    }

    #[test]
    fn double_double_keeps_low_order_bits() {
        let x = Dd::from(1.0) + Dd::from(1e-20);
        assert_eq!(x.hi, 1.0);
        assert_eq!(x.lo, 1e-20);
        assert_eq!((x - Dd::from(1.0)).to_f64(), 1e-20);
        let third = Dd::from(1.0 / 3.0);
        let p = third * Dd::from(3.0);
        // 3 · fl(1/3) = 1 - 2^-54 exactly.
        assert_eq!((p - Dd::ONE).to_f64(), -(2f64.powi(-54)));
    }

    #[test]
    fn singular_transform_rejected() {
        assert!(matches!(HolTransform::new([[1.0, 2.0], [2.0, 4.0]]), Err(Error::SingularTransform { .. })));
    }

    #[test]
    fn non_symmetric_tensor_rejected() {
        assert!(SymmetricSignature::from_tensor(2, &[1.0, 2.0, 3.0, 4.0]).is_err());
    }
}
