//! Dense transition matrices over canonically enumerated state spaces.
//!
//! Row/column `i` is the state with index `i` (see
//! [`EdgeSubset::from_index`]). The edge-flip matrices are built from global
//! weights through the enumeration oracle, not from the local ratios used by
//! the samplers, so comparing the two is meaningful. From a zero-weight state
//! a flip is accepted iff its target has positive weight.

use nalgebra::{DMatrix, DVector};

use crate::bits::{EdgeSubset, SpinConfig};
use crate::dynamics::{accept_probability, Dynamics};
use crate::error::{Error, Result};
use crate::exact::{enumerate_ising, enumerate_sg, enumerate_wrc, state_count, ExactDistribution};
use crate::graph::WeightedGraph;
use crate::model::components;
use crate::params::{SgParams, WrcParams};
use crate::weight::ln_one_plus_exp;

/// Default bound on the number of states of a dense matrix.
pub const DEFAULT_MATRIX_CAP: u128 = 4096;

#[derive(Clone, Debug)]
pub struct ChainMatrix {
    pub p: DMatrix<f64>,
    pub pi: DVector<f64>,
}

impl ChainMatrix {
    pub fn new(p: DMatrix<f64>, pi: DVector<f64>) -> Result<Self> {
        if !p.is_square() || p.nrows() != pi.len() {
            return Err(Error::DimensionMismatch { expected: pi.len(), actual: p.nrows() });
        }
        Ok(ChainMatrix { p, pi })
    }

    pub fn len(&self) -> usize {
        self.pi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pi.is_empty()
    }

    /// `max_x |Σ_y P(x,y) - 1|`.
    pub fn row_sum_residual(&self) -> f64 {
        self.p.row_iter().map(|r| (r.sum() - 1.0).abs()).fold(0.0, f64::max)
    }

    /// `max_y |(πP)(y) - π(y)|`.
    pub fn stationarity_residual(&self) -> f64 {
        let pi_p = self.p.tr_mul(&self.pi);
        (pi_p - &self.pi).amax()
    }

    /// `max_{x,y} |π(x)P(x,y) - π(y)P(y,x)|`.
    pub fn reversibility_residual(&self) -> f64 {
        let n = self.len();
        let mut r: f64 = 0.0;
        for x in 0..n {
            for y in x + 1..n {
                r = r.max((self.pi[x] * self.p[(x, y)] - self.pi[y] * self.p[(y, x)]).abs());
            }
        }
        r
    }

    /// `(I + P) / 2`.
    pub fn lazy(&self) -> ChainMatrix {
        let n = self.len();
        ChainMatrix { p: (&self.p + DMatrix::identity(n, n)) * 0.5, pi: self.pi.clone() }
    }
}

fn check_cap(width: usize, cap: u128) -> Result<usize> {
    Ok(state_count(width, cap)? as usize)
}

fn pi_of<S>(d: &ExactDistribution<S>) -> DVector<f64> {
    DVector::from_vec(d.probs.clone())
}

/// Metropolis edge-flip matrix for a distribution over edge subsets.
fn metropolis(m: usize, ln_w: &[f64]) -> DMatrix<f64> {
    let size = ln_w.len();
    let mut p = DMatrix::zeros(size, size);
    if m == 0 {
        p[(0, 0)] = 1.0;
        return p;
    }
    let step = 1.0 / (2.0 * m as f64);
    for x in 0..size {
        let mut out = 0.0;
        for e in 0..m {
            let y = x ^ (1 << e);
            let a = if ln_w[x] == f64::NEG_INFINITY {
                if ln_w[y] == f64::NEG_INFINITY {
                    0.0
                } else {
                    1.0
                }
            } else {
                accept_probability(ln_w[y] - ln_w[x])
            };
            p[(x, y)] = step * a;
            out += step * a;
        }
        p[(x, x)] = 1.0 - out;
    }
    p
}

/// `P_EF` for `π_wrc(w)`.
pub fn ef_wrc_matrix(g: &WeightedGraph, w: &WrcParams, cap: u128) -> Result<ChainMatrix> {
    check_cap(g.m(), cap)?;
    let d = enumerate_wrc(g, w, cap)?;
    ChainMatrix::new(metropolis(g.m(), &d.ln_weights), pi_of(&d))
}

/// `P_EF` for `π_sg(s)`.
pub fn ef_sg_matrix(g: &WeightedGraph, s: &SgParams, cap: u128) -> Result<ChainMatrix> {
    check_cap(g.m(), cap)?;
    let d = enumerate_sg(g, s, cap)?;
    ChainMatrix::new(metropolis(g.m(), &d.ln_weights), pi_of(&d))
}

/// Single-bond matrix, entries from the sampler's own update rule.
pub fn sb_matrix(g: &WeightedGraph, w: &WrcParams, cap: u128) -> Result<ChainMatrix> {
    let size = check_cap(g.m(), cap)?;
    let d = enumerate_wrc(g, w, cap)?;
    let m = g.m();
    let mut dyn_ = Dynamics::wrc(g, w.clone())?;
    let mut p = DMatrix::zeros(size, size);
    if m == 0 {
        p[(0, 0)] = 1.0;
    }
    for x in 0..size {
        let s = EdgeSubset::from_index(m, x as u64);
        let mut out = 0.0;
        for e in 0..m {
            let q = dyn_.sb_include_probability(&s, e);
            let move_prob = if s.get(e) { 1.0 - q } else { q } / (2.0 * m as f64);
            p[(x, x ^ (1 << e))] = move_prob;
            out += move_prob;
        }
        if m > 0 {
            p[(x, x)] = 1.0 - out;
        }
    }
    ChainMatrix::new(p, pi_of(&d))
}

/// Kernel of the coupling map `φ` with a uniform record, from the local
/// acceptance ratios used by the sampler.
pub fn phi_matrix(g: &WeightedGraph, w: &WrcParams, cap: u128) -> Result<ChainMatrix> {
    let size = check_cap(g.m(), cap)?;
    let d = enumerate_wrc(g, w, cap)?;
    let m = g.m();
    let mut dyn_ = Dynamics::wrc(g, w.clone())?;
    let mut p = DMatrix::zeros(size, size);
    if m == 0 {
        p[(0, 0)] = 1.0;
    }
    for x in 0..size {
        let s = EdgeSubset::from_index(m, x as u64);
        let mut out = 0.0;
        for e in 0..m {
            // ℓ = 1 and b ≠ X(e): probability 1/4, edge 1/m
            let a = accept_probability(dyn_.wrc_flip_log_ratio(&s, e)) / (4.0 * m as f64);
            p[(x, x ^ (1 << e))] = a;
            out += a;
        }
        if m > 0 {
            p[(x, x)] = 1.0 - out;
        }
    }
    ChainMatrix::new(p, pi_of(&d))
}

/// `P_{I→R}` as a `2^n × 2^m` matrix.
pub fn i_to_r_matrix(g: &WeightedGraph, w: &WrcParams, cap: u128) -> Result<DMatrix<f64>> {
    let rows = check_cap(g.n(), cap)?;
    let cols = check_cap(g.m(), cap)?;
    let mut k = DMatrix::zeros(rows, cols);
    for i in 0..rows {
        let sigma = SpinConfig::from_index(g.n(), i as u64);
        let mono: Vec<bool> = g.edges().iter().map(|&(u, v)| sigma.get(u) == sigma.get(v)).collect();
        for j in 0..cols {
            let mut pr = 1.0;
            for (e, &mono_e) in mono.iter().enumerate() {
                let in_s = j >> e & 1 == 1;
                pr *= match (mono_e, in_s) {
                    (false, true) => 0.0,
                    (false, false) => 1.0,
                    (true, true) => w.p()[e],
                    (true, false) => 1.0 - w.p()[e],
                };
            }
            k[(i, j)] = pr;
        }
    }
    Ok(k)
}

/// `P_{R→I}` as a `2^m × 2^n` matrix.
pub fn r_to_i_matrix(g: &WeightedGraph, w: &WrcParams, cap: u128) -> Result<DMatrix<f64>> {
    let rows = check_cap(g.m(), cap)?;
    let cols = check_cap(g.n(), cap)?;
    let mut k = DMatrix::zeros(rows, cols);
    for i in 0..rows {
        let s = EdgeSubset::from_index(g.m(), i as u64);
        let comps = components(g, &s);
        let up: Vec<f64> = comps
            .iter()
            .map(|c| {
                let ln: f64 = c.iter().map(|&v| w.ln_lambda()[v]).sum();
                (ln - ln_one_plus_exp(ln)).exp()
            })
            .collect();
        for j in 0..cols {
            let sigma = SpinConfig::from_index(g.n(), j as u64);
            let mut pr = 1.0;
            for (c, &q) in comps.iter().zip(&up) {
                let spin = sigma.get(c[0]);
                if c.iter().any(|&v| sigma.get(v) != spin) {
                    pr = 0.0;
                    break;
                }
                pr *= if spin { q } else { 1.0 - q };
            }
            k[(i, j)] = pr;
        }
    }
    Ok(k)
}

/// The two half steps with their stationary laws.
#[derive(Clone, Debug)]
pub struct HalfSteps {
    pub i_to_r: DMatrix<f64>,
    pub r_to_i: DMatrix<f64>,
    pub pi_ising: DVector<f64>,
    pub pi_wrc: DVector<f64>,
}

impl HalfSteps {
    /// `w` must be the WRC parameters of `g`'s Ising model.
    pub fn build(g: &WeightedGraph, w: &WrcParams, cap: u128) -> Result<Self> {
        Ok(HalfSteps {
            i_to_r: i_to_r_matrix(g, w, cap)?,
            r_to_i: r_to_i_matrix(g, w, cap)?,
            pi_ising: pi_of(&enumerate_ising(g, cap)?),
            pi_wrc: pi_of(&enumerate_wrc(g, w, cap)?),
        })
    }

    /// `P_SW^Ising = P_{I→R} P_{R→I}`.
    pub fn sw_ising(&self) -> ChainMatrix {
        ChainMatrix { p: &self.i_to_r * &self.r_to_i, pi: self.pi_ising.clone() }
    }

    /// `P_SW^wrc = P_{R→I} P_{I→R}`.
    pub fn sw_wrc(&self) -> ChainMatrix {
        ChainMatrix { p: &self.r_to_i * &self.i_to_r, pi: self.pi_wrc.clone() }
    }

    /// `max |π_Ising(σ) P_{I→R}(σ,S) - π_wrc(S) P_{R→I}(S,σ)|`, i.e. the
    /// entrywise gap in `D_Ising P_{I→R} = (P_{R→I})ᵀ D_wrc`.
    pub fn adjointness_residual(&self) -> f64 {
        let lhs = DMatrix::from_diagonal(&self.pi_ising) * &self.i_to_r;
        let rhs = self.r_to_i.transpose() * DMatrix::from_diagonal(&self.pi_wrc);
        (lhs - rhs).amax()
    }

    /// `max |π_Ising P_{I→R} - π_wrc|`.
    pub fn forward_stationarity_residual(&self) -> f64 {
        (self.i_to_r.tr_mul(&self.pi_ising) - &self.pi_wrc).amax()
    }

    /// `max |π_wrc P_{R→I} - π_Ising|`.
    pub fn backward_stationarity_residual(&self) -> f64 {
        (self.r_to_i.tr_mul(&self.pi_wrc) - &self.pi_ising).amax()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::DEFAULT_ENUM_CAP;
    use crate::params::params_from_ising;
    use approx::assert_relative_eq;

    fn k2() -> WeightedGraph {
        WeightedGraph::uniform(2, vec![(0, 1)], 2.0, 1.0).unwrap()
    }

    #[test]
    fn ef_wrc_on_k2() {
        let g = k2();
        let w = params_from_ising(&g).unwrap().wrc;
        let cm = ef_wrc_matrix(&g, &w, DEFAULT_MATRIX_CAP).unwrap();
        let expected = DMatrix::from_row_slice(2, 2, &[0.75, 0.25, 0.5, 0.5]);
        assert_relative_eq!(cm.p, expected, epsilon = 1e-14);
        assert!(cm.row_sum_residual() < 1e-14);
        assert!(cm.stationarity_residual() < 1e-14);
    }

    #[test]
    fn sb_on_k2() {
        let g = k2();
        let w = params_from_ising(&g).unwrap().wrc;
        let cm = sb_matrix(&g, &w, DEFAULT_MATRIX_CAP).unwrap();
        assert_relative_eq!(cm.p[(0, 1)], 0.125, epsilon = 1e-14);
        assert!(cm.reversibility_residual() < 1e-14);
    }

    #[test]
    fn phi_kernel_is_lazy_ef() {
        let g = WeightedGraph::new(4, vec![(0, 1), (1, 2), (2, 3), (0, 2)], vec![0.3, 1.0, 0.6, 0.9], vec![1.5, 2.0, 3.0, 1.2])
            .unwrap();
        let w = params_from_ising(&g).unwrap().wrc;
        let phi = phi_matrix(&g, &w, DEFAULT_MATRIX_CAP).unwrap();
        let ef = ef_wrc_matrix(&g, &w, DEFAULT_MATRIX_CAP).unwrap().lazy();
        assert!((phi.p - ef.p).amax() < 1e-12);
    }

    #[test]
    fn sw_on_k2_by_branches() {
        // From σ = (0,0): keep the edge w.p. 1/2 (then one fair coin for the
        // pair), else two independent fair coins.
        let g = k2();
        let w = params_from_ising(&g).unwrap().wrc;
        let hs = HalfSteps::build(&g, &w, DEFAULT_ENUM_CAP).unwrap();
        let sw = hs.sw_ising();
        let row: Vec<f64> = sw.p.row(0).iter().copied().collect();
        let mut expected = [0.0; 4];
        for keep in [true, false] {
            let pk = 0.5;
            for coins in 0..4usize {
                let (a, b) = (coins & 1, coins >> 1 & 1);
                let spins = if keep { a | a << 1 } else { a | b << 1 };
                expected[spins] += pk * 0.25;
            }
        }
        for (r, e) in row.iter().zip(expected) {
            assert_relative_eq!(*r, e, epsilon = 1e-14);
        }
        assert!(hs.adjointness_residual() < 1e-14);
    }

    #[test]
    fn cap_applies() {
        let g = crate::generators::complete(6, 2.0, 1.0).unwrap();
        let w = params_from_ising(&g).unwrap().wrc;
        assert!(matches!(ef_wrc_matrix(&g, &w, DEFAULT_MATRIX_CAP), Err(Error::CapExceeded { .. })));
    }
}
