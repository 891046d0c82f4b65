//! Brute-force enumeration of small instances.
//!
//! States are enumerated in canonical index order (bit `i` of the index is
//! coordinate `i`), so `probs[s.to_index()]` is the probability of `s`.

pub mod holant;

use crate::bits::{EdgeSubset, SpinConfig};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::model::{components, ising_weight, odd_vertices, sg_weight, wrc_weight};
use crate::params::{params_from_ising, SgParams, WrcParams};
use crate::report::Check;
use crate::weight::{ln_one_plus_exp, ln_relative_residual, log_sum_exp};

/// Default bound on the number of enumerated states.
pub const DEFAULT_ENUM_CAP: u128 = 1 << 22;

/// Tolerance used by the partition-function identities.
pub const IDENTITY_TOL: f64 = 1e-10;

#[derive(Clone, Debug)]
pub struct ExactDistribution<S> {
    pub states: Vec<S>,
    pub probs: Vec<f64>,
    /// `ln wt(state)` per state.
    pub ln_weights: Vec<f64>,
    pub ln_z: f64,
}

impl<S> ExactDistribution<S> {
    fn from_ln_weights(states: Vec<S>, ln_weights: Vec<f64>) -> Self {
        let ln_z = log_sum_exp(&ln_weights);
        let probs = ln_weights.iter().map(|w| (w - ln_z).exp()).collect();
        ExactDistribution { states, probs, ln_weights, ln_z }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn z(&self) -> f64 {
        self.ln_z.exp()
    }

    /// Smallest positive probability.
    pub fn pi_min(&self) -> f64 {
        self.probs.iter().copied().filter(|&p| p > 0.0).fold(f64::INFINITY, f64::min)
    }
}

/// `2^width` states, if within `cap`.
pub fn state_count(width: usize, cap: u128) -> Result<u64> {
    let states = if width >= 127 { u128::MAX } else { 1u128 << width };
    if width > 63 || states > cap {
        return Err(Error::CapExceeded { states, cap });
    }
    Ok(states as u64)
}

pub fn enumerate_ising(g: &WeightedGraph, cap: u128) -> Result<ExactDistribution<SpinConfig>> {
    let count = state_count(g.n(), cap)?;
    let states: Vec<_> = (0..count).map(|i| SpinConfig::from_index(g.n(), i)).collect();
    let ln_w = states.iter().map(|s| ising_weight(g, s).map(|w| w.ln())).collect::<Result<_>>()?;
    Ok(ExactDistribution::from_ln_weights(states, ln_w))
}

pub fn enumerate_wrc(g: &WeightedGraph, w: &WrcParams, cap: u128) -> Result<ExactDistribution<EdgeSubset>> {
    let count = state_count(g.m(), cap)?;
    let states: Vec<_> = (0..count).map(|i| EdgeSubset::from_index(g.m(), i)).collect();
    let ln_w = states.iter().map(|s| wrc_weight(g, w, s).map(|x| x.ln())).collect::<Result<_>>()?;
    Ok(ExactDistribution::from_ln_weights(states, ln_w))
}

pub fn enumerate_sg(g: &WeightedGraph, sp: &SgParams, cap: u128) -> Result<ExactDistribution<EdgeSubset>> {
    let count = state_count(g.m(), cap)?;
    let states: Vec<_> = (0..count).map(|i| EdgeSubset::from_index(g.m(), i)).collect();
    let ln_w = states.iter().map(|s| sg_weight(g, sp, s).map(|x| x.ln())).collect::<Result<_>>()?;
    Ok(ExactDistribution::from_ln_weights(states, ln_w))
}

/// The three partition functions of one Ising instance.
#[derive(Clone, Debug)]
pub struct EquivalenceReport {
    pub ln_z_ising: f64,
    pub ln_z_wrc: f64,
    pub ln_z_sg: f64,
    /// `ln ∏ β_e`.
    pub ln_beta_product: f64,
    /// `ln ∏ (1 + λ_v)`.
    pub ln_field_product: f64,
    pub checks: Vec<Check>,
}

/// `(∏β) Z_wrc = Z_Ising = ∏(1+λ) (∏β) Z_sg`, compared in log domain; the
/// `lhs`/`rhs` fields of the checks hold logarithms.
pub fn verify_equivalence(g: &WeightedGraph, cap: u128) -> Result<EquivalenceReport> {
    let mp = params_from_ising(g)?;
    let ln_z_ising = enumerate_ising(g, cap)?.ln_z;
    let ln_z_wrc = enumerate_wrc(g, &mp.wrc, cap)?.ln_z;
    let ln_z_sg = enumerate_sg(g, &mp.sg, cap)?.ln_z;
    let ln_beta_product: f64 = g.beta().iter().map(|b| b.ln()).sum();
    let ln_field_product: f64 = g.lambda().iter().map(|l| l.ln_1p()).sum();
    let wrc_side = ln_beta_product + ln_z_wrc;
    let sg_side = ln_field_product + ln_beta_product + ln_z_sg;
    let checks = vec![
        Check::within(
            "equivalence.ising_vs_wrc",
            ln_z_ising,
            wrc_side,
            ln_relative_residual(ln_z_ising, wrc_side),
            IDENTITY_TOL,
        ),
        Check::within(
            "equivalence.ising_vs_sg",
            ln_z_ising,
            sg_side,
            ln_relative_residual(ln_z_ising, sg_side),
            IDENTITY_TOL,
        ),
    ];
    Ok(EquivalenceReport { ln_z_ising, ln_z_wrc, ln_z_sg, ln_beta_product, ln_field_product, checks })
}

/// `∏_{C ∈ κ(V,E)} (1 + ∏_C λ) = ∏(1+λ) 2^{-m} Σ_{E' ⊆ E} ∏_{odd(E')} η` with
/// `η = (1-λ)/(1+λ)` and `λ = lambda` (any values in `[0, 1]`).
pub fn verify_counting_identity(g: &WeightedGraph, lambda: &[f64], cap: u128) -> Result<Check> {
    if lambda.len() != g.n() {
        return Err(Error::DimensionMismatch { expected: g.n(), actual: lambda.len() });
    }
    let count = state_count(g.m(), cap)?;
    let all = EdgeSubset::full(g.m());
    let lhs: f64 = components(g, &all)
        .iter()
        .map(|c| ln_one_plus_exp(c.iter().map(|&v| lambda[v].ln()).sum()))
        .sum();
    let ln_eta: Vec<f64> = lambda.iter().map(|&l| ((1.0 - l) / (1.0 + l)).ln()).collect();
    let terms: Vec<f64> = (0..count)
        .map(|i| {
            let sub = EdgeSubset::from_index(g.m(), i);
            odd_vertices(g, &sub).iter().map(|&v| ln_eta[v]).sum()
        })
        .collect();
    let rhs = lambda.iter().map(|l| l.ln_1p()).sum::<f64>() - g.m() as f64 * std::f64::consts::LN_2 + log_sum_exp(&terms);
    Ok(Check::within("counting_identity", lhs.exp(), rhs.exp(), ln_relative_residual(lhs, rhs), IDENTITY_TOL))
}

/// Law of `R = S ∪ (independent p/(1-p) dilution of E ∖ S)` for `S ~ π_sg`.
pub fn diluted_distribution(g: &WeightedGraph, sp: &SgParams, cap: u128) -> Result<Vec<f64>> {
    let sg = enumerate_sg(g, sp, cap)?;
    let m = g.m();
    let full = if m == 0 { 0 } else { u64::MAX >> (64 - m) };
    let ln_add: Vec<f64> = sp.p().iter().map(|&p| (p / (1.0 - p)).ln()).collect();
    let ln_skip: Vec<f64> = sp.p().iter().map(|&p| (1.0 - p / (1.0 - p)).ln()).collect();
    let mut pr = vec![0.0; sg.len()];
    for (s, &ps) in sg.probs.iter().enumerate() {
        if ps == 0.0 {
            continue;
        }
        let free = full & !(s as u64);
        // walk all subsets T of `free`
        let mut t = free;
        loop {
            let mut ln = 0.0;
            for e in 0..m {
                if free >> e & 1 == 1 {
                    ln += if t >> e & 1 == 1 { ln_add[e] } else { ln_skip[e] };
                }
            }
            pr[(s as u64 | t) as usize] += ps * ln.exp();
            if t == 0 {
                break;
            }
            t = (t - 1) & free;
        }
    }
    Ok(pr)
}

/// TV distance between the diluted subgraph world and `π_wrc(2p, λ(η))`.
pub fn verify_coupling(g: &WeightedGraph, sp: &SgParams, cap: u128) -> Result<Check> {
    let diluted = diluted_distribution(g, sp, cap)?;
    let wrc = enumerate_wrc(g, &sp.to_wrc(), cap)?;
    let tv = 0.5 * diluted.iter().zip(&wrc.probs).map(|(a, b)| (a - b).abs()).sum::<f64>();
    Ok(Check::within("coupling.tv", tv, 0.0, tv, IDENTITY_TOL))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators;
    use approx::assert_relative_eq;

    fn k2(lambda: f64) -> WeightedGraph {
        WeightedGraph::uniform(2, vec![(0, 1)], 2.0, lambda).unwrap()
    }

    // Hand-rolled partition functions of K2, written out term by term.
    #[test]
    fn k2_partition_functions() {
        let g = k2(1.0);
        let mp = params_from_ising(&g).unwrap();
        let ising = enumerate_ising(&g, DEFAULT_ENUM_CAP).unwrap();
        assert_relative_eq!(ising.z(), 6.0, epsilon = 1e-12);
        assert_relative_eq!(ising.probs[0], 1.0 / 3.0, epsilon = 1e-12);
        let wrc = enumerate_wrc(&g, &mp.wrc, DEFAULT_ENUM_CAP).unwrap();
        assert_relative_eq!(wrc.z(), 3.0, epsilon = 1e-12);
        assert_relative_eq!(wrc.probs[0], 2.0 / 3.0, epsilon = 1e-12);
        let g = k2(1.0 / 3.0);
        let mp = params_from_ising(&g).unwrap();
        let sg = enumerate_sg(&g, &mp.sg, DEFAULT_ENUM_CAP).unwrap();
        assert_relative_eq!(sg.z(), 13.0 / 16.0, epsilon = 1e-12);
        assert_relative_eq!(sg.probs.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn equivalence_examples() {
        let r = verify_equivalence(&k2(1.0), DEFAULT_ENUM_CAP).unwrap();
        assert!(r.checks.iter().all(|c| c.pass));
        assert_relative_eq!(r.ln_z_sg.exp(), 0.75, epsilon = 1e-12);
        let r = verify_equivalence(&k2(1.0 / 3.0), DEFAULT_ENUM_CAP).unwrap();
        assert_relative_eq!(r.ln_z_ising.exp(), 26.0 / 9.0, epsilon = 1e-12);
        assert_relative_eq!(r.ln_z_wrc.exp(), 13.0 / 9.0, epsilon = 1e-12);
        let single = WeightedGraph::new(1, vec![], vec![0.5], vec![]).unwrap();
        let r = verify_equivalence(&single, DEFAULT_ENUM_CAP).unwrap();
        assert_relative_eq!(r.ln_z_ising.exp(), 1.5, epsilon = 1e-12);
        assert_relative_eq!(r.ln_z_wrc.exp(), 1.5, epsilon = 1e-12);
        assert_relative_eq!(r.ln_z_sg.exp(), 1.0, epsilon = 1e-12);
        assert!(r.checks.iter().all(|c| c.pass));
    }

    #[test]
    fn counting_identity_examples() {
        let c = verify_counting_identity(&k2(1.0), &[1.0 / 3.0; 2], DEFAULT_ENUM_CAP).unwrap();
        assert_relative_eq!(c.lhs, 10.0 / 9.0, epsilon = 1e-12);
        assert!(c.pass, "{c:?}");
        // λ = 1: only even subgraphs count; C4 has 2 of them, one component.
        let c4 = generators::cycle(4, 2.0, 1.0).unwrap();
        let c = verify_counting_identity(&c4, &[1.0; 4], DEFAULT_ENUM_CAP).unwrap();
        assert_relative_eq!(c.lhs, 2.0, epsilon = 1e-12);
        assert!(c.pass, "{c:?}");
        let edgeless = WeightedGraph::new(2, vec![], vec![0.5, 0.25], vec![]).unwrap();
        let c = verify_counting_identity(&edgeless, &[0.5, 0.25], DEFAULT_ENUM_CAP).unwrap();
        assert_relative_eq!(c.lhs, 1.5 * 1.25, epsilon = 1e-12);
        assert!(c.pass);
    }

    #[test]
    fn coupling_k2() {
        let g = k2(1.0 / 3.0);
        let sp = params_from_ising(&g).unwrap().sg;
        let pr = diluted_distribution(&g, &sp, DEFAULT_ENUM_CAP).unwrap();
        assert_relative_eq!(pr[0], 8.0 / 13.0, epsilon = 1e-12);
        assert!(verify_coupling(&g, &sp, DEFAULT_ENUM_CAP).unwrap().pass);
        let g = k2(1.0);
        let sp = params_from_ising(&g).unwrap().sg;
        assert!(verify_coupling(&g, &sp, DEFAULT_ENUM_CAP).unwrap().pass);
    }

    #[test]
    fn cap_is_enforced() {
        let g = generators::path(30, 2.0, 1.0).unwrap();
        assert!(matches!(enumerate_ising(&g, DEFAULT_ENUM_CAP), Err(Error::CapExceeded { .. })));
        assert!(enumerate_ising(&generators::path(4, 2.0, 1.0).unwrap(), 15).is_err());
    }
}
