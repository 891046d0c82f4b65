//! Parameters of the two edge-subset representations and the maps between
//! them.
//!
//! [`WrcParams`] stores the random-cluster edge probability as
//! `p_e = 1 - 1/β_e`. The same numbers drive the edge-flipping, single-bond
//! and Swendsen-Wang chains; nothing downstream doubles or halves them.
//! [`SgParams`] stores the subgraph-world probability `p_e = (1 - 1/β_e)/2`,
//! exactly half of the WRC value.

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

/// Weighted random-cluster parameters `(p, λ)`.
///
/// `λ_v = 0` is accepted so that the perturbed model of a one-vertex graph
/// (`η̂ = 1`) stays representable; graphs themselves never carry it.
#[derive(Clone, Debug, PartialEq)]
pub struct WrcParams {
    p: Vec<f64>,
    lambda: Vec<f64>,
    ln_lambda: Vec<f64>,
    ln_p: Vec<f64>,
    ln_q: Vec<f64>,
}

impl WrcParams {
    pub fn new(p: Vec<f64>, lambda: Vec<f64>) -> Result<Self> {
        for (e, &x) in p.iter().enumerate() {
            if !(x > 0.0 && x < 1.0) {
                return Err(Error::InvalidParameter(format!("wrc p[{e}] = {x} is outside (0, 1)")));
            }
        }
        for (v, &l) in lambda.iter().enumerate() {
            if !(0.0..=1.0).contains(&l) {
                return Err(Error::InvalidParameter(format!("wrc lambda[{v}] = {l} is outside [0, 1]")));
            }
        }
        let ln_lambda = lambda.iter().map(|l| l.ln()).collect();
        let ln_p = p.iter().map(|x| x.ln()).collect();
        let ln_q = p.iter().map(|x| (-x).ln_1p()).collect();
        Ok(WrcParams { p, lambda, ln_lambda, ln_p, ln_q })
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn ln_lambda(&self) -> &[f64] {
        &self.ln_lambda
    }

    /// `ln p_e`.
    pub fn ln_p(&self) -> &[f64] {
        &self.ln_p
    }

    /// `ln (1 - p_e)`.
    pub fn ln_q(&self) -> &[f64] {
        &self.ln_q
    }

    /// Check widths against a graph.
    pub fn check(&self, g: &WeightedGraph) -> Result<()> {
        check_dims(g, self.p.len(), self.lambda.len())
    }
}

/// Subgraph-world parameters `(p, η)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SgParams {
    p: Vec<f64>,
    eta: Vec<f64>,
}

impl SgParams {
    /// `p_e ∈ (0, 1/2)`, `η_v ∈ [0, 1]`. (`η_v = 1` only arises from
    /// perturbing a one-vertex graph.)
    pub fn new(p: Vec<f64>, eta: Vec<f64>) -> Result<Self> {
        for (e, &x) in p.iter().enumerate() {
            if !(x > 0.0 && x < 0.5) {
                return Err(Error::InvalidParameter(format!("sg p[{e}] = {x} is outside (0, 1/2)")));
            }
        }
        for (v, &h) in eta.iter().enumerate() {
            if !(0.0..=1.0).contains(&h) {
                return Err(Error::InvalidParameter(format!("eta[{v}] = {h} is outside [0, 1]")));
            }
        }
        Ok(SgParams { p, eta })
    }

    pub fn p(&self) -> &[f64] {
        &self.p
    }

    pub fn eta(&self) -> &[f64] {
        &self.eta
    }

    /// `min_v η_v`, or `1` on an empty vertex set.
    pub fn eta_min(&self) -> f64 {
        self.eta.iter().copied().fold(1.0, f64::min)
    }

    /// `λ_v = (1 - η_v)/(1 + η_v)`, the field this `η` encodes.
    pub fn wrc_lambda(&self) -> Vec<f64> {
        self.eta.iter().map(|&h| (1.0 - h) / (1.0 + h)).collect()
    }

    /// The WRC model paired with this subgraph world: `(2p, λ(η))`.
    pub fn to_wrc(&self) -> WrcParams {
        WrcParams::new(self.p.iter().map(|&x| 2.0 * x).collect(), self.wrc_lambda())
            .expect("sg parameters map into the wrc domain")
    }

    pub fn check(&self, g: &WeightedGraph) -> Result<()> {
        check_dims(g, self.p.len(), self.eta.len())
    }
}

fn check_dims(g: &WeightedGraph, m: usize, n: usize) -> Result<()> {
    if m != g.m() {
        return Err(Error::DimensionMismatch { expected: g.m(), actual: m });
    }
    if n != g.n() {
        return Err(Error::DimensionMismatch { expected: g.n(), actual: n });
    }
    Ok(())
}

/// Both representations of an Ising instance.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    pub wrc: WrcParams,
    pub sg: SgParams,
}

/// WRC and subgraph-world parameters of the Ising model on `g`.
pub fn params_from_ising(g: &WeightedGraph) -> Result<ModelParams> {
    if let Some((e, &b)) = g.beta().iter().enumerate().find(|(_, &b)| !(b > 1.0)) {
        return Err(Error::InvalidParameter(format!("beta[{e}] = {b} must exceed 1")));
    }
    if let Some((v, &l)) = g.lambda().iter().enumerate().find(|(_, &l)| !(l > 0.0 && l <= 1.0)) {
        return Err(Error::InvalidParameter(format!("lambda[{v}] = {l} is outside (0, 1]")));
    }
    let wrc_p: Vec<f64> = g.beta().iter().map(|&b| 1.0 - 1.0 / b).collect();
    let sg_p = wrc_p.iter().map(|&x| 0.5 * x).collect();
    let eta = g.lambda().iter().map(|&l| (1.0 - l) / (1.0 + l)).collect();
    Ok(ModelParams { wrc: WrcParams::new(wrc_p, g.lambda().to_vec())?, sg: SgParams::new(sg_p, eta)? })
}

/// Raise every `η_v` to at least `1/n`; `p` is unchanged.
pub fn perturb_sg(s: &SgParams, n: usize) -> SgParams {
    assert!(n >= 1, "perturbation needs n >= 1");
    let floor = 1.0 / n as f64;
    let eta = s.eta.iter().map(|&h| if h <= floor { floor } else { h }).collect();
    SgParams { p: s.p.clone(), eta }
}
