//! Exact mixing times by iterating the transition matrix.

use serde::Serialize;

use super::matrix::ChainMatrix;
use super::spectral::spectral;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MixingReport {
    /// `min{t : max_x ‖P^t(x,·) - π‖_TV ≤ ε}` over starts in the support.
    pub t_mix: u64,
    /// Index of a start state attaining the maximum at `t_mix - 1`.
    pub worst_start: usize,
    pub gap: f64,
    pub pi_min: f64,
    /// `(1/Gap)(ln 1/π_min + ln 1/ε)`.
    pub spectral_bound: f64,
}

/// Exact `T_mix(ε)` for a reversible chain, giving up after `max_steps`.
pub fn empirical_mixing_time(cm: &ChainMatrix, eps: f64, max_steps: u64) -> Result<MixingReport> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("epsilon must be positive, got {eps}")));
    }
    let rep = spectral(cm)?;
    let support: Vec<usize> = (0..cm.len()).filter(|&i| cm.pi[i] > 0.0).collect();
    let pi_min = support.iter().map(|&i| cm.pi[i]).fold(f64::INFINITY, f64::min);
    let spectral_bound = ((1.0 / pi_min).ln() + (1.0 / eps).ln()) / rep.gap;

    let tv_rows = |dist: &nalgebra::DMatrix<f64>| -> (f64, usize) {
        let mut worst = (0.0, support[0]);
        for (r, &x) in support.iter().enumerate() {
            let tv = 0.5 * (0..cm.len()).map(|y| (dist[(r, y)] - cm.pi[y]).abs()).sum::<f64>();
            if tv > worst.0 {
                worst = (tv, x);
            }
        }
        worst
    };
    // rows: distributions started from each support state
    let mut dist = nalgebra::DMatrix::zeros(support.len(), cm.len());
    for (r, &x) in support.iter().enumerate() {
        dist[(r, x)] = 1.0;
    }
    let mut worst_start = support[0];
    for t in 0..=max_steps {
        let (tv, arg) = tv_rows(&dist);
        if tv <= eps {
            return Ok(MixingReport { t_mix: t, worst_start, gap: rep.gap, pi_min, spectral_bound });
        }
        worst_start = arg;
        dist = &dist * &cm.p;
    }
    Err(Error::InvalidParameter(format!("chain did not mix within {max_steps} steps")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::matrix::{ef_wrc_matrix, DEFAULT_MATRIX_CAP};
    use crate::graph::WeightedGraph;
    use crate::params::params_from_ising;

    #[test]
    fn k2_mixing() {
        let g = WeightedGraph::uniform(2, vec![(0, 1)], 2.0, 1.0).unwrap();
        let w = params_from_ising(&g).unwrap().wrc;
        let cm = ef_wrc_matrix(&g, &w, DEFAULT_MATRIX_CAP).unwrap();
        let r = empirical_mixing_time(&cm, 0.25, 1000).unwrap();
        // TV from {e} after t steps is (2/3)(1/4)^t.
        assert_eq!(r.t_mix, 1);
        let bound = (4.0 / 3.0) * (3f64.ln() + 4f64.ln());
        assert!((r.spectral_bound - bound).abs() < 1e-12);
        assert!(r.t_mix as f64 <= r.spectral_bound.ceil());
        assert_eq!(empirical_mixing_time(&cm, 1.0, 10).unwrap().t_mix, 0);
    }
}
