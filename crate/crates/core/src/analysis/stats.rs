//! Distances between distributions and goodness-of-fit tests.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

/// `½ Σ |p_i - q_i|`.
pub fn tv_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::MismatchedSupport { left: p.len(), right: q.len() });
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

/// Counts of `indices` over `0..bins`.
pub fn histogram(indices: impl IntoIterator<Item = usize>, bins: usize) -> Vec<u64> {
    let mut h = vec![0; bins];
    for i in indices {
        h[i] += 1;
    }
    h
}

/// Normalise counts to frequencies.
pub fn frequencies(counts: &[u64]) -> Vec<f64> {
    let total: u64 = counts.iter().sum();
    counts.iter().map(|&c| c as f64 / total.max(1) as f64).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    /// Bins after pooling.
    pub bins: usize,
}

/// Minimum expected count per bin; smaller bins are pooled.
pub const MIN_EXPECTED: f64 = 5.0;

/// Pearson goodness of fit of `counts` to `probs`.
///
/// Bins with expected count below [`MIN_EXPECTED`] are merged into one pool,
/// and the pool is folded into the smallest regular bin if it is still too
/// small. Any count in a zero-probability bin gives `p = 0`.
pub fn chi_square_gof(counts: &[u64], probs: &[f64]) -> Result<ChiSquareResult> {
    if counts.len() != probs.len() {
        return Err(Error::MismatchedSupport { left: counts.len(), right: probs.len() });
    }
    let n: u64 = counts.iter().sum();
    let impossible = counts.iter().zip(probs).any(|(&c, &p)| c > 0 && p <= 0.0);
    if impossible {
        return Ok(ChiSquareResult { statistic: f64::INFINITY, dof: 0, p_value: 0.0, bins: 0 });
    }
    let mut bins: Vec<(f64, f64)> = Vec::new(); // (observed, expected)
    let mut pool = (0.0, 0.0);
    for (&c, &p) in counts.iter().zip(probs) {
        let e = p * n as f64;
        if e <= 0.0 {
            continue;
        }
        if e < MIN_EXPECTED {
            pool.0 += c as f64;
            pool.1 += e;
        } else {
            bins.push((c as f64, e));
        }
    }
    if pool.1 > 0.0 {
        if pool.1 >= MIN_EXPECTED || bins.is_empty() {
            bins.push(pool);
        } else {
            let i = (0..bins.len()).min_by(|&a, &b| bins[a].1.total_cmp(&bins[b].1)).unwrap();
            bins[i].0 += pool.0;
            bins[i].1 += pool.1;
        }
    }
    let statistic: f64 = bins.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let dof = bins.len().saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else {
        let chi = ChiSquared::new(dof as f64).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        chi.sf(statistic)
    };
    Ok(ChiSquareResult { statistic, dof, p_value, bins: bins.len() })
}
