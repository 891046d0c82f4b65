//! Spectra of reversible chains.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use super::matrix::ChainMatrix;
use crate::error::{Error, Result};

/// Residual allowed for detailed balance before a matrix is rejected.
pub const REVERSIBILITY_TOL: f64 = 1e-10;
/// Slack on eigenvalue signs.
pub const EIGEN_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralReport {
    /// `1 - λ_2`; 1 for a single-state support.
    pub gap: f64,
    pub eigenvalue_min: f64,
    /// Eigenvalues on the support of `π`, descending.
    pub eigenvalues: Vec<f64>,
    pub reversible: bool,
    pub reversibility_residual: f64,
    pub psd: bool,
}

/// Eigenvalues of `P` restricted to the support of `π`, through the
/// symmetric matrix `D^{1/2} P D^{-1/2}`.
pub fn spectral(cm: &ChainMatrix) -> Result<SpectralReport> {
    let residual = cm.reversibility_residual();
    if !(residual <= REVERSIBILITY_TOL) {
        return Err(Error::NotReversible { residual });
    }
    let support: Vec<usize> = (0..cm.len()).filter(|&i| cm.pi[i] > 0.0).collect();
    let k = support.len();
    let sqrt_pi: Vec<f64> = support.iter().map(|&i| cm.pi[i].sqrt()).collect();
    let mut a = DMatrix::zeros(k, k);
    for (r, &i) in support.iter().enumerate() {
        for (c, &j) in support.iter().enumerate() {
            a[(r, c)] = sqrt_pi[r] * cm.p[(i, j)] / sqrt_pi[c];
        }
    }
    let a = (&a + a.transpose()) * 0.5;
    let mut eigenvalues: Vec<f64> = SymmetricEigen::new(a).eigenvalues.iter().copied().collect();
    eigenvalues.sort_by(|x, y| y.total_cmp(x));
    let gap = if k > 1 { 1.0 - eigenvalues[1] } else { 1.0 };
    let eigenvalue_min = *eigenvalues.last().expect("nonempty support");
    Ok(SpectralReport {
        gap,
        eigenvalue_min,
        eigenvalues,
        reversible: true,
        reversibility_residual: residual,
        psd: eigenvalue_min >= -EIGEN_TOL,
    })
}

/// `E_P(f, f) = ½ Σ_{x,y} π(x) P(x,y) (f(x) - f(y))²`.
pub fn dirichlet_form(cm: &ChainMatrix, f: &DVector<f64>) -> f64 {
    let n = cm.len();
    let mut acc = 0.0;
    for x in 0..n {
        for y in 0..n {
            let d = f[x] - f[y];
            acc += cm.pi[x] * cm.p[(x, y)] * d * d;
        }
    }
    0.5 * acc
}

/// `Var_π(f)`.
pub fn variance(pi: &DVector<f64>, f: &DVector<f64>) -> f64 {
    let mean = pi.dot(f);
    pi.iter().zip(f.iter()).map(|(p, x)| p * (x - mean) * (x - mean)).sum()
}
