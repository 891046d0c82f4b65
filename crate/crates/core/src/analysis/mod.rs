//! Exact transition matrices and the quantities derived from them.

pub mod matrix;
pub mod mixing;
pub mod spectral;
pub mod stats;
pub mod verify;

pub use matrix::{ChainMatrix, DEFAULT_MATRIX_CAP};
pub use mixing::{empirical_mixing_time, MixingReport};
pub use spectral::{dirichlet_form, spectral, variance, SpectralReport};
pub use stats::{chi_square_gof, histogram, tv_distance, ChiSquareResult};
