//! Matrices over the real normed division algebras.

mod matrix;
pub(crate) mod quat;
mod sampling;
mod spectral;
mod volume;

pub use matrix::{CMatrix, DAMatrix, HermitianMatrix};
pub use sampling::{haar_sample, stiefel_sample, stiefel_sample_with};
pub use spectral::{
    eig_hermitian, hermitian_eigen, inverse_pd, log_det_pd, moore_penrose, product_spectrum,
    spectral_nonsingular, sqrt_and_inv_sqrt_pd, sqrt_psd, PSDDecomposition,
};
pub use volume::{linear_volume_factor, singular_values, singular_volume_factor};

pub(crate) use spectral::check_spectrum;
