use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matalg::HermitianMatrix;

/// prod_j (1 - i c lambda_j)^(-df/2).
pub fn cf_normal_closed_spectral(lambda: &[f64], df: f64, c: f64) -> Complex64 {
    let ln: Complex64 = lambda
        .iter()
        .map(|&l| Complex64::new(1.0, -c * l).ln())
        .sum();
    (ln * (-df / 2.0)).exp()
}

/// |I - 2 i beta Sigma S|^(-df/2).
pub fn cf_normal_closed(
    s: &HermitianMatrix,
    sigma: &HermitianMatrix,
    df: f64,
) -> Result<Complex64> {
    if s.beta() != sigma.beta() || s.dim() != sigma.dim() {
        return Err(Error::dim(
            "S and Sigma must have the same size and algebra",
        ));
    }
    let half = crate::matalg::sqrt_psd(sigma)?;
    let lambda = crate::matalg::eig_hermitian(&s.congruence(half.as_matrix())?)?;
    Ok(cf_normal_closed_spectral(
        &lambda,
        df,
        2.0 * s.beta().beta_f64(),
    ))
}
