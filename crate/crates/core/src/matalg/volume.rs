use nalgebra::SVD;

use super::matrix::DAMatrix;
use crate::error::{Error, Result};

/// Singular values in descending order (min(rows, cols) of them).
pub fn singular_values(a: &DAMatrix) -> Result<Vec<f64>> {
    let c = a.to_complex()?;
    let mut s: Vec<f64> = SVD::new(c, false, false)
        .singular_values
        .iter()
        .copied()
        .collect();
    s.sort_by(|x, y| y.total_cmp(x));
    if a.beta().beta() == 4 {
        s = s.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect();
    }
    Ok(s)
}

fn numerical_rank(s: &[f64], dim: usize) -> usize {
    let top = s.first().copied().unwrap_or(0.0);
    let tol = dim.max(1) as f64 * f64::EPSILON * top;
    s.iter().filter(|&&x| x > tol).count()
}

/// Jacobian factor prod sigma_i(A)^(beta m) of X -> A X for a p x n matrix A of rank n.
pub fn linear_volume_factor(a: &DAMatrix, m: usize) -> Result<f64> {
    let n = a.cols();
    let s = singular_values(a)?;
    let dim = a.rows().max(n);
    if a.rows() < n || numerical_rank(&s, dim) < n {
        return Err(Error::Rank(format!(
            "linear map needs full column rank {n}, numerical rank is {}",
            numerical_rank(&s, dim)
        )));
    }
    let e = a.beta().beta_f64() * m as f64;
    Ok(s[..n].iter().map(|x| x.powf(e)).product())
}

/// Jacobian factor of Y = A X restricted to X in the column space of C:
/// prod sigma_i(A C)^(beta m) / prod sigma_i(C)^(beta m) over the q = rank(C) values.
pub fn singular_volume_factor(a: &DAMatrix, c: &DAMatrix, m: usize) -> Result<f64> {
    let sc = singular_values(c)?;
    let q = numerical_rank(&sc, c.rows().max(c.cols()));
    let ac = a.matmul(c)?;
    let sac = singular_values(&ac)?;
    let qa = numerical_rank(&sac, ac.rows().max(ac.cols()));
    if q == 0 {
        return Err(Error::Rank("C has rank 0".into()));
    }
    if qa < q {
        return Err(Error::Rank(format!(
            "degenerate composition: rank(AC) = {qa} < rank(C) = {q}"
        )));
    }
    let e = a.beta().beta_f64() * m as f64;
    Ok((0..q).map(|i| (sac[i] / sc[i]).powf(e)).product())
}
