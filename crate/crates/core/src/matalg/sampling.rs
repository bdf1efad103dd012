use rand::Rng;
use rand_distr::StandardNormal;

use super::matrix::DAMatrix;
use super::quat::{qnorm, qorthogonalize, Quat};
use crate::error::{Error, Result};
use crate::rng::stream_rng;
use crate::special::AlgebraKind;

/// Uniform n x m frame (H* H = I_m) from Gram-Schmidt on a Gaussian matrix.
/// Gram-Schmidt leaves a positive real diagonal in the triangular factor, which
/// makes the result exactly Haar distributed.
pub fn stiefel_sample_with<R: Rng + ?Sized>(
    m: usize,
    n: usize,
    beta: AlgebraKind,
    rng: &mut R,
) -> Result<DAMatrix> {
    beta.require_matrices("Haar/Stiefel sampling")?;
    if m == 0 || m > n {
        return Err(Error::domain(format!(
            "Stiefel sample needs 1 <= m <= n (got m = {m}, n = {n})"
        )));
    }
    let b = beta.components();
    let mut cols: Vec<Vec<Quat>> = Vec::with_capacity(m);
    while cols.len() < m {
        let mut v: Vec<Quat> = (0..n)
            .map(|_| {
                let mut q = [0.0; 4];
                for c in q.iter_mut().take(b) {
                    *c = rng.sample(StandardNormal);
                }
                Quat(q)
            })
            .collect();
        qorthogonalize(&mut v, &cols);
        let nrm = qnorm(&v);
        if nrm > 1e-10 {
            cols.push(v.iter().map(|q| q.scale(1.0 / nrm)).collect());
        }
    }
    let mut out = DAMatrix::zeros(beta, n, m);
    for (j, col) in cols.iter().enumerate() {
        for (i, &q) in col.iter().enumerate() {
            out.set_quat(i, j, q);
        }
    }
    Ok(out)
}

pub fn stiefel_sample(m: usize, n: usize, beta: AlgebraKind, seed: u64) -> Result<DAMatrix> {
    stiefel_sample_with(m, n, beta, &mut stream_rng(seed, 0))
}

/// Haar-distributed element of the m x m unitary group over the algebra.
pub fn haar_sample(m: usize, beta: AlgebraKind, seed: u64) -> Result<DAMatrix> {
    stiefel_sample(m, m, beta, seed)
}
