use std::f64::consts::PI;

use statrs::function::gamma::{gamma, ln_gamma};

use super::{AlgebraKind, Partition};
use crate::error::{Error, Result};

/// Rising factorial (a)_n.
pub fn pochhammer(a: f64, n: usize) -> f64 {
    (0..n).map(|i| a + i as f64).product()
}

/// Generalized Pochhammer symbol: product over rows i of (a - i*beta/2)_{k_i}.
pub fn gen_pochhammer(a: f64, kappa: &Partition, beta: AlgebraKind) -> f64 {
    kappa
        .parts()
        .iter()
        .enumerate()
        .map(|(i, &k)| pochhammer(a - i as f64 * beta.half_beta(), k))
        .product()
}

fn check_mv_gamma_args(m: usize, a: f64, beta: AlgebraKind) -> Result<()> {
    if m == 0 {
        return Err(Error::domain("multivariate gamma needs m >= 1"));
    }
    for i in 0..m {
        let arg = a - i as f64 * beta.half_beta();
        if !(arg > 0.0) {
            return Err(Error::domain(format!(
                "multivariate gamma factor {} has argument {arg} <= 0 (need a > (m-1)beta/2 = {})",
                i + 1,
                (m - 1) as f64 * beta.half_beta()
            )));
        }
    }
    Ok(())
}

pub fn ln_mv_gamma(m: usize, a: f64, beta: AlgebraKind) -> Result<f64> {
    check_mv_gamma_args(m, a, beta)?;
    let mf = m as f64;
    let head = mf * (mf - 1.0) * beta.beta_f64() / 4.0 * PI.ln();
    Ok(head
        + (0..m)
            .map(|i| ln_gamma(a - i as f64 * beta.half_beta()))
            .sum::<f64>())
}

/// Multivariate gamma function over the Hermitian positive definite cone.
pub fn mv_gamma(m: usize, a: f64, beta: AlgebraKind) -> Result<f64> {
    check_mv_gamma_args(m, a, beta)?;
    let mf = m as f64;
    let mut v = PI.powf(mf * (mf - 1.0) * beta.beta_f64() / 4.0);
    for i in 0..m {
        v *= gamma(a - i as f64 * beta.half_beta());
    }
    if v.is_finite() {
        Ok(v)
    } else {
        ln_mv_gamma(m, a, beta).map(f64::exp)
    }
}

pub fn ln_stiefel_volume(m: usize, n: usize, beta: AlgebraKind) -> Result<f64> {
    if m == 0 || m > n {
        return Err(Error::domain(format!(
            "Stiefel manifold needs 1 <= m <= n (got m = {m}, n = {n})"
        )));
    }
    let b = beta.beta_f64();
    let (mf, nf) = (m as f64, n as f64);
    Ok(mf * 2f64.ln() + mf * nf * b / 2.0 * PI.ln() - ln_mv_gamma(m, nf * b / 2.0, beta)?)
}

/// Volume of the Stiefel manifold of n x m orthonormal frames.
pub fn stiefel_volume(m: usize, n: usize, beta: AlgebraKind) -> Result<f64> {
    let lv = ln_stiefel_volume(m, n, beta)?;
    let b = beta.beta_f64();
    let direct = 2f64.powi(m as i32) * PI.powf((m * n) as f64 * b / 2.0)
        / mv_gamma(m, n as f64 * b / 2.0, beta)?;
    Ok(if direct.is_finite() && direct > 0.0 {
        direct
    } else {
        lv.exp()
    })
}
