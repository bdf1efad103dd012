//! Classical reference values used as ground truth by the checks.

use nalgebra::{DMatrix, SVD};
use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::matalg::{inverse_pd, log_det_pd, DAMatrix, HermitianMatrix};
use crate::special::{ln_mv_gamma, AlgebraKind};

/// Volume factor of X -> A X (X of size n x m) as the product of singular values
/// of the real matrix of the induced map on real coordinates.
pub fn gram_volume_factor(a: &DAMatrix, m: usize) -> Result<f64> {
    let (p, n, beta) = (a.rows(), a.cols(), a.beta());
    let b = beta.components();
    let in_dim = n * m * b;
    let mut map = DMatrix::<f64>::zeros(p * m * b, in_dim);
    for j in 0..in_dim {
        let e = DAMatrix::from_fn(
            beta,
            n,
            m,
            |r, c, k| if (r * m + c) * b + k == j { 1.0 } else { 0.0 },
        );
        let img = a.matmul(&e)?;
        for (i, v) in img.data().iter().enumerate() {
            map[(i, j)] = *v;
        }
    }
    let sv = SVD::new(map, false, false).singular_values;
    Ok(sv.iter().product())
}

/// Real Wishart_m(dof, V) draw by the Bartlett decomposition; `chol` is the lower factor of V.
pub fn wishart_draw<R: Rng + ?Sized>(dof: f64, chol: &DMatrix<f64>, rng: &mut R) -> DMatrix<f64> {
    let m = chol.nrows();
    let mut t = DMatrix::<f64>::zeros(m, m);
    for i in 0..m {
        let chi = ChiSquared::new(dof - i as f64).expect("dof > m - 1");
        t[(i, i)] = chi.sample(rng).sqrt();
        for j in 0..i {
            t[(i, j)] = rng.sample(StandardNormal);
        }
    }
    let lt = chol * t;
    &lt * lt.transpose()
}

pub(crate) fn real_entries(h: &HermitianMatrix) -> DMatrix<f64> {
    let a = h.as_matrix();
    DMatrix::from_fn(h.dim(), h.dim(), |i, j| a.entry(i, j)[0])
}

fn require_real(h: &HermitianMatrix) -> Result<()> {
    if h.beta() != AlgebraKind::REAL {
        return Err(Error::invalid(
            "this oracle is defined for real matrices only",
        ));
    }
    Ok(())
}

/// Log-density of the real Wishart_m(dof, V) law at W.
pub fn ln_wishart_density(w: &HermitianMatrix, v: &HermitianMatrix, dof: f64) -> Result<f64> {
    require_real(w)?;
    require_real(v)?;
    let m = w.dim();
    let mf = m as f64;
    let tr = inverse_pd(v)?.as_matrix().matmul(w.as_matrix())?.trace_re();
    Ok((dof - mf - 1.0) / 2.0 * log_det_pd(w, "W")?
        - tr / 2.0
        - dof * mf / 2.0 * 2f64.ln()
        - dof / 2.0 * log_det_pd(v, "V")?
        - ln_mv_gamma(m, dof / 2.0, AlgebraKind::REAL)?)
}

/// Log-density at W of c X* P X with X real Pearson VII (s, g) in dimension n x m,
/// Theta = I, column covariance Sigma and P a rank-r projection. Closed form of the
/// Gamma mixture of Wishart_m(r, c g Sigma / (2 tau)) with tau ~ Gamma(s - nm/2).
pub fn ln_pearson_wishart_density(
    w: &HermitianMatrix,
    sigma: &HermitianMatrix,
    c: f64,
    r: usize,
    n: usize,
    s: f64,
    g: f64,
) -> Result<f64> {
    require_real(w)?;
    require_real(sigma)?;
    let m = w.dim();
    let (mf, rf) = (m as f64, r as f64);
    let shape = s - (n * m) as f64 / 2.0;
    if shape <= 0.0 {
        return Err(Error::domain("Pearson VII mixture needs s > n m / 2"));
    }
    let t = inverse_pd(sigma)?
        .as_matrix()
        .matmul(w.as_matrix())?
        .trace_re();
    let half = rf * mf / 2.0;
    let cg = c * g;
    Ok((rf - mf - 1.0) / 2.0 * log_det_pd(w, "W")?
        - half * 2f64.ln()
        - ln_mv_gamma(m, rf / 2.0, AlgebraKind::REAL)?
        - rf / 2.0 * log_det_pd(sigma, "Sigma")?
        - half * (cg / 2.0).ln()
        + ln_gamma(shape + half)
        - ln_gamma(shape)
        - (shape + half) * (1.0 + t / cg).ln())
}

/// ln pdf of chi-square(k) at x.
pub(crate) fn ln_chi_square(x: f64, k: f64) -> f64 {
    (k / 2.0 - 1.0) * x.ln() - x / 2.0 - (k / 2.0) * 2f64.ln() - ln_gamma(k / 2.0)
}

/// ln pdf of BetaPrime(a, b) at x.
pub(crate) fn ln_beta_prime(x: f64, a: f64, b: f64) -> f64 {
    (a - 1.0) * x.ln() - (a + b) * (1.0 + x).ln() - (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b))
}
