use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::Serialize;

use super::matrix::{CMatrix, DAMatrix, HermitianMatrix};
use super::quat::{qnorm, qorthogonalize, Quat};
use crate::error::{Error, Result};

/// Relative gap allowed between the two copies of each quaternion eigenvalue.
const PAIRING_TOL: f64 = 1e-8;
/// Default floor for flagging negative eigenvalues of a nominally PSD input.
const INDEFINITE_FLOOR: f64 = 1e-12;

/// Nonsingular part of a PSD spectral decomposition: A = P1 diag(eigenvalues) P1*.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PSDDecomposition {
    pub rank: usize,
    pub frame: DAMatrix,
    pub eigenvalues: Vec<f64>,
}

impl PSDDecomposition {
    pub fn reconstruct(&self) -> Result<HermitianMatrix> {
        let scaled = scale_columns(&self.frame, &self.eigenvalues);
        Ok(HermitianMatrix::symmetrized(
            scaled.matmul(&self.frame.conj_transpose())?,
        ))
    }

    pub fn log_det(&self) -> f64 {
        self.eigenvalues.iter().map(|x| x.ln()).sum()
    }
}

fn scale_columns(p: &DAMatrix, d: &[f64]) -> DAMatrix {
    let mut out = p.clone();
    for i in 0..p.rows() {
        for (j, &dj) in d.iter().enumerate() {
            for v in out.entry_mut(i, j) {
                *v *= dj;
            }
        }
    }
    out
}

fn sorted_desc(values: Vec<f64>) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    idx
}

fn complex_eigh(c: CMatrix) -> (Vec<f64>, CMatrix) {
    let e = SymmetricEigen::new(c);
    let vals: Vec<f64> = e.eigenvalues.iter().copied().collect();
    let order = sorted_desc(vals.clone());
    let vecs = CMatrix::from_fn(e.eigenvectors.nrows(), order.len(), |i, j| {
        e.eigenvectors[(i, order[j])]
    });
    (order.iter().map(|&i| vals[i]).collect(), vecs)
}

fn unpair(values: &[f64]) -> Result<Vec<f64>> {
    let scale = values
        .iter()
        .map(|v| v.abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    values
        .chunks(2)
        .map(|p| {
            if (p[0] - p[1]).abs() > PAIRING_TOL * scale.max(1.0) {
                Err(Error::domain(format!(
                    "quaternion eigenvalue pairing failed: {} vs {}",
                    p[0], p[1]
                )))
            } else {
                Ok(0.5 * (p[0] + p[1]))
            }
        })
        .collect()
}

/// Real eigenvalues in descending order. For beta = 4 each doubled eigenvalue of
/// the complex embedding is reported once.
pub fn eig_hermitian(s: &HermitianMatrix) -> Result<Vec<f64>> {
    s.beta().require_matrices("eigendecomposition")?;
    match s.beta().beta() {
        1 => {
            let m = s.as_matrix();
            let r = DMatrix::from_fn(m.rows(), m.cols(), |i, j| m.entry(i, j)[0]);
            let mut v: Vec<f64> = SymmetricEigen::new(r).eigenvalues.iter().copied().collect();
            v.sort_by(|a, b| b.total_cmp(a));
            Ok(v)
        }
        2 => Ok(complex_eigh(s.to_complex()?).0),
        _ => unpair(&complex_eigh(s.to_complex()?).0),
    }
}

/// Eigenvalues (descending) and an orthonormal eigenvector frame (columns).
pub fn hermitian_eigen(s: &HermitianMatrix) -> Result<(Vec<f64>, DAMatrix)> {
    let beta = s.beta();
    beta.require_matrices("eigendecomposition")?;
    let n = s.dim();
    match beta.beta() {
        1 => {
            let m = s.as_matrix();
            let r = DMatrix::from_fn(n, n, |i, j| m.entry(i, j)[0]);
            let e = SymmetricEigen::new(r);
            let vals: Vec<f64> = e.eigenvalues.iter().copied().collect();
            let order = sorted_desc(vals.clone());
            let frame = DAMatrix::from_fn(beta, n, n, |i, j, _| e.eigenvectors[(i, order[j])]);
            Ok((order.iter().map(|&i| vals[i]).collect(), frame))
        }
        2 => {
            let (vals, vecs) = complex_eigh(s.to_complex()?);
            Ok((vals, DAMatrix::from_complex(beta, &vecs)?))
        }
        _ => {
            let (vals, vecs) = complex_eigh(s.to_complex()?);
            unpair(&vals)?;
            let mut accepted: Vec<Vec<Quat>> = Vec::with_capacity(n);
            let mut out_vals = Vec::with_capacity(n);
            for (col, &lam) in vals.iter().enumerate() {
                if accepted.len() == n {
                    break;
                }
                let mut q: Vec<Quat> = (0..n)
                    .map(|i| {
                        let z1: Complex64 = vecs[(2 * i, col)];
                        let z2: Complex64 = -vecs[(2 * i + 1, col)].conj();
                        Quat([z1.re, z1.im, z2.re, z2.im])
                    })
                    .collect();
                qorthogonalize(&mut q, &accepted);
                let nrm = qnorm(&q);
                if nrm > 0.5 {
                    accepted.push(q.iter().map(|x| x.scale(1.0 / nrm)).collect());
                    out_vals.push(lam);
                }
            }
            if accepted.len() != n {
                return Err(Error::domain("quaternion eigenvector extraction failed"));
            }
            let mut frame = DAMatrix::zeros(beta, n, n);
            for (j, v) in accepted.iter().enumerate() {
                for (i, &q) in v.iter().enumerate() {
                    frame.set_quat(i, j, q);
                }
            }
            Ok((out_vals, frame))
        }
    }
}

fn default_tol(dim: usize) -> f64 {
    dim.max(1) as f64 * f64::EPSILON
}

struct Classified {
    values: Vec<f64>,
    frame: DAMatrix,
    rank: usize,
}

fn classify_psd(a: &HermitianMatrix, tol: Option<f64>) -> Result<Classified> {
    if let Some(t) = tol {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(Error::invalid(
                "rank tolerance must be a non-negative number",
            ));
        }
    }
    let (values, frame) = hermitian_eigen(a)?;
    let scale = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let rank_tol = tol.unwrap_or_else(|| default_tol(a.dim()));
    let neg_tol = tol.unwrap_or(INDEFINITE_FLOOR.max(rank_tol));
    if let Some(&min) = values.last() {
        if min < -neg_tol * scale {
            return Err(Error::Indefinite {
                eigenvalue: min,
                threshold: neg_tol * scale,
            });
        }
    }
    let rank = values.iter().filter(|&&v| v > rank_tol * scale).count();
    Ok(Classified {
        values,
        frame,
        rank,
    })
}

fn leading_columns(m: &DAMatrix, r: usize) -> DAMatrix {
    DAMatrix::from_fn(m.beta(), m.rows(), r, |i, j, c| m.entry(i, j)[c])
}

/// Nonsingular part of the spectral decomposition of a PSD matrix. `tol` is relative
/// to the largest eigenvalue modulus and defaults to dim * machine epsilon.
pub fn spectral_nonsingular(a: &HermitianMatrix, tol: Option<f64>) -> Result<PSDDecomposition> {
    let c = classify_psd(a, tol)?;
    Ok(PSDDecomposition {
        rank: c.rank,
        frame: leading_columns(&c.frame, c.rank),
        eigenvalues: c.values[..c.rank].to_vec(),
    })
}

/// Moore-Penrose inverse P1 diag(1/lambda) P1* of a PSD matrix.
pub fn moore_penrose(a: &HermitianMatrix, tol: Option<f64>) -> Result<HermitianMatrix> {
    let d = spectral_nonsingular(a, tol)?;
    let inv: Vec<f64> = d.eigenvalues.iter().map(|x| 1.0 / x).collect();
    let p = scale_columns(&d.frame, &inv);
    Ok(HermitianMatrix::symmetrized(
        p.matmul(&d.frame.conj_transpose())?,
    ))
}

fn spectral_map(
    values: &[f64],
    frame: &DAMatrix,
    f: impl Fn(f64) -> f64,
) -> Result<HermitianMatrix> {
    let mapped: Vec<f64> = values.iter().map(|&v| f(v)).collect();
    let p = scale_columns(frame, &mapped);
    Ok(HermitianMatrix::symmetrized(
        p.matmul(&frame.conj_transpose())?,
    ))
}

/// PSD square root.
pub fn sqrt_psd(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    let c = classify_psd(a, None)?;
    spectral_map(&c.values, &c.frame, |v| v.max(0.0).sqrt())
}

fn require_pd(a: &HermitianMatrix, what: &str) -> Result<(Vec<f64>, DAMatrix)> {
    let (values, frame) = hermitian_eigen(a)?;
    let scale = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let min = values.last().copied().unwrap_or(0.0);
    if !(min > default_tol(a.dim()) * scale) || scale == 0.0 {
        return Err(Error::domain(format!(
            "{what} must be positive definite (smallest eigenvalue {min:e})"
        )));
    }
    Ok((values, frame))
}

pub fn inverse_pd(a: &HermitianMatrix) -> Result<HermitianMatrix> {
    let (v, f) = require_pd(a, "matrix")?;
    spectral_map(&v, &f, |x| 1.0 / x)
}

/// PD square root and inverse square root together.
pub fn sqrt_and_inv_sqrt_pd(
    a: &HermitianMatrix,
    what: &str,
) -> Result<(HermitianMatrix, HermitianMatrix)> {
    let (v, f) = require_pd(a, what)?;
    Ok((
        spectral_map(&v, &f, f64::sqrt)?,
        spectral_map(&v, &f, |x| 1.0 / x.sqrt())?,
    ))
}

/// ln det of a PD matrix (product of its real eigenvalues, each counted once).
pub fn log_det_pd(a: &HermitianMatrix, what: &str) -> Result<f64> {
    let (v, _) = require_pd(a, what)?;
    Ok(v.iter().map(|x| x.ln()).sum())
}

/// Eigenvalues of A B for PSD B, via B^{1/2} A B^{1/2}.
pub fn product_spectrum(a: &HermitianMatrix, b: &HermitianMatrix) -> Result<Vec<f64>> {
    let bh = sqrt_psd(b)?;
    eig_hermitian(&a.congruence(bh.as_matrix())?)
}

/// Checks that a spectrum list is usable as eigenvalues (finite).
pub(crate) fn check_spectrum(v: &[f64], what: &str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "{what}: eigenvalues must be finite"
        )))
    }
}
