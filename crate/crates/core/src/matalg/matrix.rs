use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::quat::Quat;
use crate::error::{Error, Result};
use crate::special::AlgebraKind;

pub type CMatrix = DMatrix<Complex64>;

/// Dense matrix over the algebra, stored row-major with `beta` real components per entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixFile", into = "MatrixFile")]
pub struct DAMatrix {
    beta: AlgebraKind,
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DAMatrix {
    pub fn new(beta: AlgebraKind, rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols * beta.components() {
            return Err(Error::dim(format!(
                "{rows}x{cols} matrix over beta = {beta} needs {} components, got {}",
                rows * cols * beta.components(),
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::invalid("matrix entries must be finite"));
        }
        Ok(DAMatrix {
            beta,
            rows,
            cols,
            data,
        })
    }

    pub fn zeros(beta: AlgebraKind, rows: usize, cols: usize) -> Self {
        DAMatrix {
            beta,
            rows,
            cols,
            data: vec![0.0; rows * cols * beta.components()],
        }
    }

    pub fn identity(beta: AlgebraKind, n: usize) -> Self {
        let mut m = Self::zeros(beta, n, n);
        for i in 0..n {
            m.entry_mut(i, i)[0] = 1.0;
        }
        m
    }

    /// Matrix with real entries given row-major.
    pub fn from_real(beta: AlgebraKind, rows: usize, cols: usize, vals: &[f64]) -> Result<Self> {
        if vals.len() != rows * cols {
            return Err(Error::dim(format!(
                "expected {} real entries, got {}",
                rows * cols,
                vals.len()
            )));
        }
        let mut m = Self::zeros(beta, rows, cols);
        for (k, &v) in vals.iter().enumerate() {
            m.entry_mut(k / cols, k % cols)[0] = v;
        }
        m.check_finite()?;
        Ok(m)
    }

    pub fn from_fn(
        beta: AlgebraKind,
        rows: usize,
        cols: usize,
        mut f: impl FnMut(usize, usize, usize) -> f64,
    ) -> Self {
        let b = beta.components();
        let mut data = Vec::with_capacity(rows * cols * b);
        for i in 0..rows {
            for j in 0..cols {
                for c in 0..b {
                    data.push(f(i, j, c));
                }
            }
        }
        DAMatrix {
            beta,
            rows,
            cols,
            data,
        }
    }

    fn check_finite(&self) -> Result<()> {
        if self.data.iter().all(|x| x.is_finite()) {
            Ok(())
        } else {
            Err(Error::invalid("matrix entries must be finite"))
        }
    }

    pub fn beta(&self) -> AlgebraKind {
        self.beta
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entry(&self, i: usize, j: usize) -> &[f64] {
        let b = self.beta.components();
        let o = (i * self.cols + j) * b;
        &self.data[o..o + b]
    }

    pub fn entry_mut(&mut self, i: usize, j: usize) -> &mut [f64] {
        let b = self.beta.components();
        let o = (i * self.cols + j) * b;
        &mut self.data[o..o + b]
    }

    #[cfg(test)]
    fn quat(&self, i: usize, j: usize) -> Quat {
        let mut q = [0.0; 4];
        for (c, &v) in self.entry(i, j).iter().enumerate().take(4) {
            q[c] = v;
        }
        Quat(q)
    }

    pub(crate) fn set_quat(&mut self, i: usize, j: usize, q: Quat) {
        let b = self.beta.components().min(4);
        self.entry_mut(i, j)[..b].copy_from_slice(&q.0[..b]);
    }

    pub fn conj_transpose(&self) -> DAMatrix {
        let mut out = DAMatrix::zeros(self.beta, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let src = self.entry(i, j);
                let dst = out.entry_mut(j, i);
                dst[0] = src[0];
                for c in 1..src.len() {
                    dst[c] = -src[c];
                }
            }
        }
        out
    }

    /// Complex embedding: n x m for beta in {1, 2}; 2n x 2m with blocks
    /// [[z1, z2], [-conj z2, conj z1]] for q = z1 + z2 j when beta = 4.
    pub fn to_complex(&self) -> Result<CMatrix> {
        self.beta.require_matrices("complex embedding")?;
        Ok(match self.beta.beta() {
            1 => CMatrix::from_fn(self.rows, self.cols, |i, j| {
                Complex64::new(self.entry(i, j)[0], 0.0)
            }),
            2 => CMatrix::from_fn(self.rows, self.cols, |i, j| {
                let e = self.entry(i, j);
                Complex64::new(e[0], e[1])
            }),
            _ => {
                let mut c = CMatrix::zeros(2 * self.rows, 2 * self.cols);
                for i in 0..self.rows {
                    for j in 0..self.cols {
                        let e = self.entry(i, j);
                        let z1 = Complex64::new(e[0], e[1]);
                        let z2 = Complex64::new(e[2], e[3]);
                        c[(2 * i, 2 * j)] = z1;
                        c[(2 * i, 2 * j + 1)] = z2;
                        c[(2 * i + 1, 2 * j)] = -z2.conj();
                        c[(2 * i + 1, 2 * j + 1)] = z1.conj();
                    }
                }
                c
            }
        })
    }

    /// Inverse of [`DAMatrix::to_complex`]; components outside the algebra are discarded
    /// (for beta = 4 the two copies of each block entry are averaged).
    pub fn from_complex(beta: AlgebraKind, c: &CMatrix) -> Result<DAMatrix> {
        beta.require_matrices("complex embedding")?;
        let (r, k) = (c.nrows(), c.ncols());
        Ok(match beta.beta() {
            1 => DAMatrix::from_fn(beta, r, k, |i, j, _| c[(i, j)].re),
            2 => DAMatrix::from_fn(beta, r, k, |i, j, comp| {
                if comp == 0 {
                    c[(i, j)].re
                } else {
                    c[(i, j)].im
                }
            }),
            _ => {
                if r % 2 != 0 || k % 2 != 0 {
                    return Err(Error::dim("quaternion embedding needs even dimensions"));
                }
                DAMatrix::from_fn(beta, r / 2, k / 2, |i, j, comp| {
                    let z1 = (c[(2 * i, 2 * j)] + c[(2 * i + 1, 2 * j + 1)].conj()) * 0.5;
                    let z2 = (c[(2 * i, 2 * j + 1)] - c[(2 * i + 1, 2 * j)].conj()) * 0.5;
                    [z1.re, z1.im, z2.re, z2.im][comp]
                })
            }
        })
    }

    fn same_algebra(&self, other: &DAMatrix) -> Result<()> {
        if self.beta != other.beta {
            return Err(Error::invalid(format!(
                "algebra mismatch: beta = {} vs {}",
                self.beta, other.beta
            )));
        }
        Ok(())
    }

    pub fn matmul(&self, other: &DAMatrix) -> Result<DAMatrix> {
        self.same_algebra(other)?;
        if self.cols != other.rows {
            return Err(Error::dim(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        DAMatrix::from_complex(self.beta, &(self.to_complex()? * other.to_complex()?))
    }

    fn zip_with(&self, other: &DAMatrix, f: impl Fn(f64, f64) -> f64) -> Result<DAMatrix> {
        self.same_algebra(other)?;
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(Error::dim(format!(
                "shape mismatch: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(DAMatrix {
            beta: self.beta,
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &DAMatrix) -> Result<DAMatrix> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &DAMatrix) -> Result<DAMatrix> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, f: f64) -> DAMatrix {
        DAMatrix {
            data: self.data.iter().map(|x| x * f).collect(),
            ..self.clone()
        }
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data
            .chunks(self.beta.components())
            .map(|e| e.iter().map(|x| x * x).sum::<f64>().sqrt())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    /// Real part of the trace.
    pub fn trace_re(&self) -> f64 {
        (0..self.rows.min(self.cols))
            .map(|i| self.entry(i, i)[0])
            .sum()
    }

    /// Same matrix with its (real-valued) entries viewed in a larger algebra.
    pub fn promote(&self, beta: AlgebraKind) -> Result<DAMatrix> {
        if beta.components() < self.beta.components() {
            return Err(Error::invalid("cannot demote an algebra"));
        }
        let b = self.beta.components();
        Ok(DAMatrix::from_fn(beta, self.rows, self.cols, |i, j, c| {
            if c < b {
                self.entry(i, j)[c]
            } else {
                0.0
            }
        }))
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum EntryRepr {
    Scalar(f64),
    Components(Vec<f64>),
}

/// On-disk representation: {"beta", "rows", "cols", "data": [[[c1..cB], ...], ...]}.
#[derive(Serialize, Deserialize)]
struct MatrixFile {
    beta: u32,
    rows: usize,
    cols: usize,
    data: Vec<Vec<EntryRepr>>,
}

impl TryFrom<MatrixFile> for DAMatrix {
    type Error = Error;
    fn try_from(f: MatrixFile) -> Result<Self> {
        let beta = AlgebraKind::new(f.beta)?;
        let b = beta.components();
        if f.data.len() != f.rows {
            return Err(Error::dim(format!(
                "expected {} rows, got {}",
                f.rows,
                f.data.len()
            )));
        }
        let mut data = Vec::with_capacity(f.rows * f.cols * b);
        for (i, row) in f.data.into_iter().enumerate() {
            if row.len() != f.cols {
                return Err(Error::dim(format!(
                    "row {i} has {} entries, expected {}",
                    row.len(),
                    f.cols
                )));
            }
            for e in row {
                match e {
                    EntryRepr::Scalar(x) => {
                        data.push(x);
                        data.extend(std::iter::repeat_n(0.0, b - 1));
                    }
                    EntryRepr::Components(c) => {
                        if c.len() != b {
                            return Err(Error::dim(format!(
                                "entry in row {i} has {} components, beta = {b} needs {b}",
                                c.len()
                            )));
                        }
                        data.extend(c);
                    }
                }
            }
        }
        DAMatrix::new(beta, f.rows, f.cols, data)
    }
}

impl From<DAMatrix> for MatrixFile {
    fn from(m: DAMatrix) -> Self {
        let data = (0..m.rows)
            .map(|i| {
                (0..m.cols)
                    .map(|j| match m.entry(i, j) {
                        [x] => EntryRepr::Scalar(*x),
                        e => EntryRepr::Components(e.to_vec()),
                    })
                    .collect()
            })
            .collect();
        MatrixFile {
            beta: m.beta.beta(),
            rows: m.rows,
            cols: m.cols,
            data,
        }
    }
}

/// Self-adjoint square matrix over the algebra.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DAMatrix", into = "DAMatrix")]
pub struct HermitianMatrix(DAMatrix);

const HERMITIAN_TOL: f64 = 1e-12;

impl HermitianMatrix {
    /// Validates self-adjointness (asymmetry above 1e-12, relative to max(1, max|entry|),
    /// is rejected) and symmetrizes exactly.
    pub fn new(m: DAMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::dim(format!(
                "Hermitian matrix must be square, got {}x{}",
                m.rows, m.cols
            )));
        }
        let asym = asymmetry(&m);
        if asym > HERMITIAN_TOL * m.max_abs().max(1.0) {
            return Err(Error::NotHermitian(asym));
        }
        Ok(Self::symmetrized(m))
    }

    /// Symmetrizes without checking; for products known to be self-adjoint.
    pub(crate) fn symmetrized(mut m: DAMatrix) -> Self {
        let n = m.rows;
        for i in 0..n {
            for j in i..n {
                let a = m.entry(i, j).to_vec();
                let b = m.entry(j, i).to_vec();
                let mut avg = vec![0.0; a.len()];
                avg[0] = 0.5 * (a[0] + b[0]);
                for c in 1..a.len() {
                    avg[c] = 0.5 * (a[c] - b[c]);
                }
                m.entry_mut(i, j).copy_from_slice(&avg);
                if i == j {
                    m.entry_mut(i, i)[1..].fill(0.0);
                    continue;
                }
                let back = m.entry_mut(j, i);
                back[0] = avg[0];
                for c in 1..avg.len() {
                    back[c] = 0.0 - avg[c];
                }
            }
        }
        HermitianMatrix(m)
    }

    pub fn identity(beta: AlgebraKind, n: usize) -> Self {
        HermitianMatrix(DAMatrix::identity(beta, n))
    }

    pub fn diag(beta: AlgebraKind, d: &[f64]) -> Self {
        let mut m = DAMatrix::zeros(beta, d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m.entry_mut(i, i)[0] = v;
        }
        HermitianMatrix(m)
    }

    pub fn from_real(beta: AlgebraKind, n: usize, vals: &[f64]) -> Result<Self> {
        Self::new(DAMatrix::from_real(beta, n, n, vals)?)
    }

    pub fn dim(&self) -> usize {
        self.0.rows
    }

    pub fn beta(&self) -> AlgebraKind {
        self.0.beta
    }

    pub fn as_matrix(&self) -> &DAMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> DAMatrix {
        self.0
    }

    pub fn to_complex(&self) -> Result<CMatrix> {
        self.0.to_complex()
    }

    pub fn scale(&self, f: f64) -> HermitianMatrix {
        HermitianMatrix(self.0.scale(f))
    }

    /// B^* S B, which is self-adjoint.
    pub fn congruence(&self, b: &DAMatrix) -> Result<HermitianMatrix> {
        let p = b.conj_transpose().matmul(&self.0)?.matmul(b)?;
        Ok(Self::symmetrized(p))
    }
}

fn asymmetry(m: &DAMatrix) -> f64 {
    let n = m.rows;
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            let a = m.entry(i, j);
            let b = m.entry(j, i);
            worst = worst.max((a[0] - b[0]).abs());
            for c in 1..a.len() {
                worst = worst.max((a[c] + b[c]).abs());
            }
        }
    }
    worst
}

impl TryFrom<DAMatrix> for HermitianMatrix {
    type Error = Error;
    fn try_from(m: DAMatrix) -> Result<Self> {
        HermitianMatrix::new(m)
    }
}

impl From<HermitianMatrix> for DAMatrix {
    fn from(h: HermitianMatrix) -> Self {
        h.0
    }
}
