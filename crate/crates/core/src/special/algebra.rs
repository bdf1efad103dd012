use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Real dimension of the underlying division algebra: 1 (real), 2 (complex),
/// 4 (quaternion) or 8 (octonion).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct AlgebraKind(u8);

impl AlgebraKind {
    pub const REAL: AlgebraKind = AlgebraKind(1);
    pub const COMPLEX: AlgebraKind = AlgebraKind(2);
    pub const QUATERNION: AlgebraKind = AlgebraKind(4);
    pub const OCTONION: AlgebraKind = AlgebraKind(8);

    pub fn new(beta: u32) -> Result<Self> {
        match beta {
            1 | 2 | 4 | 8 => Ok(AlgebraKind(beta as u8)),
            _ => Err(Error::invalid(format!(
                "beta must be one of 1, 2, 4, 8 (got {beta})"
            ))),
        }
    }

    pub fn all() -> [AlgebraKind; 4] {
        [Self::REAL, Self::COMPLEX, Self::QUATERNION, Self::OCTONION]
    }

    #[inline]
    pub fn beta(self) -> u32 {
        self.0 as u32
    }

    #[inline]
    pub fn beta_f64(self) -> f64 {
        self.0 as f64
    }

    /// Jack parameter alpha = 2 / beta.
    #[inline]
    pub fn alpha(self) -> f64 {
        2.0 / self.beta_f64()
    }

    #[inline]
    pub fn half_beta(self) -> f64 {
        self.beta_f64() / 2.0
    }

    /// Number of real components per entry.
    #[inline]
    pub fn components(self) -> usize {
        self.0 as usize
    }

    pub fn supports_matrices(self) -> bool {
        self.0 <= 4
    }

    pub(crate) fn require_matrices(self, operation: &'static str) -> Result<()> {
        if self.supports_matrices() {
            Ok(())
        } else {
            Err(Error::UnsupportedAlgebra {
                beta: self.beta(),
                operation,
            })
        }
    }
}

impl TryFrom<u32> for AlgebraKind {
    type Error = Error;
    fn try_from(b: u32) -> Result<Self> {
        AlgebraKind::new(b)
    }
}

impl From<AlgebraKind> for u32 {
    fn from(a: AlgebraKind) -> u32 {
        a.beta()
    }
}

impl fmt::Display for AlgebraKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}
