use std::fmt::Debug;
use std::iter::Sum;

use num_complex::Complex64;
use num_traits::{Num, NumAssign};

/// Field of evaluation for series and Jack polynomials: `f64` or `Complex64`.
pub trait Scalar:
    Copy
    + Num
    + NumAssign
    + std::ops::Neg<Output = Self>
    + From<f64>
    + Sum
    + Send
    + Sync
    + Debug
    + 'static
{
    fn modulus(self) -> f64;
    fn scale(self, f: f64) -> Self;
    fn re(self) -> f64;
    fn im(self) -> f64;
    fn is_exact_zero(self) -> bool;
}

impl Scalar for f64 {
    #[inline]
    fn modulus(self) -> f64 {
        self.abs()
    }
    #[inline]
    fn scale(self, f: f64) -> Self {
        self * f
    }
    #[inline]
    fn re(self) -> f64 {
        self
    }
    #[inline]
    fn im(self) -> f64 {
        0.0
    }
    #[inline]
    fn is_exact_zero(self) -> bool {
        self == 0.0
    }
}

impl Scalar for Complex64 {
    #[inline]
    fn modulus(self) -> f64 {
        self.norm()
    }
    #[inline]
    fn scale(self, f: f64) -> Self {
        self * f
    }
    #[inline]
    fn re(self) -> f64 {
        self.re
    }
    #[inline]
    fn im(self) -> f64 {
        self.im
    }
    #[inline]
    fn is_exact_zero(self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
}
