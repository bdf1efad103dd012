//! Density and characteristic-function series for matrix quadratic forms
//! `W = X* A X` where `X` is matrix-variate elliptical over the reals,
//! complexes, quaternions or octonions, plus a Monte Carlo harness that checks
//! the supporting identities.

pub mod cli;
pub mod elliptical;
pub mod error;
pub mod matalg;
pub mod quad;
pub mod quadform;
pub mod rng;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
pub use matalg::{DAMatrix, HermitianMatrix};
pub use special::{AlgebraKind, Partition, SeriesControl, SeriesResult};
