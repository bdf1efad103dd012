use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported algebra: beta = {beta} is not supported for {operation}")]
    UnsupportedAlgebra { beta: u32, operation: &'static str },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("rank error: {0}")]
    Rank(String),

    #[error("indefinite input: eigenvalue {eigenvalue:e} is below -{threshold:e}")]
    Indefinite { eigenvalue: f64, threshold: f64 },

    #[error("matrix is not Hermitian: asymmetry {0:e} exceeds 1e-12")]
    NotHermitian(f64),

    #[error("rank-deficient W: rank(A) = {rank} < m = {m}, so W has no Lebesgue density")]
    RankDeficientW { rank: usize, m: usize },

    #[error(
        "series did not converge by degree {max_degree}: partial sum {partial_re:e}{partial_im:+e}i, last layer magnitude {tail:e}"
    )]
    NotConverged {
        max_degree: usize,
        partial_re: f64,
        partial_im: f64,
        tail: f64,
    },

    #[error("pole at degree {degree}: {detail}")]
    Pole { degree: usize, detail: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }

    /// True for errors that come from the numerics (as opposed to malformed input files).
    pub fn is_numerical(&self) -> bool {
        !matches!(self, Error::Io(_) | Error::Json(_))
    }
}
