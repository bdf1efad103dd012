use serde::{Deserialize, Serialize};

use crate::elliptical::{BoundFamily, Dims, EllipticalModel, GeneratorFamily};
use crate::error::{Error, Result};
use crate::matalg::{
    inverse_pd, log_det_pd, moore_penrose, product_spectrum, spectral_nonsingular,
    sqrt_and_inv_sqrt_pd, HermitianMatrix, PSDDecomposition,
};
use crate::special::AlgebraKind;

/// Which identity sits in the C_kappa(I_d) denominators of the series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SplittingConvention {
    /// d = rank(A).
    #[default]
    RankR,
    /// d = m.
    FullM,
    /// d = n.
    FullN,
}

impl SplittingConvention {
    pub const ALL: [SplittingConvention; 3] = [Self::RankR, Self::FullM, Self::FullN];

    pub fn denominator_dim(self, r: usize, m: usize, n: usize) -> usize {
        match self {
            SplittingConvention::RankR => r,
            SplittingConvention::FullM => m,
            SplittingConvention::FullN => n,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SplittingConvention::RankR => "rank-r",
            SplittingConvention::FullM => "full-m",
            SplittingConvention::FullN => "full-n",
        }
    }
}

/// Sign of the Pearson VII derivative coefficients in the density series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PearsonSign {
    /// h^(k)(0) = (-1)^k (s)_k / g^k.
    #[default]
    Analytic,
    /// (s)_k / g^k with no alternating sign.
    Unsigned,
}

/// Everything the series need, as spectra. Usable for beta = 8, where the
/// matrix layer is unavailable and eigenvalues are supplied directly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadFormSpectra {
    pub beta: AlgebraKind,
    pub m: usize,
    pub n: usize,
    pub family: GeneratorFamily,
    /// Nonzero eigenvalues of A; their count is the rank r.
    pub a_eigenvalues: Vec<f64>,
    /// Nonzero eigenvalues of Theta^-1 A^+.
    pub theta_inv_a_pinv: Vec<f64>,
    /// Nonzero eigenvalues of Theta A.
    pub theta_a: Vec<f64>,
    pub ln_det_theta: f64,
    pub ln_det_sigma: f64,
    #[serde(default)]
    pub convention: SplittingConvention,
    #[serde(default)]
    pub sign: PearsonSign,
}

impl QuadFormSpectra {
    pub fn validate(&self) -> Result<()> {
        let r = self.a_eigenvalues.len();
        if self.m == 0 || self.n == 0 {
            return Err(Error::dim("m and n must be positive"));
        }
        if r == 0 {
            return Err(Error::Rank("A has rank 0".into()));
        }
        if r > self.n {
            return Err(Error::dim(format!("rank(A) = {r} exceeds n = {}", self.n)));
        }
        if self.theta_inv_a_pinv.len() != r || self.theta_a.len() != r {
            return Err(Error::dim(format!(
                "spectra of Theta^-1 A^+ and Theta A must have rank(A) = {r} entries"
            )));
        }
        for (name, v) in [
            ("A", &self.a_eigenvalues),
            ("Theta^-1 A^+", &self.theta_inv_a_pinv),
            ("Theta A", &self.theta_a),
        ] {
            if v.iter().any(|x| !(*x > 0.0 && x.is_finite())) {
                return Err(Error::domain(format!(
                    "nonzero eigenvalues of {name} must be positive and finite"
                )));
            }
        }
        if !self.ln_det_theta.is_finite() || !self.ln_det_sigma.is_finite() {
            return Err(Error::domain("log-determinants must be finite"));
        }
        self.bound_family()?;
        Ok(())
    }

    pub fn rank(&self) -> usize {
        self.a_eigenvalues.len()
    }

    pub fn dims(&self) -> Dims {
        Dims::new(self.beta, self.m, self.n)
    }

    pub fn bound_family(&self) -> Result<BoundFamily> {
        self.family.bind(self.dims())
    }

    pub fn denominator_dim(&self) -> usize {
        self.convention.denominator_dim(self.rank(), self.m, self.n)
    }

    pub fn ln_det_lambda(&self) -> f64 {
        self.a_eigenvalues.iter().map(|x| x.ln()).sum()
    }
}

/// W = X* A X with X ~ E(0, Theta, Sigma, h): the matrices, their spectral data and options.
#[derive(Debug, Clone)]
pub struct QuadFormModel {
    a: HermitianMatrix,
    theta: HermitianMatrix,
    sigma: HermitianMatrix,
    decomposition: PSDDecomposition,
    a_pinv: HermitianMatrix,
    sigma_half: HermitianMatrix,
    sigma_inv_half: HermitianMatrix,
    spectra: QuadFormSpectra,
}

/// On-disk model: {"family", "beta", "a", "theta", "sigma"}.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuadFormFile {
    pub family: GeneratorFamily,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<u32>,
    pub a: HermitianMatrix,
    pub theta: HermitianMatrix,
    pub sigma: HermitianMatrix,
}

fn leading(v: Vec<f64>, r: usize) -> Vec<f64> {
    v.into_iter().take(r).collect()
}

impl QuadFormModel {
    pub fn new(
        a: HermitianMatrix,
        theta: HermitianMatrix,
        sigma: HermitianMatrix,
        family: GeneratorFamily,
        convention: SplittingConvention,
    ) -> Result<Self> {
        let beta = a.beta();
        if theta.beta() != beta || sigma.beta() != beta {
            return Err(Error::invalid("A, Theta and Sigma must share one algebra"));
        }
        beta.require_matrices("matrix-valued quadratic-form models (supply spectra instead)")?;
        let (n, m) = (a.dim(), sigma.dim());
        if theta.dim() != n {
            return Err(Error::dim(format!(
                "Theta is {0}x{0} but A is {n}x{n}",
                theta.dim()
            )));
        }
        let decomposition = spectral_nonsingular(&a, None)?;
        let r = decomposition.rank;
        if r == 0 {
            return Err(Error::Rank("A has rank 0".into()));
        }
        let ln_det_theta = log_det_pd(&theta, "Theta")?;
        let ln_det_sigma = log_det_pd(&sigma, "Sigma")?;
        let a_pinv = moore_penrose(&a, None)?;
        let theta_inv = inverse_pd(&theta)?;
        let theta_inv_a_pinv = leading(product_spectrum(&theta_inv, &a_pinv)?, r);
        let theta_a = leading(product_spectrum(&theta, &a)?, r);
        let (sigma_half, sigma_inv_half) = sqrt_and_inv_sqrt_pd(&sigma, "Sigma")?;
        let spectra = QuadFormSpectra {
            beta,
            m,
            n,
            family,
            a_eigenvalues: decomposition.eigenvalues.clone(),
            theta_inv_a_pinv,
            theta_a,
            ln_det_theta,
            ln_det_sigma,
            convention,
            sign: PearsonSign::Analytic,
        };
        spectra.validate()?;
        Ok(QuadFormModel {
            a,
            theta,
            sigma,
            decomposition,
            a_pinv,
            sigma_half,
            sigma_inv_half,
            spectra,
        })
    }

    pub fn from_file(f: QuadFormFile, convention: SplittingConvention) -> Result<Self> {
        if let Some(b) = f.beta {
            if b != f.a.beta().beta() {
                return Err(Error::invalid(format!(
                    "model beta = {b} but matrices use beta = {}",
                    f.a.beta()
                )));
            }
        }
        Self::new(f.a, f.theta, f.sigma, f.family, convention)
    }

    pub fn to_file(&self) -> QuadFormFile {
        QuadFormFile {
            family: self.spectra.family,
            beta: Some(self.beta().beta()),
            a: self.a.clone(),
            theta: self.theta.clone(),
            sigma: self.sigma.clone(),
        }
    }

    pub fn with_convention(mut self, c: SplittingConvention) -> Self {
        self.spectra.convention = c;
        self
    }

    pub fn with_sign(mut self, s: PearsonSign) -> Self {
        self.spectra.sign = s;
        self
    }

    pub fn spectra(&self) -> &QuadFormSpectra {
        &self.spectra
    }
    pub fn a(&self) -> &HermitianMatrix {
        &self.a
    }
    pub fn a_pinv(&self) -> &HermitianMatrix {
        &self.a_pinv
    }
    pub fn theta(&self) -> &HermitianMatrix {
        &self.theta
    }
    pub fn sigma(&self) -> &HermitianMatrix {
        &self.sigma
    }
    pub fn decomposition(&self) -> &PSDDecomposition {
        &self.decomposition
    }
    pub fn beta(&self) -> AlgebraKind {
        self.spectra.beta
    }
    pub fn rank(&self) -> usize {
        self.spectra.rank()
    }
    pub fn m(&self) -> usize {
        self.spectra.m
    }
    pub fn n(&self) -> usize {
        self.spectra.n
    }
    pub fn convention(&self) -> SplittingConvention {
        self.spectra.convention
    }
    pub fn family(&self) -> GeneratorFamily {
        self.spectra.family
    }

    /// The centered elliptical law of X.
    pub fn elliptical_model(&self) -> Result<EllipticalModel> {
        EllipticalModel::centered(self.theta.clone(), self.sigma.clone(), self.spectra.family)
    }

    fn check_m(&self, s: &HermitianMatrix, what: &str) -> Result<()> {
        if s.beta() != self.beta() || s.dim() != self.m() {
            return Err(Error::dim(format!(
                "{what} must be {0}x{0} over beta = {1}",
                self.m(),
                self.beta()
            )));
        }
        Ok(())
    }

    /// Eigenvalues of Sigma^-1 W.
    pub fn sigma_inv_w_spectrum(&self, w: &HermitianMatrix) -> Result<Vec<f64>> {
        self.check_m(w, "W")?;
        crate::matalg::eig_hermitian(&w.congruence(self.sigma_inv_half.as_matrix())?)
    }

    /// Eigenvalues of Sigma S.
    pub fn sigma_s_spectrum(&self, s: &HermitianMatrix) -> Result<Vec<f64>> {
        self.check_m(s, "S")?;
        crate::matalg::eig_hermitian(&s.congruence(self.sigma_half.as_matrix())?)
    }
}

impl Serialize for QuadFormModel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_file().serialize(s)
    }
}
