use serde::{Deserialize, Serialize};

use super::family::{BoundFamily, Dims, GeneratorFamily};
use crate::error::{Error, Result};
use crate::matalg::{inverse_pd, log_det_pd, DAMatrix, HermitianMatrix};
use crate::special::AlgebraKind;

/// Matrix-variate elliptical law for an n x m matrix Y.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "ModelFile", into = "ModelFile")]
pub struct EllipticalModel {
    mu: DAMatrix,
    theta: HermitianMatrix,
    sigma: HermitianMatrix,
    family: GeneratorFamily,
    bound: BoundFamily,
    dims: Dims,
    theta_inv: HermitianMatrix,
    sigma_inv: HermitianMatrix,
    ln_det_theta: f64,
    ln_det_sigma: f64,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    family: GeneratorFamily,
    beta: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mu: Option<DAMatrix>,
    theta: HermitianMatrix,
    sigma: HermitianMatrix,
}

impl TryFrom<ModelFile> for EllipticalModel {
    type Error = Error;
    fn try_from(f: ModelFile) -> Result<Self> {
        let beta = AlgebraKind::new(f.beta)?;
        let mu =
            f.mu.unwrap_or_else(|| DAMatrix::zeros(beta, f.theta.dim(), f.sigma.dim()));
        EllipticalModel::new(mu, f.theta, f.sigma, f.family)
    }
}

impl From<EllipticalModel> for ModelFile {
    fn from(m: EllipticalModel) -> Self {
        ModelFile {
            family: m.family,
            beta: m.dims.beta.beta(),
            mu: Some(m.mu),
            theta: m.theta,
            sigma: m.sigma,
        }
    }
}

impl EllipticalModel {
    pub fn new(
        mu: DAMatrix,
        theta: HermitianMatrix,
        sigma: HermitianMatrix,
        family: GeneratorFamily,
    ) -> Result<Self> {
        let beta = theta.beta();
        if sigma.beta() != beta || mu.beta() != beta {
            return Err(Error::invalid("mu, theta and sigma must share one algebra"));
        }
        beta.require_matrices("elliptical model")?;
        let (n, m) = (theta.dim(), sigma.dim());
        if (mu.rows(), mu.cols()) != (n, m) {
            return Err(Error::dim(format!(
                "mu is {}x{}, expected {n}x{m} from theta and sigma",
                mu.rows(),
                mu.cols()
            )));
        }
        let dims = Dims::new(beta, m, n);
        let bound = family.bind(dims)?;
        let ln_det_theta = log_det_pd(&theta, "theta")?;
        let ln_det_sigma = log_det_pd(&sigma, "sigma")?;
        Ok(EllipticalModel {
            theta_inv: inverse_pd(&theta)?,
            sigma_inv: inverse_pd(&sigma)?,
            mu,
            theta,
            sigma,
            family,
            bound,
            dims,
            ln_det_theta,
            ln_det_sigma,
        })
    }

    /// Centered model with identity-free scale matrices.
    pub fn centered(
        theta: HermitianMatrix,
        sigma: HermitianMatrix,
        family: GeneratorFamily,
    ) -> Result<Self> {
        let mu = DAMatrix::zeros(theta.beta(), theta.dim(), sigma.dim());
        Self::new(mu, theta, sigma, family)
    }

    pub fn mu(&self) -> &DAMatrix {
        &self.mu
    }
    pub fn theta(&self) -> &HermitianMatrix {
        &self.theta
    }
    pub fn sigma(&self) -> &HermitianMatrix {
        &self.sigma
    }
    pub fn family(&self) -> GeneratorFamily {
        self.family
    }
    pub fn bound_family(&self) -> BoundFamily {
        self.bound
    }
    pub fn dims(&self) -> Dims {
        self.dims
    }
    pub fn beta(&self) -> AlgebraKind {
        self.dims.beta
    }

    /// beta * Re tr(Sigma^-1 (Y-mu)* Theta^-1 (Y-mu)).
    pub fn quadratic_argument(&self, y: &DAMatrix) -> Result<f64> {
        if (y.rows(), y.cols()) != (self.dims.n, self.dims.m) || y.beta() != self.beta() {
            return Err(Error::dim(format!(
                "Y must be a {}x{} matrix over beta = {}",
                self.dims.n,
                self.dims.m,
                self.beta()
            )));
        }
        let r = y.sub(&self.mu)?;
        let q = self
            .sigma_inv
            .as_matrix()
            .matmul(&r.conj_transpose())?
            .matmul(self.theta_inv.as_matrix())?
            .matmul(&r)?;
        Ok(self.beta().beta_f64() * q.trace_re())
    }

    pub fn ln_density(&self, y: &DAMatrix) -> Result<f64> {
        let u = self.quadratic_argument(y)?.max(0.0);
        let b = self.beta().beta_f64();
        let (m, n) = (self.dims.m as f64, self.dims.n as f64);
        Ok(self.bound.ln_normalizing_constant(self.dims)
            - b * n / 2.0 * self.ln_det_sigma
            - b * m / 2.0 * self.ln_det_theta
            + self.bound.h_value(u)?.ln())
    }
}

pub fn density_x(y: &DAMatrix, model: &EllipticalModel) -> Result<f64> {
    model.ln_density(y).map(f64::exp)
}
