use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{Error, Result};
use crate::quad::integrate_half_line;
use crate::special::{pochhammer, AlgebraKind};

/// Density generator h with density proportional to h(beta tr(Sigma^-1 (Y-mu)* Theta^-1 (Y-mu))).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GeneratorFamily {
    Normal,
    #[serde(rename = "pearson_vii")]
    PearsonVII {
        s: f64,
        g: f64,
    },
    StudentT {
        g: f64,
    },
    Cauchy,
}

/// Shape of X (n x m) and its algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub beta: AlgebraKind,
    pub m: usize,
    pub n: usize,
}

impl Dims {
    pub fn new(beta: AlgebraKind, m: usize, n: usize) -> Self {
        Dims { beta, m, n }
    }

    /// Real dimension beta * m * n of the sample space.
    pub fn real_dim(&self) -> f64 {
        self.beta.beta_f64() * (self.m * self.n) as f64
    }
}

/// A generator family with its parameters resolved for fixed dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundFamily {
    Normal,
    #[serde(rename = "pearson_vii")]
    PearsonVII {
        s: f64,
        g: f64,
    },
}

impl GeneratorFamily {
    /// Maps t and Cauchy onto Pearson VII and checks s > beta m n / 2, g > 0.
    pub fn bind(&self, dims: Dims) -> Result<BoundFamily> {
        let nd = dims.real_dim();
        let (s, g) = match *self {
            GeneratorFamily::Normal => return Ok(BoundFamily::Normal),
            GeneratorFamily::PearsonVII { s, g } => (s, g),
            GeneratorFamily::StudentT { g } => ((nd + g) / 2.0, g),
            GeneratorFamily::Cauchy => ((nd + 1.0) / 2.0, 1.0),
        };
        if !(g > 0.0 && g.is_finite()) {
            return Err(Error::domain(format!("Pearson VII needs g > 0 (got {g})")));
        }
        if !(s > nd / 2.0 && s.is_finite()) {
            return Err(Error::domain(format!(
                "Pearson VII needs s > beta*m*n/2 = {} (got s = {s})",
                nd / 2.0
            )));
        }
        Ok(BoundFamily::PearsonVII { s, g })
    }
}

impl BoundFamily {
    pub fn h_value(&self, u: f64) -> Result<f64> {
        if !(u >= 0.0) {
            return Err(Error::domain(format!(
                "generator argument must be >= 0 (got {u})"
            )));
        }
        Ok(match *self {
            BoundFamily::Normal => (-u / 2.0).exp(),
            BoundFamily::PearsonVII { s, g } => (1.0 + u / g).powf(-s),
        })
    }

    /// k-th derivative of h at 0.
    pub fn h_deriv0(&self, k: usize) -> f64 {
        match *self {
            BoundFamily::Normal => (-0.5f64).powi(k as i32),
            BoundFamily::PearsonVII { s, g } => {
                let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
                sign * pochhammer(s, k) / g.powi(k as i32)
            }
        }
    }

    /// Derivative coefficients without the alternating sign for Pearson VII.
    pub fn h_deriv0_unsigned(&self, k: usize) -> f64 {
        match *self {
            BoundFamily::Normal => self.h_deriv0(k),
            BoundFamily::PearsonVII { s, g } => pochhammer(s, k) / g.powi(k as i32),
        }
    }

    pub fn ln_normalizing_constant(&self, dims: Dims) -> f64 {
        let nd = dims.real_dim();
        let b = dims.beta.beta_f64();
        match *self {
            BoundFamily::Normal => -(nd / 2.0) * (2.0 * PI / b).ln(),
            BoundFamily::PearsonVII { s, g } => {
                ln_gamma(s) - (nd / 2.0) * (PI * g / b).ln() - ln_gamma(s - nd / 2.0)
            }
        }
    }

    /// C such that the density integrates to one, from the radial reduction
    /// 1/C = (2 pi^(N/2) / Gamma(N/2)) int_0^inf u^(N-1) h(beta u^2) du, N = beta m n.
    pub fn normalizing_constant_quadrature(&self, dims: Dims) -> Result<f64> {
        let nd = dims.real_dim();
        let b = dims.beta.beta_f64();
        let scale = (nd.max(1.0) / b).sqrt()
            * match *self {
                BoundFamily::Normal => 1.0,
                BoundFamily::PearsonVII { g, .. } => g.sqrt(),
            };
        let ln_norm = self.ln_normalizing_constant(dims);
        // Integrate the normalized integrand so the target accuracy is relative to O(1).
        let shift = -ln_norm + ln_gamma(nd / 2.0) - 2f64.ln() - (nd / 2.0) * PI.ln();
        let f = |u: f64| {
            if u <= 0.0 {
                return 0.0;
            }
            let hv = match self.h_value(b * u * u) {
                Ok(v) if v > 0.0 => v.ln(),
                _ => return 0.0,
            };
            ((nd - 1.0) * u.ln() + hv - shift).exp()
        };
        let i = integrate_half_line(f, scale, 1e-12)?;
        if !(i > 0.0 && i.is_finite()) {
            return Err(Error::domain("radial integral is not normalizable"));
        }
        Ok((ln_gamma(nd / 2.0) - 2f64.ln() - (nd / 2.0) * PI.ln() - shift).exp() / i)
    }

    fn check_moment(&self, c: f64) -> Result<()> {
        if !(c > 0.0) {
            return Err(Error::domain(format!(
                "radial moment needs c > 0 (got {c})"
            )));
        }
        if let BoundFamily::PearsonVII { s, .. } = *self {
            if !(s > c) {
                return Err(Error::domain(format!(
                    "radial moment diverges: needs s > c (s = {s}, c = {c})"
                )));
            }
        }
        Ok(())
    }

    pub fn ln_radial_moment(&self, c: f64) -> Result<f64> {
        self.check_moment(c)?;
        Ok(match *self {
            BoundFamily::Normal => c * 2f64.ln() + ln_gamma(c),
            BoundFamily::PearsonVII { s, g } => {
                c * g.ln() + ln_gamma(c) + ln_gamma(s - c) - ln_gamma(s)
            }
        })
    }

    /// int_0^inf h(z) z^(c-1) dz.
    pub fn radial_moment(&self, c: f64) -> Result<f64> {
        self.check_moment(c)?;
        Ok(match *self {
            BoundFamily::Normal => 2f64.powf(c) * gamma(c),
            BoundFamily::PearsonVII { s, g } => {
                let direct = g.powf(c) * gamma(c) * gamma(s - c) / gamma(s);
                if direct.is_finite() && direct > 0.0 {
                    direct
                } else {
                    self.ln_radial_moment(c)?.exp()
                }
            }
        })
    }

    /// The radial moment with the extra beta - 1 in the exponent of 2 (normal) or g (Pearson).
    pub fn radial_moment_beta_shifted(&self, c: f64, beta: AlgebraKind) -> Result<f64> {
        let shift = beta.beta_f64() - 1.0;
        let base = match *self {
            BoundFamily::Normal => 2.0,
            BoundFamily::PearsonVII { g, .. } => g,
        };
        Ok(self.radial_moment(c)? * base.powf(shift))
    }

    /// Radial moment by quadrature, after z = w^2.
    pub fn radial_moment_quadrature(&self, c: f64) -> Result<f64> {
        self.check_moment(c)?;
        let ln_ref = self.ln_radial_moment(c)?;
        let scale = match *self {
            BoundFamily::Normal => (2.0 * c).sqrt(),
            BoundFamily::PearsonVII { g, .. } => g.sqrt(),
        };
        let f = |w: f64| {
            if w <= 0.0 {
                return 0.0;
            }
            let z = w * w;
            match self.h_value(z) {
                Ok(h) if h > 0.0 => 2.0 * (h.ln() + (2.0 * c - 1.0) * w.ln() - ln_ref).exp(),
                _ => 0.0,
            }
        };
        Ok(integrate_half_line(f, scale, 1e-12)? * ln_ref.exp())
    }
}

pub fn h_value(family: &GeneratorFamily, u: f64, dims: Dims) -> Result<f64> {
    family.bind(dims)?.h_value(u)
}

pub fn h_deriv0(family: &GeneratorFamily, k: usize, dims: Dims) -> Result<f64> {
    Ok(family.bind(dims)?.h_deriv0(k))
}

pub fn normalizing_constant(family: &GeneratorFamily, dims: Dims) -> Result<f64> {
    Ok(family.bind(dims)?.ln_normalizing_constant(dims).exp())
}

pub fn normalizing_constant_quadrature(family: &GeneratorFamily, dims: Dims) -> Result<f64> {
    family.bind(dims)?.normalizing_constant_quadrature(dims)
}

pub fn radial_moment(family: &GeneratorFamily, c: f64, dims: Dims) -> Result<f64> {
    family.bind(dims)?.radial_moment(c)
}
