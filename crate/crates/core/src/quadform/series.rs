use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::model::{PearsonSign, QuadFormModel, QuadFormSpectra};
use crate::elliptical::BoundFamily;
use crate::error::{Error, Result};
use crate::matalg::{check_spectrum, HermitianMatrix};
use crate::special::{
    enumerate_partitions, gen_pochhammer, jack_c_identity, ln_mv_gamma, pairwise_sum, pochhammer,
    sum_layers, AlgebraKind, Partition, PreparedSpectrum, Scalar, SeriesControl, SeriesResult,
};

/// Family-specific closed coefficients, or the generic h-derivative / radial-moment route.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeriesPath {
    #[default]
    Fast,
    Generic,
}

/// Unnormalized CF value at S = 0 under two readings of the radial moment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawNormalization {
    /// C pi^c0 theta(c0) / Gamma(c0) with theta from direct integration.
    pub calculus: f64,
    /// The same chain with the radial moment carrying an extra power beta - 1.
    pub beta_shifted: f64,
}

/// One row of a per-degree truncation table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartialRow {
    pub degree: usize,
    pub layer_re: f64,
    pub layer_im: f64,
    pub layer_norm: f64,
    pub partial_re: f64,
    pub partial_im: f64,
}

/// Where a truncation table is evaluated.
#[derive(Debug, Clone, PartialEq)]
pub enum EvalPoint {
    /// Density at W.
    Density(HermitianMatrix),
    /// Characteristic function at S.
    Cf(HermitianMatrix),
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|j| j as f64).product()
}

fn alternating(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// sum over |kappa| = k of w(kappa) C(x) C(y) / C(I_d).
fn jack_layer<T: Scalar>(
    k: usize,
    x: &PreparedSpectrum<f64>,
    y: &PreparedSpectrum<T>,
    beta: AlgebraKind,
    d: usize,
    weight: impl Fn(&Partition) -> f64,
) -> T {
    let kappas = enumerate_partitions(k, x.len().min(y.len()));
    let cx = x.layer(k, &kappas, beta);
    let cy = y.layer(k, &kappas, beta);
    let terms: Vec<T> = kappas
        .iter()
        .zip(cx)
        .zip(cy)
        .map(|((kp, a), b)| b.scale(a * weight(kp) / jack_c_identity(kp, d, beta)))
        .collect();
    pairwise_sum(&terms)
}

struct DensityPlan {
    x: PreparedSpectrum<f64>,
    y: PreparedSpectrum<f64>,
    fam: BoundFamily,
    path: SeriesPath,
    sign: PearsonSign,
    beta: AlgebraKind,
    d: usize,
    ln_prefactor: f64,
}

impl DensityPlan {
    fn coef(&self, k: usize) -> f64 {
        let signed = self.sign == PearsonSign::Analytic;
        match (self.path, self.fam) {
            (SeriesPath::Generic, f) => {
                let h = if signed {
                    f.h_deriv0(k)
                } else {
                    f.h_deriv0_unsigned(k)
                };
                h / factorial(k)
            }
            (SeriesPath::Fast, BoundFamily::Normal) => 1.0 / factorial(k),
            (SeriesPath::Fast, BoundFamily::PearsonVII { s, .. }) => {
                let c = pochhammer(s, k) / factorial(k);
                if signed {
                    alternating(k) * c
                } else {
                    c
                }
            }
        }
    }

    fn layer(&self, k: usize) -> f64 {
        let c = self.coef(k);
        jack_layer(k, &self.x, &self.y, self.beta, self.d, |_| c)
    }
}

struct CfPlan {
    x: PreparedSpectrum<f64>,
    y: PreparedSpectrum<Complex64>,
    fam: BoundFamily,
    path: SeriesPath,
    beta: AlgebraKind,
    d: usize,
    a: f64,
    c0: f64,
}

impl CfPlan {
    fn coef(&self, k: usize) -> Result<f64> {
        if k == 0 {
            return Ok(1.0);
        }
        match (self.path, self.fam) {
            (SeriesPath::Fast, BoundFamily::Normal) => Ok(1.0 / factorial(k)),
            (SeriesPath::Fast, BoundFamily::PearsonVII { s, .. }) => {
                let base = s - self.c0 - k as f64;
                if (0..k).any(|j| (base + j as f64).abs() < 1e-12) {
                    return Err(Error::Pole {
                        degree: k,
                        detail: format!("(s - beta*m*n/2 - k)_k vanishes at k = {k} (s = {s})"),
                    });
                }
                Ok(1.0 / (factorial(k) * pochhammer(base, k)))
            }
            (SeriesPath::Generic, f) => {
                let c = self.c0 + k as f64;
                let ratio = f.ln_radial_moment(c)?
                    - statrs::function::gamma::ln_gamma(c)
                    - f.ln_radial_moment(self.c0)?
                    + statrs::function::gamma::ln_gamma(self.c0);
                Ok(ratio.exp() / factorial(k))
            }
        }
    }

    fn layer(&self, k: usize) -> Result<Complex64> {
        let c = self.coef(k)?;
        Ok(jack_layer(k, &self.x, &self.y, self.beta, self.d, |kp| {
            c * gen_pochhammer(self.a, kp, self.beta)
        }))
    }
}

impl QuadFormSpectra {
    /// Log of the density prefactor at a W with the given log-determinant.
    pub fn density_log_prefactor(&self, ln_det_w: f64) -> Result<f64> {
        let fam = self.bound_family()?;
        let b = self.beta.beta_f64();
        let (m, n) = (self.m as f64, self.n as f64);
        Ok(fam.ln_normalizing_constant(self.dims())
            + b * m * n / 2.0 * PI.ln()
            + (b * (n - m + 1.0) / 2.0 - 1.0) * ln_det_w
            - ln_mv_gamma(self.m, b * n / 2.0, self.beta)?
            - b * n / 2.0 * self.ln_det_sigma
            - b * m / 2.0 * self.ln_det_theta
            - b * m / 2.0 * self.ln_det_lambda())
    }

    fn density_plan(&self, y: &[f64], path: SeriesPath) -> Result<DensityPlan> {
        self.validate()?;
        check_spectrum(y, "Sigma^-1 W")?;
        if y.len() != self.m {
            return Err(Error::dim(format!(
                "expected {} eigenvalues of Sigma^-1 W, got {}",
                self.m,
                y.len()
            )));
        }
        if self.rank() < self.m {
            return Err(Error::RankDeficientW {
                rank: self.rank(),
                m: self.m,
            });
        }
        if let Some(&bad) = y.iter().find(|&&v| v <= 0.0) {
            return Err(Error::domain(format!(
                "W must be positive definite (eigenvalue of Sigma^-1 W = {bad})"
            )));
        }
        let fam = self.bound_family()?;
        let b = self.beta.beta_f64();
        let factor = match (path, fam) {
            (SeriesPath::Generic, _) => b,
            (SeriesPath::Fast, BoundFamily::Normal) => -b / 2.0,
            (SeriesPath::Fast, BoundFamily::PearsonVII { g, .. }) => b / g,
        };
        let arg: Vec<f64> = y.iter().map(|v| v * factor).collect();
        let ln_det_w = y.iter().map(|v| v.ln()).sum::<f64>() + self.ln_det_sigma;
        Ok(DensityPlan {
            x: PreparedSpectrum::new(&self.theta_inv_a_pinv),
            y: PreparedSpectrum::new(&arg),
            fam,
            path,
            sign: self.sign,
            beta: self.beta,
            d: self.denominator_dim(),
            ln_prefactor: self.density_log_prefactor(ln_det_w)?,
        })
    }

    /// Density of W from the eigenvalues of Sigma^-1 W.
    pub fn density(&self, y: &[f64], ctrl: &SeriesControl) -> Result<SeriesResult<f64>> {
        self.density_with(y, ctrl, SeriesPath::Fast, false)
    }

    pub fn density_with(
        &self,
        y: &[f64],
        ctrl: &SeriesControl,
        path: SeriesPath,
        keep_log: bool,
    ) -> Result<SeriesResult<f64>> {
        ctrl.validate()?;
        let plan = self.density_plan(y, path)?;
        let res = sum_layers(ctrl, false, keep_log, |k| Ok(plan.layer(k)))?;
        res.scaled(plan.ln_prefactor.exp())
            .into_checked(ctrl.max_degree)
    }

    /// The k-th density layer without the prefactor.
    pub fn density_layer(&self, y: &[f64], k: usize, path: SeriesPath) -> Result<f64> {
        Ok(self.density_plan(y, path)?.layer(k))
    }

    fn cf_plan(&self, z: &[f64], path: SeriesPath) -> Result<CfPlan> {
        self.validate()?;
        check_spectrum(z, "Sigma S")?;
        if z.len() != self.m {
            return Err(Error::dim(format!(
                "expected {} eigenvalues of Sigma S, got {}",
                self.m,
                z.len()
            )));
        }
        let fam = self.bound_family()?;
        let b = self.beta.beta_f64();
        let factor = match (path, fam) {
            (SeriesPath::Generic, _) => b,
            (SeriesPath::Fast, BoundFamily::Normal) => 2.0 * b,
            (SeriesPath::Fast, BoundFamily::PearsonVII { g, .. }) => g * b,
        };
        let arg: Vec<Complex64> = z.iter().map(|v| Complex64::new(0.0, v * factor)).collect();
        Ok(CfPlan {
            x: PreparedSpectrum::new(&self.theta_a),
            y: PreparedSpectrum::new(&arg),
            fam,
            path,
            beta: self.beta,
            d: self.denominator_dim(),
            a: b * self.n as f64 / 2.0,
            c0: self.dims().real_dim() / 2.0,
        })
    }

    /// Characteristic function of W from the eigenvalues of Sigma S, normalized to 1 at S = 0.
    pub fn cf(&self, z: &[f64], ctrl: &SeriesControl) -> Result<SeriesResult<Complex64>> {
        self.cf_with(z, ctrl, SeriesPath::Fast, false)
    }

    pub fn cf_with(
        &self,
        z: &[f64],
        ctrl: &SeriesControl,
        path: SeriesPath,
        keep_log: bool,
    ) -> Result<SeriesResult<Complex64>> {
        ctrl.validate()?;
        let plan = self.cf_plan(z, path)?;
        let res = sum_layers(ctrl, plan.y.is_zero(), keep_log, |k| plan.layer(k))?;
        res.into_checked(ctrl.max_degree)
    }

    pub fn cf_layer(&self, z: &[f64], k: usize, path: SeriesPath) -> Result<Complex64> {
        self.cf_plan(z, path)?.layer(k)
    }

    /// The uncalibrated CF constant at S = 0.
    pub fn cf_raw_normalization(&self) -> Result<RawNormalization> {
        let fam = self.bound_family()?;
        let dims = self.dims();
        let c0 = dims.real_dim() / 2.0;
        let ln_chain = fam.ln_normalizing_constant(dims) + c0 * PI.ln()
            - statrs::function::gamma::ln_gamma(c0);
        let calculus = (ln_chain + fam.ln_radial_moment(c0)?).exp();
        let shift = fam.radial_moment_beta_shifted(c0, self.beta)? / fam.radial_moment(c0)?;
        Ok(RawNormalization {
            calculus,
            beta_shifted: calculus * shift,
        })
    }

    fn table_rows<T: Scalar>(
        &self,
        ctrl: &SeriesControl,
        scale: f64,
        mut layer: impl FnMut(usize) -> Result<T>,
    ) -> Result<Vec<PartialRow>> {
        let mut rows = Vec::with_capacity(ctrl.max_degree + 1);
        let mut partial = T::zero();
        for k in 0..=ctrl.max_degree {
            let t = layer(k)?.scale(scale);
            partial += t;
            rows.push(PartialRow {
                degree: k,
                layer_re: t.re(),
                layer_im: t.im(),
                layer_norm: t.modulus(),
                partial_re: partial.re(),
                partial_im: partial.im(),
            });
        }
        Ok(rows)
    }

    /// Every layer up to max_degree, without early stopping, for density eigenvalues y.
    pub fn density_table(&self, y: &[f64], ctrl: &SeriesControl) -> Result<Vec<PartialRow>> {
        ctrl.validate()?;
        let plan = self.density_plan(y, SeriesPath::Fast)?;
        self.table_rows(ctrl, plan.ln_prefactor.exp(), |k| Ok(plan.layer(k)))
    }

    pub fn cf_table(&self, z: &[f64], ctrl: &SeriesControl) -> Result<Vec<PartialRow>> {
        ctrl.validate()?;
        let plan = self.cf_plan(z, SeriesPath::Fast)?;
        self.table_rows(ctrl, 1.0, |k| plan.layer(k))
    }
}

/// Density of W = X* A X at a positive definite W.
pub fn density_w(
    w: &HermitianMatrix,
    model: &QuadFormModel,
    ctrl: &SeriesControl,
) -> Result<SeriesResult<f64>> {
    density_w_with(w, model, ctrl, SeriesPath::Fast)
}

pub fn density_w_with(
    w: &HermitianMatrix,
    model: &QuadFormModel,
    ctrl: &SeriesControl,
    path: SeriesPath,
) -> Result<SeriesResult<f64>> {
    if model.rank() < model.m() {
        return Err(Error::RankDeficientW {
            rank: model.rank(),
            m: model.m(),
        });
    }
    let y = model.sigma_inv_w_spectrum(w)?;
    model.spectra().density_with(&y, ctrl, path, false)
}

/// Characteristic function E etr(i W S), calibrated so that the value at S = 0 is 1.
pub fn cf_w(
    s: &HermitianMatrix,
    model: &QuadFormModel,
    ctrl: &SeriesControl,
) -> Result<SeriesResult<Complex64>> {
    cf_w_with(s, model, ctrl, SeriesPath::Fast)
}

pub fn cf_w_with(
    s: &HermitianMatrix,
    model: &QuadFormModel,
    ctrl: &SeriesControl,
    path: SeriesPath,
) -> Result<SeriesResult<Complex64>> {
    let z = model.sigma_s_spectrum(s)?;
    model.spectra().cf_with(&z, ctrl, path, false)
}

/// Per-degree layers and partial sums for degrees 0..=max_degree.
pub fn series_partial_table(
    model: &QuadFormModel,
    ctrl: &SeriesControl,
    point: &EvalPoint,
) -> Result<Vec<PartialRow>> {
    match point {
        EvalPoint::Density(w) => {
            let y = model.sigma_inv_w_spectrum(w)?;
            model.spectra().density_table(&y, ctrl)
        }
        EvalPoint::Cf(s) => {
            let z = model.sigma_s_spectrum(s)?;
            model.spectra().cf_table(&z, ctrl)
        }
    }
}
