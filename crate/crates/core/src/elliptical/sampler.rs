use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Beta, ChiSquared, Distribution, StandardNormal};
use statrs::distribution::{Beta as BetaCdf, ChiSquared as ChiCdf, ContinuousCDF};

use super::family::BoundFamily;
use super::model::EllipticalModel;
use crate::error::{Error, Result};
use crate::matalg::{sqrt_psd, CMatrix, DAMatrix};
use crate::rng::stream_rng;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SampleOptions {
    /// Pair draws with radial quantiles u and 1 - u.
    pub antithetic: bool,
}

/// Radial law of beta |Z|^2.
#[derive(Debug, Clone)]
enum Radial {
    /// beta |Z|^2 ~ chi-square(N).
    Chi(ChiSquared<f64>, ChiCdf),
    /// beta |Z|^2 / g ~ BetaPrime(N/2, s - N/2), drawn as B/(1-B) with B ~ Beta.
    BetaPrime(Beta<f64>, BetaCdf, f64),
}

/// Precomputed affine map Y = mu + Theta^(1/2) Z Sigma^(1/2) in the complex embedding.
#[derive(Debug, Clone)]
pub struct EllipticalSampler {
    model: EllipticalModel,
    mu: CMatrix,
    theta_half: CMatrix,
    sigma_half: CMatrix,
    radial: Radial,
}

impl EllipticalSampler {
    pub fn new(model: &EllipticalModel) -> Result<Self> {
        let beta = model.beta();
        beta.require_matrices("sampling")?;
        let nd = model.dims().real_dim();
        let radial = match model.bound_family() {
            BoundFamily::Normal => Radial::Chi(
                ChiSquared::new(nd).map_err(|e| Error::domain(e.to_string()))?,
                ChiCdf::new(nd).map_err(|e| Error::domain(e.to_string()))?,
            ),
            BoundFamily::PearsonVII { s, g } => Radial::BetaPrime(
                Beta::new(nd / 2.0, s - nd / 2.0).map_err(|e| Error::domain(e.to_string()))?,
                BetaCdf::new(nd / 2.0, s - nd / 2.0).map_err(|e| Error::domain(e.to_string()))?,
                g,
            ),
        };
        Ok(EllipticalSampler {
            mu: model.mu().to_complex()?,
            theta_half: sqrt_psd(model.theta())?.to_complex()?,
            sigma_half: sqrt_psd(model.sigma())?.to_complex()?,
            model: model.clone(),
            radial,
        })
    }

    pub fn model(&self) -> &EllipticalModel {
        &self.model
    }

    fn gaussian<R: Rng + ?Sized>(&self, rng: &mut R, sd: f64) -> DAMatrix {
        let d = self.model.dims();
        DAMatrix::from_fn(d.beta, d.n, d.m, |_, _, _| {
            sd * rng.sample::<f64, _>(StandardNormal)
        })
    }

    fn finish(&self, z: &DAMatrix) -> CMatrix {
        let zc = z.to_complex().expect("algebra checked at construction");
        &self.mu + &self.theta_half * zc * &self.sigma_half
    }

    /// beta |Z|^2 from a quantile.
    fn radial_quantile(&self, u: f64) -> f64 {
        match &self.radial {
            Radial::Chi(_, c) => c.inverse_cdf(u),
            Radial::BetaPrime(_, b, g) => {
                let x = b.inverse_cdf(u);
                g * x / (1.0 - x)
            }
        }
    }

    fn radial_draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.radial {
            Radial::Chi(c, _) => c.sample(rng),
            Radial::BetaPrime(b, _, g) => {
                let x = b.sample(rng);
                g * x / (1.0 - x)
            }
        }
    }

    fn with_radius(&self, dir: &DAMatrix, beta_r2: f64) -> DAMatrix {
        let nrm = dir.frobenius_norm();
        let r = (beta_r2 / self.model.beta().beta_f64()).sqrt();
        dir.scale(r / nrm)
    }

    /// One draw of Y in the complex embedding.
    pub fn draw_embedded<R: Rng + ?Sized>(&self, rng: &mut R) -> CMatrix {
        let z = match self.radial {
            Radial::Chi(..) => self.gaussian(rng, (1.0 / self.model.beta().beta_f64()).sqrt()),
            Radial::BetaPrime(..) => {
                let dir = self.gaussian(rng, 1.0);
                let r2 = self.radial_draw(rng);
                self.with_radius(&dir, r2)
            }
        };
        self.finish(&z)
    }

    /// Two draws with independent directions and radial quantiles u, 1 - u.
    pub fn draw_antithetic_pair<R: Rng + ?Sized>(&self, rng: &mut R) -> (CMatrix, CMatrix) {
        let u: f64 = rng.gen_range(f64::EPSILON..1.0 - f64::EPSILON);
        let d1 = self.gaussian(rng, 1.0);
        let d2 = self.gaussian(rng, 1.0);
        let z1 = self.with_radius(&d1, self.radial_quantile(u));
        let z2 = self.with_radius(&d2, self.radial_quantile(1.0 - u));
        (self.finish(&z1), self.finish(&z2))
    }

    pub fn to_matrix(&self, y: &CMatrix) -> DAMatrix {
        DAMatrix::from_complex(self.model.beta(), y).expect("algebra checked at construction")
    }
}

/// `count` draws; draw i depends only on (seed, i).
pub fn sample_x(model: &EllipticalModel, count: usize, seed: u64) -> Result<Vec<DAMatrix>> {
    sample_x_with(model, count, seed, SampleOptions::default())
}

pub fn sample_x_with(
    model: &EllipticalModel,
    count: usize,
    seed: u64,
    opts: SampleOptions,
) -> Result<Vec<DAMatrix>> {
    let s = EllipticalSampler::new(model)?;
    Ok((0..count)
        .map(|i| {
            if opts.antithetic {
                let (a, b) = s.draw_antithetic_pair(&mut stream_rng(seed, (i / 2) as u64));
                s.to_matrix(if i % 2 == 0 { &a } else { &b })
            } else {
                s.to_matrix(&s.draw_embedded(&mut stream_rng(seed, i as u64)))
            }
        })
        .collect())
}

/// Re tr(W S) for Hermitian W, S in the complex embedding (halved for quaternions).
pub(crate) fn embedded_trace_product(w: &CMatrix, s: &CMatrix, quaternion: bool) -> f64 {
    let mut t = Complex64::new(0.0, 0.0);
    for i in 0..w.nrows() {
        for k in 0..w.ncols() {
            t += w[(i, k)] * s[(k, i)];
        }
    }
    if quaternion {
        t.re / 2.0
    } else {
        t.re
    }
}
