use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::mc::mc_run;
use super::oracles::{
    gram_volume_factor, ln_beta_prime, ln_chi_square, ln_pearson_wishart_density,
    ln_wishart_density, real_entries, wishart_draw,
};
use super::report::{failed, finish, inputs_digest, mc_radius, point_report, CheckReport};
use crate::elliptical::{BoundFamily, EllipticalSampler, GeneratorFamily};
use crate::error::{Error, Result};
use crate::matalg::{
    eig_hermitian, inverse_pd, linear_volume_factor, log_det_pd, product_spectrum,
    spectral_nonsingular, sqrt_psd, stiefel_sample_with, CMatrix, DAMatrix, HermitianMatrix,
};
use crate::quadform::{
    cf_normal_closed_spectral, PearsonSign, QuadFormFile, QuadFormModel, QuadFormSpectra,
    SplittingConvention,
};
use crate::special::{
    gen_pochhammer, jack_c, jack_c_identity, mv_gamma, AlgebraKind, Partition, SeriesControl,
};

/// Smallest sample count accepted by the Monte Carlo checks.
pub const MIN_SAMPLES: usize = 100;

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn min_samples(n: usize) -> Result<()> {
    if n < MIN_SAMPLES {
        return Err(Error::invalid(format!(
            "Monte Carlo checks need N >= {MIN_SAMPLES} (got {n})"
        )));
    }
    Ok(())
}

fn wrap<P: Serialize>(
    name: &str,
    params: &P,
    n: usize,
    seed: u64,
    run: impl FnOnce(String) -> Result<CheckReport>,
) -> CheckReport {
    let digest = inputs_digest(params);
    run(digest.clone()).unwrap_or_else(|e| failed(name, digest, n, seed, &e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitalParams {
    pub x1: HermitianMatrix,
    pub x2: HermitianMatrix,
    pub kappa: Partition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StiefelParams {
    /// n x n.
    pub x1: HermitianMatrix,
    /// m x m.
    pub x2: HermitianMatrix,
    pub kappa: Partition,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacobianParams {
    pub a: DAMatrix,
    pub m: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaplaceParams {
    pub a: f64,
    pub kappa: Partition,
    pub u: HermitianMatrix,
    pub z: HermitianMatrix,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CfParams {
    pub model: QuadFormFile,
    pub s_points: Vec<HermitianMatrix>,
    #[serde(default)]
    pub antithetic: bool,
}

fn default_bandwidth() -> f64 {
    0.1
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityParams {
    pub model: QuadFormFile,
    pub w_points: Vec<HermitianMatrix>,
    /// Relative half-width of the box kernel used when no exact or conditional estimator applies.
    #[serde(default = "default_bandwidth")]
    pub bandwidth: f64,
}

/// Candidates C(X1) C(X2) / C(I_d) for the listed denominators; skipped where C(I_d) = 0.
fn splitting_candidates(
    kappa: &Partition,
    x1: &HermitianMatrix,
    x2: &HermitianMatrix,
    dims: &[(&str, usize)],
    notes: &mut Vec<String>,
) -> Result<Vec<(String, Complex64)>> {
    let beta = x1.beta();
    let num = jack_c(kappa, &eig_hermitian(x1)?, beta) * jack_c(kappa, &eig_hermitian(x2)?, beta);
    let mut out = Vec::new();
    for &(label, d) in dims {
        if kappa.len() > d {
            notes.push(format!("candidate {label} skipped: C_kappa(I_{d}) = 0"));
            continue;
        }
        out.push((label.to_string(), re(num / jack_c_identity(kappa, d, beta))));
    }
    Ok(out)
}

fn splitting_check(
    name: &str,
    x1: &HermitianMatrix,
    x2: &HermitianMatrix,
    kappa: &Partition,
    n: usize,
    seed: u64,
    digest: String,
) -> Result<CheckReport> {
    min_samples(n)?;
    let beta = x1.beta();
    beta.require_matrices("splitting checks")?;
    if x2.beta() != beta {
        return Err(Error::invalid("X1 and X2 must share one algebra"));
    }
    let (nn, m) = (x1.dim(), x2.dim());
    if m > nn {
        return Err(Error::dim(format!(
            "X2 ({m}x{m}) is larger than X1 ({nn}x{nn})"
        )));
    }
    let x1h = sqrt_psd(x1)?;
    let r = spectral_nonsingular(x2, None)?.rank;
    let mut notes = Vec::new();
    let mut dims = vec![("rank-r", r), ("full-m", m)];
    if nn != m {
        dims.push(("full-n", nn));
    }
    let cands = splitting_candidates(kappa, x1, x2, &dims, &mut notes)?;
    let est = mc_run(n, seed, 1, |rng, out| {
        let h = stiefel_sample_with(m, nn, beta, rng).expect("validated dimensions");
        let mm = x2
            .congruence(&h.conj_transpose())
            .expect("validated dimensions");
        let e = eig_hermitian(
            &mm.congruence(x1h.as_matrix())
                .expect("validated dimensions"),
        )
        .expect("validated algebra");
        out[0] = re(jack_c(kappa, &e, beta));
    });
    let (mean, se) = (est.mean[0], est.se[0]);
    let point = point_report(
        format!("kappa = {kappa}"),
        mean,
        se,
        mc_radius(mean, se),
        &cands,
    );
    Ok(finish(name, digest, vec![point], est.samples, seed, notes))
}

/// Haar average of C_kappa(X1 H X2 H*) over the m x m unitary group against
/// C(X1) C(X2) / C(I_r) and / C(I_m).
pub fn check_orbital_integral(p: &OrbitalParams, n: usize, seed: u64) -> CheckReport {
    wrap("orbital", p, n, seed, |d| {
        if p.x1.dim() != p.x2.dim() {
            return Err(Error::dim("X1 and X2 must both be m x m"));
        }
        splitting_check("orbital", &p.x1, &p.x2, &p.kappa, n, seed, d)
    })
}

/// Average of C_kappa(X1 H1 X2 H1*) over uniform n x m frames H1 against the
/// rank-r, full-m and full-n denominators.
pub fn check_stiefel_splitting(p: &StiefelParams, n: usize, seed: u64) -> CheckReport {
    wrap("stiefel", p, n, seed, |d| {
        splitting_check("stiefel", &p.x1, &p.x2, &p.kappa, n, seed, d)
    })
}

/// Singular-value volume factor against the volume of the induced real-linear map.
pub fn check_jacobian_linear(p: &JacobianParams, seed: u64) -> CheckReport {
    wrap("jacobian", p, 0, seed, |d| {
        let oracle = gram_volume_factor(&p.a, p.m)?;
        let formula = linear_volume_factor(&p.a, p.m)?;
        let radius = 1e-10 * oracle.abs();
        let point = point_report(
            format!("A {}x{}, m = {}", p.a.rows(), p.a.cols(), p.m),
            re(oracle),
            0.0,
            radius,
            &[("singular-value product".into(), re(formula))],
        );
        Ok(finish(
            "jacobian",
            d,
            vec![point],
            0,
            seed,
            vec!["exact oracle".into()],
        ))
    })
}

/// Importance-sampled int etr(-X Z) |X|^(a-(m+1)/2) C_kappa(X U) dX (beta = 1) against
/// the closed form with radial moment exponents a m + k - 1 and a m - k - 1.
pub fn check_laplace_integral(p: &LaplaceParams, n: usize, seed: u64) -> CheckReport {
    wrap("laplace", p, n, seed, |d| {
        min_samples(n)?;
        let b1 = AlgebraKind::REAL;
        if p.u.beta() != b1 || p.z.beta() != b1 {
            return Err(Error::invalid("the Laplace check is defined for beta = 1"));
        }
        let m = p.z.dim();
        if p.u.dim() != m {
            return Err(Error::dim("U and Z must have the same size"));
        }
        let mf = m as f64;
        if p.a <= (mf - 1.0) / 2.0 {
            return Err(Error::domain(format!(
                "a must exceed (m-1)/2 = {}",
                (mf - 1.0) / 2.0
            )));
        }
        let k = p.kappa.weight() as f64;
        let ln_det_z = log_det_pd(&p.z, "Z")?;
        let scale = mv_gamma(m, p.a, b1)? * (-p.a * ln_det_z).exp();
        let prop = real_entries(&inverse_pd(&p.z)?).scale(0.5);
        let chol = prop
            .cholesky()
            .ok_or_else(|| Error::domain("Z must be positive definite"))?
            .l();
        let uh = real_entries(&sqrt_psd(&p.u)?);
        let kappa = &p.kappa;
        let est = mc_run(n, seed, 1, |rng, out| {
            let x = wishart_draw(2.0 * p.a, &chol, rng);
            let y: DMatrix<f64> = &uh * x * &uh;
            let e: Vec<f64> = SymmetricEigen::new(y).eigenvalues.iter().copied().collect();
            out[0] = re(jack_c(kappa, &e, b1));
        });
        let (mean, se) = (est.mean[0] * scale, est.se[0] * scale);
        let cuz = jack_c(kappa, &product_spectrum(&p.u, &inverse_pd(&p.z)?)?, b1);
        let base = gen_pochhammer(p.a, kappa, b1) * scale * cuz;
        let am = p.a * mf;
        let mut cands = vec![("moment exponent am+k-1".to_string(), re(base))];
        let mut notes =
            vec!["Wishart(2a, (2Z)^-1) proposal: importance weights are constant".into()];
        if am - k > 0.0 {
            let g = statrs::function::gamma::gamma;
            cands.push((
                "moment exponent am-k-1".into(),
                re(base * g(am - k) / g(am + k)),
            ));
        } else {
            notes.push("candidate moment exponent am-k-1 skipped: Gamma(am - k) undefined".into());
        }
        let point = point_report(
            format!("kappa = {kappa}"),
            mean,
            se,
            mc_radius(mean, se),
            &cands,
        );
        Ok(finish("laplace", d, vec![point], est.samples, seed, notes))
    })
}

fn draw_w(sampler: &EllipticalSampler, a: &CMatrix, rng: &mut crate::rng::StreamRng) -> CMatrix {
    let y = sampler.draw_embedded(rng);
    y.adjoint() * a * y
}

fn trace_product(w: &CMatrix, s: &CMatrix) -> f64 {
    crate::elliptical::embedded_trace_product(w, s, false)
}

fn is_identity(h: &HermitianMatrix) -> bool {
    h.as_matrix()
        .sub(&DAMatrix::identity(h.beta(), h.dim()))
        .map(|d| d.max_abs() <= 1e-14)
        .unwrap_or(false)
}

/// Common multiple c when every nonzero eigenvalue of A equals c.
fn projection_scale(sp: &QuadFormSpectra) -> Option<f64> {
    let c = sp.a_eigenvalues[0];
    sp.a_eigenvalues
        .iter()
        .all(|v| (v - c).abs() <= 1e-12 * c)
        .then_some(c)
}

/// Empirical E etr(i W S) with W = X* A X against the series under each convention
/// and the closed normal forms.
pub fn check_cf_empirical(p: &CfParams, n: usize, seed: u64, ctrl: &SeriesControl) -> CheckReport {
    wrap("cf_empirical", p, n, seed, |d| {
        min_samples(n)?;
        let model = QuadFormModel::from_file(p.model.clone(), SplittingConvention::RankR)?;
        let beta = model.beta();
        if !matches!(beta.beta(), 1 | 2) {
            return Err(Error::UnsupportedAlgebra {
                beta: beta.beta(),
                operation: "empirical characteristic-function checks",
            });
        }
        let sampler = EllipticalSampler::new(&model.elliptical_model()?)?;
        let a = model.a().to_complex()?;
        let ss: Vec<CMatrix> = p
            .s_points
            .iter()
            .map(|s| s.to_complex())
            .collect::<Result<_>>()?;
        let zs: Vec<Vec<f64>> = p
            .s_points
            .iter()
            .map(|s| model.sigma_s_spectrum(s))
            .collect::<Result<_>>()?;
        let dim = ss.len();
        let est = if p.antithetic {
            mc_run(n / 2, seed, dim, |rng, out| {
                let (y1, y2) = sampler.draw_antithetic_pair(rng);
                let w1 = y1.adjoint() * &a * y1;
                let w2 = y2.adjoint() * &a * y2;
                for (o, s) in out.iter_mut().zip(&ss) {
                    let e1 = Complex64::new(0.0, trace_product(&w1, s)).exp();
                    let e2 = Complex64::new(0.0, trace_product(&w2, s)).exp();
                    *o = (e1 + e2) / 2.0;
                }
            })
        } else {
            mc_run(n, seed, dim, |rng, out| {
                let w = draw_w(&sampler, &a, rng);
                for (o, s) in out.iter_mut().zip(&ss) {
                    *o = Complex64::new(0.0, trace_product(&w, s)).exp();
                }
            })
        };
        let b = beta.beta_f64();
        let (r, nn) = (model.rank() as f64, model.n() as f64);
        let mut notes = Vec::new();
        if p.antithetic {
            notes.push("antithetic radial pairs; standard errors use pair averages".into());
        }
        let mut points = Vec::with_capacity(dim);
        for (i, z) in zs.iter().enumerate() {
            let mut cands = Vec::new();
            for conv in SplittingConvention::ALL {
                let sp = model.clone().with_convention(conv);
                match sp.spectra().cf(z, ctrl) {
                    Ok(v) => cands.push((format!("series {}", conv.label()), v.value)),
                    Err(e) => notes.push(format!(
                        "point {i}: series {} unavailable: {e}",
                        conv.label()
                    )),
                }
            }
            if beta.beta() != 1 {
                let zr: Vec<f64> = z.iter().map(|v| v / (b * b)).collect();
                let sp = model.clone().with_convention(SplittingConvention::FullN);
                match sp.spectra().cf(&zr, ctrl) {
                    Ok(v) => cands.push(("series full-n, argument 2i/beta".into(), v.value)),
                    Err(e) => notes.push(format!("point {i}: rescaled series unavailable: {e}")),
                }
            }
            if model.family() == GeneratorFamily::Normal {
                cands.push((
                    "closed exponent r".into(),
                    cf_normal_closed_spectral(z, b * r, 2.0 * b),
                ));
                cands.push((
                    "closed exponent n".into(),
                    cf_normal_closed_spectral(z, b * nn, 2.0 * b),
                ));
                if beta.beta() != 1 {
                    cands.push((
                        "closed exponent r, argument 2i/beta".into(),
                        cf_normal_closed_spectral(z, b * r, 2.0 / b),
                    ));
                }
            }
            let (mean, se) = (est.mean[i], est.se[i]);
            points.push(point_report(
                format!("S[{i}]"),
                mean,
                se,
                mc_radius(mean, se),
                &cands,
            ));
        }
        let samples = if p.antithetic {
            2 * est.samples
        } else {
            est.samples
        };
        Ok(finish("cf_empirical", d, points, samples, seed, notes))
    })
}

/// The model with n replaced by r (Theta = I): A -> Lambda on F^r, Pearson s reduced by
/// the dropped dimensions.
fn reduced_spectra(sp: &QuadFormSpectra) -> Result<QuadFormSpectra> {
    let r = sp.rank();
    let family = match sp.bound_family()? {
        BoundFamily::Normal => GeneratorFamily::Normal,
        BoundFamily::PearsonVII { s, g } => GeneratorFamily::PearsonVII {
            s: s - sp.beta.beta_f64() * ((sp.n - r) * sp.m) as f64 / 2.0,
            g,
        },
    };
    Ok(QuadFormSpectra {
        n: r,
        family,
        theta_inv_a_pinv: sp.a_eigenvalues.iter().map(|v| 1.0 / v).collect(),
        theta_a: sp.a_eigenvalues.clone(),
        ln_det_theta: 0.0,
        convention: SplittingConvention::RankR,
        sign: PearsonSign::Analytic,
        ..sp.clone()
    })
}

enum DensitySource {
    Exact(Vec<f64>),
    Mc(Vec<Complex64>, Vec<f64>, usize),
}

/// Sampled density of W at PD points against the series under each convention and sign.
pub fn check_density_empirical(
    p: &DensityParams,
    n: usize,
    seed: u64,
    ctrl: &SeriesControl,
) -> CheckReport {
    wrap("density_empirical", p, n, seed, |d| {
        let model = QuadFormModel::from_file(p.model.clone(), SplittingConvention::RankR)?;
        let beta = model.beta();
        let (m, r, nn) = (model.m(), model.rank(), model.n());
        if r < m {
            return Err(Error::RankDeficientW { rank: r, m });
        }
        if m > 2 {
            return Err(Error::dim("density checks support m <= 2"));
        }
        if !(beta.beta() == 1 || (m == 1 && beta.beta() == 2)) {
            return Err(Error::UnsupportedAlgebra {
                beta: beta.beta(),
                operation: "empirical density checks (beta = 1, or beta = 2 with m = 1)",
            });
        }
        for w in &p.w_points {
            if w.dim() != m || w.beta() != beta {
                return Err(Error::dim(format!(
                    "W points must be {m}x{m} over beta = {beta}"
                )));
            }
        }
        let sp = model.spectra();
        let fam = sp.bound_family()?;
        let theta_id = is_identity(model.theta());
        let scale = projection_scale(sp);
        let mut notes = Vec::new();
        let source = match (beta.beta(), theta_id, scale) {
            (1, true, Some(c)) => {
                let v = model.sigma().scale(c);
                let vals = p
                    .w_points
                    .iter()
                    .map(|w| {
                        Ok(match fam {
                            BoundFamily::Normal => ln_wishart_density(w, &v, r as f64)?.exp(),
                            BoundFamily::PearsonVII { s, g } => {
                                ln_pearson_wishart_density(w, model.sigma(), c, r, nn, s, g)?.exp()
                            }
                        })
                    })
                    .collect::<Result<Vec<f64>>>()?;
                notes.push(match fam {
                    BoundFamily::Normal => format!("exact oracle: Wishart_{m}({r}, {c} Sigma)"),
                    BoundFamily::PearsonVII { .. } => {
                        format!("exact oracle: Gamma mixture of Wishart_{m}({r}, . Sigma)")
                    }
                });
                DensitySource::Exact(vals)
            }
            _ if m == 1 => {
                min_samples(n)?;
                notes.push("conditional Monte Carlo over the direction of X".into());
                let (mean, se, k) = conditional_density_m1(&model, &p.w_points, n, seed)?;
                DensitySource::Mc(mean, se, k)
            }
            _ => {
                min_samples(n)?;
                notes.push(format!(
                    "box-kernel estimate with relative half-width {}; carries O(width^2) bias",
                    p.bandwidth
                ));
                let (mean, se, k) = box_density(&model, &p.w_points, p.bandwidth, n, seed)?;
                DensitySource::Mc(mean, se, k)
            }
        };
        let mut signs = vec![(PearsonSign::Analytic, "")];
        if matches!(fam, BoundFamily::PearsonVII { .. }) {
            signs.push((PearsonSign::Unsigned, " unsigned"));
        }
        let reduced = if theta_id && r < nn {
            Some(reduced_spectra(sp)?)
        } else {
            None
        };
        let mut points = Vec::new();
        for (i, w) in p.w_points.iter().enumerate() {
            let y = model.sigma_inv_w_spectrum(w)?;
            let mut cands = Vec::new();
            for conv in SplittingConvention::ALL {
                for (sign, suffix) in &signs {
                    let md = model.clone().with_convention(conv).with_sign(*sign);
                    let label = format!("series {}{suffix}", conv.label());
                    match md.spectra().density(&y, ctrl) {
                        Ok(v) => cands.push((label, re(v.value))),
                        Err(e) => notes.push(format!("point {i}: {label} unavailable: {e}")),
                    }
                }
            }
            if let Some(red) = &reduced {
                match red.density(&y, ctrl) {
                    Ok(v) => cands.push(("series reduced n->r".into(), re(v.value))),
                    Err(e) => notes.push(format!("point {i}: reduced series unavailable: {e}")),
                }
            }
            let label = format!("W[{i}]");
            points.push(match &source {
                DensitySource::Exact(vals) => {
                    let v = re(vals[i]);
                    point_report(label, v, 0.0, 1e-9 * vals[i].abs(), &cands)
                }
                DensitySource::Mc(mean, se, _) => {
                    point_report(label, mean[i], se[i], mc_radius(mean[i], se[i]), &cands)
                }
            });
        }
        let samples = match source {
            DensitySource::Exact(_) => 0,
            DensitySource::Mc(.., k) => k,
        };
        Ok(finish("density_empirical", d, points, samples, seed, notes))
    })
}

/// E over the direction u of the density of W = sigma2 (rho / beta) u* B u given u.
fn conditional_density_m1(
    model: &QuadFormModel,
    points: &[HermitianMatrix],
    n: usize,
    seed: u64,
) -> Result<(Vec<Complex64>, Vec<f64>, usize)> {
    let beta = model.beta();
    let b = beta.beta_f64();
    let sigma2 = model.sigma().as_matrix().entry(0, 0)[0];
    let th = sqrt_psd(model.theta())?;
    let bmat = model.a().congruence(th.as_matrix())?.to_complex()?;
    let nn = model.n();
    let nd = b * nn as f64;
    let fam = model.spectra().bound_family()?;
    let ws: Vec<f64> = points
        .iter()
        .map(|w| w.as_matrix().entry(0, 0)[0])
        .collect();
    let ln_rho = move |x: f64| match fam {
        BoundFamily::Normal => ln_chi_square(x, nd),
        BoundFamily::PearsonVII { s, g } => ln_beta_prime(x / g, nd / 2.0, s - nd / 2.0) - g.ln(),
    };
    let est = mc_run(n, seed, ws.len(), |rng, out| {
        let u = CMatrix::from_fn(nn, 1, |_, _| {
            let re_part: f64 = rng.sample(StandardNormal);
            let im_part: f64 = if b > 1.0 {
                rng.sample(StandardNormal)
            } else {
                0.0
            };
            Complex64::new(re_part, im_part)
        });
        let u = u.unscale(u.norm());
        let q = (u.adjoint() * &bmat * &u)[(0, 0)].re;
        for (o, &w) in out.iter_mut().zip(&ws) {
            *o = if q > 0.0 {
                let x = b * w / (sigma2 * q);
                re((ln_rho(x) + (b / (sigma2 * q)).ln()).exp())
            } else {
                re(0.0)
            };
        }
    });
    Ok((est.mean, est.se, est.samples))
}

/// Fraction of sampled W inside a box around each point, divided by the box volume (m = 2, beta = 1).
fn box_density(
    model: &QuadFormModel,
    points: &[HermitianMatrix],
    bw: f64,
    n: usize,
    seed: u64,
) -> Result<(Vec<Complex64>, Vec<f64>, usize)> {
    if !(bw > 0.0) {
        return Err(Error::invalid("bandwidth must be positive"));
    }
    let sampler = EllipticalSampler::new(&model.elliptical_model()?)?;
    let a = model.a().to_complex()?;
    let m = model.m();
    let coords: Vec<(usize, usize)> = (0..m).flat_map(|i| (i..m).map(move |j| (i, j))).collect();
    let boxes: Vec<(DMatrix<f64>, Vec<f64>, f64)> = points
        .iter()
        .map(|w| {
            let w = real_entries(w);
            let h: Vec<f64> = coords
                .iter()
                .map(|&(i, j)| bw * (w[(i, i)] * w[(j, j)]).sqrt())
                .collect();
            let vol = h.iter().map(|x| 2.0 * x).product();
            (w, h, vol)
        })
        .collect();
    let est = mc_run(n, seed, boxes.len(), |rng, out| {
        let w = draw_w(&sampler, &a, rng);
        for (o, (c, h, vol)) in out.iter_mut().zip(&boxes) {
            let inside = coords
                .iter()
                .zip(h)
                .all(|(&(i, j), hh)| (w[(i, j)].re - c[(i, j)]).abs() <= *hh);
            *o = re(if inside { 1.0 / vol } else { 0.0 });
        }
    });
    Ok((est.mean, est.se, est.samples))
}
