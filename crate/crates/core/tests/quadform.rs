use std::f64::consts::PI;

use ellipquad::elliptical::GeneratorFamily;
use ellipquad::matalg::{DAMatrix, HermitianMatrix};
use ellipquad::quadform::*;
use ellipquad::rng::stream_rng;
use ellipquad::{AlgebraKind, Error, SeriesControl};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::Rng;
use rand_distr::StandardNormal;
use statrs::function::gamma::{gamma, ln_gamma};

const B1: AlgebraKind = AlgebraKind::REAL;
const B2: AlgebraKind = AlgebraKind::COMPLEX;
const B4: AlgebraKind = AlgebraKind::QUATERNION;
const NORMAL: GeneratorFamily = GeneratorFamily::Normal;

fn ctrl() -> SeriesControl {
    SeriesControl::new(60, 1e-12, 1e-15).unwrap()
}

fn diag(beta: AlgebraKind, d: &[f64]) -> HermitianMatrix {
    HermitianMatrix::diag(beta, d)
}

fn random_pd(beta: AlgebraKind, n: usize, seed: u64, spread: f64) -> HermitianMatrix {
    let mut rng = stream_rng(seed, 7);
    let b = DAMatrix::from_fn(beta, n, n, |_, _, _| {
        spread * rng.sample::<f64, _>(StandardNormal)
    });
    let g = HermitianMatrix::identity(beta, n).congruence(&b).unwrap();
    HermitianMatrix::new(g.as_matrix().add(&DAMatrix::identity(beta, n)).unwrap()).unwrap()
}

fn random_hermitian(beta: AlgebraKind, n: usize, seed: u64, scale: f64) -> HermitianMatrix {
    let mut rng = stream_rng(seed, 11);
    let b = DAMatrix::from_fn(beta, n, n, |_, _, _| rng.sample::<f64, _>(StandardNormal));
    let h = b.add(&b.conj_transpose()).unwrap().scale(0.5 * scale);
    HermitianMatrix::new(h).unwrap()
}

fn model(
    a: &[f64],
    theta: HermitianMatrix,
    sigma: HermitianMatrix,
    family: GeneratorFamily,
    conv: SplittingConvention,
) -> QuadFormModel {
    let beta = sigma.beta();
    QuadFormModel::new(diag(beta, a), theta, sigma, family, conv).unwrap()
}

fn scalar(beta: AlgebraKind, x: f64) -> HermitianMatrix {
    diag(beta, &[x])
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn crel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

/// Density of sigma2 * Gamma(shape, rate 1) scale family.
fn gamma_density(w: f64, shape: f64, scale: f64) -> f64 {
    ((shape - 1.0) * w.ln() - w / scale - ln_gamma(shape) - shape * scale.ln()).exp()
}

/// Real Wishart_m(n, Sigma) density at W.
fn wishart_density(w: &DMatrix<f64>, sigma: &DMatrix<f64>, n: f64) -> f64 {
    let m = w.nrows() as f64;
    let sinv = sigma.clone().try_inverse().unwrap();
    let tr = (&sinv * w).trace();
    let ln_gm: f64 = (m * (m - 1.0) / 4.0) * PI.ln()
        + (0..w.nrows())
            .map(|j| ln_gamma(n / 2.0 - j as f64 / 2.0))
            .sum::<f64>();
    let ln = (n - m - 1.0) / 2.0 * w.determinant().ln()
        - tr / 2.0
        - n * m / 2.0 * 2f64.ln()
        - n / 2.0 * sigma.determinant().ln()
        - ln_gm;
    ln.exp()
}

fn to_real(h: &HermitianMatrix) -> DMatrix<f64> {
    let a = h.as_matrix();
    DMatrix::from_fn(h.dim(), h.dim(), |i, j| a.entry(i, j)[0])
}

/// Complex determinant |I - i c Sigma S|^(-df/2), via nalgebra on the embedded product.
fn det_cf(s: &HermitianMatrix, sigma: &HermitianMatrix, df: f64, c: f64) -> Complex64 {
    let s = s.to_complex().unwrap();
    let sg = sigma.to_complex().unwrap();
    let n = s.nrows();
    let mat = DMatrix::<Complex64>::identity(n, n) - (sg * s) * Complex64::new(0.0, c);
    let embed = if sigma.beta() == B4 { 2.0 } else { 1.0 };
    let lu = mat.lu();
    let det = lu.determinant();
    (det.ln() * (-df / (2.0 * embed))).exp()
}

#[test]
fn scalar_normal_density_is_scaled_chi_square() {
    for sigma2 in [0.5, 1.0, 2.3] {
        let md = model(
            &[1.0],
            scalar(B1, 1.0),
            scalar(B1, sigma2),
            NORMAL,
            SplittingConvention::RankR,
        );
        for w in [0.05, 0.4, 1.0, 2.5] {
            let d = density_w(&scalar(B1, w), &md, &ctrl()).unwrap();
            let expect = w.powf(-0.5) * (-w / (2.0 * sigma2)).exp() / ((2.0 * PI * sigma2).sqrt());
            assert!(
                rel(d.value, expect) < 1e-10,
                "w={w}: {} vs {expect}",
                d.value
            );
            assert!(d.converged);
        }
    }
}

#[test]
fn m1_density_matches_gamma_for_each_algebra() {
    // beta = 1: chi-square(n) scaled by sigma2; beta = 2: Gamma(n, sigma2); beta = 4: Gamma(2n, sigma2/2)
    for (beta, n) in [(B1, 3usize), (B2, 2), (B4, 2)] {
        let b = beta.beta_f64();
        let sigma2 = 0.8;
        let md = model(
            &vec![1.0; n],
            HermitianMatrix::identity(beta, n),
            scalar(beta, sigma2),
            NORMAL,
            SplittingConvention::RankR,
        );
        for w in [0.2, 1.0, 2.0] {
            let d = density_w(&scalar(beta, w), &md, &ctrl()).unwrap();
            let expect = gamma_density(w, b * n as f64 / 2.0, 2.0 * sigma2 / b);
            assert!(
                rel(d.value, expect) < 1e-9,
                "beta={beta} w={w}: {} vs {expect}",
                d.value
            );
        }
    }
}

#[test]
fn m1_cf_matches_chi_square() {
    for n in 1..=4 {
        for sigma2 in [0.3, 1.0] {
            let md = model(
                &vec![1.0; n],
                HermitianMatrix::identity(B1, n),
                scalar(B1, sigma2),
                NORMAL,
                SplittingConvention::RankR,
            );
            for s in [-0.2, 0.05, 0.15] {
                let v = cf_w(&scalar(B1, s), &md, &ctrl()).unwrap().value;
                let expect = (Complex64::new(1.0, -2.0 * sigma2 * s)).powf(-(n as f64) / 2.0);
                assert!(crel(v, expect) < 1e-9, "n={n} s={s}: {v} vs {expect}");
            }
        }
    }
}

#[test]
fn wishart_density_matches_classical_formula() {
    let sigma = HermitianMatrix::from_real(B1, 2, &[1.2, 0.3, 0.3, 0.8]).unwrap();
    for n in [2usize, 3] {
        let md = model(
            &vec![1.0; n],
            HermitianMatrix::identity(B1, n),
            sigma.clone(),
            NORMAL,
            SplittingConvention::RankR,
        );
        for (i, w) in [
            [0.5, 0.1, 0.1, 0.4],
            [1.0, -0.2, -0.2, 0.7],
            [0.3, 0.0, 0.0, 1.1],
        ]
        .iter()
        .enumerate()
        {
            let w = HermitianMatrix::from_real(B1, 2, w).unwrap();
            let d = density_w(&w, &md, &ctrl()).unwrap();
            let expect = wishart_density(&to_real(&w), &to_real(&sigma), n as f64);
            assert!(
                rel(d.value, expect) < 1e-9,
                "n={n} point {i}: {} vs {expect}",
                d.value
            );
        }
    }
}

#[test]
fn general_theta_and_a_match_wishart_after_whitening() {
    // A Theta-whitened idempotent-like setup: Theta = c I and A = I / c gives Wishart(n, Sigma)
    let c = 1.7;
    let n = 3;
    let sigma = HermitianMatrix::from_real(B1, 2, &[1.0, 0.2, 0.2, 0.6]).unwrap();
    let md = model(
        &vec![1.0 / c; n],
        diag(B1, &vec![c; n]),
        sigma.clone(),
        NORMAL,
        SplittingConvention::RankR,
    );
    let w = HermitianMatrix::from_real(B1, 2, &[0.7, 0.1, 0.1, 0.5]).unwrap();
    let d = density_w(&w, &md, &ctrl()).unwrap();
    let expect = wishart_density(&to_real(&w), &to_real(&sigma), n as f64);
    assert!(rel(d.value, expect) < 1e-9, "{} vs {expect}", d.value);
}

#[test]
fn rank_deficient_w_is_rejected() {
    let md = model(
        &[1.0, 0.0, 0.0],
        HermitianMatrix::identity(B1, 3),
        HermitianMatrix::identity(B1, 2),
        NORMAL,
        SplittingConvention::RankR,
    );
    assert_eq!(md.rank(), 1);
    let w = HermitianMatrix::identity(B1, 2);
    assert!(matches!(
        density_w(&w, &md, &ctrl()),
        Err(Error::RankDeficientW { rank: 1, m: 2 })
    ));
}

#[test]
fn density_requires_positive_definite_w() {
    let md = model(
        &[1.0, 1.0],
        HermitianMatrix::identity(B1, 2),
        HermitianMatrix::identity(B1, 2),
        NORMAL,
        SplittingConvention::RankR,
    );
    let w = diag(B1, &[1.0, -0.5]);
    assert!(matches!(density_w(&w, &md, &ctrl()), Err(Error::Domain(_))));
}

#[test]
fn cf_at_zero_is_one() {
    let fams = [
        NORMAL,
        GeneratorFamily::StudentT { g: 3.0 },
        GeneratorFamily::Cauchy,
        GeneratorFamily::PearsonVII { s: 30.0, g: 2.0 },
    ];
    for beta in [B1, B2, B4] {
        for fam in fams {
            for conv in SplittingConvention::ALL {
                let md = model(
                    &[2.0, 0.5, 0.0],
                    random_pd(beta, 3, 1, 0.3),
                    random_pd(beta, 2, 2, 0.3),
                    fam,
                    conv,
                );
                let zero = HermitianMatrix::new(DAMatrix::zeros(beta, 2, 2)).unwrap();
                for path in [SeriesPath::Fast, SeriesPath::Generic] {
                    let r = cf_w_with(&zero, &md, &ctrl(), path).unwrap();
                    assert_eq!(r.value, Complex64::new(1.0, 0.0));
                    assert_eq!(r.degree_used, 0);
                }
            }
        }
    }
}

#[test]
fn octonion_spectra_are_accepted() {
    let spectra = QuadFormSpectra {
        beta: AlgebraKind::OCTONION,
        m: 1,
        n: 2,
        family: NORMAL,
        a_eigenvalues: vec![1.0, 1.0],
        theta_inv_a_pinv: vec![1.0, 1.0],
        theta_a: vec![1.0, 1.0],
        ln_det_theta: 0.0,
        ln_det_sigma: 0.0,
        convention: SplittingConvention::RankR,
        sign: PearsonSign::Analytic,
    };
    let r = spectra.cf(&[0.0], &ctrl()).unwrap();
    assert_eq!(r.value, Complex64::new(1.0, 0.0));
    // W is Gamma(4n, 1/4) for octonion components of variance 1/8
    let d = spectra.density(&[0.9], &ctrl()).unwrap();
    assert!(rel(d.value, gamma_density(0.9, 8.0, 0.25)) < 1e-9);
    let bad = QuadFormSpectra {
        theta_a: vec![1.0],
        ..spectra
    };
    assert!(bad.cf(&[0.1], &ctrl()).is_err());
}

#[test]
fn cf_sign_flip_conjugates() {
    for beta in [B1, B2] {
        let md = model(
            &[1.5, 0.7, 0.3],
            random_pd(beta, 3, 3, 0.4),
            random_pd(beta, 2, 4, 0.4),
            NORMAL,
            SplittingConvention::RankR,
        );
        let s = random_hermitian(beta, 2, 5, 0.005);
        let a = cf_w(&s, &md, &ctrl()).unwrap().value;
        let b = cf_w(&s.scale(-1.0), &md, &ctrl()).unwrap().value;
        assert!((a - b.conj()).norm() < 1e-13);
    }
}

#[test]
fn fast_and_generic_paths_agree_termwise() {
    let c = ctrl();
    for beta in [B1, B2, B4] {
        for fam in [NORMAL, GeneratorFamily::PearsonVII { s: 30.0, g: 2.0 }] {
            let md = model(
                &[1.5, 0.7, 0.3],
                random_pd(beta, 3, 6, 0.4),
                random_pd(beta, 2, 8, 0.4),
                fam,
                SplittingConvention::FullM,
            );
            let sp = md.spectra();
            let y = [0.04, 0.015];
            let z = [0.02, -0.01];
            for k in 0..6 {
                let f = sp.density_layer(&y, k, SeriesPath::Fast).unwrap();
                let g = sp.density_layer(&y, k, SeriesPath::Generic).unwrap();
                assert!(
                    (f - g).abs() <= 1e-12 * f.abs().max(1e-300),
                    "beta={beta} k={k}: {f} vs {g}"
                );
                let f = sp.cf_layer(&z, k, SeriesPath::Fast).unwrap();
                let g = sp.cf_layer(&z, k, SeriesPath::Generic).unwrap();
                assert!(
                    (f - g).norm() <= 1e-12 * f.norm().max(1e-300),
                    "beta={beta} k={k}: {f} vs {g}"
                );
            }
            let full_f = sp
                .density_with(&y, &c, SeriesPath::Fast, false)
                .unwrap()
                .value;
            let full_g = sp
                .density_with(&y, &c, SeriesPath::Generic, false)
                .unwrap()
                .value;
            assert!(rel(full_f, full_g) < 1e-12);
        }
    }
}

#[test]
fn pearson_generic_cf_stops_at_moment_limit() {
    // s - beta m n / 2 = 2: radial moments of order c0 + 2 diverge
    let md = model(
        &[1.0],
        scalar(B1, 1.0),
        scalar(B1, 1.0),
        GeneratorFamily::PearsonVII { s: 2.5, g: 1.0 },
        SplittingConvention::RankR,
    );
    let s = scalar(B1, 0.1);
    assert!(matches!(
        cf_w_with(&s, &md, &ctrl(), SeriesPath::Generic),
        Err(Error::Domain(_))
    ));
    assert!(matches!(
        cf_w_with(&s, &md, &ctrl(), SeriesPath::Fast),
        Err(Error::Pole { degree: 2, .. })
    ));
}

#[test]
fn conventions_agree_at_full_rank() {
    let sigma = random_pd(B1, 2, 9, 0.3);
    let theta = random_pd(B1, 2, 10, 0.3);
    let a = model(
        &[1.3, 0.6],
        theta.clone(),
        sigma.clone(),
        NORMAL,
        SplittingConvention::RankR,
    );
    let b = model(
        &[1.3, 0.6],
        theta,
        sigma,
        NORMAL,
        SplittingConvention::FullM,
    );
    let w = diag(B1, &[0.5, 0.8]);
    let s = diag(B1, &[0.05, -0.02]);
    for k in 0..8 {
        let y = a.sigma_inv_w_spectrum(&w).unwrap();
        assert_eq!(
            a.spectra().density_layer(&y, k, SeriesPath::Fast).unwrap(),
            b.spectra().density_layer(&y, k, SeriesPath::Fast).unwrap()
        );
        let z = a.sigma_s_spectrum(&s).unwrap();
        assert_eq!(
            a.spectra().cf_layer(&z, k, SeriesPath::Fast).unwrap(),
            b.spectra().cf_layer(&z, k, SeriesPath::Fast).unwrap()
        );
    }
}

#[test]
fn idempotent_cf_exponents_by_convention() {
    // A = diag(1,1,0,0), Theta = I, m = 2, n = 4
    let sigma = HermitianMatrix::from_real(B1, 2, &[1.0, 0.3, 0.3, 0.7]).unwrap();
    let s = HermitianMatrix::from_real(B1, 2, &[0.08, -0.03, -0.03, 0.05]).unwrap();
    let a = [1.0, 1.0, 0.0, 0.0];
    let truth = det_cf(&s, &sigma, 2.0, 2.0);
    let printed = det_cf(&s, &sigma, 4.0, 2.0);
    let value = |conv| {
        let md = model(
            &a,
            HermitianMatrix::identity(B1, 4),
            sigma.clone(),
            NORMAL,
            conv,
        );
        cf_w(&s, &md, &ctrl()).unwrap().value
    };
    assert!(crel(value(SplittingConvention::FullN), truth) < 1e-10);
    assert!(crel(value(SplittingConvention::RankR), printed) < 1e-10);
    assert!(crel(value(SplittingConvention::FullM), printed) < 1e-10);
    assert!(crel(truth, printed) > 1e-3);
}

#[test]
fn complex_cf_argument_scale() {
    // complex normal components of variance 1/2: W = |x|^2 sums are Gamma(n, sigma2), CF (1 - i sigma2 s)^-n
    let n = 2;
    let sigma2 = 0.9;
    let md = model(
        &[1.0; 2],
        HermitianMatrix::identity(B2, n),
        scalar(B2, sigma2),
        NORMAL,
        SplittingConvention::RankR,
    );
    let s = 0.06;
    let truth = Complex64::new(1.0, -sigma2 * s).powf(-(n as f64));
    let series = cf_w(&scalar(B2, s), &md, &ctrl()).unwrap().value;
    let rescaled = cf_w(&scalar(B2, s / 4.0), &md, &ctrl()).unwrap().value;
    assert!(crel(rescaled, truth) < 1e-10);
    assert!(
        crel(
            series,
            Complex64::new(1.0, -4.0 * sigma2 * s).powf(-(n as f64))
        ) < 1e-10
    );
}

#[test]
fn closed_normal_cf_examples() {
    let sigma = scalar(B1, 0.7);
    assert_eq!(
        cf_normal_closed(&scalar(B1, 0.0), &sigma, 3.0).unwrap(),
        Complex64::new(1.0, 0.0)
    );
    let v = cf_normal_closed(&scalar(B2, 0.2), &scalar(B2, 0.7), 3.0).unwrap();
    let expect = Complex64::new(1.0, -2.0 * 2.0 * 0.7 * 0.2).powf(-1.5);
    assert!(crel(v, expect) < 1e-14);
    // against the series inside its convergence region
    let sigma = random_pd(B1, 2, 12, 0.3);
    let s = random_hermitian(B1, 2, 13, 0.05);
    let md = model(
        &[1.0; 3],
        HermitianMatrix::identity(B1, 3),
        sigma.clone(),
        NORMAL,
        SplittingConvention::RankR,
    );
    let series = cf_w(&s, &md, &ctrl()).unwrap().value;
    let closed = cf_normal_closed(&s, &sigma, 3.0).unwrap();
    assert!(crel(series, closed) < 1e-6);
    // quaternion determinant via the embedding
    let sigma = random_pd(B4, 2, 14, 0.3);
    let s = random_hermitian(B4, 2, 15, 0.05);
    let closed = cf_normal_closed(&s, &sigma, 3.0).unwrap();
    assert!(crel(closed, det_cf(&s, &sigma, 3.0, 8.0)) < 1e-12);
}

#[test]
fn cf_modulus_bounded() {
    for beta in [B1, B2] {
        for fam in [NORMAL] {
            let md = model(
                &[1.0, 0.5],
                random_pd(beta, 2, 16, 0.3),
                random_pd(beta, 2, 17, 0.3),
                fam,
                SplittingConvention::RankR,
            );
            for seed in 0..4 {
                let s = random_hermitian(beta, 2, 100 + seed, 0.01);
                let r = cf_w(&s, &md, &ctrl()).unwrap();
                assert!(r.value.norm() <= 1.0 + r.tail_estimate + 1e-12);
            }
        }
    }
}

/// Density of sigma2 ||x||^2 for x in R^n with Pearson VII law, as a Gamma mixture of chi-squares.
fn pearson_m1_density(w: f64, n: usize, s: f64, g: f64, sigma2: f64) -> f64 {
    let nn = n as f64;
    let shape = s - nn / 2.0;
    // given tau ~ Gamma(shape, 1), W is Gamma(n/2, scale g sigma2 / tau)
    let f = |t: f64| {
        if t <= 0.0 {
            return 0.0;
        }
        let tau = t / (1.0 - t);
        let jac = 1.0 / ((1.0 - t) * (1.0 - t));
        gamma_density(tau, shape, 1.0) * gamma_density(w, nn / 2.0, g * sigma2 / tau) * jac
    };
    quadrature::double_exponential::integrate(f, 0.0, 1.0, 1e-12).integral
}

#[test]
fn pearson_density_sign_conventions() {
    let (n, s, g, sigma2) = (2usize, 4.0, 3.0, 1.3);
    let base = model(
        &[1.0; 2],
        HermitianMatrix::identity(B1, n),
        scalar(B1, sigma2),
        GeneratorFamily::PearsonVII { s, g },
        SplittingConvention::RankR,
    );
    let unsigned = base.clone().with_sign(PearsonSign::Unsigned);
    for w in [0.3, 0.9, 1.5] {
        let oracle = pearson_m1_density(w, n, s, g, sigma2);
        let a = density_w(&scalar(B1, w), &base, &ctrl()).unwrap().value;
        assert!(rel(a, oracle) < 1e-8, "w={w}: {a} vs {oracle}");
        let u = density_w(&scalar(B1, w), &unsigned, &ctrl()).unwrap().value;
        assert!(rel(u, oracle) > 0.02);
    }
}

#[test]
fn raw_normalization_values() {
    for beta in [B1, B2, B4] {
        let md = model(
            &[1.0, 1.0],
            HermitianMatrix::identity(beta, 2),
            scalar(beta, 1.0),
            NORMAL,
            SplittingConvention::RankR,
        );
        let raw = md.spectra().cf_raw_normalization().unwrap();
        let c0 = beta.beta_f64() * 2.0 / 2.0;
        let b = beta.beta_f64();
        assert!(rel(raw.calculus, b.powf(c0)) < 1e-12);
        assert!(rel(raw.beta_shifted, 2f64.powf(b - 1.0) * b.powf(c0)) < 1e-12);
    }
    let md = model(
        &[1.0],
        scalar(B1, 1.0),
        scalar(B1, 1.0),
        GeneratorFamily::Cauchy,
        SplittingConvention::RankR,
    );
    let raw = md.spectra().cf_raw_normalization().unwrap();
    // (1/pi) pi^(1/2) theta(1/2) / Gamma(1/2) with theta(1/2) = Gamma(1/2)^2
    assert!(rel(raw.calculus, gamma(0.5) * gamma(0.5) / PI) < 1e-12);
}

#[test]
fn partial_table_rows() {
    let md = model(
        &[1.0, 1.0],
        HermitianMatrix::identity(B1, 2),
        scalar(B1, 1.0),
        NORMAL,
        SplittingConvention::RankR,
    );
    let c = SeriesControl::new(12, 1e-8, 1e-12).unwrap();
    let t = series_partial_table(&md, &c, &EvalPoint::Cf(scalar(B1, 0.05))).unwrap();
    assert_eq!(t.len(), 13);
    assert_eq!((t[0].layer_re, t[0].layer_im), (1.0, 0.0));
    for w in t.windows(2).skip(1) {
        assert!(w[1].layer_norm < w[0].layer_norm);
    }
    let w = 0.8;
    let t = series_partial_table(&md, &c, &EvalPoint::Density(scalar(B1, w))).unwrap();
    assert_eq!(t.len(), 13);
    // degree-0 row is the prefactor: the chi-square(2) density without its exponential
    assert!(rel(t[0].layer_re, 0.5) < 1e-13);
}

#[test]
fn model_validation() {
    let id = HermitianMatrix::identity(B1, 2);
    let indefinite = diag(B1, &[1.0, -1.0]);
    assert!(matches!(
        QuadFormModel::new(
            indefinite,
            id.clone(),
            id.clone(),
            NORMAL,
            SplittingConvention::RankR
        ),
        Err(Error::Indefinite { .. })
    ));
    assert!(QuadFormModel::new(
        id.clone(),
        diag(B1, &[1.0, 0.0]),
        id.clone(),
        NORMAL,
        SplittingConvention::RankR
    )
    .is_err());
    assert!(QuadFormModel::new(
        id.clone(),
        HermitianMatrix::identity(B1, 3),
        id.clone(),
        NORMAL,
        SplittingConvention::RankR
    )
    .is_err());
    assert!(QuadFormModel::new(
        id.clone(),
        id.clone(),
        HermitianMatrix::identity(B2, 2),
        NORMAL,
        SplittingConvention::RankR
    )
    .is_err());
    let md = QuadFormModel::new(
        id.clone(),
        id.clone(),
        id,
        NORMAL,
        SplittingConvention::RankR,
    )
    .unwrap();
    let json = serde_json::to_string(&md).unwrap();
    let back: QuadFormFile = serde_json::from_str(&json).unwrap();
    let md2 = QuadFormModel::from_file(back, SplittingConvention::RankR).unwrap();
    assert_eq!(md.spectra(), md2.spectra());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cf_conjugate_symmetry(seed in 0u64..500, beta_idx in 0usize..3) {
        let beta = [B1, B2, B4][beta_idx];
        let md = model(&[1.2, 0.4], random_pd(beta, 2, seed, 0.3), random_pd(beta, 2, seed + 1, 0.3), NORMAL, SplittingConvention::RankR);
        let s = random_hermitian(beta, 2, seed + 2, 0.004);
        let a = cf_w(&s, &md, &ctrl()).unwrap().value;
        let b = cf_w(&s.scale(-1.0), &md, &ctrl()).unwrap().value;
        prop_assert!((a - b.conj()).norm() < 1e-12);
        prop_assert!(a.norm() <= 1.0 + 1e-10);
    }

    #[test]
    fn normal_cf_series_matches_determinant_full_n(seed in 0u64..500, r in 1usize..4) {
        // Theta = I with A a rank-r projection: CF is |I - 2i beta Sigma S|^(-beta r / 2) in series scaling
        let n = 3;
        let mut a = vec![0.0; n];
        for v in a.iter_mut().take(r) { *v = 1.0; }
        let sigma = random_pd(B1, 2, seed, 0.3);
        let s = random_hermitian(B1, 2, seed + 3, 0.03);
        let md = model(&a, HermitianMatrix::identity(B1, n), sigma.clone(), NORMAL, SplittingConvention::FullN);
        let v = cf_w(&s, &md, &ctrl()).unwrap().value;
        prop_assert!(crel(v, det_cf(&s, &sigma, r as f64, 2.0)) < 1e-9);
    }
}
