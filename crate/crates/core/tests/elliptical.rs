use std::f64::consts::PI;

use ellipquad::elliptical::*;
use ellipquad::matalg::{DAMatrix, HermitianMatrix};
use ellipquad::AlgebraKind;
use statrs::distribution::{ContinuousCDF, StudentsT};
use statrs::function::gamma::gamma;

const B1: AlgebraKind = AlgebraKind::REAL;
const B2: AlgebraKind = AlgebraKind::COMPLEX;

fn scalar_model(beta: AlgebraKind, family: GeneratorFamily) -> EllipticalModel {
    EllipticalModel::centered(
        HermitianMatrix::identity(beta, 1),
        HermitianMatrix::identity(beta, 1),
        family,
    )
    .unwrap()
}

fn scalar(beta: AlgebraKind, x: f64) -> DAMatrix {
    DAMatrix::from_real(beta, 1, 1, &[x]).unwrap()
}

#[test]
fn generator_derivatives() {
    let d = Dims::new(B1, 1, 1);
    assert_eq!(h_deriv0(&GeneratorFamily::Normal, 0, d).unwrap(), 1.0);
    assert_eq!(h_deriv0(&GeneratorFamily::Normal, 3, d).unwrap(), -0.125);
    let p = GeneratorFamily::PearsonVII { s: 3.0, g: 2.0 };
    assert_eq!(h_deriv0(&p, 1, d).unwrap(), -1.5);
    // central finite differences of h at 0 (one-sided grid extended through the analytic formula)
    let h = |u: f64| (1.0 + u / 2.0).powf(-3.0);
    let e = 1e-5;
    let fd1 = (h(e) - h(-e)) / (2.0 * e);
    let fd2 = (h(e) - 2.0 * h(0.0) + h(-e)) / (e * e);
    assert!((fd1 - h_deriv0(&p, 1, d).unwrap()).abs() < 1e-8);
    assert!((fd2 - h_deriv0(&p, 2, d).unwrap()).abs() < 1e-4);
    assert!(h_value(&p, -1.0, d).is_err());
}

#[test]
fn binding_checks() {
    let d = Dims::new(B2, 2, 3);
    assert!(GeneratorFamily::PearsonVII { s: 6.0, g: 1.0 }
        .bind(d)
        .is_err());
    assert!(GeneratorFamily::PearsonVII { s: 6.5, g: 0.0 }
        .bind(d)
        .is_err());
    assert_eq!(
        GeneratorFamily::StudentT { g: 3.0 }.bind(d).unwrap(),
        BoundFamily::PearsonVII { s: 7.5, g: 3.0 }
    );
    assert_eq!(
        GeneratorFamily::Cauchy.bind(d).unwrap(),
        BoundFamily::PearsonVII { s: 6.5, g: 1.0 }
    );
}

#[test]
fn normalizing_constant_closed_forms() {
    for beta in AlgebraKind::all() {
        for (m, n) in [(1, 1), (2, 3)] {
            let d = Dims::new(beta, m, n);
            let nd = d.real_dim();
            let c = normalizing_constant(&GeneratorFamily::Normal, d).unwrap();
            let expect = (2.0 * PI / beta.beta_f64()).powf(-nd / 2.0);
            assert!(((c - expect) / expect).abs() < 1e-13);
            let (s, g) = (nd / 2.0 + 1.7, 2.5);
            let c = normalizing_constant(&GeneratorFamily::PearsonVII { s, g }, d).unwrap();
            let expect =
                gamma(s) / ((PI * g / beta.beta_f64()).powf(nd / 2.0) * gamma(s - nd / 2.0));
            assert!(((c - expect) / expect).abs() < 1e-12);
        }
    }
}

#[test]
fn normalizing_constant_quadrature_agrees() {
    for beta in [B1, B2] {
        for m in 1..=2 {
            for n in 1..=2 {
                let d = Dims::new(beta, m, n);
                for fam in [
                    GeneratorFamily::Normal,
                    GeneratorFamily::PearsonVII {
                        s: d.real_dim() / 2.0 + 1.5,
                        g: 3.0,
                    },
                    GeneratorFamily::StudentT { g: 4.0 },
                    GeneratorFamily::Cauchy,
                ] {
                    let c = normalizing_constant(&fam, d).unwrap();
                    let q = normalizing_constant_quadrature(&fam, d).unwrap();
                    assert!(((c - q) / c).abs() < 1e-8, "{fam:?} {d:?}: {c} vs {q}");
                }
            }
        }
    }
}

#[test]
fn scalar_density_values() {
    let y0 = scalar(B1, 0.0);
    let d = density_x(&y0, &scalar_model(B1, GeneratorFamily::Normal)).unwrap();
    assert!((d - 1.0 / (2.0 * PI).sqrt()).abs() < 1e-15);
    let d = density_x(&y0, &scalar_model(B1, GeneratorFamily::StudentT { g: 1.0 })).unwrap();
    assert!((d - 1.0 / PI).abs() < 1e-14);
    let d = density_x(&scalar(B2, 0.0), &scalar_model(B2, GeneratorFamily::Normal)).unwrap();
    assert!((d - 1.0 / PI).abs() < 1e-15);
}

#[test]
fn cauchy_paths_identical() {
    for beta in [B1, B2] {
        let nd = beta.beta_f64();
        let fams = [
            GeneratorFamily::Cauchy,
            GeneratorFamily::StudentT { g: 1.0 },
            GeneratorFamily::PearsonVII {
                s: (nd + 1.0) / 2.0,
                g: 1.0,
            },
        ];
        for x in [0.0, 0.3, 1.7, -4.0] {
            let vals: Vec<f64> = fams
                .iter()
                .map(|f| density_x(&scalar(beta, x), &scalar_model(beta, *f)).unwrap())
                .collect();
            assert_eq!(vals[0], vals[1]);
            assert_eq!(vals[1], vals[2]);
        }
    }
}

#[test]
fn scalar_density_integrates_to_one() {
    for beta in [B1, B2] {
        for fam in [
            GeneratorFamily::Normal,
            GeneratorFamily::StudentT { g: 3.0 },
        ] {
            let model = scalar_model(beta, fam);
            let b = beta.beta_f64();
            let area = 2.0 * PI.powf(b / 2.0) / gamma(b / 2.0);
            let f = |r: f64| area * r.powf(b - 1.0) * density_x(&scalar(beta, r), &model).unwrap();
            let total = ellipquad::quad::integrate_half_line(f, 1.0, 1e-10).unwrap();
            assert!((total - 1.0).abs() < 1e-6, "{beta} {fam:?}: {total}");
        }
    }
}

#[test]
fn radial_moment_examples() {
    let d = Dims::new(B1, 1, 1);
    assert!((radial_moment(&GeneratorFamily::Normal, 1.0, d).unwrap() - 2.0).abs() < 1e-15);
    let p = GeneratorFamily::PearsonVII { s: 3.0, g: 1.0 };
    assert!((radial_moment(&p, 1.0, d).unwrap() - 0.5).abs() < 1e-14);
    assert!(matches!(
        radial_moment(&p, 3.0, d),
        Err(ellipquad::Error::Domain(_))
    ));
    // the beta-shifted variant coincides at beta = 1
    let bf = p.bind(d).unwrap();
    assert_eq!(
        bf.radial_moment_beta_shifted(1.5, B1).unwrap(),
        bf.radial_moment(1.5).unwrap()
    );
}

#[test]
fn radial_moment_quadrature_grid() {
    let d = Dims::new(B1, 1, 1);
    for &c in &[0.5, 1.0, 2.5, 4.0] {
        let bf = GeneratorFamily::Normal.bind(d).unwrap();
        let (a, q) = (
            bf.radial_moment(c).unwrap(),
            bf.radial_moment_quadrature(c).unwrap(),
        );
        assert!(((a - q) / a).abs() < 1e-8, "normal c={c}");
        for &(s, g) in &[(5.0, 1.0), (6.5, 3.0), (9.0, 0.5)] {
            let bf = GeneratorFamily::PearsonVII { s, g }.bind(d).unwrap();
            let (a, q) = (
                bf.radial_moment(c).unwrap(),
                bf.radial_moment_quadrature(c).unwrap(),
            );
            assert!(
                ((a - q) / a).abs() < 1e-8,
                "pearson s={s} g={g} c={c}: {a} vs {q}"
            );
        }
    }
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    (
        m,
        xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0),
    )
}

#[test]
fn normal_sampler_moments() {
    let model = scalar_model(B1, GeneratorFamily::Normal);
    let xs: Vec<f64> = sample_x(&model, 100_000, 3)
        .unwrap()
        .iter()
        .map(|y| y.data()[0])
        .collect();
    let (m, v) = mean_var(&xs);
    let n = xs.len() as f64;
    assert!(m.abs() <= 3.0 * (v / n).sqrt());
    let sq: Vec<f64> = xs.iter().map(|x| x * x).collect();
    let (m2, v2) = mean_var(&sq);
    assert!((m2 - 1.0).abs() <= 3.0 * (v2 / n).sqrt());

    let model = scalar_model(B2, GeneratorFamily::Normal);
    let ys = sample_x(&model, 100_000, 4).unwrap();
    for comp in 0..2 {
        let sq: Vec<f64> = ys.iter().map(|y| y.data()[comp].powi(2)).collect();
        let (m2, v2) = mean_var(&sq);
        assert!(
            (m2 - 0.5).abs() <= 3.0 * (v2 / n).sqrt(),
            "component {comp}: {m2}"
        );
    }
}

fn ks_statistic(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn student_t_sampler_ks() {
    let model = scalar_model(B1, GeneratorFamily::StudentT { g: 5.0 });
    let t5 = StudentsT::new(0.0, 1.0, 5.0).unwrap();
    let n = 20_000;
    let crit = 1.628 / (n as f64).sqrt();
    let xs: Vec<f64> = sample_x(&model, n, 9)
        .unwrap()
        .iter()
        .map(|y| y.data()[0])
        .collect();
    assert!(ks_statistic(xs, |x| t5.cdf(x)) <= crit);
    let xs: Vec<f64> = sample_x_with(&model, n, 10, SampleOptions { antithetic: true })
        .unwrap()
        .iter()
        .map(|y| y.data()[0])
        .collect();
    assert!(ks_statistic(xs, |x| t5.cdf(x)) <= crit);
}

#[test]
fn kronecker_covariance() {
    let theta = HermitianMatrix::from_real(B1, 2, &[2.0, 0.5, 0.5, 1.0]).unwrap();
    let sigma = HermitianMatrix::from_real(B1, 2, &[1.0, -0.3, -0.3, 0.8]).unwrap();
    let model =
        EllipticalModel::centered(theta.clone(), sigma.clone(), GeneratorFamily::Normal).unwrap();
    let ys = sample_x(&model, 100_000, 11).unwrap();
    let n = ys.len() as f64;
    for (i, j, k, l) in [
        (0, 0, 0, 0),
        (0, 0, 1, 1),
        (0, 1, 1, 0),
        (1, 1, 1, 1),
        (0, 0, 0, 1),
        (1, 0, 0, 1),
    ] {
        let prods: Vec<f64> = ys
            .iter()
            .map(|y| y.entry(i, j)[0] * y.entry(k, l)[0])
            .collect();
        let (m, v) = mean_var(&prods);
        let expect = theta.as_matrix().entry(i, k)[0] * sigma.as_matrix().entry(j, l)[0];
        assert!(
            (m - expect).abs() <= 3.0 * (v / n).sqrt(),
            "({i}{j},{k}{l}): {m} vs {expect}"
        );
    }
}

#[test]
fn sampling_is_indexed_by_seed_and_position() {
    let model = scalar_model(B2, GeneratorFamily::StudentT { g: 3.0 });
    let a = sample_x(&model, 5, 77).unwrap();
    let b = sample_x(&model, 10, 77).unwrap();
    assert_eq!(a[..], b[..5]);
    assert_ne!(sample_x(&model, 1, 78).unwrap()[0], a[0]);
}

#[test]
fn model_json_round_trip() {
    let js = r#"{"family":{"kind":"student_t","g":4.0},"beta":2,
        "theta":{"beta":2,"rows":2,"cols":2,"data":[[[2,0],[0.5,0.1]],[[0.5,-0.1],[1,0]]]},
        "sigma":{"beta":2,"rows":1,"cols":1,"data":[[[1.5,0]]]}}"#;
    let m: EllipticalModel = serde_json::from_str(js).unwrap();
    assert_eq!(m.dims().n, 2);
    assert_eq!(m.dims().m, 1);
    let back: EllipticalModel = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
    assert_eq!(back.theta(), m.theta());
    let bad = js.replace("[[1.5,0]]", "[[-1.5,0]]");
    assert!(serde_json::from_str::<EllipticalModel>(&bad).is_err());
}
