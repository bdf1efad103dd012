use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::checks::{
    check_cf_empirical, check_density_empirical, check_jacobian_linear, check_laplace_integral,
    check_orbital_integral, check_stiefel_splitting, CfParams, DensityParams, JacobianParams,
    LaplaceParams, OrbitalParams, StiefelParams,
};
use super::report::CheckReport;
use crate::elliptical::GeneratorFamily;
use crate::error::{Error, Result};
use crate::matalg::{DAMatrix, HermitianMatrix};
use crate::quadform::QuadFormFile;
use crate::special::{AlgebraKind, Partition, SeriesControl};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "check", content = "params", rename_all = "snake_case")]
pub enum CheckSpec {
    Orbital(OrbitalParams),
    Stiefel(StiefelParams),
    Jacobian(JacobianParams),
    Laplace(LaplaceParams),
    CfEmpirical(CfParams),
    DensityEmpirical(DensityParams),
}

/// One configured check: `{"check": ..., "params": {...}, "N": ..., "seed": ...}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SuiteEntry {
    #[serde(flatten)]
    pub check: CheckSpec,
    #[serde(rename = "N", default)]
    pub samples: usize,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Replaces per-entry seeds: entry i runs with `seed + i`.
    pub seed_override: Option<u64>,
    /// Records wall time per check (makes reports non-reproducible).
    pub timings: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub total: usize,
    pub matches: usize,
    pub inconclusive: usize,
    pub fail: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub checks: Vec<CheckReport>,
    pub summary: SuiteSummary,
}

impl SuiteReport {
    pub fn has_failures(&self) -> bool {
        self.summary.fail > 0
    }
}

impl CheckSpec {
    pub fn name(&self) -> &'static str {
        match self {
            CheckSpec::Orbital(_) => "orbital",
            CheckSpec::Stiefel(_) => "stiefel",
            CheckSpec::Jacobian(_) => "jacobian",
            CheckSpec::Laplace(_) => "laplace",
            CheckSpec::CfEmpirical(_) => "cf_empirical",
            CheckSpec::DensityEmpirical(_) => "density_empirical",
        }
    }

    pub fn run(&self, samples: usize, seed: u64, ctrl: &SeriesControl) -> CheckReport {
        match self {
            CheckSpec::Orbital(p) => check_orbital_integral(p, samples, seed),
            CheckSpec::Stiefel(p) => check_stiefel_splitting(p, samples, seed),
            CheckSpec::Jacobian(p) => check_jacobian_linear(p, seed),
            CheckSpec::Laplace(p) => check_laplace_integral(p, samples, seed),
            CheckSpec::CfEmpirical(p) => check_cf_empirical(p, samples, seed, ctrl),
            CheckSpec::DensityEmpirical(p) => check_density_empirical(p, samples, seed, ctrl),
        }
    }
}

/// Runs the entries concurrently; the report keeps entry order.
pub fn run_suite(entries: &[SuiteEntry], ctrl: &SeriesControl, opts: RunOptions) -> SuiteReport {
    let checks: Vec<CheckReport> = entries
        .par_iter()
        .enumerate()
        .map(|(i, e)| {
            let seed = opts
                .seed_override
                .map_or(e.seed, |s| s.wrapping_add(i as u64));
            let t = Instant::now();
            let mut rep = e.check.run(e.samples, seed, ctrl);
            if opts.timings {
                rep.wall_time_s = Some(t.elapsed().as_secs_f64());
            }
            rep
        })
        .collect();
    let mut summary = SuiteSummary {
        total: checks.len(),
        ..Default::default()
    };
    for c in &checks {
        match &c.verdict {
            super::Verdict::Matches(_) => summary.matches += 1,
            super::Verdict::Inconclusive => summary.inconclusive += 1,
            super::Verdict::Fail => summary.fail += 1,
        }
    }
    SuiteReport { checks, summary }
}

/// Parses a suite configuration (a JSON list of entries).
pub fn parse_suite(json: &str) -> Result<Vec<SuiteEntry>> {
    Ok(serde_json::from_str(json)?)
}

/// Names accepted by [`builtin_suite`].
pub const BUILTIN_SUITES: [&str; 2] = ["default", "quick"];

pub fn builtin_suite(name: &str) -> Result<Vec<SuiteEntry>> {
    match name {
        "default" => Ok(default_suite(1)),
        "quick" => Ok(default_suite(10)),
        _ => Err(Error::invalid(format!(
            "unknown suite '{name}' (built-in suites: {})",
            BUILTIN_SUITES.join(", ")
        ))),
    }
}

const R: AlgebraKind = AlgebraKind::REAL;
const C: AlgebraKind = AlgebraKind::COMPLEX;

fn real(n: usize, v: &[f64]) -> HermitianMatrix {
    HermitianMatrix::from_real(R, n, v).expect("built-in matrix")
}

fn complex(n: usize, v: &[f64]) -> HermitianMatrix {
    HermitianMatrix::new(DAMatrix::new(C, n, n, v.to_vec()).expect("built-in matrix"))
        .expect("built-in matrix")
}

fn kappa(p: &[usize]) -> Partition {
    Partition::new(p.to_vec()).expect("built-in partition")
}

fn entry(check: CheckSpec, samples: usize, seed: u64) -> SuiteEntry {
    SuiteEntry {
        check,
        samples,
        seed,
    }
}

/// The adjudication setting: beta = 1, Normal, A = diag(I_2, 0, 0), m = 2, n = 4.
pub fn idempotent_cf_params(points: usize) -> CfParams {
    let mut a = vec![0.0; 16];
    a[0] = 1.0;
    a[5] = 1.0;
    let sigma = real(2, &[1.0, 0.3, 0.3, 0.8]);
    let s_points = (0..points)
        .map(|i| {
            let t = 0.2 * (i as f64 + 1.0) / points as f64;
            let phi = 0.7 * i as f64;
            let (c, s) = (phi.cos(), phi.sin());
            // rotated diag(t, -t/2)
            let d = [t, -0.5 * t];
            real(
                2,
                &[
                    c * c * d[0] + s * s * d[1],
                    c * s * (d[0] - d[1]),
                    c * s * (d[0] - d[1]),
                    s * s * d[0] + c * c * d[1],
                ],
            )
        })
        .collect();
    CfParams {
        model: QuadFormFile {
            family: GeneratorFamily::Normal,
            beta: None,
            a: real(4, &a),
            theta: HermitianMatrix::identity(R, 4),
            sigma,
        },
        s_points,
        antithetic: false,
    }
}

fn default_suite(div: usize) -> Vec<SuiteEntry> {
    let n = |k: usize| (k / div).max(super::MIN_SAMPLES);
    vec![
        entry(
            CheckSpec::Orbital(OrbitalParams {
                x1: real(3, &[2.0, 0.4, 0.0, 0.4, 1.0, 0.3, 0.0, 0.3, 0.5]),
                x2: real(3, &[1.0, 1.0, 0.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0]),
                kappa: kappa(&[2]),
            }),
            n(100_000),
            1,
        ),
        entry(
            CheckSpec::Orbital(OrbitalParams {
                x1: complex(2, &[1.5, 0.0, 0.2, 0.3, 0.2, -0.3, 0.7, 0.0]),
                x2: HermitianMatrix::identity(C, 2),
                kappa: kappa(&[1, 1]),
            }),
            n(20_000),
            2,
        ),
        entry(
            CheckSpec::Stiefel(StiefelParams {
                x1: real(
                    4,
                    &[
                        1.0, 0.2, 0.0, 0.1, 0.2, 0.8, 0.1, 0.0, 0.0, 0.1, 0.6, 0.2, 0.1, 0.0, 0.2,
                        0.4,
                    ],
                ),
                x2: real(2, &[1.0, 0.3, 0.3, 0.5]),
                kappa: kappa(&[2]),
            }),
            n(100_000),
            3,
        ),
        entry(
            CheckSpec::Jacobian(JacobianParams {
                a: DAMatrix::from_real(
                    R,
                    5,
                    3,
                    &[
                        1.0, 0.5, -0.2, 0.3, 2.0, 0.1, -0.7, 0.4, 1.5, 0.2, 0.0, 0.3, 1.1, -0.6,
                        0.8,
                    ],
                )
                .expect("built-in matrix"),
                m: 2,
            }),
            0,
            4,
        ),
        entry(
            CheckSpec::Laplace(LaplaceParams {
                a: 2.5,
                kappa: kappa(&[1]),
                u: real(2, &[1.0, 0.2, 0.2, 0.6]),
                z: real(2, &[1.5, -0.3, -0.3, 1.0]),
            }),
            n(100_000),
            5,
        ),
        entry(
            CheckSpec::CfEmpirical(idempotent_cf_params(10)),
            n(200_000),
            6,
        ),
        entry(
            CheckSpec::CfEmpirical(CfParams {
                model: QuadFormFile {
                    family: GeneratorFamily::Normal,
                    beta: None,
                    a: HermitianMatrix::diag(C, &[1.0, 1.0, 0.0]),
                    theta: HermitianMatrix::identity(C, 3),
                    sigma: HermitianMatrix::identity(C, 1),
                },
                s_points: vec![real_c(0.05), real_c(0.1), real_c(-0.15)],
                antithetic: false,
            }),
            n(100_000),
            7,
        ),
        entry(
            CheckSpec::DensityEmpirical(DensityParams {
                model: QuadFormFile {
                    family: GeneratorFamily::PearsonVII { s: 4.0, g: 3.0 },
                    beta: None,
                    a: real(3, &[1.0, 0.2, 0.0, 0.2, 0.7, 0.1, 0.0, 0.1, 0.4]),
                    theta: real(3, &[1.0, 0.3, 0.0, 0.3, 1.0, 0.0, 0.0, 0.0, 0.8]),
                    sigma: real(1, &[1.0]),
                },
                w_points: vec![real(1, &[0.05]), real(1, &[0.15]), real(1, &[0.3])],
                bandwidth: 0.1,
            }),
            n(100_000),
            8,
        ),
        entry(
            CheckSpec::DensityEmpirical(DensityParams {
                model: QuadFormFile {
                    family: GeneratorFamily::Normal,
                    beta: None,
                    a: HermitianMatrix::identity(R, 2),
                    theta: HermitianMatrix::identity(R, 2),
                    sigma: real(2, &[1.0, 0.2, 0.2, 0.5]),
                },
                w_points: vec![
                    real(2, &[0.4, 0.05, 0.05, 0.3]),
                    real(2, &[0.8, 0.1, 0.1, 0.4]),
                ],
                bandwidth: 0.1,
            }),
            0,
            9,
        ),
    ]
}

fn real_c(v: f64) -> HermitianMatrix {
    HermitianMatrix::diag(C, &[v])
}
