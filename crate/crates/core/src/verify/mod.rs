//! Monte Carlo and exact checks of the identities behind the series, with verdicts
//! naming which candidate formula the evidence supports.

mod checks;
mod discrepancy;
mod mc;
mod oracles;
mod report;
mod suite;

pub use checks::{
    check_cf_empirical, check_density_empirical, check_jacobian_linear, check_laplace_integral,
    check_orbital_integral, check_stiefel_splitting, CfParams, DensityParams, JacobianParams,
    LaplaceParams, OrbitalParams, StiefelParams, MIN_SAMPLES,
};
pub use discrepancy::{discrepancies, render_table, Discrepancy};
pub use mc::{mc_run, McEstimate, CHUNK};
pub use oracles::{
    gram_volume_factor, ln_pearson_wishart_density, ln_wishart_density, wishart_draw,
};
pub use report::{inputs_digest, CandidateValue, CheckReport, PointReport, Verdict};
pub use suite::{
    builtin_suite, idempotent_cf_params, parse_suite, run_suite, CheckSpec, RunOptions, SuiteEntry,
    SuiteReport, SuiteSummary, BUILTIN_SUITES,
};
