//! One-dimensional integration on the half line, built on double-exponential quadrature.

use quadrature::double_exponential;

use crate::error::{Error, Result};

const PANELS: [f64; 6] = [0.0, 0.125, 0.375, 0.625, 0.875, 1.0];

/// Integral of `f` over [0, inf) via u = scale * t / (1 - t), summed over fixed panels in t.
/// `rel_tol` is a target relative accuracy. Integrable endpoint singularities at 0
/// should be removed by the caller (the node set stops short of the endpoint).
pub fn integrate_half_line<F: Fn(f64) -> f64>(f: F, scale: f64, rel_tol: f64) -> Result<f64> {
    let g = |t: f64| {
        if t <= 0.0 || t >= 1.0 {
            return 0.0;
        }
        let d = 1.0 - t;
        let u = scale * t / d;
        f(u) * scale / (d * d)
    };
    let panel = |a: f64, b: f64, tol: f64| double_exponential::integrate(g, a, b, tol);
    let rough: f64 = PANELS
        .windows(2)
        .map(|w| panel(w[0], w[1], 1e-6).integral.abs())
        .sum();
    if !rough.is_finite() {
        return Err(Error::domain("integrand is not integrable on [0, inf)"));
    }
    if rough == 0.0 {
        return Ok(0.0);
    }
    let target = rel_tol * rough / (PANELS.len() - 1) as f64;
    let mut total = 0.0;
    let mut err = 0.0;
    for w in PANELS.windows(2) {
        let o = panel(w[0], w[1], target);
        total += o.integral;
        err += o.error_estimate;
    }
    if !total.is_finite() || err > 100.0 * rel_tol * total.abs() {
        return Err(Error::domain(format!(
            "quadrature did not reach relative accuracy {rel_tol:e} (error estimate {err:e})"
        )));
    }
    Ok(total)
}
