use super::jack::PreparedSpectrum;
use super::{enumerate_partitions, gen_pochhammer, pairwise_sum, sum_layers, AlgebraKind, Scalar};
use super::{SeriesControl, SeriesResult};
use crate::error::Result;

/// Truncated 1F0(a; X) = sum_k sum_kappa [a]_kappa C_kappa(X) / k!.
pub fn hypergeom_1f0<T: Scalar>(
    a: f64,
    eigs: &[T],
    beta: AlgebraKind,
    ctrl: &SeriesControl,
) -> Result<SeriesResult<T>> {
    ctrl.validate()?;
    let spec = PreparedSpectrum::new(eigs);
    let mut kfact = 1.0;
    let res = sum_layers(ctrl, spec.is_zero(), false, |k| {
        if k > 0 {
            kfact *= k as f64;
        }
        let kappas = enumerate_partitions(k, spec.len());
        let vals = spec.layer(k, &kappas, beta);
        let terms: Vec<T> = kappas
            .iter()
            .zip(vals)
            .map(|(kp, v)| v.scale(gen_pochhammer(a, kp, beta) / kfact))
            .collect();
        Ok(pairwise_sum(&terms))
    })?;
    res.into_checked(ctrl.max_degree)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    #[test]
    fn examples() {
        let ctrl = SeriesControl::default();
        let b1 = AlgebraKind::REAL;
        let r = hypergeom_1f0(2.3, &[0.0, 0.0], b1, &ctrl).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.degree_used, 0);
        let r = hypergeom_1f0(2.0, &[0.5], b1, &ctrl).unwrap();
        assert_relative_eq!(r.value, 4.0, max_relative = 1e-8);
        let r = hypergeom_1f0(1.0, &[0.1, 0.2], b1, &ctrl).unwrap();
        assert_relative_eq!(r.value, 1.0 / (0.9 * 0.8), max_relative = 1e-9);
    }

    #[test]
    fn complex_argument() {
        let ctrl = SeriesControl::default();
        let x = [Complex64::new(0.0, 0.2), Complex64::new(0.0, -0.1)];
        let r = hypergeom_1f0(1.5, &x, AlgebraKind::COMPLEX, &ctrl).unwrap();
        let exact: Complex64 = x
            .iter()
            .map(|&v| (Complex64::new(1.0, 0.0) - v).powf(-1.5))
            .product();
        assert!((r.value - exact).norm() < 1e-9);
    }

    #[test]
    fn divergence_is_reported() {
        let ctrl = SeriesControl::new(10, 1e-10, 1e-14).unwrap();
        let e = hypergeom_1f0(1.0, &[1.5], AlgebraKind::REAL, &ctrl).unwrap_err();
        assert!(matches!(e, crate::Error::NotConverged { .. }));
    }
}
