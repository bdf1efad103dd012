use serde::{Deserialize, Serialize};

use super::Scalar;
use crate::error::{Error, Result};

/// Truncation controls for degree-layered series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesControl {
    pub max_degree: usize,
    pub rel_tol: f64,
    pub abs_tol: f64,
}

impl Default for SeriesControl {
    fn default() -> Self {
        SeriesControl {
            max_degree: 40,
            rel_tol: 1e-8,
            abs_tol: 1e-12,
        }
    }
}

impl SeriesControl {
    pub fn new(max_degree: usize, rel_tol: f64, abs_tol: f64) -> Result<Self> {
        let c = SeriesControl {
            max_degree,
            rel_tol,
            abs_tol,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::invalid("rel_tol must be positive"));
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return Err(Error::invalid("abs_tol must be positive"));
        }
        Ok(())
    }

    pub(crate) fn threshold(&self, partial: f64) -> f64 {
        self.rel_tol * partial + self.abs_tol
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerRecord<T> {
    pub degree: usize,
    pub layer: T,
    pub partial: T,
}

/// Value of a truncated series together with truncation diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesResult<T> {
    pub value: T,
    pub degree_used: usize,
    /// Magnitude of the last summed layer.
    pub tail_estimate: f64,
    pub converged: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub term_log: Option<Vec<LayerRecord<T>>>,
}

impl<T: Scalar> SeriesResult<T> {
    /// Multiplies value, tail and log by a common factor.
    pub(crate) fn scaled(mut self, f: T) -> Self {
        self.value *= f;
        self.tail_estimate *= f.modulus();
        if let Some(log) = &mut self.term_log {
            for r in log {
                r.layer *= f;
                r.partial *= f;
            }
        }
        self
    }

    /// Turns a non-converged result into a truncation error carrying the partial sum.
    pub fn into_checked(self, max_degree: usize) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged {
                max_degree,
                partial_re: self.value.re(),
                partial_im: self.value.im(),
                tail: self.tail_estimate,
            })
        }
    }
}

/// Pairwise summation in the given order.
pub fn pairwise_sum<T: Scalar>(xs: &[T]) -> T {
    match xs.len() {
        0 => T::zero(),
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let (a, b) = xs.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

/// Sums `layer(0) + layer(1) + ...` and stops once two consecutive layers are
/// below `rel_tol * |partial| + abs_tol`. When `trivial` is set only layer 0
/// is evaluated.
pub(crate) fn sum_layers<T, F>(
    ctrl: &SeriesControl,
    trivial: bool,
    keep_log: bool,
    mut layer: F,
) -> Result<SeriesResult<T>>
where
    T: Scalar,
    F: FnMut(usize) -> Result<T>,
{
    let mut log = keep_log.then(Vec::new);
    let first = layer(0)?;
    let mut partial = first;
    if let Some(l) = &mut log {
        l.push(LayerRecord {
            degree: 0,
            layer: first,
            partial,
        });
    }
    if trivial {
        return Ok(SeriesResult {
            value: partial,
            degree_used: 0,
            tail_estimate: 0.0,
            converged: true,
            term_log: log,
        });
    }
    let mut prev_small = false;
    let mut tail = first.modulus();
    for k in 1..=ctrl.max_degree {
        let t = layer(k)?;
        partial += t;
        tail = t.modulus();
        if let Some(l) = &mut log {
            l.push(LayerRecord {
                degree: k,
                layer: t,
                partial,
            });
        }
        let small = tail <= ctrl.threshold(partial.modulus());
        if small && prev_small {
            return Ok(SeriesResult {
                value: partial,
                degree_used: k,
                tail_estimate: tail,
                converged: true,
                term_log: log,
            });
        }
        prev_small = small;
    }
    Ok(SeriesResult {
        value: partial,
        degree_used: ctrl.max_degree,
        tail_estimate: tail,
        converged: false,
        term_log: log,
    })
}
