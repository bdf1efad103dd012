use num_complex::Complex64;
use rayon::prelude::*;

use crate::rng::{stream_rng, StreamRng};

/// Samples per chunk; chunk c draws from stream c of the seed.
pub const CHUNK: usize = 2048;

/// Running mean and sum of squared deviations per coordinate.
#[derive(Debug, Clone)]
struct Moments {
    n: usize,
    mean: Vec<Complex64>,
    m2: Vec<f64>,
}

impl Moments {
    fn new(dim: usize) -> Self {
        Moments {
            n: 0,
            mean: vec![Complex64::new(0.0, 0.0); dim],
            m2: vec![0.0; dim],
        }
    }

    fn push(&mut self, x: &[Complex64]) {
        self.n += 1;
        let n = self.n as f64;
        for ((m, s), &v) in self.mean.iter_mut().zip(self.m2.iter_mut()).zip(x) {
            let d = v - *m;
            *m += d / n;
            *s += (d.conj() * (v - *m)).re;
        }
    }

    fn merge(a: Moments, b: Moments) -> Moments {
        if a.n == 0 {
            return b;
        }
        if b.n == 0 {
            return a;
        }
        let (na, nb) = (a.n as f64, b.n as f64);
        let n = na + nb;
        let mut out = Moments::new(a.mean.len());
        out.n = a.n + b.n;
        for i in 0..a.mean.len() {
            let d = b.mean[i] - a.mean[i];
            out.mean[i] = a.mean[i] + d * (nb / n);
            out.m2[i] = a.m2[i] + b.m2[i] + d.norm_sqr() * na * nb / n;
        }
        out
    }
}

fn merge_pairwise(mut parts: Vec<Moments>) -> Moments {
    while parts.len() > 1 {
        let mut next = Vec::with_capacity(parts.len().div_ceil(2));
        let mut it = parts.into_iter();
        while let Some(a) = it.next() {
            next.push(match it.next() {
                Some(b) => Moments::merge(a, b),
                None => a,
            });
        }
        parts = next;
    }
    parts.pop().expect("at least one chunk")
}

/// Sample means and standard errors of a vector-valued statistic.
#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    pub mean: Vec<Complex64>,
    pub se: Vec<f64>,
    pub samples: usize,
}

/// Runs `n` evaluations of `f` in fixed chunks. The result depends only on (n, seed, f).
pub fn mc_run<F>(n: usize, seed: u64, dim: usize, f: F) -> McEstimate
where
    F: Fn(&mut StreamRng, &mut [Complex64]) + Sync,
{
    let chunks = n.div_ceil(CHUNK).max(1);
    let parts: Vec<Moments> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream_rng(seed, c as u64);
            let mut acc = Moments::new(dim);
            let mut buf = vec![Complex64::new(0.0, 0.0); dim];
            let len = CHUNK.min(n - (c * CHUNK).min(n));
            for _ in 0..len {
                f(&mut rng, &mut buf);
                acc.push(&buf);
            }
            acc
        })
        .collect();
    let m = merge_pairwise(parts);
    let se =
        m.m2.iter()
            .map(|s| {
                if m.n > 1 {
                    (s / ((m.n - 1) as f64 * m.n as f64)).sqrt()
                } else {
                    f64::INFINITY
                }
            })
            .collect();
    McEstimate {
        mean: m.mean,
        se,
        samples: m.n,
    }
}
