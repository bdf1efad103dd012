use std::collections::HashMap;
use std::ops::{Add, Div, Mul};
use std::sync::{Arc, OnceLock, RwLock};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;

use super::{enumerate_partitions, pairwise_sum, AlgebraKind, Partition, Scalar};

/// Largest weight whose coefficients are computed in exact rational arithmetic.
pub const EXACT_MAX_WEIGHT: usize = 12;

trait CoeffField:
    Clone + Zero + One + Add<Output = Self> + Mul<Output = Self> + Div<Output = Self>
{
    fn from_i64(v: i64) -> Self;
    fn to_f64_lossy(&self) -> f64;
}

impl CoeffField for BigRational {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl CoeffField for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn to_f64_lossy(&self) -> f64 {
        *self
    }
}

/// Monomial-basis coefficients of the C-normalized Jack polynomials of one
/// weight in a bounded number of variables. Rows are computed on first use.
pub struct JackTable {
    weight: usize,
    nvars: usize,
    beta: AlgebraKind,
    partitions: Vec<Partition>,
    index: HashMap<Partition, usize>,
    rows: Vec<OnceLock<Vec<(usize, f64)>>>,
}

impl std::fmt::Debug for JackTable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("JackTable")
            .field("weight", &self.weight)
            .field("nvars", &self.nvars)
            .field("beta", &self.beta)
            .field("partitions", &self.partitions.len())
            .finish()
    }
}

impl JackTable {
    /// Builds an uncached table. Most callers want [`jack_table`].
    pub fn build(weight: usize, nvars: usize, beta: AlgebraKind) -> JackTable {
        let nvars = nvars.min(weight);
        let partitions = enumerate_partitions(weight, nvars);
        let index = partitions
            .iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), i))
            .collect();
        let rows = (0..partitions.len()).map(|_| OnceLock::new()).collect();
        JackTable {
            weight,
            nvars,
            beta,
            partitions,
            index,
            rows,
        }
    }

    pub fn weight(&self) -> usize {
        self.weight
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn beta(&self) -> AlgebraKind {
        self.beta
    }

    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    pub fn index_of(&self, kappa: &Partition) -> Option<usize> {
        self.index.get(kappa).copied()
    }

    /// Nonzero coefficients (monomial index, value) of C_kappa for partition index `ki`.
    pub fn row(&self, ki: usize) -> &[(usize, f64)] {
        self.rows[ki].get_or_init(|| {
            if self.weight <= EXACT_MAX_WEIGHT {
                self.compute_row::<BigRational>(ki)
            } else {
                self.compute_row::<f64>(ki)
            }
        })
    }

    fn rho(&self, p: &Partition) -> i64 {
        let b = self.beta.beta() as i64;
        p.parts()
            .iter()
            .enumerate()
            .map(|(i, &l)| {
                let l = l as i64;
                l * (l - 1 - b * i as i64)
            })
            .sum()
    }

    fn compute_row<T: CoeffField>(&self, ki: usize) -> Vec<(usize, f64)> {
        let kappa = &self.partitions[ki];
        let b = self.beta.beta() as i64;
        let rk = self.rho(kappa);
        let mut c: Vec<Option<T>> = vec![None; self.partitions.len()];
        c[ki] = Some(T::one());
        let mut buf = Vec::new();
        for mi in ki + 1..self.partitions.len() {
            let mu = &self.partitions[mi];
            if !mu.dominated_by(kappa) {
                continue;
            }
            let p = mu.parts();
            let mut sum = T::zero();
            for i in 0..p.len() {
                for j in i + 1..p.len() {
                    for t in 1..=p[j] {
                        buf.clear();
                        buf.extend_from_slice(p);
                        buf[i] += t;
                        buf[j] -= t;
                        let nu = Partition::from_unsorted(buf.clone());
                        if let Some(cv) = self.index.get(&nu).and_then(|&ni| c[ni].as_ref()) {
                            let w = p[i] as i64 - p[j] as i64 + 2 * t as i64;
                            sum = sum + cv.clone() * T::from_i64(w);
                        }
                    }
                }
            }
            let denom = rk - self.rho(mu);
            debug_assert!(denom > 0);
            c[mi] = Some(sum * T::from_i64(b) / T::from_i64(denom));
        }

        // P -> C normalization: 2^k k! / prod over boxes of (2(arm + 1) + beta * leg).
        let conj = kappa.conjugate();
        let mut norm = T::one();
        for (n, (i, j)) in kappa.cells().enumerate() {
            let arm = (kappa.part(i) - j - 1) as i64;
            let leg = (conj.part(j) - i - 1) as i64;
            norm = norm * T::from_i64(2 * (n as i64 + 1)) / T::from_i64(2 * (arm + 1) + b * leg);
        }
        c.into_iter()
            .enumerate()
            .filter_map(|(i, v)| {
                v.filter(|x| !x.is_zero())
                    .map(|x| (i, (x * norm.clone()).to_f64_lossy()))
            })
            .collect()
    }

    /// Monomial symmetric functions m_mu at `eigs` for every partition in the table.
    /// `eigs` must hold at most `nvars` values.
    pub fn monomials<T: Scalar>(&self, eigs: &[T]) -> Vec<T> {
        assert!(
            self.nvars >= eigs.len().min(self.weight),
            "table has too few variables for this spectrum"
        );
        let k = self.weight;
        let pows: Vec<Vec<T>> = eigs
            .iter()
            .map(|&x| {
                let mut v = Vec::with_capacity(k + 1);
                let mut acc = T::one();
                v.push(acc);
                for _ in 0..k {
                    acc *= x;
                    v.push(acc);
                }
                v
            })
            .collect();
        if self.partitions.len() >= PAR_MIN {
            self.partitions
                .par_iter()
                .map(|mu| monomial(mu.parts(), &pows))
                .collect()
        } else {
            self.partitions
                .iter()
                .map(|mu| monomial(mu.parts(), &pows))
                .collect()
        }
    }

    pub fn eval_with_monomials<T: Scalar>(&self, ki: usize, mono: &[T]) -> T {
        let terms: Vec<T> = self
            .row(ki)
            .iter()
            .map(|&(mi, c)| mono[mi].scale(c))
            .collect();
        pairwise_sum(&terms)
    }

    /// C_kappa at a spectrum of at most `nvars` entries.
    pub fn eval<T: Scalar>(&self, kappa: &Partition, eigs: &[T]) -> T {
        match self.index_of(kappa) {
            Some(ki) => self.eval_with_monomials(ki, &self.monomials(eigs)),
            None => T::zero(),
        }
    }
}

/// Sum over distinct assignments of the exponents in `parts` (padded with zeros)
/// to the variables.
fn monomial<T: Scalar>(parts: &[usize], pows: &[Vec<T>]) -> T {
    let p = pows.len();
    if parts.len() > p {
        return T::zero();
    }
    let mut groups: Vec<(usize, usize)> = Vec::new();
    for &e in parts {
        match groups.last_mut() {
            Some((v, c)) if *v == e => *c += 1,
            _ => groups.push((e, 1)),
        }
    }
    if p > parts.len() {
        groups.push((0, p - parts.len()));
    }
    fn rec<T: Scalar>(var: usize, groups: &mut [(usize, usize)], pows: &[Vec<T>]) -> T {
        if var == pows.len() {
            return T::one();
        }
        let mut total = T::zero();
        for g in 0..groups.len() {
            if groups[g].1 == 0 {
                continue;
            }
            groups[g].1 -= 1;
            let e = groups[g].0;
            total += pows[var][e] * rec(var + 1, groups, pows);
            groups[g].1 += 1;
        }
        total
    }
    rec(0, &mut groups, pows)
}

type Key = (usize, usize, u32);

static CACHE: OnceLock<RwLock<HashMap<Key, Arc<JackTable>>>> = OnceLock::new();

/// Shared table for weight `k` in `nvars` variables.
const PAR_MIN: usize = 24;

pub fn jack_table(k: usize, nvars: usize, beta: AlgebraKind) -> Arc<JackTable> {
    let key = (k, nvars.min(k), beta.beta());
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.read().expect("jack cache poisoned").get(&key) {
        return t.clone();
    }
    let fresh = Arc::new(JackTable::build(key.0, key.1, beta));
    cache
        .write()
        .expect("jack cache poisoned")
        .entry(key)
        .or_insert(fresh)
        .clone()
}

/// A spectrum with exact zeros removed, flagged when all entries coincide.
#[derive(Debug, Clone)]
pub(crate) struct PreparedSpectrum<T> {
    pub eigs: Vec<T>,
    pub constant: Option<T>,
}

impl<T: Scalar> PreparedSpectrum<T> {
    pub fn new(eigs: &[T]) -> Self {
        let eigs: Vec<T> = eigs
            .iter()
            .copied()
            .filter(|x| !x.is_exact_zero())
            .collect();
        let constant = eigs.first().copied().filter(|&x0| {
            let scale = eigs.iter().map(|x| x.modulus()).fold(0.0, f64::max);
            eigs.iter()
                .all(|&x| (x - x0).modulus() <= 8.0 * f64::EPSILON * scale)
        });
        let constant = constant.map(|_| {
            let n = eigs.len() as f64;
            eigs.iter().copied().sum::<T>().scale(1.0 / n)
        });
        PreparedSpectrum { eigs, constant }
    }

    pub fn len(&self) -> usize {
        self.eigs.len()
    }

    pub fn is_zero(&self) -> bool {
        self.eigs.is_empty()
    }

    /// C_kappa at this spectrum for every partition in `kappas` (all of weight k).
    pub fn layer(&self, k: usize, kappas: &[Partition], beta: AlgebraKind) -> Vec<T> {
        let p = self.len();
        if let Some(c) = self.constant {
            let mut ck = T::one();
            for _ in 0..k {
                ck *= c;
            }
            return kappas
                .iter()
                .map(|kp| ck.scale(jack_c_identity(kp, p, beta)))
                .collect();
        }
        if k == 0 {
            return vec![T::one(); kappas.len()];
        }
        let table = jack_table(k, p, beta);
        let mono = table.monomials(&self.eigs);
        let eval = |kp: &Partition| match table.index_of(kp) {
            Some(ki) => table.eval_with_monomials(ki, &mono),
            None => T::zero(),
        };
        if kappas.len() >= PAR_MIN {
            kappas.par_iter().map(eval).collect()
        } else {
            kappas.iter().map(eval).collect()
        }
    }
}

/// C-normalized Jack polynomial at a (real or complex) spectrum.
pub fn jack_c<T: Scalar>(kappa: &Partition, eigs: &[T], beta: AlgebraKind) -> T {
    let spec = PreparedSpectrum::new(eigs);
    if kappa.len() > spec.len() {
        return T::zero();
    }
    spec.layer(kappa.weight(), std::slice::from_ref(kappa), beta)[0]
}

/// C_kappa at the d x d identity, by the closed product formula.
pub fn jack_c_identity(kappa: &Partition, d: usize, beta: AlgebraKind) -> f64 {
    let alpha = beta.alpha();
    let conj = kappa.conjugate();
    let mut v = 1.0;
    for (n, (i, j)) in kappa.cells().enumerate() {
        let arm = (kappa.part(i) - j - 1) as f64;
        let leg = (conj.part(j) - i - 1) as f64;
        let num = d as f64 - i as f64 + alpha * j as f64;
        let h = alpha * arm + leg;
        v *= alpha * (n + 1) as f64 * num / ((h + 1.0) * (h + alpha));
    }
    v
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_complex::Complex64;

    fn p(v: &[usize]) -> Partition {
        Partition::new(v.to_vec()).unwrap()
    }

    #[test]
    fn degree_two_expansion() {
        // C_(2) = (p1^2 + alpha p2)/(1+alpha), C_(1,1) = alpha (p1^2 - p2)/(1+alpha)
        for beta in AlgebraKind::all() {
            let a = beta.alpha();
            let x = [0.3, -1.2, 2.5];
            let p1: f64 = x.iter().sum();
            let p2: f64 = x.iter().map(|v| v * v).sum();
            assert_relative_eq!(
                jack_c(&p(&[2]), &x, beta),
                (p1 * p1 + a * p2) / (1.0 + a),
                max_relative = 1e-14
            );
            assert_relative_eq!(
                jack_c(&p(&[1, 1]), &x, beta),
                a * (p1 * p1 - p2) / (1.0 + a),
                max_relative = 1e-13
            );
        }
        assert_relative_eq!(jack_c(&p(&[2]), &[1.0, 1.0], AlgebraKind::REAL), 8.0 / 3.0);
    }

    #[test]
    fn trace_and_sum_identity() {
        let x = [1.0, 2.0];
        assert_eq!(jack_c(&p(&[1]), &x, AlgebraKind::REAL), 3.0);
        let total: f64 = enumerate_partitions(3, 2)
            .iter()
            .map(|k| jack_c(k, &x, AlgebraKind::QUATERNION))
            .sum();
        assert_relative_eq!(total, 27.0, max_relative = 1e-14);
    }

    #[test]
    fn schur_at_alpha_one() {
        // beta = 2 gives Schur functions up to k!/prod(hooks): s_(2,1)(x,y,z) = m21 + 2 m111
        let x = [0.7, -0.4, 1.3];
        let (a, b, c) = (x[0], x[1], x[2]);
        let m21 = a * a * (b + c) + b * b * (a + c) + c * c * (a + b);
        let m111 = a * b * c;
        let s21 = m21 + 2.0 * m111;
        let hooks = 3.0 * 1.0 * 1.0;
        assert_relative_eq!(
            jack_c(&p(&[2, 1]), &x, AlgebraKind::COMPLEX),
            6.0 / hooks * s21,
            max_relative = 1e-13
        );
    }

    #[test]
    fn identity_formula_matches_table() {
        for beta in AlgebraKind::all() {
            for k in 0..=6 {
                for d in 1..=4 {
                    for kp in enumerate_partitions(k, d) {
                        let t = jack_table(k, d, beta);
                        let direct: f64 = t.eval(&kp, &vec![1.0; d]);
                        assert_relative_eq!(
                            jack_c_identity(&kp, d, beta),
                            direct,
                            max_relative = 1e-12
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn long_partition_vanishes() {
        assert_eq!(
            jack_c(&p(&[1, 1, 1]), &[1.0, 2.0, 0.0], AlgebraKind::REAL),
            0.0
        );
        assert_eq!(jack_c_identity(&p(&[1, 1, 1]), 2, AlgebraKind::REAL), 0.0);
    }

    #[test]
    fn complex_homogeneity() {
        let x = [0.2, -0.5, 0.9];
        let c = Complex64::new(0.0, 2.0);
        let xc: Vec<Complex64> = x.iter().map(|&v| c * v).collect();
        let kp = p(&[2, 1]);
        let lhs: Complex64 = jack_c(&kp, &xc, AlgebraKind::REAL);
        let rhs = c.powi(3) * jack_c(&kp, &x, AlgebraKind::REAL);
        assert!((lhs - rhs).norm() < 1e-13);
    }

    #[test]
    fn cached_matches_fresh() {
        let beta = AlgebraKind::REAL;
        let cached = jack_table(7, 3, beta);
        let fresh = JackTable::build(7, 3, beta);
        for i in 0..fresh.partitions().len() {
            assert_eq!(cached.row(i), fresh.row(i));
        }
    }

    #[test]
    fn float_rows_beyond_exact_range() {
        let beta = AlgebraKind::REAL;
        let x = [0.3, 0.2];
        let k = 14;
        let total: f64 = enumerate_partitions(k, 2)
            .iter()
            .map(|kp| jack_c(kp, &x, beta))
            .sum();
        assert_relative_eq!(total, 0.5f64.powi(k as i32), max_relative = 1e-11);
    }
}
