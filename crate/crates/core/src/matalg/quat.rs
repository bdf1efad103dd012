use std::ops::{Add, Mul, Sub};

/// Quaternion a + b i + c j + d k. Reals and complexes embed as the first one or two components.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub(crate) struct Quat(pub [f64; 4]);

impl Quat {
    pub fn conj(self) -> Quat {
        let [a, b, c, d] = self.0;
        Quat([a, -b, -c, -d])
    }

    pub fn norm_sqr(self) -> f64 {
        self.0.iter().map(|x| x * x).sum()
    }

    pub fn scale(self, f: f64) -> Quat {
        Quat(self.0.map(|x| x * f))
    }
}

impl Add for Quat {
    type Output = Quat;
    fn add(self, o: Quat) -> Quat {
        Quat([0, 1, 2, 3].map(|i| self.0[i] + o.0[i]))
    }
}

impl Sub for Quat {
    type Output = Quat;
    fn sub(self, o: Quat) -> Quat {
        Quat([0, 1, 2, 3].map(|i| self.0[i] - o.0[i]))
    }
}

impl Mul for Quat {
    type Output = Quat;
    fn mul(self, o: Quat) -> Quat {
        let [a1, b1, c1, d1] = self.0;
        let [a2, b2, c2, d2] = o.0;
        Quat([
            a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
            a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
            a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
            a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
        ])
    }
}

/// Inner product u* v = sum conj(u_i) v_i.
pub(crate) fn qdot(u: &[Quat], v: &[Quat]) -> Quat {
    u.iter()
        .zip(v)
        .fold(Quat::default(), |acc, (&a, &b)| acc + a.conj() * b)
}

pub(crate) fn qnorm(u: &[Quat]) -> f64 {
    u.iter().map(|q| q.norm_sqr()).sum::<f64>().sqrt()
}

/// Removes from `v` its right-projection onto each (orthonormal) vector of `basis`, twice.
pub(crate) fn qorthogonalize(v: &mut [Quat], basis: &[Vec<Quat>]) {
    for _ in 0..2 {
        for u in basis {
            let c = qdot(u, v);
            for (vi, &ui) in v.iter_mut().zip(u) {
                *vi = *vi - ui * c;
            }
        }
    }
}
