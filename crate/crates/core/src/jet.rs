//! Truncated Taylor arithmetic for analytic derivatives of corpus functions.
//!
//! A `Jet` stores normalised Taylor coefficients `c_k = f^{(k)}(x0) / k!`
//! up to a fixed length.

use std::ops::{Add, Mul, Neg, Sub};

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    c: Vec<f64>,
}

impl Jet {
    /// Constant `value` with `len` coefficients.
    pub fn constant(value: f64, len: usize) -> Self {
        let mut c = vec![0.0; len.max(1)];
        c[0] = value;
        Self { c }
    }

    /// The identity function expanded at `x0`.
    pub fn variable(x0: f64, len: usize) -> Self {
        let mut j = Self::constant(x0, len);
        if j.c.len() > 1 {
            j.c[1] = 1.0;
        }
        j
    }

    pub fn len(&self) -> usize {
        self.c.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn value(&self) -> f64 {
        self.c[0]
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.c
    }

    /// `f^{(k)}(x0)`.
    pub fn derivative(&self, k: usize) -> f64 {
        let mut fact = 1.0;
        for i in 2..=k {
            fact *= i as f64;
        }
        self.c.get(k).copied().unwrap_or(0.0) * fact
    }

    /// All derivatives `f^{(k)}(x0)` for `k < len`.
    pub fn derivatives(&self) -> Vec<f64> {
        let mut fact = 1.0;
        self.c
            .iter()
            .enumerate()
            .map(|(k, c)| {
                if k > 1 {
                    fact *= k as f64;
                }
                c * fact
            })
            .collect()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            c: self.c.iter().map(|c| c * s).collect(),
        }
    }

    pub fn offset(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.c[0] += s;
        out
    }

    pub fn exp(&self) -> Self {
        let n = self.len();
        let mut e = vec![0.0; n];
        e[0] = self.c[0].exp();
        for k in 1..n {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += j as f64 * self.c[j] * e[k - j];
            }
            e[k] = acc / k as f64;
        }
        Self { c: e }
    }

    /// Natural logarithm; requires a positive value.
    pub fn ln(&self) -> Self {
        let n = self.len();
        let a0 = self.c[0];
        let mut l = vec![0.0; n];
        l[0] = a0.ln();
        for k in 1..n {
            let mut acc = 0.0;
            for j in 1..k {
                acc += j as f64 * l[j] * self.c[k - j];
            }
            l[k] = (self.c[k] - acc / k as f64) / a0;
        }
        Self { c: l }
    }

    /// Real power; requires a positive value.
    pub fn powf(&self, p: f64) -> Self {
        let n = self.len();
        let a0 = self.c[0];
        let mut y = vec![0.0; n];
        y[0] = a0.powf(p);
        for k in 1..n {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += ((p + 1.0) * j as f64 - k as f64) * self.c[j] * y[k - j];
            }
            y[k] = acc / (k as f64 * a0);
        }
        Self { c: y }
    }

    /// `(sin f, cos f)`.
    pub fn sin_cos(&self) -> (Self, Self) {
        let n = self.len();
        let mut s = vec![0.0; n];
        let mut c = vec![0.0; n];
        (s[0], c[0]) = self.c[0].sin_cos();
        for k in 1..n {
            let mut acc_s = 0.0;
            let mut acc_c = 0.0;
            for j in 1..=k {
                let t = j as f64 * self.c[j];
                acc_s += t * c[k - j];
                acc_c -= t * s[k - j];
            }
            s[k] = acc_s / k as f64;
            c[k] = acc_c / k as f64;
        }
        (Self { c: s }, Self { c })
    }
}

impl Add for &Jet {
    type Output = Jet;
    fn add(self, rhs: &Jet) -> Jet {
        Jet {
            c: self.c.iter().zip(&rhs.c).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Jet {
    type Output = Jet;
    fn sub(self, rhs: &Jet) -> Jet {
        Jet {
            c: self.c.iter().zip(&rhs.c).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Neg for &Jet {
    type Output = Jet;
    fn neg(self) -> Jet {
        self.scale(-1.0)
    }
}

impl Mul for &Jet {
    type Output = Jet;
    fn mul(self, rhs: &Jet) -> Jet {
        let n = self.len().min(rhs.len());
        let mut c = vec![0.0; n];
        for (k, ck) in c.iter_mut().enumerate() {
            for j in 0..=k {
                *ck += self.c[j] * rhs.c[k - j];
            }
        }
        Jet { c }
    }
}
