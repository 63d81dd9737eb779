//! Truncated Taylor jets `sum_{i<N} c_i h^i` for forward-mode derivatives of
//! univariate compositions. `c_i = f^{(i)}(x0) / i!`.

use std::ops::{Add, Mul, Sub};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet<const N: usize>(pub [f64; N]);

impl<const N: usize> Jet<N> {
    pub fn constant(c: f64) -> Self {
        let mut a = [0.0; N];
        a[0] = c;
        Self(a)
    }

    /// The identity map at `x0`.
    pub fn variable(x0: f64) -> Self {
        let mut a = [0.0; N];
        a[0] = x0;
        if N > 1 {
            a[1] = 1.0;
        }
        Self(a)
    }

    pub fn value(&self) -> f64 {
        self.0[0]
    }

    /// `i`-th derivative at the expansion point.
    pub fn derivative(&self, i: usize) -> f64 {
        let fact: f64 = (1..=i).map(|k| k as f64).product();
        self.0[i] * fact
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.map(|c| c * s))
    }

    pub fn add_constant(&self, c: f64) -> Self {
        let mut a = self.0;
        a[0] += c;
        Self(a)
    }

    pub fn recip(&self) -> Self {
        let a = &self.0;
        let mut b = [0.0; N];
        b[0] = 1.0 / a[0];
        for k in 1..N {
            let s: f64 = (1..=k).map(|i| a[i] * b[k - i]).sum();
            b[k] = -s * b[0];
        }
        Self(b)
    }

    pub fn exp(&self) -> Self {
        let a = &self.0;
        let mut b = [0.0; N];
        b[0] = a[0].exp();
        for k in 1..N {
            let s: f64 = (1..=k).map(|i| i as f64 * a[i] * b[k - i]).sum();
            b[k] = s / k as f64;
        }
        Self(b)
    }

    pub fn ln(&self) -> Self {
        let a = &self.0;
        let mut b = [0.0; N];
        b[0] = a[0].ln();
        for k in 1..N {
            let s: f64 = (1..k).map(|i| i as f64 * b[i] * a[k - i]).sum();
            b[k] = (a[k] - s / k as f64) / a[0];
        }
        Self(b)
    }

    pub fn powf(&self, p: f64) -> Self {
        let a = &self.0;
        let mut b = [0.0; N];
        b[0] = a[0].powf(p);
        for k in 1..N {
            let s: f64 = (1..=k).map(|i| (p * i as f64 - (k - i) as f64) * a[i] * b[k - i]).sum();
            b[k] = s / (k as f64 * a[0]);
        }
        Self(b)
    }

    /// Antiderivative taking the value `c0` at the expansion point; the top
    /// coefficient of `self` is dropped.
    pub fn integrate(&self, c0: f64) -> Self {
        let mut b = [0.0; N];
        b[0] = c0;
        for (k, bk) in b.iter_mut().enumerate().skip(1) {
            *bk = self.0[k - 1] / k as f64;
        }
        Self(b)
    }
}

impl<const N: usize> Add for Jet<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut a = self.0;
        for (x, y) in a.iter_mut().zip(rhs.0) {
            *x += y;
        }
        Self(a)
    }
}

impl<const N: usize> Sub for Jet<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut a = self.0;
        for (x, y) in a.iter_mut().zip(rhs.0) {
            *x -= y;
        }
        Self(a)
    }
}

impl<const N: usize> Mul for Jet<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut c = [0.0; N];
        for (k, ck) in c.iter_mut().enumerate() {
            *ck = (0..=k).map(|i| self.0[i] * rhs.0[k - i]).sum();
        }
        Self(c)
    }
}
