//! Odd-dimensional profiles `alpha_n` from symbolic tables.
//!
//! In terms of `alpha`, the descent relation reads
//! `alpha_{n+2} = (r alpha_n - 2t d_r alpha_n) / sinh r` with `alpha_1 = 1`.
//! Applied to monomials `t^a r^b coth^c r csch^e r` it closes over the same
//! monomial family, using `d_r csch = -csch coth` and `d_r coth = -csch^2`.
//! Every term of `alpha_n` carries at least `csch^m r`, `m = (n-1)/2`, which
//! is factored out so large radii never form `sinh r` itself.
//!
//! For `r < ODD_SERIES_SWITCH` the tables cancel badly, and `alpha_n` is summed
//! from its even power series in `r` whose coefficients are polynomials in `t`.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::{check_dimension, check_time_radius, kernel_from_alpha, log_sinh, AlphaEval, KernelEval, Method};
use crate::error::{Error, Result};
use crate::series::{BasicKind, RationalSeries};

/// Radius below which the power series replaces the tables.
pub const ODD_SERIES_SWITCH: f64 = 1.0;
/// Number of `r^{2k}` terms kept in the small-radius series.
const SERIES_TERMS: usize = 64;

/// Exponents `(a, b, c, e)` of `t^a r^b coth^c r csch^e r`.
type Key = (u32, u32, u32, u32);

#[derive(Debug, Clone, Default, PartialEq)]
pub(crate) struct Table(BTreeMap<Key, i128>);

impl Table {
    fn add(&mut self, key: Key, c: i128) {
        if c == 0 {
            return;
        }
        let e = self.0.entry(key).or_insert(0);
        *e += c;
        if *e == 0 {
            self.0.remove(&key);
        }
    }

    fn d_dr(&self) -> Table {
        let mut out = Table::default();
        for (&(a, b, c, e), &k) in &self.0 {
            if b > 0 {
                out.add((a, b - 1, c, e), k * b as i128);
            }
            if c > 0 {
                out.add((a, b, c - 1, e + 2), -k * c as i128);
            }
            if e > 0 {
                out.add((a, b, c + 1, e), -k * e as i128);
            }
        }
        out
    }

    fn d_dt(&self) -> Table {
        let mut out = Table::default();
        for (&(a, b, c, e), &k) in &self.0 {
            if a > 0 {
                out.add((a - 1, b, c, e), k * a as i128);
            }
        }
        out
    }

    /// `csch r * (r f - 2t f')`.
    fn descend(&self) -> Table {
        let mut out = Table::default();
        for (&(a, b, c, e), &k) in &self.0 {
            out.add((a, b + 1, c, e + 1), k);
        }
        for (&(a, b, c, e), &k) in &self.d_dr().0 {
            out.add((a + 1, b, c, e + 1), -2 * k);
        }
        out
    }

    fn min_csch_power(&self) -> u32 {
        self.0.keys().map(|k| k.3).min().unwrap_or(0)
    }

    fn divide_csch(&self, m: u32) -> Table {
        Table(self.0.iter().map(|(&(a, b, c, e), &k)| ((a, b, c, e - m), k)).collect())
    }

    fn terms(&self) -> impl Iterator<Item = ([u32; 4], i128)> + '_ {
        self.0.iter().map(|(&(a, b, c, e), &v)| ([a, b, c, e], v))
    }

    fn eval(&self, t: f64, r: f64, coth: f64, csch: f64) -> f64 {
        self.0
            .iter()
            .map(|(&(a, b, c, e), &k)| {
                k as f64 * t.powi(a as i32) * r.powi(b as i32) * coth.powi(c as i32) * csch.powi(e as i32)
            })
            .sum()
    }
}

/// Per-dimension data: `alpha_n = csch^m r * P`, with `P`, `dP/dr`, `dP/dt`,
/// and the small-radius series.
struct OddProfile {
    m: u32,
    alpha: Table,
    p: Table,
    p_r: Table,
    p_t: Table,
    /// `series[k][a]` is the coefficient of `t^a r^{2k}`.
    series: Vec<Vec<f64>>,
}

type Poly = Vec<BigRational>;

fn poly_axpy(acc: &mut Poly, c: &BigRational, x: &Poly, shift: usize) {
    if acc.len() < x.len() + shift {
        acc.resize(x.len() + shift, BigRational::zero());
    }
    for (i, xi) in x.iter().enumerate() {
        acc[i + shift] += c * xi;
    }
}

fn profiles() -> &'static Vec<OddProfile> {
    static TABLES: OnceLock<Vec<OddProfile>> = OnceLock::new();
    TABLES.get_or_init(build_profiles)
}

fn build_profiles() -> Vec<OddProfile> {
    let steps = (super::MAX_ODD_DIM - 1) / 2;
    let order = 2 * (SERIES_TERMS + steps);

    // r / sinh r as a series in r^2
    let sinh_over_r = RationalSeries::basic(BasicKind::Sinh, order + 1)
        .shift_down(1)
        .expect("sinh r vanishes at 0");
    let r_over_sinh = sinh_over_r.reciprocal().expect("sinh r / r is 1 at 0");
    let c: Vec<BigRational> = (0..=order / 2).map(|l| r_over_sinh.coeff(2 * l)).collect();

    let mut table = Table::default();
    table.add((0, 0, 0, 0), 1);
    let mut series: Vec<Poly> = vec![vec![BigRational::from_integer(BigInt::from(1))]];
    series.resize(SERIES_TERMS + steps + 1, Vec::new());

    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        table = table.descend();

        // B_k = sum_{i+l=k} (A_i - 4t (i+1) A_{i+1}) c_l
        let len = series.len() - 1;
        let inner: Vec<Poly> = (0..len)
            .map(|i| {
                let mut p = series[i].clone();
                let f = BigRational::from_integer(BigInt::from(-4 * (i as i64 + 1)));
                poly_axpy(&mut p, &f, &series[i + 1], 1);
                p
            })
            .collect();
        series = (0..len)
            .map(|k| {
                let mut acc = Poly::new();
                for i in 0..=k {
                    poly_axpy(&mut acc, &c[k - i], &inner[i], 0);
                }
                acc
            })
            .collect();

        let m = table.min_csch_power();
        let p = table.divide_csch(m);
        out.push(OddProfile {
            m,
            p_r: p.d_dr(),
            p_t: p.d_dt(),
            p,
            alpha: table.clone(),
            series: series
                .iter()
                .take(SERIES_TERMS)
                .map(|poly| poly.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect())
                .collect(),
        });
    }
    out
}

fn profile(n: usize) -> Result<&'static OddProfile> {
    check_dimension(n)?;
    if n.is_multiple_of(2) {
        return Err(Error::usage(format!("dimension {n} is even; use the even kernel")));
    }
    Ok(&profiles()[(n - 3) / 2])
}

/// Symbolic table of `alpha_n`: integer coefficients of
/// `t^a r^b coth^c r csch^e r`, keyed by `[a, b, c, e]`.
pub fn alpha_table(n: usize) -> Result<Vec<([u32; 4], i128)>> {
    Ok(profile(n)?.alpha.terms().collect())
}

fn eval_poly(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
}

fn eval_poly_dt(coeffs: &[f64], t: f64) -> f64 {
    coeffs
        .iter()
        .enumerate()
        .skip(1)
        .rev()
        .fold(0.0, |acc, (a, c)| acc * t + a as f64 * c)
}

pub(crate) fn alpha_odd(n: usize, t: f64, r: f64) -> Result<AlphaEval> {
    let prof = profile(n)?;
    check_time_radius(t, r)?;

    let (log_alpha, dr_log_alpha, dt_log_alpha) = if r < ODD_SERIES_SWITCH {
        let r2 = r * r;
        let mut val = 0.0;
        let mut dr = 0.0;
        let mut dt = 0.0;
        for (k, poly) in prof.series.iter().enumerate().rev() {
            val = val * r2 + eval_poly(poly, t);
            dt = dt * r2 + eval_poly_dt(poly, t);
            if k > 0 {
                dr = dr * r2 + 2.0 * k as f64 * eval_poly(poly, t);
            }
        }
        // dr currently holds sum 2k A_k r^{2k-2}
        (val.ln(), dr * r / val, dt / val)
    } else {
        let coth = 1.0 / r.tanh();
        let csch = if r > 700.0 { 0.0 } else { 1.0 / r.sinh() };
        let p = prof.p.eval(t, r, coth, csch);
        let p_r = prof.p_r.eval(t, r, coth, csch);
        let p_t = prof.p_t.eval(t, r, coth, csch);
        let m = prof.m as f64;
        (-m * log_sinh(r) + p.ln(), -m * coth + p_r / p, p_t / p)
    };
    if !log_alpha.is_finite() {
        return Err(Error::NumericalAccuracy {
            achieved: f64::INFINITY,
            target: 0.0,
        });
    }
    Ok(AlphaEval {
        dim: n,
        t,
        r,
        alpha: log_alpha.exp(),
        log_alpha,
        dr_log_alpha,
        dt_log_alpha,
    })
}

/// Odd-dimensional kernel, `3 <= n <= 11`, from the symbolic tables.
pub fn kernel_odd(n: usize, t: f64, r: f64) -> Result<KernelEval> {
    let a = alpha_odd(n, t, r)?;
    Ok(kernel_from_alpha(&a, Method::OddRecursion))
}
