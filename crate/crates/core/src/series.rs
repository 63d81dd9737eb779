//! Truncated power series in `r` with exact rational coefficients.
//!
//! The second half of this module re-derives, coefficient by coefficient and
//! without floating point, the two sign arguments that make `Y = |grad log K_3|^2`
//! a concave function of `X = d/dt log K_3`:
//!
//! * `2 r^2 cosh r - r sinh r - cosh r sinh^2 r` has Maclaurin coefficients
//!   `((32k^2 - 24k + 1) - 9^k) / (4 (2k)!)` at `r^{2k}`, all negative for `k >= 3`;
//! * `4 sinh^4 r + 2 r^4 cosh^2 r + r^4 - 3 r cosh r sinh^3 r - 3 r^2 sinh^2 r
//!   - r^3 sinh r cosh r` has coefficients
//!   `2^{2k-3} (-(3k-8) 2^{2k-1} + 8k^4 - 28k^3 + 16k^2 + 4k - 16) / (2k)!`,
//!   all negative for `k >= 5`.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::SCHEMA_VERSION;

/// Default truncation order for the sign verifications (`k <= 200`).
pub const DEFAULT_ORDER: usize = 400;
/// Default upper `k` for the integer domination chains.
pub const DEFAULT_DOMINANCE_BOUND: u64 = 200;
/// Largest order accepted by the verification entry points.
pub const MAX_ORDER: usize = 4000;

/// Declared symmetry of a series: only even or only odd powers present.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn times(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }

    fn admits(self, degree: usize) -> bool {
        match self {
            Parity::Even => degree.is_multiple_of(2),
            Parity::Odd => degree % 2 == 1,
        }
    }
}

/// Elementary series available from [`RationalSeries::basic`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasicKind {
    Sinh,
    Cosh,
    /// The monomial `r^m`.
    Power(usize),
}

/// `sum_{i <= order} c_i r^i` with exact rational `c_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalSeries {
    coeffs: Vec<BigRational>,
    parity: Option<Parity>,
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl RationalSeries {
    /// Builds a series from its coefficients; `order = coeffs.len() - 1`.
    ///
    /// A declared parity is checked against the coefficients.
    pub fn from_coeffs(coeffs: Vec<BigRational>, parity: Option<Parity>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::usage("a series needs at least one coefficient"));
        }
        if let Some(p) = parity {
            if let Some(i) = coeffs
                .iter()
                .enumerate()
                .position(|(i, c)| !p.admits(i) && !c.is_zero())
            {
                return Err(Error::usage(format!(
                    "coefficient of r^{i} is nonzero in a series declared {p:?}"
                )));
            }
        }
        Ok(Self { coeffs, parity })
    }

    pub fn zero(order: usize) -> Self {
        Self {
            coeffs: vec![BigRational::zero(); order + 1],
            parity: None,
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        s.coeffs[0] = BigRational::one();
        s.parity = Some(Parity::Even);
        s
    }

    /// Exact Maclaurin series of `sinh r`, `cosh r` or `r^m` through `r^order`.
    pub fn basic(kind: BasicKind, order: usize) -> Self {
        match kind {
            BasicKind::Sinh => Self::sinh_scaled(1, order),
            BasicKind::Cosh => Self::cosh_scaled(1, order),
            BasicKind::Power(m) => {
                let mut s = Self::zero(order);
                if m <= order {
                    s.coeffs[m] = BigRational::one();
                }
                s.parity = Some(if m % 2 == 0 { Parity::Even } else { Parity::Odd });
                s
            }
        }
    }

    /// `sinh(a r)`.
    pub fn sinh_scaled(a: i64, order: usize) -> Self {
        Self::hyperbolic(a, order, Parity::Odd)
    }

    /// `cosh(a r)`.
    pub fn cosh_scaled(a: i64, order: usize) -> Self {
        Self::hyperbolic(a, order, Parity::Even)
    }

    fn hyperbolic(a: i64, order: usize, parity: Parity) -> Self {
        let a = BigInt::from(a);
        let mut coeffs = vec![BigRational::zero(); order + 1];
        let mut fact = BigInt::one();
        let mut power = BigInt::one();
        for (i, c) in coeffs.iter_mut().enumerate() {
            if i > 0 {
                fact *= BigInt::from(i);
                power *= &a;
            }
            if parity.admits(i) {
                *c = BigRational::new(power.clone(), fact.clone());
            }
        }
        Self {
            coeffs,
            parity: Some(parity),
        }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn parity(&self) -> Option<Parity> {
        self.parity
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    /// Coefficient of `r^i` (zero beyond the truncation order).
    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    /// Drops every coefficient above `order`.
    pub fn truncate(&self, order: usize) -> Self {
        let keep = (order + 1).min(self.coeffs.len());
        Self {
            coeffs: self.coeffs[..keep].to_vec(),
            parity: self.parity,
        }
    }

    pub fn scale(&self, factor: &BigRational) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * factor).collect(),
            parity: self.parity,
        }
    }

    /// Multiplies by `r^m`, keeping the truncation order.
    pub fn shift_up(&self, m: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); self.coeffs.len()];
        for (i, c) in self.coeffs.iter().enumerate() {
            if i + m < coeffs.len() {
                coeffs[i + m] = c.clone();
            }
        }
        let parity = self
            .parity
            .map(|p| if m.is_multiple_of(2) { p } else { p.times(Parity::Odd) });
        Self { coeffs, parity }
    }

    /// Divides by `r^m`; the first `m` coefficients must vanish. The order drops by `m`.
    pub fn shift_down(&self, m: usize) -> Result<Self> {
        if m > self.order() {
            return Err(Error::usage("cannot divide a series by a power above its order"));
        }
        if let Some(i) = self.coeffs[..m].iter().position(|c| !c.is_zero()) {
            return Err(Error::domain(format!(
                "coefficient of r^{i} is nonzero; not divisible by r^{m}"
            )));
        }
        let parity = self
            .parity
            .map(|p| if m.is_multiple_of(2) { p } else { p.times(Parity::Odd) });
        Ok(Self {
            coeffs: self.coeffs[m..].to_vec(),
            parity,
        })
    }

    /// Cauchy product truncated at `min(order(a), order(b))`.
    ///
    /// Coefficients are brought to a common denominator per operand so the
    /// inner loop runs on integers.
    pub fn mul(&self, other: &Self) -> Self {
        let order = self.order().min(other.order());
        let (na, da) = common_denominator(&self.coeffs[..=order]);
        let (nb, db) = common_denominator(&other.coeffs[..=order]);
        let den = da * db;
        let parity = match (self.parity, other.parity) {
            (Some(p), Some(q)) => Some(p.times(q)),
            _ => None,
        };
        let coeffs = (0..=order)
            .map(|k| {
                if parity.is_some_and(|p| !p.admits(k)) {
                    return BigRational::zero();
                }
                let mut acc = BigInt::zero();
                for i in 0..=k {
                    let (x, y) = (&na[i], &nb[k - i]);
                    if !x.is_zero() && !y.is_zero() {
                        acc += x * y;
                    }
                }
                BigRational::new(acc, den.clone())
            })
            .collect();
        Self { coeffs, parity }
    }

    /// Truncated multiplicative inverse; needs a nonzero constant term.
    pub fn reciprocal(&self) -> Result<Self> {
        let a0 = &self.coeffs[0];
        if a0.is_zero() {
            return Err(Error::domain("series with zero constant term has no reciprocal"));
        }
        let inv0 = a0.recip();
        let mut out: Vec<BigRational> = Vec::with_capacity(self.coeffs.len());
        out.push(inv0.clone());
        for k in 1..self.coeffs.len() {
            let mut acc = BigRational::zero();
            for i in 1..=k {
                if !self.coeffs[i].is_zero() && !out[k - i].is_zero() {
                    acc += &self.coeffs[i] * &out[k - i];
                }
            }
            out.push(-acc * &inv0);
        }
        let parity = match self.parity {
            Some(Parity::Even) => Some(Parity::Even),
            _ => None,
        };
        Ok(Self { coeffs: out, parity })
    }

    /// `self / other` via the truncated reciprocal of `other`.
    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.reciprocal()?))
    }

    /// Evaluates the truncated polynomial at `x` in double precision.
    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + c.to_f64().unwrap_or(f64::NAN))
    }

    fn combine(&self, other: &Self, f: impl Fn(&BigRational, &BigRational) -> BigRational) -> Self {
        let order = self.order().min(other.order());
        let coeffs = (0..=order).map(|i| f(&self.coeffs[i], &other.coeffs[i])).collect();
        let parity = if self.parity == other.parity { self.parity } else { None };
        Self { coeffs, parity }
    }
}

fn common_denominator(coeffs: &[BigRational]) -> (Vec<BigInt>, BigInt) {
    let den = coeffs
        .iter()
        .filter(|c| !c.is_zero())
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let nums = coeffs
        .iter()
        .map(|c| {
            if c.is_zero() {
                BigInt::zero()
            } else {
                c.numer() * (&den / c.denom())
            }
        })
        .collect();
    (nums, den)
}

impl Add for &RationalSeries {
    type Output = RationalSeries;
    fn add(self, rhs: &RationalSeries) -> RationalSeries {
        self.combine(rhs, |a, b| a + b)
    }
}

impl Sub for &RationalSeries {
    type Output = RationalSeries;
    fn sub(self, rhs: &RationalSeries) -> RationalSeries {
        self.combine(rhs, |a, b| a - b)
    }
}

impl Mul for &RationalSeries {
    type Output = RationalSeries;
    fn mul(self, rhs: &RationalSeries) -> RationalSeries {
        RationalSeries::mul(self, rhs)
    }
}

impl Neg for &RationalSeries {
    type Output = RationalSeries;
    fn neg(self) -> RationalSeries {
        self.scale(&rat(-1))
    }
}

// ---------------------------------------------------------------------------
// Sign verification reports

fn serialize_bigint<S: Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    fn of(v: &BigInt) -> Self {
        if v.is_negative() {
            Sign::Negative
        } else if v.is_zero() {
            Sign::Zero
        } else {
            Sign::Positive
        }
    }
}

/// One `r^{2k}` coefficient of a sign argument, in the unreduced printed form
/// `coefficient_numerator / coefficient_denominator`.
#[derive(Debug, Clone, Serialize)]
pub struct CoefficientRow {
    pub k: u64,
    /// The integer whose sign decides the coefficient's sign.
    #[serde(serialize_with = "serialize_bigint")]
    pub inner: BigInt,
    #[serde(serialize_with = "serialize_bigint")]
    pub coefficient_numerator: BigInt,
    #[serde(serialize_with = "serialize_bigint")]
    pub coefficient_denominator: BigInt,
    pub sign: Sign,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SignReport {
    pub schema_version: u32,
    pub argument: &'static str,
    pub order: usize,
    pub passed: bool,
    pub rows: Vec<CoefficientRow>,
}

fn check_order(order: usize, min: usize) -> Result<()> {
    if order < min {
        return Err(Error::usage(format!("order must be >= {min}, got {order}")));
    }
    if order > MAX_ORDER {
        return Err(Error::usage(format!("order must be <= {MAX_ORDER}, got {order}")));
    }
    Ok(())
}

fn ensure_vanishing_below(series: &RationalSeries, first_k: usize) -> Result<()> {
    for (i, c) in series.coeffs().iter().enumerate() {
        if (i % 2 == 1 || i < 2 * first_k) && !c.is_zero() {
            return Err(Error::VerificationFailure {
                k: (i / 2) as u64,
                reason: format!("coefficient of r^{i} is {c}, expected 0"),
            });
        }
    }
    Ok(())
}

/// `2 r^2 cosh r - r sinh r - (cosh 3r - cosh r) / 4`, the numerator of
/// `r^2 Z'' + r Z' - Z` after writing `cosh r sinh^2 r` as a sum of cosines.
pub fn first_argument_series(order: usize) -> RationalSeries {
    let cosh = RationalSeries::cosh_scaled(1, order);
    let sinh = RationalSeries::sinh_scaled(1, order);
    let cosh3 = RationalSeries::cosh_scaled(3, order);
    let a = cosh.shift_up(2).scale(&rat(2));
    let b = sinh.shift_up(1);
    let c = (&cosh3 - &cosh).scale(&BigRational::new(BigInt::one(), BigInt::from(4)));
    &(&a - &b) - &c
}

/// The same function in product form, `2 r^2 cosh r - r sinh r - cosh r sinh^2 r`.
pub fn first_argument_product_series(order: usize) -> RationalSeries {
    let cosh = RationalSeries::cosh_scaled(1, order);
    let sinh = RationalSeries::sinh_scaled(1, order);
    let a = cosh.shift_up(2).scale(&rat(2));
    let b = sinh.shift_up(1);
    let c = cosh.mul(&sinh.mul(&sinh));
    &(&a - &b) - &c
}

/// Integer `(32k^2 - 24k + 1) - 9^k`.
pub fn first_argument_inner(k: u64) -> BigInt {
    let kk = BigInt::from(k);
    BigInt::from(32) * &kk * &kk - BigInt::from(24) * &kk + 1 - Pow::pow(BigInt::from(9), k)
}

/// Checks the first sign argument through `r^order`.
pub fn verify_first_sign_argument(order: usize) -> Result<SignReport> {
    check_order(order, 6)?;
    let series = first_argument_series(order);
    let product = first_argument_product_series(order);
    if let Some(i) = (0..=order).find(|&i| series.coeff(i) != product.coeff(i)) {
        return Err(Error::VerificationFailure {
            k: (i / 2) as u64,
            reason: format!("product and sum forms differ at r^{i}"),
        });
    }
    ensure_vanishing_below(&series, 3)?;

    let mut rows = Vec::new();
    for k in 3..=(order / 2) as u64 {
        let inner = first_argument_inner(k);
        let den = BigInt::from(4) * factorial(2 * k);
        let expected = BigRational::new(inner.clone(), den.clone());
        let actual = series.coeff(2 * k as usize);
        if actual != expected {
            return Err(Error::VerificationFailure {
                k,
                reason: format!("coefficient {actual} differs from closed form {expected}"),
            });
        }
        let sign = Sign::of(&inner);
        if sign != Sign::Negative {
            return Err(Error::VerificationFailure {
                k,
                reason: format!("coefficient {actual} is not negative"),
            });
        }
        rows.push(CoefficientRow {
            k,
            coefficient_numerator: inner.clone(),
            inner,
            coefficient_denominator: den,
            sign,
            pass: true,
        });
    }
    Ok(SignReport {
        schema_version: SCHEMA_VERSION,
        argument: "first",
        order,
        passed: true,
        rows,
    })
}

/// Sum-of-hyperbolics form of the second numerator:
/// `cosh 4r / 2 - 2 cosh 2r + 3/2 + r^4 (cosh 2r + 1) + r^4
///  - 3r (sinh 4r / 8 - sinh 2r / 4) - (3r^2/2)(cosh 2r - 1) - (r^3/2) sinh 2r`.
pub fn second_argument_sum_series(order: usize) -> RationalSeries {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let one = RationalSeries::one(order);
    let c2 = RationalSeries::cosh_scaled(2, order);
    let c4 = RationalSeries::cosh_scaled(4, order);
    let s2 = RationalSeries::sinh_scaled(2, order);
    let s4 = RationalSeries::sinh_scaled(4, order);

    let mut acc = c4.scale(&half);
    acc = &acc - &c2.scale(&rat(2));
    acc = &acc + &one.scale(&BigRational::new(BigInt::from(3), BigInt::from(2)));
    acc = &acc + &(&c2 + &one).shift_up(4);
    acc = &acc + &one.shift_up(4);
    let bracket = &s4.scale(&BigRational::new(BigInt::one(), BigInt::from(8)))
        - &s2.scale(&BigRational::new(BigInt::one(), BigInt::from(4)));
    acc = &acc - &bracket.shift_up(1).scale(&rat(3));
    acc = &acc
        - &(&c2 - &one)
            .shift_up(2)
            .scale(&BigRational::new(BigInt::from(3), BigInt::from(2)));
    acc = &acc - &s2.shift_up(3).scale(&half);
    acc
}

/// Product form of the second numerator:
/// `4 sinh^4 r + 2 r^4 cosh^2 r + r^4 - 3 r cosh r sinh^3 r - 3 r^2 sinh^2 r - r^3 sinh r cosh r`.
pub fn second_argument_product_series(order: usize) -> RationalSeries {
    let one = RationalSeries::one(order);
    let c = RationalSeries::cosh_scaled(1, order);
    let s = RationalSeries::sinh_scaled(1, order);
    let s2 = s.mul(&s);
    let s3 = s2.mul(&s);
    let s4 = s3.mul(&s);
    let c2 = c.mul(&c);
    let cs = c.mul(&s);

    let mut acc = s4.scale(&rat(4));
    acc = &acc + &c2.shift_up(4).scale(&rat(2));
    acc = &acc + &one.shift_up(4);
    acc = &acc - &c.mul(&s3).shift_up(1).scale(&rat(3));
    acc = &acc - &s2.shift_up(2).scale(&rat(3));
    acc = &acc - &cs.shift_up(3);
    acc
}

/// Integer `-(3k-8) 2^{2k-1} + 8k^4 - 28k^3 + 16k^2 + 4k - 16`.
pub fn second_argument_inner(k: u64) -> BigInt {
    let kk = BigInt::from(k);
    let k2 = &kk * &kk;
    let k3 = &k2 * &kk;
    let k4 = &k3 * &kk;
    let pow = Pow::pow(BigInt::from(2), 2 * k - 1);
    let lead: BigInt = BigInt::from(3) * &kk - 8;
    -lead * pow + BigInt::from(8) * k4 - BigInt::from(28) * k3 + BigInt::from(16) * k2 + BigInt::from(4) * &kk - 16
}

/// Checks the second sign argument through `r^order`.
pub fn verify_second_sign_argument(order: usize) -> Result<SignReport> {
    check_order(order, 10)?;
    let sum = second_argument_sum_series(order);
    let product = second_argument_product_series(order);
    if let Some(i) = (0..=order).find(|&i| sum.coeff(i) != product.coeff(i)) {
        return Err(Error::VerificationFailure {
            k: (i / 2) as u64,
            reason: format!("product and sum forms differ at r^{i}"),
        });
    }
    ensure_vanishing_below(&sum, 5)?;

    let mut rows = Vec::new();
    for k in 5..=(order / 2) as u64 {
        let inner = second_argument_inner(k);
        let num = Pow::pow(BigInt::from(2), 2 * k - 3) * &inner;
        let den = factorial(2 * k);
        let expected = BigRational::new(num.clone(), den.clone());
        let actual = sum.coeff(2 * k as usize);
        if actual != expected {
            return Err(Error::VerificationFailure {
                k,
                reason: format!("coefficient {actual} differs from closed form {expected}"),
            });
        }
        let sign = Sign::of(&inner);
        if sign != Sign::Negative {
            return Err(Error::VerificationFailure {
                k,
                reason: format!("coefficient {actual} is not negative"),
            });
        }
        rows.push(CoefficientRow {
            k,
            inner,
            coefficient_numerator: num,
            coefficient_denominator: den,
            sign,
            pass: true,
        });
    }
    Ok(SignReport {
        schema_version: SCHEMA_VERSION,
        argument: "second",
        order,
        passed: true,
        rows,
    })
}

/// One `k` of the integer domination chains. `None` where a chain does not apply.
#[derive(Debug, Clone, Serialize)]
pub struct DominanceRow {
    pub k: u64,
    /// `32k^2 - 24k + 1 < 81k^2 <= 9^k`.
    pub first_chain: Option<bool>,
    /// `inner(k) <= -10 * 2^{2k-1} + 8k^4 < 0`.
    pub second_chain: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct DominanceReport {
    pub schema_version: u32,
    pub bound: u64,
    pub passed: bool,
    pub rows: Vec<DominanceRow>,
}

/// Checks both domination chains exactly for every `k <= bound`.
pub fn verify_dominance_inequalities(bound: u64) -> Result<DominanceReport> {
    if bound < 6 {
        return Err(Error::usage(format!("bound must be >= 6, got {bound}")));
    }
    let mut rows = Vec::new();
    for k in 3..=bound {
        let kk = BigInt::from(k);
        let first = {
            let lhs = BigInt::from(32) * &kk * &kk - BigInt::from(24) * &kk + 1;
            let mid = BigInt::from(81) * &kk * &kk;
            let rhs = Pow::pow(BigInt::from(9), k);
            lhs < mid && mid <= rhs
        };
        if !first {
            return Err(Error::VerificationFailure {
                k,
                reason: "32k^2 - 24k + 1 < 81k^2 <= 9^k fails".into(),
            });
        }
        let second = if k >= 6 {
            let pow = Pow::pow(BigInt::from(2), 2 * k - 1);
            let k4 = Pow::pow(kk.clone(), 4u32);
            let middle = -(BigInt::from(10) * &pow) + BigInt::from(8) * k4;
            let ok = second_argument_inner(k) <= middle && middle.is_negative();
            if !ok {
                return Err(Error::VerificationFailure {
                    k,
                    reason: "inner(k) <= -10 * 2^(2k-1) + 8k^4 < 0 fails".into(),
                });
            }
            Some(true)
        } else {
            None
        };
        rows.push(DominanceRow {
            k,
            first_chain: Some(true),
            second_chain: second,
        });
    }
    Ok(DominanceReport {
        schema_version: SCHEMA_VERSION,
        bound,
        passed: true,
        rows,
    })
}
