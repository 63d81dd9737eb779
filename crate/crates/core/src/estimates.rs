//! Gradient estimates for positive solutions of the heat equation on `H^n`.
//!
//! Each estimate is a predicate on a [`SolutionSample`] returning a signed
//! slack (right-hand side minus left-hand side, in the estimate's own form).
//! An estimate holds when `slack >= -tol * (1 + |rhs|)`.
//!
//! Dimension-dependent constants: `m = n` for odd `n` and `m = n + 1` for even
//! `n`. The comparison estimates (Li-Yau, Yau, Bakry-Qian, Bakry's `Phi`) take a
//! lower Ricci bound `-k`, which defaults to `k = n - 1`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernel::{concavity_brackets, z_derivative, z_function, z_over_r, KernelEval};

/// Radicands down to `-RADICAND_CLAMP * (1 + scale)` are treated as zero.
pub const RADICAND_CLAMP: f64 = 1e-12;
/// Within this distance of `x = 1` the limit value of `Phi` is used.
pub const PHI_SEAM: f64 = 1e-12;

/// `|grad log u|^2` and `d/dt log u` at one space-time point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolutionSample {
    pub t: f64,
    pub grad_sq: f64,
    pub dt_log: f64,
    pub dim: usize,
}

impl SolutionSample {
    pub fn new(dim: usize, t: f64, grad_sq: f64, dt_log: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::domain(format!("sample time must be positive, got {t}")));
        }
        if !(grad_sq >= 0.0 && grad_sq.is_finite()) {
            return Err(Error::domain(format!("grad_sq must be nonnegative, got {grad_sq}")));
        }
        if !dt_log.is_finite() {
            return Err(Error::domain("dt_log must be finite"));
        }
        if dim < 2 {
            return Err(Error::usage(format!("dimension must be at least 2, got {dim}")));
        }
        Ok(Self {
            t,
            grad_sq,
            dt_log,
            dim,
        })
    }

    /// The kernel itself as a solution, observed at distance `r` from its center.
    pub fn from_kernel(k: &KernelEval) -> Self {
        Self {
            t: k.t,
            grad_sq: k.dr_log_k * k.dr_log_k,
            dt_log: k.dt_log_k,
            dim: k.dim,
        }
    }
}

/// Every estimate in the catalogue with its parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "tag", rename_all = "snake_case")]
pub enum EstimateId {
    LiYau {
        alpha: f64,
        k: Option<f64>,
    },
    BakryPhi {
        k: Option<f64>,
    },
    Yau {
        k: Option<f64>,
    },
    BakryQian {
        k: Option<f64>,
    },
    SharpH3,
    SharpH3Simple,
    LinearizedH3 {
        r0: f64,
    },
    GeneralOdd,
    GeneralEven,
    BetaFamily {
        beta: f64,
    },
    /// `odd_constant` applies `m = n` even in even dimensions.
    DtLower {
        odd_constant: bool,
    },
    Harnack,
}

fn check_k(k: Option<f64>, positive: bool) -> Result<()> {
    match k {
        Some(k) if !k.is_finite() || k < 0.0 || (positive && k == 0.0) => Err(Error::usage(format!(
            "Ricci constant k must be {}, got {k}",
            if positive { "> 0" } else { ">= 0" }
        ))),
        _ => Ok(()),
    }
}

impl EstimateId {
    pub fn li_yau(alpha: f64, k: Option<f64>) -> Result<Self> {
        let e = Self::LiYau { alpha, k };
        e.validate()?;
        Ok(e)
    }

    pub fn linearized_h3(r0: f64) -> Result<Self> {
        let e = Self::LinearizedH3 { r0 };
        e.validate()?;
        Ok(e)
    }

    pub fn beta_family(beta: f64) -> Result<Self> {
        let e = Self::BetaFamily { beta };
        e.validate()?;
        Ok(e)
    }

    /// The general estimate matching the parity of `n`.
    pub fn general_for(n: usize) -> Self {
        if n % 2 == 1 {
            Self::GeneralOdd
        } else {
            Self::GeneralEven
        }
    }

    /// Checks the parameter ranges.
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::LiYau { alpha, k } => {
                check_k(k, false)?;
                if !alpha.is_finite() || alpha < 1.0 {
                    return Err(Error::usage(format!("alpha must be > 1, got {alpha}")));
                }
                if alpha == 1.0 && k != Some(0.0) {
                    return Err(Error::usage("alpha = 1 is only allowed with k = 0"));
                }
                Ok(())
            }
            Self::BakryPhi { k } | Self::Yau { k } | Self::BakryQian { k } => check_k(k, true),
            Self::LinearizedH3 { r0 } if !(r0 >= 0.0 && r0.is_finite()) => {
                Err(Error::usage(format!("r0 must be >= 0, got {r0}")))
            }
            Self::BetaFamily { beta } if !(0.0..1.0).contains(&beta) => {
                Err(Error::usage(format!("beta must lie in [0, 1), got {beta}")))
            }
            _ => Ok(()),
        }
    }

    /// Whether the estimate is stated for dimension `n`.
    pub fn applies_to(&self, n: usize) -> bool {
        match self {
            Self::SharpH3 | Self::SharpH3Simple | Self::LinearizedH3 { .. } => n == 3,
            Self::GeneralOdd => n % 2 == 1,
            Self::GeneralEven => n.is_multiple_of(2),
            _ => n >= 2,
        }
    }

    /// Short kebab-case name.
    pub fn name(&self) -> &'static str {
        match self {
            Self::LiYau { .. } => "li-yau",
            Self::BakryPhi { .. } => "bakry-phi",
            Self::Yau { .. } => "yau",
            Self::BakryQian { .. } => "bakry-qian",
            Self::SharpH3 => "sharp-h3",
            Self::SharpH3Simple => "sharp-h3-simple",
            Self::LinearizedH3 { .. } => "linearized-h3",
            Self::GeneralOdd => "general-odd",
            Self::GeneralEven => "general-even",
            Self::BetaFamily { .. } => "beta-family",
            Self::DtLower { .. } => "dt-lower",
            Self::Harnack => "harnack",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub holds: bool,
    pub slack: f64,
    /// Right-hand side used to scale the tolerance.
    pub rhs: f64,
    pub estimate: EstimateId,
}

impl CheckOutcome {
    fn new(estimate: EstimateId, slack: f64, rhs: f64, tol: f64) -> Self {
        Self {
            holds: slack >= -tol * (1.0 + rhs.abs()),
            slack,
            rhs,
            estimate,
        }
    }

    /// A failed precondition, reported with the (negative) amount it fails by.
    fn violated(estimate: EstimateId, slack: f64) -> Self {
        Self {
            holds: false,
            slack,
            rhs: 0.0,
            estimate,
        }
    }
}

/// `m = n` for odd `n`, `n + 1` for even `n`.
pub fn m_constant(n: usize) -> f64 {
    if n % 2 == 1 {
        n as f64
    } else {
        n as f64 + 1.0
    }
}

fn ricci(k: Option<f64>, n: usize) -> f64 {
    k.unwrap_or((n - 1) as f64)
}

/// Square root of a radicand clamped near zero; `Err(radicand)` if it is
/// clearly negative.
fn clamped_sqrt(radicand: f64, scale: f64) -> std::result::Result<f64, f64> {
    if radicand >= 0.0 {
        Ok(radicand.sqrt())
    } else if radicand >= -RADICAND_CLAMP * (1.0 + scale.abs()) {
        Ok(0.0)
    } else {
        Err(radicand)
    }
}

/// Li-Yau: `|grad log u|^2 - alpha d_t log u <= n alpha^2 / 2t + n alpha^2 k / (2(alpha - 1))`.
pub fn li_yau_check(s: &SolutionSample, alpha: f64, k: Option<f64>, tol: f64) -> Result<CheckOutcome> {
    let id = EstimateId::li_yau(alpha, k)?;
    let n = s.dim as f64;
    let k = ricci(k, s.dim);
    let mut rhs = n * alpha * alpha / (2.0 * s.t);
    if k > 0.0 {
        rhs += n * alpha * alpha * k / (2.0 * (alpha - 1.0));
    }
    let slack = rhs - (s.grad_sq - alpha * s.dt_log);
    Ok(CheckOutcome::new(id, slack, rhs, tol))
}

/// `Phi(t, x) = (k/2) (x - 2 + 2 sqrt(1-x) coth(k t sqrt(1-x)))`, continued by
/// `cot` for `1 < x < 1 + pi^2 / (k t)^2`. Here `k` is the signed Ricci lower
/// bound, so any nonzero `k` is accepted.
pub fn bakry_phi(t: f64, x: f64, k: f64) -> Result<f64> {
    if !(t > 0.0) || !(k != 0.0 && k.is_finite()) {
        return Err(Error::domain("bakry_phi needs t > 0 and k != 0"));
    }
    let limit = 1.0 + PI * PI / (k * k * t * t);
    if !(x < limit) {
        return Err(Error::domain(format!("x = {x} is not below 1 + pi^2/(kt)^2 = {limit}")));
    }
    let d = 1.0 - x;
    let g = if d.abs() <= PHI_SEAM {
        return Ok(1.0 / t - k / 2.0);
    } else if d > 0.0 {
        let y = d.sqrt();
        y / (k * t * y).tanh()
    } else {
        let y = (-d).sqrt();
        y / (k * t * y).tan()
    };
    Ok(0.5 * k * (x - 2.0 + 2.0 * g))
}

/// `|grad log u|^2 < (n/2) Phi(t, 4 d_t log u / (n kappa))` with `Ric >= kappa = -k`.
/// `Phi` is written for the signed lower bound; feeding it `+k` on `H^n` gives a
/// bound that fails on the kernel itself.
pub fn bakry_phi_check(s: &SolutionSample, k: Option<f64>, tol: f64) -> Result<CheckOutcome> {
    let id = EstimateId::BakryPhi { k };
    id.validate()?;
    let n = s.dim as f64;
    let k = -ricci(k, s.dim);
    let x = 4.0 * s.dt_log / (n * k);
    match bakry_phi(s.t, x, k) {
        Ok(phi) => {
            let rhs = 0.5 * n * phi;
            Ok(CheckOutcome::new(id, rhs - s.grad_sq, rhs, tol))
        }
        Err(_) => Ok(CheckOutcome::violated(id, 1.0 + PI * PI / (k * k * s.t * s.t) - x)),
    }
}

/// Yau: `|grad log u|^2 - d_t log u <= n/2t + sqrt(2nk) sqrt(|grad log u|^2 + n/2t + 2nk)`.
pub fn yau_check(s: &SolutionSample, k: Option<f64>, tol: f64) -> Result<CheckOutcome> {
    let id = EstimateId::Yau { k };
    id.validate()?;
    let n = s.dim as f64;
    let k = ricci(k, s.dim);
    let rhs = n / (2.0 * s.t) + (2.0 * n * k).sqrt() * (s.grad_sq + n / (2.0 * s.t) + 2.0 * n * k).sqrt();
    Ok(CheckOutcome::new(id, rhs - (s.grad_sq - s.dt_log), rhs, tol))
}

/// Bakry-Qian: `|grad log u|^2 - d_t log u <= n/2t + sqrt(nk) sqrt(|grad log u|^2 + n/2t + nk/4)`.
pub fn bakry_qian_check(s: &SolutionSample, k: Option<f64>, tol: f64) -> Result<CheckOutcome> {
    let id = EstimateId::BakryQian { k };
    id.validate()?;
    let n = s.dim as f64;
    let k = ricci(k, s.dim);
    let rhs = n / (2.0 * s.t) + (n * k).sqrt() * (s.grad_sq + n / (2.0 * s.t) + n * k / 4.0).sqrt();
    Ok(CheckOutcome::new(id, rhs - (s.grad_sq - s.dt_log), rhs, tol))
}

/// Sum of `terms`, or zero when it is below the rounding error of the sum.
fn cancelling_sum(terms: &[f64]) -> f64 {
    let sum: f64 = terms.iter().sum();
    let size: f64 = terms.iter().map(|x| x.abs()).sum();
    if sum.abs() <= 4.0 * f64::EPSILON * size {
        0.0
    } else {
        sum
    }
}

fn h3_radicand(t: f64, dt_log: f64) -> f64 {
    cancelling_sum(&[dt_log, 1.5 / t, 1.0])
}

fn domain_error(what: &str, radicand: f64) -> Error {
    Error::domain(format!(
        "{what}: negative radicand {radicand}; the lower bound on d_t log u fails"
    ))
}

/// `S + Z(2tS)` with `S = sqrt(d_t log u + 3/2t + 1)`.
pub fn sharp_h3_bound(t: f64, dt_log: f64) -> Result<f64> {
    let s = clamped_sqrt(h3_radicand(t, dt_log), 1.5 / t + 1.0).map_err(|r| domain_error("sharp H^3 bound", r))?;
    Ok(s + z_function(2.0 * t * s))
}

/// `S + 1`, using `Z < 1`.
pub fn sharp_h3_simple_bound(t: f64, dt_log: f64) -> Result<f64> {
    let s = clamped_sqrt(h3_radicand(t, dt_log), 1.5 / t + 1.0).map_err(|r| domain_error("simple H^3 bound", r))?;
    Ok(s + 1.0)
}

fn norm_check(id: EstimateId, s: &SolutionSample, bound: Result<f64>, radicand: f64, tol: f64) -> Result<CheckOutcome> {
    if !id.applies_to(s.dim) {
        return Err(Error::usage(format!(
            "{} does not apply in dimension {}",
            id.name(),
            s.dim
        )));
    }
    Ok(match bound {
        Ok(b) => CheckOutcome::new(id, b - s.grad_sq.sqrt(), b, tol),
        Err(_) => CheckOutcome::violated(id, radicand),
    })
}

/// `|grad log u| <= S + Z(2tS)` on `H^3`.
pub fn sharp_h3_check(s: &SolutionSample, tol: f64) -> Result<CheckOutcome> {
    let b = sharp_h3_bound(s.t, s.dt_log);
    norm_check(EstimateId::SharpH3, s, b, h3_radicand(s.t, s.dt_log), tol)
}

/// `|grad log u| <= S + 1` on `H^3`.
pub fn sharp_h3_simple_check(s: &SolutionSample, tol: f64) -> Result<CheckOutcome> {
    let b = sharp_h3_simple_bound(s.t, s.dt_log);
    norm_check(EstimateId::SharpH3Simple, s, b, h3_radicand(s.t, s.dt_log), tol)
}

/// `dY/dX` along the `H^3` kernel: `1 + 2(Z' + Z/r) t + 4 Z Z' t^2 / r`.
pub fn h3_dy_dx(t: f64, r: f64) -> f64 {
    let zr = z_over_r(r);
    let dz = z_derivative(r);
    1.0 + 2.0 * (dz + zr) * t + 4.0 * zr * dz * t * t
}

/// `d^2Y/dX^2` along the `H^3` kernel:
/// `(4t^3/r^3)(r^2 Z'' + r Z' - Z) + (8t^4/r^3)(r Z'^2 + r Z Z'' - Z Z')`.
pub fn h3_d2y_dx2(t: f64, r: f64) -> f64 {
    let (a, b) = concavity_brackets(r);
    4.0 * t.powi(3) * a + 8.0 * t.powi(4) * b
}

/// Tangent line of the concave map `X -> Y` at the kernel point with radius `r0`:
/// `|grad log u|^2 <= C (d_t log u + 3/2t + 1 - r0^2/4t^2) + (r0/2t + Z(r0))^2`.
pub fn linearized_h3_check(s: &SolutionSample, r0: f64, tol: f64) -> Result<CheckOutcome> {
    let id = EstimateId::linearized_h3(r0)?;
    if !id.applies_to(s.dim) {
        return Err(Error::usage(format!(
            "linearized-h3 does not apply in dimension {}",
            s.dim
        )));
    }
    let t = s.t;
    let c = h3_dy_dx(t, r0);
    let y0 = r0 / (2.0 * t) + z_function(r0);
    let rhs = c * (h3_radicand(t, s.dt_log) - r0 * r0 / (4.0 * t * t)) + y0 * y0;
    Ok(CheckOutcome::new(id, rhs - s.grad_sq, rhs, tol))
}

fn general_radicand(n: usize, t: f64, dt_log: f64) -> f64 {
    let q = (n as f64 - 1.0) * (n as f64 - 1.0) / 4.0;
    cancelling_sum(&[dt_log, m_constant(n) / (2.0 * t), q])
}

/// `sqrt(d_t log u + m/2t + (n-1)^2/4) + (n-1)/2`.
pub fn general_h_bound(n: usize, t: f64, dt_log: f64) -> Result<f64> {
    let scale = m_constant(n) / (2.0 * t) + (n as f64 - 1.0).powi(2) / 4.0;
    let s = clamped_sqrt(general_radicand(n, t, dt_log), scale).map_err(|r| domain_error("general bound", r))?;
    Ok(s + (n as f64 - 1.0) / 2.0)
}

/// `|grad log u| <= general_h_bound` with `m` chosen by parity.
pub fn general_h_check(s: &SolutionSample, tol: f64) -> Result<CheckOutcome> {
    let id = EstimateId::general_for(s.dim);
    let b = general_h_bound(s.dim, s.t, s.dt_log);
    norm_check(id, s, b, general_radicand(s.dim, s.t, s.dt_log), tol)
}

/// `beta |grad log u|^2 - d_t log u <= m/2t + (n-1)^2 / (4(1-beta))`.
pub fn beta_family_check(s: &SolutionSample, beta: f64, tol: f64) -> Result<CheckOutcome> {
    let id = EstimateId::beta_family(beta)?;
    let n = s.dim as f64;
    let rhs = m_constant(s.dim) / (2.0 * s.t) + (n - 1.0) * (n - 1.0) / (4.0 * (1.0 - beta));
    Ok(CheckOutcome::new(id, rhs - (beta * s.grad_sq - s.dt_log), rhs, tol))
}

/// `d_t log u + m/2t + (n-1)^2/4 >= 0`; `odd_constant` forces `m = n`.
pub fn dt_lower_check(s: &SolutionSample, odd_constant: bool, tol: f64) -> CheckOutcome {
    let n = s.dim as f64;
    let m = if odd_constant { n } else { m_constant(s.dim) };
    let rhs = m / (2.0 * s.t) + (n - 1.0) * (n - 1.0) / 4.0;
    CheckOutcome::new(EstimateId::DtLower { odd_constant }, s.dt_log + rhs, rhs, tol)
}

/// `log` of the Harnack factor
/// `(t2/t1)^{m/2} exp(r^2 / 4(t2-t1) + (n-1)^2 (t2-t1)/4 + (n-1) r / 2)`.
pub fn harnack_log_factor(n: usize, t1: f64, t2: f64, r: f64) -> Result<f64> {
    if !(t1 > 0.0 && t1 < t2 && t2.is_finite()) {
        return Err(Error::usage(format!(
            "Harnack needs 0 < t1 < t2, got t1 = {t1}, t2 = {t2}"
        )));
    }
    if !(r >= 0.0) {
        return Err(Error::domain(format!("distance must be nonnegative, got {r}")));
    }
    let nf = n as f64;
    let dt = t2 - t1;
    Ok(0.5 * m_constant(n) * (t2 / t1).ln()
        + r * r / (4.0 * dt)
        + (nf - 1.0) * (nf - 1.0) * dt / 4.0
        + (nf - 1.0) * r / 2.0)
}

/// `u(t1, x1) <= harnack_factor * u(t2, x2)` for `r = d(x1, x2)`.
pub fn harnack_factor(n: usize, t1: f64, t2: f64, r: f64) -> Result<f64> {
    harnack_log_factor(n, t1, t2, r).map(f64::exp)
}

/// Dispatches a sample check by estimate.
pub fn check(estimate: &EstimateId, s: &SolutionSample, tol: f64) -> Result<CheckOutcome> {
    estimate.validate()?;
    if !estimate.applies_to(s.dim) {
        return Err(Error::usage(format!(
            "{} does not apply in dimension {}",
            estimate.name(),
            s.dim
        )));
    }
    match *estimate {
        EstimateId::LiYau { alpha, k } => li_yau_check(s, alpha, k, tol),
        EstimateId::BakryPhi { k } => bakry_phi_check(s, k, tol),
        EstimateId::Yau { k } => yau_check(s, k, tol),
        EstimateId::BakryQian { k } => bakry_qian_check(s, k, tol),
        EstimateId::SharpH3 => sharp_h3_check(s, tol),
        EstimateId::SharpH3Simple => sharp_h3_simple_check(s, tol),
        EstimateId::LinearizedH3 { r0 } => linearized_h3_check(s, r0, tol),
        EstimateId::GeneralOdd | EstimateId::GeneralEven => general_h_check(s, tol),
        EstimateId::BetaFamily { beta } => beta_family_check(s, beta, tol),
        EstimateId::DtLower { odd_constant } => Ok(dt_lower_check(s, odd_constant, tol)),
        EstimateId::Harnack => Err(Error::usage(
            "the Harnack estimate compares two points; use the Harnack suite",
        )),
    }
}
