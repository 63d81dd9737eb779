//! Heat kernels `K_n(t, r)` of `H^n` in log space.
//!
//! Every kernel is written as
//! `K_n = (4 pi t)^{-n/2} exp(-r^2/4t - (n-1)^2 t/4) alpha_n(t, r)`.
//! Odd dimensions come from exact symbolic tables for `alpha_n` produced by the
//! descent relation `K_{n+2} = -e^{-nt} / (2 pi sinh r) dK_n/dr`; even
//! dimensions from a one-dimensional integral over the hyperbolic plane kernel.

mod even;
pub mod jet;
mod odd;
pub mod special;

use serde::Serialize;

pub use even::{kernel_even, EVEN_ACCURACY_TARGET};
pub use odd::{alpha_table, kernel_odd, ODD_SERIES_SWITCH};
pub use special::{
    concavity_brackets, log_r_over_sinh, log_sinh, z_derivative, z_function, z_over_r, z_second_derivative,
};

use crate::error::{Error, Result};

/// Largest odd dimension with a kernel table.
pub const MAX_ODD_DIM: usize = 11;
/// Largest even dimension handled by quadrature.
pub const MAX_EVEN_DIM: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedFormH3,
    OddRecursion,
    EvenQuadrature,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::ClosedFormH3 => "closed_form_h3",
            Method::OddRecursion => "odd_recursion",
            Method::EvenQuadrature => "even_quadrature",
        }
    }
}

/// `log K_n` and its first partial derivatives at one `(t, r)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelEval {
    pub dim: usize,
    pub t: f64,
    pub r: f64,
    pub log_k: f64,
    pub dr_log_k: f64,
    pub dt_log_k: f64,
    pub method: Method,
}

/// `alpha_n` and its log-derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaEval {
    pub dim: usize,
    pub t: f64,
    pub r: f64,
    pub alpha: f64,
    pub log_alpha: f64,
    pub dr_log_alpha: f64,
    pub dt_log_alpha: f64,
}

pub(crate) fn check_time_radius(t: f64, r: f64) -> Result<()> {
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::domain(format!("time must be positive and finite, got {t}")));
    }
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::domain(format!("radius must be nonnegative and finite, got {r}")));
    }
    Ok(())
}

/// Checks `n` against the supported ranges: odd `3..=11`, even `2..=6`.
pub fn check_dimension(n: usize) -> Result<()> {
    let ok = if n % 2 == 1 {
        (3..=MAX_ODD_DIM).contains(&n)
    } else {
        (2..=MAX_EVEN_DIM).contains(&n)
    };
    if ok {
        Ok(())
    } else {
        Err(Error::usage(format!(
            "unsupported dimension {n}: odd dimensions 3..={MAX_ODD_DIM} and even dimensions 2..={MAX_EVEN_DIM} are available"
        )))
    }
}

/// Gaussian part `-(n/2) log(4 pi t) - r^2/4t - (n-1)^2 t/4` of `log K_n`
/// and its `r` and `t` derivatives.
fn gaussian_part(n: usize, t: f64, r: f64) -> (f64, f64, f64) {
    let nf = n as f64;
    let q = (nf - 1.0) * (nf - 1.0) / 4.0;
    let log = -0.5 * nf * (4.0 * std::f64::consts::PI * t).ln() - r * r / (4.0 * t) - q * t;
    let dr = -r / (2.0 * t);
    let dt = -nf / (2.0 * t) + r * r / (4.0 * t * t) - q;
    (log, dr, dt)
}

/// Closed-form `H^3` kernel `(4 pi t)^{-3/2} exp(-r^2/4t - t) r / sinh r`.
pub fn kernel_h3(t: f64, r: f64) -> Result<KernelEval> {
    check_time_radius(t, r)?;
    Ok(KernelEval {
        dim: 3,
        t,
        r,
        log_k: -1.5 * (4.0 * std::f64::consts::PI * t).ln() - r * r / (4.0 * t) - t + log_r_over_sinh(r),
        dr_log_k: -(r / (2.0 * t) + z_function(r)),
        dt_log_k: -1.5 / t + r * r / (4.0 * t * t) - 1.0,
        method: Method::ClosedFormH3,
    })
}

/// `K_n(t, r)` for any supported `n`; `n = 3` uses the closed form.
pub fn kernel(n: usize, t: f64, r: f64) -> Result<KernelEval> {
    check_dimension(n)?;
    match n {
        3 => kernel_h3(t, r),
        n if n % 2 == 1 => kernel_odd(n, t, r),
        n => kernel_even(n, t, r),
    }
}

/// `alpha_n(t, r)`. Odd `n` is read straight from the symbolic tables, so
/// `alpha_3 = r / sinh r` carries an exactly zero time derivative.
pub fn alpha_profile(n: usize, t: f64, r: f64) -> Result<AlphaEval> {
    check_dimension(n)?;
    if n % 2 == 1 {
        return odd::alpha_odd(n, t, r);
    }
    let k = kernel_even(n, t, r)?;
    Ok(alpha_from_kernel(&k))
}

/// Strips the Gaussian factor from a kernel evaluation.
pub fn alpha_from_kernel(k: &KernelEval) -> AlphaEval {
    let (g, gr, gt) = gaussian_part(k.dim, k.t, k.r);
    let log_alpha = k.log_k - g;
    AlphaEval {
        dim: k.dim,
        t: k.t,
        r: k.r,
        alpha: log_alpha.exp(),
        log_alpha,
        dr_log_alpha: k.dr_log_k - gr,
        dt_log_alpha: k.dt_log_k - gt,
    }
}

/// Multiplies the Gaussian factor back onto a profile.
pub fn kernel_from_alpha(a: &AlphaEval, method: Method) -> KernelEval {
    let (g, gr, gt) = gaussian_part(a.dim, a.t, a.r);
    KernelEval {
        dim: a.dim,
        t: a.t,
        r: a.r,
        log_k: g + a.log_alpha,
        dr_log_k: gr + a.dr_log_alpha,
        dt_log_k: gt + a.dt_log_alpha,
        method,
    }
}
