//! Even-dimensional kernels by quadrature.
//!
//! Write `u = cosh s - 1`, `sigma(u) = s^2` and `A(u) = s / sinh s`, and let
//! `phi(u) = A(u) exp(-sigma(u) / 4t)`. Then `K_3 = (4 pi t)^{-3/2} e^{-t} phi(u_r)`
//! and the plane kernel is
//!
//! `K_2 = sqrt(2) (4 pi t)^{-3/2} e^{-t/4} F(cosh r)`, `F(c) = int_0^inf 2 phi(c - 1 + v^2) dv`,
//!
//! after substituting `cosh s = cosh r + v^2` in the usual integral over `s > r`.
//! Since `d/dr = sinh r d/dc`, the descent relation gives
//! `K_{2+2j} = sqrt(2) (4 pi t)^{-3/2} e^{-(n-1)^2 t/4} (-1/2pi)^j F^{(j)}(cosh r)`.
//! The `u`-derivatives of `phi` come from Taylor jets, so `F^{(j)}`, `F^{(j+1)}`
//! and `d_t F^{(j)}` are integrated together on one partition.

use std::f64::consts::PI;
use std::sync::OnceLock;

use super::jet::Jet;
use super::{check_dimension, check_time_radius, log_r_over_sinh, KernelEval, Method};
use crate::error::{Error, Result};
use crate::quadrature::integrate_vec_with;

/// Relative accuracy required of every even-dimensional evaluation.
pub const EVEN_ACCURACY_TARGET: f64 = 1e-8;
/// Relative tolerance requested from the quadrature.
const QUAD_TOL: f64 = 1e-11;
const MAX_INTERVALS: usize = 4000;
/// The Gaussian factor is cut off where it falls below this fraction of its peak.
const GAUSSIAN_CUTOFF: f64 = 1e-20;
/// Below this `u` the power series of `sigma(u) / u` is used.
const SMALL_U: f64 = 0.5;
const SIGMA_TERMS: usize = 60;
/// Radii above this overflow `cosh r`.
const MAX_RADIUS: f64 = 700.0;

/// Coefficients of `acosh(1+u)^2 / u = sum_k a_k u^k`,
/// `a_k = (-1)^k 2^{k+2} (k!)^2 / (2k+2)!`.
fn sigma_over_u_coeffs() -> &'static [f64; SIGMA_TERMS] {
    static COEFFS: OnceLock<[f64; SIGMA_TERMS]> = OnceLock::new();
    COEFFS.get_or_init(|| {
        let mut a = [0.0; SIGMA_TERMS];
        a[0] = 2.0;
        for k in 1..SIGMA_TERMS {
            let kf = k as f64;
            a[k] = a[k - 1] * (-2.0 * kf * kf) / ((2.0 * kf + 1.0) * (2.0 * kf + 2.0));
        }
        a
    })
}

/// Jets of `sigma(u)` and `log A(u)` at `u0 >= 0`.
pub(crate) fn sigma_and_log_a<const N: usize>(u0: f64) -> (Jet<N>, Jet<N>) {
    let u = Jet::<N>::variable(u0);
    if u0 < SMALL_U {
        // Taylor shift of the series to u0
        let mut b = *sigma_over_u_coeffs();
        for k in 0..N.min(SIGMA_TERMS) {
            for i in (k..SIGMA_TERMS - 1).rev() {
                b[i] += u0 * b[i + 1];
            }
        }
        let mut g = [0.0; N];
        g[..N.min(SIGMA_TERMS)].copy_from_slice(&b[..N.min(SIGMA_TERMS)]);
        let g = Jet(g);
        let sigma = u * g;
        // A = sqrt(sigma / u) / sqrt(2 + u)
        let log_a = (g.ln() - u.add_constant(2.0).ln()).scale(0.5);
        (sigma, log_a)
    } else {
        // sinh s = sqrt(u (2 + u)) and ds/du = 1 / sinh s
        let w = u * u.add_constant(2.0);
        let s = w.powf(-0.5).integrate((1.0 + u0).acosh());
        let log_a = s.ln() - w.ln().scale(0.5);
        (s * s, log_a)
    }
}

/// Jets of `phi(u) / exp(log_scale)` and `sigma(u)` at `u0`.
pub(crate) fn phi_jet<const N: usize>(u0: f64, t: f64, log_scale: f64) -> (Jet<N>, Jet<N>) {
    let (sigma, log_a) = sigma_and_log_a::<N>(u0);
    let phi = (log_a - sigma.scale(0.25 / t)).add_constant(-log_scale).exp();
    (phi, sigma)
}

/// `u = cosh r - 1` without cancellation.
pub(crate) fn u_of_r(r: f64) -> f64 {
    let h = (0.5 * r).sinh();
    2.0 * h * h
}

/// Upper end of the `v` range: the `v` at which `exp(-(s^2 - r^2)/4t)` reaches the cutoff.
fn v_max(t: f64, r: f64) -> f64 {
    let s = (r * r - 4.0 * t * GAUSSIAN_CUTOFF.ln()).sqrt();
    (2.0 * (0.5 * (s + r)).sinh() * (0.5 * (s - r)).sinh()).sqrt()
}

/// `[F^{(j)}, F^{(j+1)}, d_t F^{(j)}]` scaled by `exp(-log_scale)`, with the
/// quadrature's relative accuracy.
fn f_derivatives(j: usize, t: f64, r: f64, log_scale: f64) -> Result<[f64; 3]> {
    let u_r = u_of_r(r);
    let vmax = v_max(t, r);
    let width = (2.0 * t * if r > 0.0 { r.sinh() / r } else { 1.0 }).sqrt();
    let mut breaks = vec![0.0];
    let mut b = 0.25 * width;
    while b < vmax {
        breaks.push(b);
        b *= 2.0;
    }
    breaks.push(vmax);

    let fact = |k: usize| -> f64 { (1..=k).map(|i| i as f64).product() };
    let (fj, fj1) = (fact(j), fact(j + 1));
    let dt_factor = 1.0 / (4.0 * t * t);
    let integrand = |v: f64| -> [f64; 3] {
        let (phi, sigma) = phi_jet::<4>(u_r + v * v, t, log_scale);
        let phi_sigma = phi * sigma;
        [
            2.0 * fj * phi.0[j],
            2.0 * fj1 * phi.0[j + 1],
            2.0 * fj * phi_sigma.0[j] * dt_factor,
        ]
    };
    let sinh_r = r.sinh();
    let targets = |v: &[f64; 3]| -> [f64; 3] {
        let f0 = v[0].abs();
        let radial_floor = if sinh_r > 0.0 { f0 / sinh_r } else { f64::INFINITY };
        [
            QUAD_TOL * f0,
            QUAD_TOL * (v[1].abs() + radial_floor),
            QUAD_TOL * (v[2].abs() + f0),
        ]
    };
    let res = integrate_vec_with(integrand, &breaks, targets, MAX_INTERVALS);
    if !res.converged {
        let tg = targets(&res.value);
        let achieved = (0..3)
            .map(|c| QUAD_TOL * res.error[c] / tg[c].max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max);
        if !(achieved <= EVEN_ACCURACY_TARGET) {
            return Err(Error::NumericalAccuracy {
                achieved,
                target: EVEN_ACCURACY_TARGET,
            });
        }
    }
    Ok(res.value)
}

/// Even-dimensional kernel, `n` in `{2, 4, 6}`.
pub fn kernel_even(n: usize, t: f64, r: f64) -> Result<KernelEval> {
    check_dimension(n)?;
    if n % 2 == 1 {
        return Err(Error::usage(format!("dimension {n} is odd; use the odd kernel")));
    }
    check_time_radius(t, r)?;
    if r > MAX_RADIUS {
        return Err(Error::domain(format!(
            "radius {r} exceeds {MAX_RADIUS} for even dimensions"
        )));
    }
    let j = (n - 2) / 2;
    let nf = n as f64;
    // log phi(u_r), so the integrand is O(1) near v = 0
    let log_scale = log_r_over_sinh(r) - r * r / (4.0 * t);
    let [f, f_next, f_t] = f_derivatives(j, t, r, log_scale)?;
    let signed = if j.is_multiple_of(2) { f } else { -f };
    if !(signed > 0.0) {
        return Err(Error::NumericalAccuracy {
            achieved: f64::INFINITY,
            target: EVEN_ACCURACY_TARGET,
        });
    }
    let log_k = 0.5 * std::f64::consts::LN_2
        - 1.5 * (4.0 * PI * t).ln()
        - (nf - 1.0) * (nf - 1.0) * t / 4.0
        - j as f64 * (2.0 * PI).ln()
        + signed.ln()
        + log_scale;
    Ok(KernelEval {
        dim: n,
        t,
        r,
        log_k,
        dr_log_k: r.sinh() * f_next / f,
        dt_log_k: -1.5 / t - (nf - 1.0) * (nf - 1.0) / 4.0 + f_t / f,
        method: Method::EvenQuadrature,
    })
}
