//! `Z(r) = coth r - 1/r`, its derivatives, and log-space hyperbolic helpers.
//!
//! Below [`SERIES_SWITCH`] everything is evaluated from the Maclaurin series
//! `Z(r) = sum_k 2^{2k} B_{2k} r^{2k-1} / (2k)!`, which converges for `|r| < pi`.
//! Above it the closed forms have no harmful cancellation.

/// Radius below which `Z`, `Z'`, `Z''` and `log(sinh r / r)` use the series.
pub const SERIES_SWITCH: f64 = 0.5;

/// `2^{2k} B_{2k} / (2k)!` for `k = 1..=13`.
const Z_COEFFS: [f64; 13] = [
    3.333_333_333_333_333e-1,
    -2.222_222_222_222_222_3e-2,
    2.116_402_116_402_116_5e-3,
    -2.116_402_116_402_116_5e-4,
    2.137_779_915_557_693_5e-5,
    -2.164_404_280_806_397_2e-6,
    2.192_594_785_187_377_8e-7,
    -2.221_460_878_997_967_8e-8,
    2.250_784_651_680_899_4e-9,
    -2.280_515_120_459_218_3e-10,
    2.310_643_259_900_262_4e-11,
    -2.341_170_681_982_488_2e-12,
    2.372_101_740_023_365_3e-13,
];

/// Evaluates `sum_k coeff_k * weight(k) * r^{2(k-1)}` by Horner in `r^2`.
fn z_series(r: f64, weight: impl Fn(usize) -> f64) -> f64 {
    let r2 = r * r;
    Z_COEFFS
        .iter()
        .enumerate()
        .rev()
        .fold(0.0, |acc, (i, c)| acc * r2 + c * weight(i + 1))
}

/// `Z(r) = coth r - 1/r`; `Z(0) = 0`, `0 <= Z < 1`.
pub fn z_function(r: f64) -> f64 {
    let r = r.abs();
    if r < SERIES_SWITCH {
        r * z_series(r, |_| 1.0)
    } else {
        1.0 / r.tanh() - 1.0 / r
    }
}

/// `Z(r) / r`, continuous at `r = 0` with value `1/3`.
pub fn z_over_r(r: f64) -> f64 {
    let r = r.abs();
    if r < SERIES_SWITCH {
        z_series(r, |_| 1.0)
    } else {
        z_function(r) / r
    }
}

/// `Z'(r) = 1/r^2 - 1/sinh^2 r`; `Z'(0) = 1/3`.
pub fn z_derivative(r: f64) -> f64 {
    let r = r.abs();
    if r < SERIES_SWITCH {
        z_series(r, |k| (2 * k - 1) as f64)
    } else {
        let s = r.sinh();
        1.0 / (r * r) - 1.0 / (s * s)
    }
}

/// `Z''(r) = -2/r^3 + 2 cosh r / sinh^3 r`; `Z''(0) = 0`.
pub fn z_second_derivative(r: f64) -> f64 {
    let a = r.abs();
    let value = if a < SERIES_SWITCH {
        // the k = 1 term has weight 0, so the series starts at r^1
        let r2 = a * a;
        let acc = (2..=Z_COEFFS.len()).rev().fold(0.0, |acc, k| {
            acc * r2 + Z_COEFFS[k - 1] * ((2 * k - 1) * (2 * k - 2)) as f64
        });
        a * acc
    } else {
        let s = a.sinh();
        -2.0 / (a * a * a) + 2.0 / (a.tanh() * s * s)
    };
    // Z is odd, so Z'' is odd too
    if r < 0.0 {
        -value
    } else {
        value
    }
}

/// `sum_{k>=2} coeff_k * weight(k) * r^{2(k-2)}`.
fn z_series_tail(r: f64, weight: impl Fn(usize) -> f64) -> f64 {
    let r2 = r * r;
    (2..=Z_COEFFS.len())
        .rev()
        .fold(0.0, |acc, k| acc * r2 + Z_COEFFS[k - 1] * weight(k))
}

/// `((r^2 Z'' + r Z' - Z) / r^3, (r Z'^2 + r Z Z'' - Z Z') / r^3)`, the two
/// brackets of `d^2 Y / dX^2` for the `H^3` kernel, finite at `r = 0`.
pub fn concavity_brackets(r: f64) -> (f64, f64) {
    let r = r.abs();
    if r < SERIES_SWITCH {
        // r^2 Z'' + r Z' - Z = sum_k 4k(k-1) coeff_k r^{2k-1}
        let first = z_series_tail(r, |k| (4 * k * (k - 1)) as f64);
        // with p = Z/r, q = Z', w = Z''/r: bracket = q (q - p)/r^2 + p w
        let p = z_over_r(r);
        let q = z_derivative(r);
        let q_minus_p = z_series_tail(r, |k| (2 * k - 2) as f64);
        let w = z_series_tail(r, |k| ((2 * k - 1) * (2 * k - 2)) as f64);
        (first, q * q_minus_p + p * w)
    } else {
        let z = z_function(r);
        let dz = z_derivative(r);
        let ddz = z_second_derivative(r);
        let r3 = r * r * r;
        (
            (r * r * ddz + r * dz - z) / r3,
            (r * dz * dz + r * z * ddz - z * dz) / r3,
        )
    }
}

/// `log(sinh r)` for `r > 0`, without overflow for large `r`.
pub fn log_sinh(r: f64) -> f64 {
    if r > 20.0 {
        r - std::f64::consts::LN_2 + (-(-2.0 * r).exp()).ln_1p()
    } else {
        r.sinh().ln()
    }
}

/// `log(r / sinh r)` with the limit `0` at `r = 0`.
pub fn log_r_over_sinh(r: f64) -> f64 {
    let r = r.abs();
    if r < SERIES_SWITCH {
        // log(sinh r / r) = sum_k coeff_k r^{2k} / (2k), the antiderivative of Z
        -(r * r) * z_series(r, |k| 1.0 / (2 * k) as f64)
    } else {
        r.ln() - log_sinh(r)
    }
}
