//! Concavity of the `H^3` bound in `d_t log u`, checked two ways: second
//! differences of `s -> sharp_h3_bound(t, s)^2` on a uniform grid, and the
//! analytic `d^2Y/dX^2` along the kernel against a numeric second difference.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimates::{general_h_bound, h3_d2y_dx2, sharp_h3_bound};
use crate::SCHEMA_VERSION;

/// Largest second difference accepted as concave.
pub const SECOND_DIFFERENCE_TOL: f64 = 1e-10;
/// Relative agreement between analytic and numeric `d^2Y/dX^2`.
pub const CURVATURE_REL_TOL: f64 = 1e-4;
/// The `s` grid spans kernel radii up to this value.
const R_SPAN: f64 = 20.0;
const INTERIOR_R: (f64, f64) = (0.1, 10.0);
const INTERIOR_POINTS: usize = 40;
const BOUNDARY_R: [f64; 4] = [1e-1, 1e-2, 1e-3, 0.0];
/// Dimensions whose general bound is also scanned.
const GENERAL_DIMS: [usize; 6] = [2, 3, 4, 5, 6, 7];

/// Second-difference scan of one bound at one `t`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecondDifferenceScan {
    /// `3` for the sharp `H^3` bound, otherwise the dimension of the squared general bound.
    pub dim: usize,
    pub t: f64,
    pub s_min: f64,
    pub s_max: f64,
    pub max_second_difference: f64,
    pub at_s: f64,
    pub pass: bool,
}

/// `d^2Y/dX^2` at one kernel radius.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcavityRow {
    pub t: f64,
    pub r: f64,
    pub analytic: f64,
    pub numeric: f64,
    pub relative_error: f64,
    pub pass: bool,
}

/// Value of the analytic curvature near `r = 0`; recorded, not checked.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryValue {
    pub t: f64,
    pub r: f64,
    pub analytic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConcavityReport {
    pub schema_version: u32,
    pub s_grid_size: usize,
    pub sharp_h3: Vec<SecondDifferenceScan>,
    pub general: Vec<SecondDifferenceScan>,
    pub rows: Vec<ConcavityRow>,
    pub boundary: Vec<BoundaryValue>,
    pub passed: bool,
    /// First failing location, if any.
    pub failure: Option<String>,
}

fn scan(dim: usize, t: f64, s_min: f64, size: usize, f: impl Fn(f64) -> Result<f64>) -> Result<SecondDifferenceScan> {
    let s_max = s_min + (R_SPAN / (2.0 * t)).powi(2);
    let h = (s_max - s_min) / (size - 1) as f64;
    let vals = (0..size)
        .map(|i| f(s_min + h * i as f64).map(|b| b * b))
        .collect::<Result<Vec<_>>>()?;
    let (mut worst, mut at) = (f64::NEG_INFINITY, s_min);
    for (i, w) in vals.windows(3).enumerate() {
        let d2 = w[0] - 2.0 * w[1] + w[2];
        if d2 > worst {
            worst = d2;
            at = s_min + h * (i + 1) as f64;
        }
    }
    Ok(SecondDifferenceScan {
        dim,
        t,
        s_min,
        s_max,
        max_second_difference: worst,
        at_s: at,
        pass: worst <= SECOND_DIFFERENCE_TOL,
    })
}

/// `Y = |grad log K_3|^2` as a function of `X = d_t log K_3`, via the bound.
fn y_of_x(t: f64, x: f64) -> Result<f64> {
    sharp_h3_bound(t, x).map(|b| b * b)
}

fn numeric_curvature(t: f64, r: f64) -> Result<f64> {
    let x = -1.5 / t - 1.0 + r * r / (4.0 * t * t);
    let h = 1e-3 * r * r / (2.0 * t * t);
    let d2 = y_of_x(t, x + h)? - 2.0 * y_of_x(t, x)? + y_of_x(t, x - h)?;
    Ok(d2 / (h * h))
}

/// Runs both concavity checks for each `t`.
pub fn run_concavity_scan(t_values: &[f64], s_grid_size: usize) -> Result<ConcavityReport> {
    if t_values.is_empty() || t_values.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
        return Err(Error::usage("concavity scan needs positive times"));
    }
    if s_grid_size < 3 {
        return Err(Error::usage("s grid needs at least 3 points"));
    }
    let mut report = ConcavityReport {
        schema_version: SCHEMA_VERSION,
        s_grid_size,
        sharp_h3: Vec::new(),
        general: Vec::new(),
        rows: Vec::new(),
        boundary: Vec::new(),
        passed: true,
        failure: None,
    };
    fn fail(report: &mut ConcavityReport, msg: String) {
        report.passed = false;
        report.failure.get_or_insert(msg);
    }

    for &t in t_values {
        let sc = scan(3, t, -1.5 / t - 1.0, s_grid_size, |s| sharp_h3_bound(t, s))?;
        if !sc.pass {
            fail(
                &mut report,
                format!(
                    "sharp H^3 bound: second difference {:e} at t = {t}, s = {}",
                    sc.max_second_difference, sc.at_s
                ),
            );
        }
        report.sharp_h3.push(sc);

        for n in GENERAL_DIMS {
            let nf = n as f64;
            let m = if n % 2 == 1 { nf } else { nf + 1.0 };
            let s_min = -m / (2.0 * t) - (nf - 1.0).powi(2) / 4.0;
            let sc = scan(n, t, s_min, s_grid_size, |s| general_h_bound(n, t, s))?;
            if !sc.pass {
                fail(
                    &mut report,
                    format!(
                        "general bound n = {n}: second difference {:e} at t = {t}, s = {}",
                        sc.max_second_difference, sc.at_s
                    ),
                );
            }
            report.general.push(sc);
        }

        let (lo, hi) = (INTERIOR_R.0.ln(), INTERIOR_R.1.ln());
        for i in 0..INTERIOR_POINTS {
            let r = (lo + (hi - lo) * i as f64 / (INTERIOR_POINTS - 1) as f64).exp();
            let analytic = h3_d2y_dx2(t, r);
            let numeric = numeric_curvature(t, r)?;
            let relative_error = (analytic - numeric).abs() / analytic.abs();
            let pass = analytic < 0.0 && relative_error <= CURVATURE_REL_TOL;
            if !pass {
                fail(
                    &mut report,
                    format!("d2Y/dX2 at t = {t}, r = {r}: analytic {analytic:e}, numeric {numeric:e}"),
                );
            }
            report.rows.push(ConcavityRow {
                t,
                r,
                analytic,
                numeric,
                relative_error,
                pass,
            });
        }

        report.boundary.extend(BOUNDARY_R.iter().map(|&r| BoundaryValue {
            t,
            r,
            analytic: h3_d2y_dx2(t, r),
        }));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_squared_is_concave_and_curvature_matches() {
        let rep = run_concavity_scan(&[0.1, 1.0, 10.0], 200).unwrap();
        assert!(rep.passed, "{:?}", rep.failure);
        assert_eq!(rep.rows.len(), 3 * INTERIOR_POINTS);
        assert!(rep.rows.iter().all(|r| r.analytic < 0.0));
    }

    #[test]
    fn boundary_limit_is_recorded() {
        let rep = run_concavity_scan(&[1.0], 50).unwrap();
        let at0 = rep.boundary.iter().find(|b| b.r == 0.0).unwrap();
        assert!((at0.analytic - (-32.0 / 45.0 - 64.0 / 135.0)).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(run_concavity_scan(&[], 10).is_err());
        assert!(run_concavity_scan(&[1.0], 2).is_err());
        assert!(run_concavity_scan(&[-1.0], 10).is_err());
    }
}
