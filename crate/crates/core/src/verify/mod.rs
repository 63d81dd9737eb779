//! Verification harness: grid scans over kernels, randomized superposition and
//! Harnack suites, the concavity scan and the comparison table.
//!
//! Grid points and trials are evaluated on a rayon pool (size capped by the
//! `HYPHEAT_THREADS` environment variable) and always collected in index
//! order, so reports are byte-identical across runs and thread counts.

mod comparison;
mod concavity;
mod superposition;

use std::sync::OnceLock;

use rayon::prelude::*;
use serde::Serialize;

pub use comparison::{run_comparison_report, ComparisonRow, ComparisonTable, COMPARISON_COLUMNS};
pub use concavity::{run_concavity_scan, ConcavityReport, ConcavityRow};
pub use superposition::{
    eval_superposition, harnack_kernel_gap, log_u, run_harnack_suite, run_superposition_suite,
    run_superposition_suites, sample_trials, Superposition, Trial, MAX_CENTERS,
};

use crate::error::{Error, Result};
use crate::estimates::{check, dt_lower_check, EstimateId, SolutionSample};
use crate::kernel::{check_dimension, kernel};
use crate::SCHEMA_VERSION;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "HYPHEAT_THREADS";

/// Threshold below which the negative control counts a point as a witness.
pub const WITNESS_THRESHOLD: f64 = 1e-6;

pub(crate) fn pool() -> &'static rayon::ThreadPool {
    static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let threads = std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .unwrap_or(0);
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool")
    })
}

/// Evaluates `f` on `0..n` in parallel, returning results in index order.
pub(crate) fn par_map<T: Send>(n: usize, f: impl Fn(usize) -> T + Sync + Send) -> Vec<T> {
    pool().install(|| (0..n).into_par_iter().map(&f).collect())
}

/// Times, radii and dimensions of a grid scan.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridSpec {
    pub t_values: Vec<f64>,
    pub r_values: Vec<f64>,
    pub dims: Vec<usize>,
}

impl GridSpec {
    /// `t` in `{0.05, 0.1, 0.2, 0.5, 1, 2, 5, 10}`; `r = 0` plus 64 log-spaced
    /// radii in `[1e-3, 20]`.
    pub fn default_for(dims: Vec<usize>) -> Self {
        let t_values = vec![0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 5.0, 10.0];
        let (lo, hi) = (1e-3f64.ln(), 20f64.ln());
        let mut r_values = vec![0.0];
        r_values.extend((0..64).map(|i| (lo + (hi - lo) * i as f64 / 63.0).exp()));
        Self {
            t_values,
            r_values,
            dims,
        }
    }

    pub fn new(t_values: Vec<f64>, r_values: Vec<f64>, dims: Vec<usize>) -> Result<Self> {
        let g = Self {
            t_values,
            r_values,
            dims,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_values.is_empty() || self.r_values.is_empty() || self.dims.is_empty() {
            return Err(Error::usage("grid needs at least one t, one r and one dimension"));
        }
        let sorted = |v: &[f64]| v.windows(2).all(|w| w[0] < w[1]);
        if !sorted(&self.t_values) || !sorted(&self.r_values) || !self.dims.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::usage("grid values must be strictly ascending"));
        }
        if self.t_values.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return Err(Error::usage("grid times must be positive"));
        }
        if self.r_values.iter().any(|r| !(*r >= 0.0 && r.is_finite())) {
            return Err(Error::usage("grid radii must be nonnegative"));
        }
        self.dims.iter().try_for_each(|&n| check_dimension(n))
    }

    pub fn points_per_dim(&self) -> usize {
        self.t_values.len() * self.r_values.len()
    }

    fn point(&self, i: usize) -> (usize, f64, f64) {
        let per = self.points_per_dim();
        let d = i / per;
        let j = i % per;
        (
            self.dims[d],
            self.t_values[j / self.r_values.len()],
            self.r_values[j % self.r_values.len()],
        )
    }
}

/// One failing point. `r` is the kernel radius on grid scans and the distance
/// between the evaluation point and the nearest center in random suites.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub dim: usize,
    pub t: f64,
    pub r: f64,
    pub slack: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trial: Option<u64>,
}

/// A point whose evaluation failed (reported, not fatal).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalFailure {
    pub dim: usize,
    pub t: f64,
    pub r: f64,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub estimate: EstimateId,
    pub dims: Vec<usize>,
    pub tolerance: f64,
    pub total_points: usize,
    pub violations: Vec<Violation>,
    pub failures: Vec<EvalFailure>,
    pub min_slack: f64,
    /// Largest `|slack|`, reported for estimates that are equalities on the kernel.
    pub max_abs_equality_gap: Option<f64>,
}

impl VerificationReport {
    fn empty(estimate: EstimateId, dims: Vec<usize>, tolerance: f64) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            estimate,
            dims,
            tolerance,
            total_points: 0,
            violations: Vec::new(),
            failures: Vec::new(),
            min_slack: f64::INFINITY,
            max_abs_equality_gap: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty() && self.failures.is_empty()
    }

    pub(crate) fn record(&mut self, dim: usize, t: f64, r: f64, trial: Option<u64>, holds: bool, slack: f64) {
        self.total_points += 1;
        self.min_slack = self.min_slack.min(slack);
        if let Some(g) = self.max_abs_equality_gap.as_mut() {
            *g = g.max(slack.abs());
        }
        if !holds {
            self.violations.push(Violation {
                dim,
                t,
                r,
                slack,
                trial,
            });
        }
    }

    pub(crate) fn fail(&mut self, dim: usize, t: f64, r: f64, err: &Error) {
        self.total_points += 1;
        self.failures.push(EvalFailure {
            dim,
            t,
            r,
            message: err.to_string(),
        });
    }

    /// One-line human summary.
    pub fn summary(&self) -> String {
        format!(
            "{}: {} points, {} violations, {} failures, min slack {:.3e}{}",
            self.estimate.name(),
            self.total_points,
            self.violations.len(),
            self.failures.len(),
            self.min_slack,
            self.max_abs_equality_gap
                .map(|g| format!(", max equality gap {g:.3e}"))
                .unwrap_or_default()
        )
    }
}

fn is_kernel_equality(estimate: &EstimateId) -> bool {
    matches!(estimate, EstimateId::SharpH3)
}

fn require_applicable(estimate: &EstimateId, dims: &[usize]) -> Result<()> {
    estimate.validate()?;
    if matches!(estimate, EstimateId::Harnack) {
        return Err(Error::usage(
            "the Harnack estimate has no grid form; use the Harnack suite",
        ));
    }
    match dims.iter().find(|&&n| !estimate.applies_to(n)) {
        Some(n) => Err(Error::usage(format!(
            "{} does not apply in dimension {n}",
            estimate.name()
        ))),
        None => Ok(()),
    }
}

/// Checks `estimate` on the kernel itself at every `(n, t, r)` of the grid.
pub fn run_grid_scan(estimate: &EstimateId, grid: &GridSpec, tol: f64) -> Result<VerificationReport> {
    grid.validate()?;
    require_applicable(estimate, &grid.dims)?;
    let total = grid.points_per_dim() * grid.dims.len();
    let results = par_map(total, |i| {
        let (n, t, r) = grid.point(i);
        kernel(n, t, r).and_then(|k| check(estimate, &SolutionSample::from_kernel(&k), tol))
    });

    let mut report = VerificationReport::empty(*estimate, grid.dims.clone(), tol);
    if is_kernel_equality(estimate) {
        report.max_abs_equality_gap = Some(0.0);
    }
    for (i, res) in results.into_iter().enumerate() {
        let (n, t, r) = grid.point(i);
        match res {
            Ok(o) => report.record(n, t, r, None, o.holds, o.slack),
            Err(e) => report.fail(n, t, r, &e),
        }
    }
    Ok(report)
}

/// A point where the odd-dimension lower bound on `d_t log K` fails in even dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness {
    pub dim: usize,
    pub t: f64,
    pub r: f64,
    pub slack: f64,
}

/// Scans the grid for points where `d_t log K_n + n/2t + (n-1)^2/4 < -WITNESS_THRESHOLD`
/// with even `n`, returning the most negative one.
pub fn find_odd_constant_witness(grid: &GridSpec) -> Result<Option<Witness>> {
    grid.validate()?;
    let total = grid.points_per_dim() * grid.dims.len();
    let results = par_map(total, |i| {
        let (n, t, r) = grid.point(i);
        kernel(n, t, r).map(|k| {
            (
                n,
                t,
                r,
                dt_lower_check(&SolutionSample::from_kernel(&k), true, 0.0).slack,
            )
        })
    });
    let mut best: Option<Witness> = None;
    for res in results {
        let (n, t, r, slack) = res?;
        if n % 2 == 0 && slack < -WITNESS_THRESHOLD && best.is_none_or(|b| slack < b.slack) {
            best = Some(Witness { dim: n, t, r, slack });
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_shape() {
        let g = GridSpec::default_for(vec![3]);
        assert_eq!(g.r_values.len(), 65);
        assert_eq!(g.points_per_dim(), 520);
        assert_eq!(g.r_values[0], 0.0);
        assert!((g.r_values[1] - 1e-3).abs() < 1e-15);
        assert!((g.r_values[64] - 20.0).abs() < 1e-12);
        g.validate().unwrap();
    }

    #[test]
    fn grid_validation() {
        assert!(GridSpec::new(vec![1.0, 0.5], vec![0.0], vec![3]).is_err());
        assert!(GridSpec::new(vec![1.0], vec![-1.0], vec![3]).is_err());
        assert!(GridSpec::new(vec![1.0], vec![0.0], vec![12]).is_err());
        assert!(GridSpec::new(vec![], vec![0.0], vec![3]).is_err());
    }

    #[test]
    fn inapplicable_estimates_are_usage_errors() {
        let g = GridSpec::new(vec![1.0], vec![1.0], vec![5]).unwrap();
        assert!(matches!(
            run_grid_scan(&EstimateId::SharpH3, &g, 1e-8),
            Err(Error::Usage(_))
        ));
        assert!(matches!(
            run_grid_scan(&EstimateId::Harnack, &g, 1e-8),
            Err(Error::Usage(_))
        ));
    }
}
