//! Finite mixtures `u = sum_i w_i K_n(t, d(x, y_i))` and the randomized suites
//! built on them.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{par_map, require_applicable, VerificationReport};
use crate::error::{Error, Result};
use crate::estimates::{check, harnack_log_factor, EstimateId, SolutionSample};
use crate::geometry::{distance, grad_distance, random_point_with, HyperPoint};
use crate::kernel::{check_dimension, kernel};

/// Largest number of centers drawn per trial.
pub const MAX_CENTERS: usize = 10;
/// Centers and evaluation points lie within this distance of the origin.
const RADIUS_BOUND: f64 = 5.0;
const T_RANGE: (f64, f64) = (0.05, 10.0);
const WEIGHT_RANGE: (f64, f64) = (1e-3, 1e3);
/// Centers closer than this to the evaluation point contribute no gradient.
const COINCIDENT: f64 = 1e-10;
/// Smallest gap `t2 - t1` accepted by the Harnack sampler.
const MIN_TIME_GAP: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Superposition {
    dim: usize,
    centers: Vec<HyperPoint>,
    weights: Vec<f64>,
}

impl Superposition {
    pub fn new(dim: usize, centers: Vec<HyperPoint>, weights: Vec<f64>) -> Result<Self> {
        check_dimension(dim)?;
        if centers.is_empty() {
            return Err(Error::usage("a superposition needs at least one center"));
        }
        if centers.len() != weights.len() {
            return Err(Error::usage("centers and weights differ in length"));
        }
        if let Some(w) = weights.iter().find(|w| !(**w > 0.0 && w.is_finite())) {
            return Err(Error::usage(format!("weights must be positive, got {w}")));
        }
        if let Some(c) = centers.iter().find(|c| c.dim() != dim) {
            return Err(Error::usage(format!(
                "center in H^{} for a superposition in H^{dim}",
                c.dim()
            )));
        }
        Ok(Self { dim, centers, weights })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn centers(&self) -> &[HyperPoint] {
        &self.centers
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Same mixture with every weight multiplied by `c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(
            self.dim,
            self.centers.clone(),
            self.weights.iter().map(|w| w * c).collect(),
        )
    }
}

struct Terms {
    log_u: f64,
    /// Normalized weights `w_i K_i / u`.
    rho: Vec<f64>,
    dist: Vec<f64>,
    dr: Vec<f64>,
    dt: Vec<f64>,
}

fn terms(s: &Superposition, t: f64, x: &HyperPoint) -> Result<Terms> {
    if x.dim() != s.dim {
        return Err(Error::usage(format!(
            "point in H^{} for a superposition in H^{}",
            x.dim(),
            s.dim
        )));
    }
    let mut logs = Vec::with_capacity(s.centers.len());
    let mut dist = Vec::with_capacity(s.centers.len());
    let mut dr = Vec::with_capacity(s.centers.len());
    let mut dt = Vec::with_capacity(s.centers.len());
    for (c, w) in s.centers.iter().zip(&s.weights) {
        let d = distance(x, c)?;
        let k = kernel(s.dim, t, d)?;
        logs.push(w.ln() + k.log_k);
        dist.push(d);
        dr.push(k.dr_log_k);
        dt.push(k.dt_log_k);
    }
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let shifted: Vec<f64> = logs.iter().map(|l| (l - max).exp()).collect();
    let total: f64 = shifted.iter().sum();
    Ok(Terms {
        log_u: max + total.ln(),
        rho: shifted.iter().map(|e| e / total).collect(),
        dist,
        dr,
        dt,
    })
}

/// `log u(t, x)`.
pub fn log_u(s: &Superposition, t: f64, x: &HyperPoint) -> Result<f64> {
    Ok(terms(s, t, x)?.log_u)
}

/// `|grad log u|^2` and `d_t log u` of the mixture at `(t, x)`.
pub fn eval_superposition(s: &Superposition, t: f64, x: &HyperPoint) -> Result<SolutionSample> {
    let tm = terms(s, t, x)?;
    let dt_log: f64 = tm.rho.iter().zip(&tm.dt).map(|(r, d)| r * d).sum();
    // |sum a_i g_i|^2 from pairwise products of the unit gradients g_i; the
    // diagonal is exactly 1, which avoids cancellation in the ambient norm
    let mut terms = Vec::with_capacity(s.centers.len());
    for (i, c) in s.centers.iter().enumerate() {
        if tm.dist[i] >= COINCIDENT {
            terms.push((tm.rho[i] * tm.dr[i], grad_distance(x, c)?));
        }
    }
    let mut grad_sq = 0.0;
    for (i, (a, g)) in terms.iter().enumerate() {
        grad_sq += a * a;
        for (b, h) in &terms[i + 1..] {
            grad_sq += 2.0 * a * b * g.inner(h).clamp(-1.0, 1.0);
        }
    }
    let grad_sq = grad_sq.max(0.0);
    SolutionSample::new(s.dim, t, grad_sq, dt_log)
}

fn log_uniform<R: Rng + ?Sized>(rng: &mut R, (lo, hi): (f64, f64)) -> f64 {
    (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp()
}

fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn random_superposition<R: Rng + ?Sized>(rng: &mut R, dim: usize, max_centers: usize) -> Result<Superposition> {
    let count = rng.random_range(1..=max_centers);
    let mut centers = Vec::with_capacity(count);
    let mut weights = Vec::with_capacity(count);
    for _ in 0..count {
        centers.push(random_point_with(rng, dim, RADIUS_BOUND)?);
        weights.push(log_uniform(rng, WEIGHT_RANGE));
    }
    Superposition::new(dim, centers, weights)
}

/// One random draw: a mixture, a time and an evaluation point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Trial {
    pub index: u64,
    pub superposition: Superposition,
    pub t: f64,
    pub x: HyperPoint,
}

impl Trial {
    /// Distance from the evaluation point to the nearest center.
    pub fn nearest_distance(&self) -> f64 {
        self.superposition
            .centers
            .iter()
            .filter_map(|c| distance(&self.x, c).ok())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Draws `trials` independent trials; trial `i` uses stream `i` of the seeded
/// generator, so any trial can be regenerated on its own.
pub fn sample_trials(dim: usize, trials: usize, seed: u64, max_centers: usize) -> Result<Vec<Trial>> {
    check_dimension(dim)?;
    if trials == 0 {
        return Err(Error::usage("trials must be >= 1"));
    }
    if max_centers == 0 {
        return Err(Error::usage("max_centers must be >= 1"));
    }
    (0..trials as u64)
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            let superposition = random_superposition(&mut rng, dim, max_centers)?;
            let t = log_uniform(&mut rng, T_RANGE);
            let x = random_point_with(&mut rng, dim, RADIUS_BOUND)?;
            Ok(Trial {
                index: i,
                superposition,
                t,
                x,
            })
        })
        .collect()
}

/// Checks each estimate on the same set of random mixtures.
pub fn run_superposition_suites(
    estimates: &[EstimateId],
    dim: usize,
    trials: usize,
    seed: u64,
    tol: f64,
    max_centers: usize,
) -> Result<Vec<VerificationReport>> {
    for e in estimates {
        require_applicable(e, &[dim])?;
    }
    let draws = sample_trials(dim, trials, seed, max_centers)?;
    let samples = par_map(draws.len(), |i| {
        let tr = &draws[i];
        eval_superposition(&tr.superposition, tr.t, &tr.x).map(|s| (s, tr.nearest_distance()))
    });
    let mut reports = Vec::with_capacity(estimates.len());
    for e in estimates {
        let mut report = VerificationReport::empty(*e, vec![dim], tol);
        for (tr, res) in draws.iter().zip(&samples) {
            match res
                .as_ref()
                .map_err(Clone::clone)
                .and_then(|(s, r)| Ok((check(e, s, tol)?, *r)))
            {
                Ok((o, r)) => report.record(dim, tr.t, r, Some(tr.index), o.holds, o.slack),
                Err(err) => report.fail(dim, tr.t, tr.nearest_distance(), &err),
            }
        }
        reports.push(report);
    }
    Ok(reports)
}

/// Checks `estimate` on `trials` random mixtures of 1 to 10 kernels.
pub fn run_superposition_suite(
    estimate: &EstimateId,
    dim: usize,
    trials: usize,
    seed: u64,
    tol: f64,
) -> Result<VerificationReport> {
    let mut r = run_superposition_suites(std::slice::from_ref(estimate), dim, trials, seed, tol, MAX_CENTERS)?;
    Ok(r.remove(0))
}

/// `log u(t1, 0) - log u(t2, 0) - log factor` for the kernel centered at the
/// origin; zero exactly when the Harnack inequality is attained.
pub fn harnack_kernel_gap(n: usize, t1: f64, t2: f64) -> Result<f64> {
    let lf = harnack_log_factor(n, t1, t2, 0.0)?;
    Ok(kernel(n, t1, 0.0)?.log_k - kernel(n, t2, 0.0)?.log_k - lf)
}

/// `u(t1, x1) <= factor * u(t2, x2)` on random mixtures, in log space.
pub fn run_harnack_suite(dim: usize, trials: usize, seed: u64, tol: f64) -> Result<VerificationReport> {
    check_dimension(dim)?;
    if trials == 0 {
        return Err(Error::usage("trials must be >= 1"));
    }
    let results = par_map(trials, |i| -> Result<(f64, f64, f64, f64)> {
        let mut rng = trial_rng(seed, i as u64);
        let s = random_superposition(&mut rng, dim, MAX_CENTERS)?;
        let (t1, t2) = loop {
            let a = log_uniform(&mut rng, T_RANGE);
            let b = log_uniform(&mut rng, T_RANGE);
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            if hi - lo >= MIN_TIME_GAP {
                break (lo, hi);
            }
        };
        let x1 = random_point_with(&mut rng, dim, RADIUS_BOUND)?;
        let x2 = random_point_with(&mut rng, dim, RADIUS_BOUND)?;
        let r = distance(&x1, &x2)?;
        let lf = harnack_log_factor(dim, t1, t2, r)?;
        let slack = lf - (log_u(&s, t1, &x1)? - log_u(&s, t2, &x2)?);
        Ok((t1, r, slack, lf))
    });
    let mut report = VerificationReport::empty(EstimateId::Harnack, vec![dim], tol);
    for (i, res) in results.into_iter().enumerate() {
        match res {
            Ok((t1, r, slack, lf)) => {
                let holds = slack >= -tol * (1.0 + lf.abs());
                report.record(dim, t1, r, Some(i as u64), holds, slack);
            }
            Err(e) => report.fail(dim, f64::NAN, f64::NAN, &e),
        }
    }
    Ok(report)
}
