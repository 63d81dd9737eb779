use hypheat::estimates::{check, EstimateId, SolutionSample};
use hypheat::geometry::{minkowski_inner, random_point, HyperPoint};
use hypheat::kernel::kernel;
use hypheat::verify::{
    eval_superposition, log_u, run_comparison_report, run_grid_scan, run_harnack_suite, run_superposition_suite,
    sample_trials, GridSpec, Superposition,
};

fn mixture(dim: usize, seed: u64, count: usize) -> Superposition {
    let centers = (0..count)
        .map(|i| random_point(dim, 3.0, seed * 100 + i as u64).unwrap())
        .collect();
    let weights = (0..count).map(|i| 10f64.powf(i as f64 - 2.0)).collect();
    Superposition::new(dim, centers, weights).unwrap()
}

fn five_point(f: impl Fn(f64) -> f64, h: f64) -> f64 {
    (f(-2.0 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2.0 * h)) / (12.0 * h)
}

/// Orthonormal frame of the tangent space at `x` by Gram-Schmidt in the Minkowski metric.
fn tangent_frame(x: &HyperPoint) -> Vec<Vec<f64>> {
    let n = x.dim();
    let xc = x.coords();
    let mut frame: Vec<Vec<f64>> = Vec::new();
    for j in 1..=n {
        let mut v = vec![0.0; n + 1];
        v[j] = 1.0;
        let p = minkowski_inner(&v, xc);
        v.iter_mut().zip(xc).for_each(|(vi, xi)| *vi += p * xi);
        for e in &frame {
            let p = minkowski_inner(&v, e);
            v.iter_mut().zip(e).for_each(|(vi, ei)| *vi -= p * ei);
        }
        let norm = minkowski_inner(&v, &v).sqrt();
        frame.push(v.into_iter().map(|c| c / norm).collect());
    }
    frame
}

fn geodesic(x: &HyperPoint, e: &[f64], h: f64) -> HyperPoint {
    HyperPoint::new(
        x.coords()
            .iter()
            .zip(e)
            .map(|(a, b)| h.cosh() * a + h.sinh() * b)
            .collect(),
    )
    .unwrap()
}

#[test]
fn mixture_derivatives_match_finite_differences() {
    for (dim, seed) in [(3, 1), (3, 2), (2, 3), (5, 4)] {
        let s = mixture(dim, seed, 5);
        let x = random_point(dim, 2.0, 1000 + seed).unwrap();
        for t in [0.3, 1.0, 4.0] {
            let sample = eval_superposition(&s, t, &x).unwrap();
            let h = 1e-4 * t.max(1.0);
            let fd_t = five_point(|d| log_u(&s, t + d, &x).unwrap(), h.min(1e-4 * t));
            assert!(
                (fd_t - sample.dt_log).abs() < 1e-6 * (1.0 + sample.dt_log.abs()),
                "dim={dim} t={t}"
            );
            let grad_sq: f64 = tangent_frame(&x)
                .iter()
                .map(|e| five_point(|d| log_u(&s, t, &geodesic(&x, e, d)).unwrap(), 1e-4).powi(2))
                .sum();
            assert!(
                (grad_sq - sample.grad_sq).abs() < 1e-5 * (1.0 + sample.grad_sq),
                "dim={dim} t={t}"
            );
        }
    }
}

#[test]
fn mixture_is_weight_scale_invariant() {
    let s = mixture(3, 7, 6);
    let x = random_point(3, 2.0, 77).unwrap();
    let a = eval_superposition(&s, 0.9, &x).unwrap();
    for c in [1e-6, 3.0, 1e8] {
        let b = eval_superposition(&s.scaled(c).unwrap(), 0.9, &x).unwrap();
        assert!((a.grad_sq - b.grad_sq).abs() <= 1e-12 * (1.0 + a.grad_sq));
        assert!((a.dt_log - b.dt_log).abs() <= 1e-12 * (1.0 + a.dt_log.abs()));
    }
}

#[test]
fn single_center_trials_agree_with_grid_path() {
    let trials = sample_trials(3, 200, 5, 1).unwrap();
    let est = EstimateId::SharpH3;
    for tr in &trials {
        assert_eq!(tr.superposition.centers().len(), 1);
        let from_mix = check(&est, &eval_superposition(&tr.superposition, tr.t, &tr.x).unwrap(), 1e-8).unwrap();
        let r = tr.nearest_distance();
        let from_kernel = check(&est, &SolutionSample::from_kernel(&kernel(3, tr.t, r).unwrap()), 1e-8).unwrap();
        let scale = 1.0 + from_kernel.rhs.abs();
        assert!(
            (from_mix.slack - from_kernel.slack).abs() < 1e-12 * scale,
            "trial {} {} {} t={} r={r}",
            tr.index,
            from_mix.slack,
            from_kernel.slack,
            tr.t
        );
    }
}

#[test]
fn samples_are_well_formed() {
    for dim in [2, 3, 4, 7] {
        for tr in sample_trials(dim, 50, 11, 10).unwrap() {
            let s = eval_superposition(&tr.superposition, tr.t, &tr.x).unwrap();
            assert!(s.grad_sq >= 0.0 && s.dt_log.is_finite());
        }
    }
}

#[test]
fn reports_are_deterministic() {
    let a = run_superposition_suite(&EstimateId::SharpH3, 3, 200, 42, 1e-8).unwrap();
    let b = run_superposition_suite(&EstimateId::SharpH3, 3, 200, 42, 1e-8).unwrap();
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    let c = run_superposition_suite(&EstimateId::SharpH3, 3, 200, 43, 1e-8).unwrap();
    assert_ne!(a.min_slack, c.min_slack);
    let h1 = run_harnack_suite(5, 100, 1, 1e-8).unwrap();
    let h2 = run_harnack_suite(5, 100, 1, 1e-8).unwrap();
    assert_eq!(serde_json::to_string(&h1).unwrap(), serde_json::to_string(&h2).unwrap());
}

#[test]
fn grid_scans_of_general_and_li_yau_pass() {
    let g = GridSpec::default_for(vec![5, 7]);
    assert!(run_grid_scan(&EstimateId::GeneralOdd, &g, 1e-8).unwrap().passed());
    let g = GridSpec::default_for(vec![2, 3, 5]);
    let ly = EstimateId::li_yau(2.0, None).unwrap();
    assert!(run_grid_scan(&ly, &g, 1e-8).unwrap().passed());
}

#[test]
fn sharp_column_is_minimal() {
    let tab = run_comparison_report(&GridSpec::default_for(vec![3])).unwrap();
    assert_eq!(tab.rows.len(), 520);
    let sharp = tab.column("sharp_h3").unwrap();
    for row in &tab.rows {
        assert!(row.errors.is_empty(), "{:?}", row.errors);
        let s = row.slacks[sharp].unwrap();
        for v in row.slacks.iter().flatten() {
            assert!(s <= v + 1e-10, "t={} r={}", row.t, row.r);
        }
    }
}
