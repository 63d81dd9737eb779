//! Globally adaptive 21-point Gauss-Kronrod quadrature for vector-valued
//! integrands.
//!
//! All components share one partition; refinement targets the interval whose
//! worst component (relative to the running total) has the largest error.

const XGK: [f64; 11] = [
    0.995_657_163_025_808_1,
    0.973_906_528_517_171_7,
    0.930_157_491_355_708_2,
    0.865_063_366_688_984_5,
    0.780_817_726_586_416_9,
    0.679_409_568_299_024_4,
    0.562_757_134_668_604_7,
    0.433_395_394_129_247_2,
    0.294_392_862_701_460_2,
    0.148_874_338_981_631_22,
    0.0,
];

const WG: [f64; 5] = [
    0.066_671_344_308_688_14,
    0.149_451_349_150_580_6,
    0.219_086_362_515_982_04,
    0.269_266_719_309_996_35,
    0.295_524_224_714_752_87,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874,
    0.032_558_162_307_964_725,
    0.054_755_896_574_351_995,
    0.075_039_674_810_919_96,
    0.093_125_454_583_697_6,
    0.109_387_158_802_297_64,
    0.123_491_976_262_065_84,
    0.134_709_217_311_473_34,
    0.142_775_938_577_060_09,
    0.147_739_104_901_338_49,
    0.149_445_554_002_916_9,
];

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct QuadResult<const M: usize> {
    pub value: [f64; M],
    /// Estimated absolute error per component.
    pub error: [f64; M],
    pub evaluations: usize,
    pub intervals: usize,
    pub converged: bool,
}

impl<const M: usize> QuadResult<M> {
    /// Largest estimated relative error over the components.
    pub fn max_relative_error(&self) -> f64 {
        self.value
            .iter()
            .zip(&self.error)
            .map(|(v, e)| if *v == 0.0 { *e } else { e / v.abs() })
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy)]
struct Segment<const M: usize> {
    a: f64,
    b: f64,
    value: [f64; M],
    error: [f64; M],
}

fn gk21<const M: usize, F>(f: &F, a: f64, b: f64) -> Segment<M>
where
    F: Fn(f64) -> [f64; M],
{
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = [0.0; M];
    let mut gauss = [0.0; M];
    for c in 0..M {
        kronrod[c] = WGK[10] * fc[c];
    }
    for j in 0..10 {
        let x = half * XGK[j];
        let f1 = f(center - x);
        let f2 = f(center + x);
        for c in 0..M {
            let s = f1[c] + f2[c];
            kronrod[c] += WGK[j] * s;
            if j % 2 == 1 {
                gauss[c] += WG[j / 2] * s;
            }
        }
    }
    let mut value = [0.0; M];
    let mut error = [0.0; M];
    for c in 0..M {
        value[c] = kronrod[c] * half;
        error[c] = ((kronrod[c] - gauss[c]) * half).abs();
    }
    Segment { a, b, value, error }
}

/// Integrates `f` over `[breakpoints[0], breakpoints.last()]`, starting from
/// the partition given by `breakpoints` (ascending).
///
/// Stops when every component satisfies `error <= max(abs_tol, rel_tol * |value|)`
/// or after `max_intervals` segments, in which case `converged` is false.
pub fn integrate_vec<const M: usize, F>(
    f: F,
    breakpoints: &[f64],
    rel_tol: f64,
    abs_tol: f64,
    max_intervals: usize,
) -> QuadResult<M>
where
    F: Fn(f64) -> [f64; M],
{
    integrate_vec_with(
        f,
        breakpoints,
        |total: &[f64; M]| total.map(|v| abs_tol.max(rel_tol * v.abs())),
        max_intervals,
    )
}

/// Like [`integrate_vec`], but the per-component error targets are computed
/// from the running totals by `targets`.
pub fn integrate_vec_with<const M: usize, F, T>(
    f: F,
    breakpoints: &[f64],
    targets: T,
    max_intervals: usize,
) -> QuadResult<M>
where
    F: Fn(f64) -> [f64; M],
    T: Fn(&[f64; M]) -> [f64; M],
{
    assert!(breakpoints.len() >= 2, "need at least one interval");
    let mut segments: Vec<Segment<M>> = breakpoints
        .windows(2)
        .filter(|w| w[1] > w[0])
        .map(|w| gk21(&f, w[0], w[1]))
        .collect();
    let mut evaluations = 21 * segments.len();
    if segments.is_empty() {
        return QuadResult {
            value: [0.0; M],
            error: [0.0; M],
            evaluations,
            intervals: 0,
            converged: true,
        };
    }

    loop {
        let mut total = [0.0; M];
        let mut err = [0.0; M];
        for s in &segments {
            for c in 0..M {
                total[c] += s.value[c];
                err[c] += s.error[c];
            }
        }
        let target = targets(&total);
        let converged = (0..M).all(|c| err[c] <= target[c]);
        if converged || segments.len() >= max_intervals {
            return QuadResult {
                value: total,
                error: err,
                evaluations,
                intervals: segments.len(),
                converged,
            };
        }
        let weight = |s: &Segment<M>| -> f64 {
            (0..M)
                .map(|c| s.error[c] / target[c].max(f64::MIN_POSITIVE))
                .fold(0.0, f64::max)
        };
        let (worst, _) = segments
            .iter()
            .enumerate()
            .map(|(i, s)| (i, weight(s)))
            .fold((0, f64::NEG_INFINITY), |acc, cur| if cur.1 > acc.1 { cur } else { acc });
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        if !(mid > seg.a && mid < seg.b) {
            // interval can no longer be split in double precision
            return QuadResult {
                value: total,
                error: err,
                evaluations,
                intervals: segments.len() + 1,
                converged: false,
            };
        }
        segments.push(gk21(&f, seg.a, mid));
        segments.push(gk21(&f, mid, seg.b));
        evaluations += 42;
    }
}

/// Scalar convenience wrapper around [`integrate_vec`].
pub fn integrate<F>(f: F, a: f64, b: f64, rel_tol: f64, abs_tol: f64) -> QuadResult<1>
where
    F: Fn(f64) -> f64,
{
    integrate_vec(|x| [f(x)], &[a, b], rel_tol, abs_tol, 2000)
}
