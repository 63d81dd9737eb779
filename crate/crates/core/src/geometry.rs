//! Hyperboloid model of `H^n`.
//!
//! Points live on the upper sheet `{x : <x,x>_M = -1, x_0 > 0}` of Minkowski
//! space `R^{1,n}` with `<x,y>_M = -x_0 y_0 + sum_i x_i y_i`. Distances and
//! distance gradients are closed-form, which is what the superposition harness
//! needs: inner products of `grad d(., y_i)` at machine precision.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Width of the band `[1 - CLAMP_BAND, 1]` in which `-<x,y>_M` is treated as rounding noise.
pub const CLAMP_BAND: f64 = 1e-9;

/// Relative drift of `<x,x>_M` from `-1` accepted (and then removed) at construction.
const CONSTRUCTION_DRIFT: f64 = 1e-8;

/// Minkowski inner product `-a_0 b_0 + sum_i a_i b_i`.
#[inline]
pub fn minkowski_inner(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let spatial: f64 = a[1..].iter().zip(&b[1..]).map(|(p, q)| p * q).sum();
    spatial - a[0] * b[0]
}

/// A point of `H^n` in Minkowski coordinates `(x_0, ..., x_n)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperPoint {
    coords: Vec<f64>,
}

impl HyperPoint {
    /// Builds a point from Minkowski coordinates, renormalizing small drift off
    /// the hyperboloid. Fails if the coordinates are not (close to) a point of
    /// the upper sheet.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::usage(format!(
                "a point of H^n needs at least 2 coordinates, got {}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPoint("non-finite coordinate".into()));
        }
        if coords[0] <= 0.0 {
            return Err(Error::InvalidPoint(format!(
                "x_0 = {} is not on the upper sheet",
                coords[0]
            )));
        }
        let norm = minkowski_inner(&coords, &coords);
        let scale = coords[0] * coords[0];
        if (norm + 1.0).abs() > CONSTRUCTION_DRIFT * scale.max(1.0) {
            return Err(Error::InvalidPoint(format!("<x,x>_M = {norm} is not -1")));
        }
        Ok(Self::normalized(coords))
    }

    /// The base point `(1, 0, ..., 0)` of `H^dim`.
    pub fn origin(dim: usize) -> Self {
        let mut coords = vec![0.0; dim + 1];
        coords[0] = 1.0;
        Self { coords }
    }

    /// Point at geodesic distance `radius` from the origin in the direction of
    /// the unit vector `direction` (length `dim`).
    pub fn from_polar(radius: f64, direction: &[f64]) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(Error::usage(format!("radius must be finite and >= 0, got {radius}")));
        }
        let len: f64 = direction.iter().map(|c| c * c).sum::<f64>().sqrt();
        if direction.is_empty() || !(len > 0.0) {
            return Err(Error::usage("direction must be a nonzero vector"));
        }
        let sh = radius.sinh();
        let mut coords = Vec::with_capacity(direction.len() + 1);
        coords.push(radius.cosh());
        coords.extend(direction.iter().map(|c| sh * c / len));
        Ok(Self::normalized(coords))
    }

    fn normalized(mut coords: Vec<f64>) -> Self {
        // x_0 is recomputed from the spatial part, which keeps x_0 >= 1 exactly.
        let spatial: f64 = coords[1..].iter().map(|c| c * c).sum();
        coords[0] = (1.0 + spatial).sqrt();
        Self { coords }
    }

    /// Dimension `n` of the ambient `H^n`.
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    /// Moves along the ambient vector `v` and projects back onto the hyperboloid.
    ///
    /// This is a retraction, not the exponential map: it agrees with the
    /// geodesic to first order in `|v|`.
    pub fn retract(&self, v: &[f64]) -> Result<Self> {
        if v.len() != self.coords.len() {
            return Err(Error::usage("vector length does not match point dimension"));
        }
        let moved: Vec<f64> = self.coords.iter().zip(v).map(|(x, d)| x + d).collect();
        let norm = -minkowski_inner(&moved, &moved);
        if !(norm > 0.0) || moved[0] <= 0.0 {
            return Err(Error::InvalidPoint("retraction left the upper sheet".into()));
        }
        let s = norm.sqrt();
        Ok(Self::normalized(moved.into_iter().map(|c| c / s).collect()))
    }
}

/// A tangent vector at `base`, stored in ambient Minkowski coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TangentVector {
    pub base: HyperPoint,
    pub components: Vec<f64>,
}

impl TangentVector {
    /// Squared Riemannian length, which is the Minkowski norm on tangent vectors.
    pub fn norm_sq(&self) -> f64 {
        minkowski_inner(&self.components, &self.components)
    }

    pub fn inner(&self, other: &TangentVector) -> f64 {
        minkowski_inner(&self.components, &other.components)
    }
}

fn check_same_dim(x: &HyperPoint, y: &HyperPoint) -> Result<()> {
    if x.dim() != y.dim() {
        return Err(Error::usage(format!(
            "dimension mismatch: H^{} vs H^{}",
            x.dim(),
            y.dim()
        )));
    }
    Ok(())
}

/// Geodesic distance `arccosh(-<x,y>_M)`.
///
/// Evaluated as `2 asinh(|x - y|_M / 2)`, which equals the arccosh form on the
/// hyperboloid and keeps full relative accuracy for nearby points.
pub fn distance(x: &HyperPoint, y: &HyperPoint) -> Result<f64> {
    check_same_dim(x, y)?;
    let cosh_d = -minkowski_inner(x.coords(), y.coords());
    if cosh_d < 1.0 - CLAMP_BAND {
        return Err(Error::InvalidPoint(format!(
            "-<x,y>_M = {cosh_d} < 1: points are not on the hyperboloid"
        )));
    }
    let diff: Vec<f64> = x.coords().iter().zip(y.coords()).map(|(a, b)| a - b).collect();
    let chord_sq = minkowski_inner(&diff, &diff).max(0.0);
    Ok(2.0 * (0.5 * chord_sq.sqrt()).asinh())
}

/// Unit gradient at `x` of the distance function `d(., y)`.
///
/// Equal to `(cosh(d) x - y) / sinh(d)`, evaluated as
/// `((x - y) + 2 sinh^2(d/2) x) / sinh(d)` to avoid cancellation at small `d`.
pub fn grad_distance(x: &HyperPoint, y: &HyperPoint) -> Result<TangentVector> {
    let d = distance(x, y)?;
    if d == 0.0 {
        return Err(Error::domain("distance gradient is undefined at coincident points"));
    }
    let half = (0.5 * d).sinh();
    let a = 2.0 * half * half;
    let inv_sinh = 1.0 / d.sinh();
    let mut v: Vec<f64> = x
        .coords()
        .iter()
        .zip(y.coords())
        .map(|(xi, yi)| ((xi - yi) + a * xi) * inv_sinh)
        .collect();
    // remove the residual normal component so that <v, x>_M = 0
    let normal = minkowski_inner(&v, x.coords());
    for (vi, xi) in v.iter_mut().zip(x.coords()) {
        *vi += normal * xi;
    }
    Ok(TangentVector {
        base: x.clone(),
        components: v,
    })
}

/// Point with uniformly random direction and radius uniform on
/// `[0, radius_bound]`, drawn from `rng`.
pub fn random_point_with<R: Rng + ?Sized>(rng: &mut R, dim: usize, radius_bound: f64) -> Result<HyperPoint> {
    if dim < 2 {
        return Err(Error::usage(format!("dimension must be >= 2, got {dim}")));
    }
    if !(radius_bound > 0.0) || !radius_bound.is_finite() {
        return Err(Error::usage(format!("radius bound must be > 0, got {radius_bound}")));
    }
    let direction = loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        if v.iter().map(|c| c * c).sum::<f64>() > 1e-24 {
            break v;
        }
    };
    let radius = rng.random::<f64>() * radius_bound;
    HyperPoint::from_polar(radius, &direction)
}

/// Deterministic random point: same `(dim, radius_bound, seed)` gives the same point.
pub fn random_point(dim: usize, radius_bound: f64, seed: u64) -> Result<HyperPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_point_with(&mut rng, dim, radius_bound)
}
