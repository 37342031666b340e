//! Closed-form spherical geometry on the unit sphere `S^n ⊂ R^{n+1}`.
//!
//! Points are stored in ambient coordinates. The last ambient axis is the
//! vertical axis: the south pole `s0 = -e_{n+1}` is the base point of every
//! loop, and the equator `{x_{n+1} = 0}` is a copy of `S^{n-1}`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Tolerance for the unit-norm invariant of [`SpherePoint`].
pub const UNIT_TOL: f64 = 1e-9;
/// Minimum angular separation from the antipode before a geodesic is ambiguous.
pub const ANTIPODAL_GUARD: f64 = 1e-6;
/// Vectors shorter than this cannot be normalized.
pub const MIN_NORM: f64 = 1e-12;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// `a * u + b * v`, component-wise.
pub(crate) fn combine(a: f64, u: &[f64], b: f64, v: &[f64]) -> Vec<f64> {
    u.iter().zip(v).map(|(x, y)| a * x + b * y).collect()
}

/// Angle between two vectors, stable for nearly parallel and nearly opposite inputs.
pub(crate) fn angle_between(a: &[f64], b: &[f64]) -> f64 {
    let na = norm(a);
    let nb = norm(b);
    let diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| x / na - y / nb).collect();
    let sum: Vec<f64> = a.iter().zip(b).map(|(x, y)| x / na + y / nb).collect();
    2.0 * norm(&diff).atan2(norm(&sum))
}

/// A unit vector of `R^{n+1}`, i.e. a point of `S^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpherePoint {
    coords: Vec<f64>,
}

impl SpherePoint {
    /// Validates `‖coords‖ = 1` (within [`UNIT_TOL`]) and `n ≥ 1`.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::DegenerateInput(format!(
                "a point of S^n needs at least 2 ambient coordinates, got {}",
                coords.len()
            )));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::DegenerateInput("non-finite coordinate".into()));
        }
        let r = norm(&coords);
        if (r - 1.0).abs() > UNIT_TOL {
            return Err(Error::DegenerateInput(format!(
                "norm {r} is not 1 within {UNIT_TOL}"
            )));
        }
        Ok(SpherePoint { coords })
    }

    /// Wraps coordinates produced by a closed-form formula that is unit by construction.
    pub(crate) fn from_unit(coords: Vec<f64>) -> Self {
        debug_assert!((norm(&coords) - 1.0).abs() < 1e-7, "{coords:?}");
        SpherePoint { coords }
    }

    /// Basis vector `e_{axis+1}` of `S^n`.
    pub fn basis(n: usize, axis: usize) -> Self {
        let mut coords = vec![0.0; n + 1];
        coords[axis] = 1.0;
        SpherePoint { coords }
    }

    /// Sphere dimension `n`.
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn ambient_dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    /// Vertical coordinate `x_{n+1}`.
    pub fn height(&self) -> f64 {
        self.coords[self.coords.len() - 1]
    }

    pub fn is_equatorial(&self) -> bool {
        self.height().abs() <= UNIT_TOL
    }

    pub fn antipode(&self) -> Self {
        SpherePoint {
            coords: self.coords.iter().map(|c| -c).collect(),
        }
    }

    pub fn angle_to(&self, other: &SpherePoint) -> f64 {
        angle_between(&self.coords, &other.coords)
    }

    /// Embeds a point of `S^{n-1}` (given by `n` coordinates) into the equator of `S^n`.
    pub fn on_equator(coords: &[f64]) -> Result<Self> {
        let mut v = coords.to_vec();
        v.push(0.0);
        SpherePoint::new(v)
    }

    fn require_equatorial(&self, what: &str) -> Result<()> {
        if self.is_equatorial() {
            Ok(())
        } else {
            Err(Error::DegenerateInput(format!(
                "{what} must lie on the equator, last coordinate is {}",
                self.height()
            )))
        }
    }

    fn check_same_dim(&self, other: &SpherePoint) -> Result<()> {
        if self.dim() == other.dim() {
            Ok(())
        } else {
            Err(Error::DegenerateInput(format!(
                "dimension mismatch: S^{} vs S^{}",
                self.dim(),
                other.dim()
            )))
        }
    }
}

/// South pole `s0 = -e_{n+1}`, the base point of `ΩS^n`.
pub fn south_pole(n: usize) -> SpherePoint {
    let mut coords = vec![0.0; n + 1];
    coords[n] = -1.0;
    SpherePoint { coords }
}

/// North pole `e_{n+1}`.
pub fn north_pole(n: usize) -> SpherePoint {
    south_pole(n).antipode()
}

/// Equatorial base point `s1 = e_1`.
pub fn equator_base(n: usize) -> SpherePoint {
    SpherePoint::basis(n, 0)
}

pub fn normalize(v: &[f64]) -> Result<SpherePoint> {
    let r = norm(v);
    if !r.is_finite() || r <= MIN_NORM {
        return Err(Error::DegenerateInput(format!(
            "cannot normalize a vector of norm {r}"
        )));
    }
    SpherePoint::new(v.iter().map(|c| c / r).collect())
}

/// Point at fraction `t` of the minimizing geodesic from `p` to `q`.
pub fn slerp(p: &SpherePoint, q: &SpherePoint, t: f64) -> Result<SpherePoint> {
    p.check_same_dim(q)?;
    let theta = p.angle_to(q);
    if theta > PI - ANTIPODAL_GUARD {
        return Err(Error::AntipodalPair);
    }
    Ok(slerp_unchecked(p.coords(), q.coords(), theta, t))
}

/// Geodesic interpolation with the angle already known to be below the antipodal guard.
pub(crate) fn slerp_unchecked(p: &[f64], q: &[f64], theta: f64, t: f64) -> SpherePoint {
    if t == 0.0 {
        return SpherePoint::from_unit(p.to_vec());
    }
    if t == 1.0 {
        return SpherePoint::from_unit(q.to_vec());
    }
    if theta < 1e-9 {
        // Chord and arc agree to O(theta^3); renormalize the chord.
        let v = combine(1.0 - t, p, t, q);
        let r = norm(&v);
        return SpherePoint::from_unit(v.into_iter().map(|c| c / r).collect());
    }
    let s = theta.sin();
    let a = ((1.0 - t) * theta).sin() / s;
    let b = (t * theta).sin() / s;
    SpherePoint::from_unit(combine(a, p, b, q))
}

/// A constant-speed arc of a great circle.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicArc {
    start: SpherePoint,
    direction: SpherePoint,
    angular_length: f64,
}

impl GeodesicArc {
    pub fn new(start: SpherePoint, direction: SpherePoint, angular_length: f64) -> Result<Self> {
        start.check_same_dim(&direction)?;
        let c = dot(start.coords(), direction.coords());
        if c.abs() > UNIT_TOL {
            return Err(Error::DegenerateInput(format!(
                "arc direction is not tangent at its start (inner product {c})"
            )));
        }
        if !(angular_length > 0.0 && angular_length <= PI) {
            return Err(Error::DegenerateInput(format!(
                "arc angular length {angular_length} outside (0, π]"
            )));
        }
        Ok(GeodesicArc {
            start,
            direction,
            angular_length,
        })
    }

    pub fn start(&self) -> &SpherePoint {
        &self.start
    }

    pub fn direction(&self) -> &SpherePoint {
        &self.direction
    }

    pub fn angular_length(&self) -> f64 {
        self.angular_length
    }

    /// `cos(uL)·start + sin(uL)·direction`; `u = 0` returns `start` bit-for-bit.
    pub fn point_at(&self, u: f64) -> SpherePoint {
        if u == 0.0 {
            return self.start.clone();
        }
        let phi = u * self.angular_length;
        SpherePoint::from_unit(combine(
            phi.cos(),
            self.start.coords(),
            phi.sin(),
            self.direction.coords(),
        ))
    }
}

/// The quarter meridian from the south pole up to the equatorial point `x`.
pub fn meridian_arc(x: &SpherePoint) -> Result<GeodesicArc> {
    x.require_equatorial("meridian endpoint")?;
    GeodesicArc::new(south_pole(x.dim()), x.clone(), FRAC_PI_2)
}

/// Great circle through `s0`, `x`, `-x` in the vertical plane of `x`;
/// `x` is reached at `t = 1/4` and `-x` at `t = 3/4`.
pub fn circle_alpha(x: &SpherePoint, t: f64) -> Result<SpherePoint> {
    x.require_equatorial("circle point")?;
    let (s, c) = (TAU * t).sin_cos();
    Ok(circle_alpha_from(x, s, c))
}

/// `sin·x − cos·e_{n+1}` for a precomputed `(sin 2πt, cos 2πt)`.
pub(crate) fn circle_alpha_from(x: &SpherePoint, sin: f64, cos: f64) -> SpherePoint {
    let n = x.dim();
    let mut coords: Vec<f64> = x.coords().iter().map(|xi| sin * xi).collect();
    coords[n] = -cos;
    SpherePoint::from_unit(coords)
}

/// Circle cut from the sphere by the vertical plane through `base` and an
/// equatorial point `x`, traversed at constant angular speed starting from
/// `base` and descending first (southern half before the northern one).
#[derive(Debug, Clone)]
pub struct VerticalCircle {
    center: Vec<f64>,
    radius: f64,
    axis: Vec<f64>,
    phase: f64,
}

impl VerticalCircle {
    pub fn through(base: &SpherePoint, x: &SpherePoint) -> Result<Self> {
        base.check_same_dim(x)?;
        x.require_equatorial("circle point")?;
        let n = x.dim();
        if distance(base.coords(), x.coords()) <= ANTIPODAL_GUARD {
            return Err(Error::DegenerateCircle(
                "the base point coincides with the circle point".into(),
            ));
        }
        let mut foot = base.coords().to_vec();
        foot[n] = 0.0;
        let mut axis: Vec<f64> = x.coords().iter().zip(&foot).map(|(a, b)| a - b).collect();
        let len = norm(&axis);
        if len <= MIN_NORM {
            return Err(Error::DegenerateCircle(
                "vertical plane through the points is undefined".into(),
            ));
        }
        axis.iter_mut().for_each(|v| *v /= len);
        axis[n] = 0.0;
        let along = dot(&foot, &axis);
        let center: Vec<f64> = foot.iter().zip(&axis).map(|(f, w)| f - along * w).collect();
        let radius = (1.0 - dot(&center, &center)).max(0.0).sqrt();
        let rel: Vec<f64> = base
            .coords()
            .iter()
            .zip(&center)
            .map(|(b, c)| b - c)
            .collect();
        let phase = base.height().atan2(dot(&rel, &axis));
        Ok(VerticalCircle {
            center,
            radius,
            axis,
            phase,
        })
    }

    pub fn point_at(&self, t: f64) -> SpherePoint {
        let (s, c) = (self.phase + TAU * t).sin_cos();
        let n = self.center.len() - 1;
        let mut coords: Vec<f64> = self
            .center
            .iter()
            .zip(&self.axis)
            .map(|(m, w)| m + self.radius * c * w)
            .collect();
        coords[n] += self.radius * s;
        SpherePoint::from_unit(coords)
    }
}

/// Circle through the equatorial points `s1` and `x` in a vertical plane,
/// starting at `s1`, passing the southern half first and reaching `x` at `t = 1/2`.
pub fn circle_beta(x: &SpherePoint, s1: &SpherePoint, t: f64) -> Result<SpherePoint> {
    s1.require_equatorial("circle base point")?;
    Ok(VerticalCircle::through(s1, x)?.point_at(t))
}

/// Rotation `R` of the plane `span{s1, s0}` with `R(s1) = s0`, identity on
/// its orthogonal complement.
pub fn rotation_to_base(s1: &SpherePoint) -> Result<DMatrix<f64>> {
    let n = s1.dim();
    let s0 = south_pole(n);
    let theta = s1.angle_to(&s0);
    if !(ANTIPODAL_GUARD..=PI - ANTIPODAL_GUARD).contains(&theta) {
        return Err(Error::DegenerateInput(
            "rotation to the base point is undefined for s1 = ±s0".into(),
        ));
    }
    let u = s1.coords();
    let c = dot(u, s0.coords());
    let mut v: Vec<f64> = s0.coords().iter().zip(u).map(|(b, a)| b - c * a).collect();
    let r = norm(&v);
    v.iter_mut().for_each(|x| *x /= r);

    let (sin, cos) = theta.sin_cos();
    let dim = n + 1;
    Ok(DMatrix::from_fn(dim, dim, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        id + (cos - 1.0) * (u[i] * u[j] + v[i] * v[j]) + sin * (v[i] * u[j] - u[i] * v[j])
    }))
}

/// Applies a linear map to a sphere point.
pub fn apply(rotation: &DMatrix<f64>, p: &SpherePoint) -> SpherePoint {
    let v = rotation * nalgebra::DVector::from_column_slice(p.coords());
    SpherePoint::from_unit(v.iter().copied().collect())
}
