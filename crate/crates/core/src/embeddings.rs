//! Loop factories: equivariant embeddings of the equator `S^{n-1}` into `ΩS^n`
//! and a family of to-and-fro loops parametrized by a sphere `S^d`.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::loop_core::{
    check_grid, node, pushoff, turn_sin_cos, Loop, Manifold, PushoffArcs, DEFAULT_TF_TOL,
};
use crate::sphere_geom::{
    apply, circle_alpha_from, equator_base, norm, rotation_to_base, slerp, south_pole, SpherePoint,
    VerticalCircle, UNIT_TOL,
};

/// Scalar function on `[0, 1]`.
pub type BasisFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Margin kept between the tf family and the antipode of the base point.
pub const ANTIPODE_MARGIN: f64 = 0.1;

const CHECK_POINTS: usize = 1024;
const GRAM_RANK_TOL: f64 = 1e-10;

/// Parameters of the embedding `c ↦ ω_c` of `S^d` into the to-and-fro loops.
///
/// The first half of `ω_c` runs along the meridian great circle of the
/// `(e_1, e_{n+1})`-plane at signed angle `amplitude_scale · Σ c_i φ_i(2t)`
/// from `s0`; the second half retraces it.
#[derive(Clone)]
pub struct TfSphereParams {
    d: usize,
    amplitude_scale: f64,
    basis: Vec<BasisFn>,
}

impl fmt::Debug for TfSphereParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TfSphereParams")
            .field("d", &self.d)
            .field("amplitude_scale", &self.amplitude_scale)
            .field("basis_len", &self.basis.len())
            .finish()
    }
}

impl TfSphereParams {
    pub fn new(d: usize, amplitude_scale: f64, basis: Vec<BasisFn>) -> Result<Self> {
        if basis.len() != d + 1 {
            return Err(Error::DegenerateInput(format!(
                "S^{d} needs {} basis functions, got {}",
                d + 1,
                basis.len()
            )));
        }
        if !amplitude_scale.is_finite() {
            return Err(Error::DegenerateInput("non-finite amplitude scale".into()));
        }
        for (i, phi) in basis.iter().enumerate() {
            let v = phi(0.0);
            if v.abs() > 1e-12 {
                return Err(Error::DegenerateInput(format!(
                    "basis function {i} does not vanish at 0 (value {v})"
                )));
            }
        }
        let values: Vec<Vec<f64>> = (0..=CHECK_POINTS)
            .map(|j| {
                let u = j as f64 / CHECK_POINTS as f64;
                basis.iter().map(|phi| phi(u)).collect()
            })
            .collect();
        let sup = values.iter().map(|v| norm(v)).fold(0.0, f64::max);
        let limit = std::f64::consts::PI - ANTIPODE_MARGIN;
        if amplitude_scale.abs() * sup > limit + 1e-12 {
            return Err(Error::DegenerateInput(format!(
                "amplitude {amplitude_scale} times basis sup {sup} exceeds {limit}"
            )));
        }
        let k = d + 1;
        let gram = DMatrix::from_fn(k, k, |a, b| {
            values.iter().map(|v| v[a] * v[b]).sum::<f64>() / CHECK_POINTS as f64
        });
        let eig = SymmetricEigen::new(gram).eigenvalues;
        let max = eig.iter().copied().fold(0.0, f64::max);
        let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
        if !(max > 0.0 && min > GRAM_RANK_TOL * max) {
            return Err(Error::DegenerateInput(
                "basis functions are linearly dependent on the check grid".into(),
            ));
        }
        Ok(TfSphereParams {
            d,
            amplitude_scale,
            basis,
        })
    }

    /// `φ_i(u) = sin((i+1)πu)` with `amplitude_scale = (π − 0.1)/√(d+1)`.
    pub fn sine(d: usize) -> Self {
        let basis = (0..=d)
            .map(|i| {
                let k = (i + 1) as f64 * std::f64::consts::PI;
                Arc::new(move |u: f64| (k * u).sin()) as BasisFn
            })
            .collect();
        let scale = (std::f64::consts::PI - ANTIPODE_MARGIN) / ((d + 1) as f64).sqrt();
        TfSphereParams::new(d, scale, basis).expect("sine basis is admissible")
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn amplitude_scale(&self) -> f64 {
        self.amplitude_scale
    }

    /// Signed meridian angle of `ω_c` at half-loop parameter `u ∈ [0, 1]`.
    pub fn angle(&self, c: &[f64], u: f64) -> f64 {
        self.amplitude_scale
            * c.iter()
                .zip(&self.basis)
                .map(|(ci, phi)| ci * phi(u))
                .sum::<f64>()
    }
}

fn sphere_of(x: &SpherePoint) -> Manifold {
    Manifold::Sphere(x.dim())
}

/// The great circle through `s0`, `x` and `−x`, passing `x` first.
pub fn embed_alpha(x: &SpherePoint, m: usize) -> Result<Loop> {
    if !x.is_equatorial() {
        return Err(Error::DegenerateInput(format!(
            "embedding point must lie on the equator, last coordinate is {}",
            x.height()
        )));
    }
    check_grid(m)?;
    let base = south_pole(x.dim()).into_coords();
    Loop::from_fn(sphere_of(x), m, base, |i| {
        let (s, c) = turn_sin_cos(i, m);
        circle_alpha_from(x, s, c).into_coords()
    })
}

fn vertical_circle_loop(base: &SpherePoint, x: &SpherePoint, m: usize) -> Result<Loop> {
    check_grid(m)?;
    let circle = VerticalCircle::through(base, x)?;
    Loop::from_fn(sphere_of(x), m, base.coords().to_vec(), |i| {
        if i == 0 || i == m {
            base.coords().to_vec()
        } else {
            circle.point_at(node(i, m)).into_coords()
        }
    })
}

/// The vertical circle through `s1 = e_1` and `x`, based at `s1`; with
/// `rotate` every sample is mapped by the rotation taking `s1` to `s0`.
pub fn embed_beta(x: &SpherePoint, m: usize, rotate: bool) -> Result<Loop> {
    let s1 = equator_base(x.dim());
    let beta = vertical_circle_loop(&s1, x, m)?;
    if !rotate {
        return Ok(beta);
    }
    let r = rotation_to_base(&s1)?;
    let samples = beta
        .samples()
        .iter()
        .map(|p| apply(&r, &SpherePoint::from_unit(p.clone())).into_coords())
        .collect();
    Loop::new(beta.manifold(), samples, south_pole(x.dim()).into_coords())
}

/// Base point `s_λ` on the meridian from `s0` (λ = 0) to `s1` (λ = 1).
pub fn moving_base(n: usize, lambda: f64) -> Result<SpherePoint> {
    slerp(&south_pole(n), &equator_base(n), lambda)
}

/// Homotopy from `embed_alpha` (λ = 0) to `embed_beta` (λ = 1) through loops
/// based at `s_λ`, each the vertical circle through `s_λ` and `x`.
pub fn h_lambda(x: &SpherePoint, lambda: f64, m: usize) -> Result<Loop> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::DegenerateInput(format!(
            "homotopy parameter λ = {lambda} outside [0, 1]"
        )));
    }
    let base = moving_base(x.dim(), lambda)?;
    vertical_circle_loop(&base, x, m)
}

/// The to-and-fro loop `ω_c` for a unit vector `c ∈ S^d`.
pub fn tf_sphere_embed(c: &[f64], params: &TfSphereParams, n: usize, m: usize) -> Result<Loop> {
    if c.len() != params.d + 1 {
        return Err(Error::DegenerateInput(format!(
            "coefficient vector has length {}, expected {}",
            c.len(),
            params.d + 1
        )));
    }
    let r = norm(c);
    if (r - 1.0).abs() > UNIT_TOL {
        return Err(Error::DegenerateInput(format!(
            "coefficient vector has norm {r}, expected 1"
        )));
    }
    if n == 0 {
        return Err(Error::DegenerateInput(
            "sphere dimension must be at least 1".into(),
        ));
    }
    check_grid(m)?;
    let mut samples = vec![Vec::new(); m + 1];
    for i in 0..=m / 2 {
        let theta = params.angle(c, 2.0 * node(i, m));
        let mut p = vec![0.0; n + 1];
        p[0] = theta.sin();
        p[n] = -theta.cos();
        samples[m - i] = p.clone();
        samples[i] = p;
    }
    Loop::new(Manifold::Sphere(n), samples, south_pole(n).into_coords())
}

/// `γ_ω(x) = ω_{μ(x)}`: the push-off of a to-and-fro loop along the meridian
/// arcs to `x` and `−x`.
pub fn embed_gamma(omega: &Loop, x: &SpherePoint) -> Result<Loop> {
    if !omega.is_tf(DEFAULT_TF_TOL) {
        return Err(Error::Precondition(format!(
            "γ embedding needs a to-and-fro loop, tf distance is {:e}",
            omega.tf_distance()
        )));
    }
    pushoff(omega, &PushoffArcs::meridians_through(x)?)
}
