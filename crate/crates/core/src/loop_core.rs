//! Uniformly sampled based loops, the reversal involution `α ↦ α*` and the
//! push-off homotopy that moves any loop away from the to-and-fro loops.

use std::f64::consts::FRAC_PI_2;

use crate::error::{Error, Result};
use crate::sphere_geom::{
    distance, equator_base, meridian_arc, norm, slerp, GeodesicArc, SpherePoint, ANTIPODAL_GUARD,
    UNIT_TOL,
};

/// Default tolerance of [`is_tf`].
pub const DEFAULT_TF_TOL: f64 = 1e-8;
/// Grid sizes must be positive multiples of this.
pub const GRID_QUANTUM: usize = 16;

/// Where the loop lives: on `S^n ⊂ R^{n+1}` or in `R^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Manifold {
    Sphere(usize),
    Euclidean(usize),
}

impl Manifold {
    pub fn n(&self) -> usize {
        match *self {
            Manifold::Sphere(n) | Manifold::Euclidean(n) => n,
        }
    }

    pub fn ambient_dim(&self) -> usize {
        match *self {
            Manifold::Sphere(n) => n + 1,
            Manifold::Euclidean(n) => n,
        }
    }

    pub fn is_sphere(&self) -> bool {
        matches!(self, Manifold::Sphere(_))
    }
}

/// Validates a grid size: `m ≥ 16` and `m ≡ 0 (mod 16)`.
pub fn check_grid(m: usize) -> Result<()> {
    if m >= GRID_QUANTUM && m.is_multiple_of(GRID_QUANTUM) {
        Ok(())
    } else {
        Err(Error::GridMismatch(format!(
            "grid size m = {m} must be a positive multiple of {GRID_QUANTUM}"
        )))
    }
}

/// Grid node `t_i = i/m`.
#[inline]
pub fn node(i: usize, m: usize) -> f64 {
    i as f64 / m as f64
}

/// `(sin 2πt_i, cos 2πt_i)` with exact reflection symmetry `i ↦ m − i` and
/// exact values at the quarter points.
pub(crate) fn turn_sin_cos(i: usize, m: usize) -> (f64, f64) {
    if i == 0 || i == m {
        (0.0, 1.0)
    } else if 2 * i == m {
        (0.0, -1.0)
    } else if 4 * i == m {
        (1.0, 0.0)
    } else if 2 * i > m {
        let (s, c) = turn_sin_cos(m - i, m);
        (-s, c)
    } else {
        (std::f64::consts::TAU * node(i, m)).sin_cos()
    }
}

/// A closed path sampled at `t_i = i/m`, `i = 0..=m`, starting and ending at `base`.
#[derive(Debug, Clone, PartialEq)]
pub struct Loop {
    manifold: Manifold,
    samples: Vec<Vec<f64>>,
    base: Vec<f64>,
}

impl Loop {
    /// Builds a loop, checking every invariant of the representation.
    pub fn new(manifold: Manifold, samples: Vec<Vec<f64>>, base: Vec<f64>) -> Result<Self> {
        if let Manifold::Sphere(0) | Manifold::Euclidean(0) = manifold {
            return Err(Error::invalid_loop("n", "dimension must be at least 1"));
        }
        let dim = manifold.ambient_dim();
        if samples.is_empty() {
            return Err(Error::invalid_loop("samples", "no samples"));
        }
        let m = samples.len() - 1;
        check_grid(m).map_err(|_| {
            Error::invalid_loop(
                "m",
                format!("grid size {m} must be a positive multiple of {GRID_QUANTUM}"),
            )
        })?;
        check_point(manifold, &base, "base")?;
        for (i, p) in samples.iter().enumerate() {
            check_point(manifold, p, &format!("samples[{i}]"))?;
        }
        debug_assert_eq!(base.len(), dim);
        for i in [0, m] {
            let d = distance(&samples[i], &base);
            if d > UNIT_TOL {
                return Err(Error::invalid_loop(
                    format!("samples[{i}]"),
                    format!("endpoint is {d:e} away from the base point"),
                ));
            }
        }
        Ok(Loop {
            manifold,
            samples,
            base,
        })
    }

    /// Loop whose samples are `f(i)` for `i = 0..=m`.
    pub fn from_fn<F>(manifold: Manifold, m: usize, base: Vec<f64>, f: F) -> Result<Self>
    where
        F: FnMut(usize) -> Vec<f64>,
    {
        Loop::new(manifold, (0..=m).map(f).collect(), base)
    }

    /// The constant loop at `base`.
    pub fn constant(manifold: Manifold, base: Vec<f64>, m: usize) -> Result<Self> {
        Loop::new(manifold, vec![base.clone(); m + 1], base)
    }

    pub fn manifold(&self) -> Manifold {
        self.manifold
    }

    /// Number of grid intervals.
    pub fn m(&self) -> usize {
        self.samples.len() - 1
    }

    pub fn samples(&self) -> &[Vec<f64>] {
        &self.samples
    }

    pub fn base(&self) -> &[f64] {
        &self.base
    }

    pub fn sample(&self, i: usize) -> &[f64] {
        &self.samples[i]
    }

    /// The reversed loop `α*(t) = α(1 − t)`.
    pub fn star(&self) -> Loop {
        let mut samples = self.samples.clone();
        samples.reverse();
        Loop {
            manifold: self.manifold,
            samples,
            base: self.base.clone(),
        }
    }

    /// Largest ambient distance `‖α(t_i) − α(1 − t_i)‖` over the grid.
    pub fn tf_distance(&self) -> f64 {
        let m = self.m();
        (0..=m / 2)
            .map(|i| distance(&self.samples[i], &self.samples[m - i]))
            .fold(0.0, f64::max)
    }

    pub fn is_tf(&self, tol: f64) -> bool {
        self.tf_distance() <= tol
    }

    /// Piecewise-geodesic (sphere) or piecewise-linear (Euclidean) interpolation.
    pub fn eval(&self, t: f64) -> Result<Vec<f64>> {
        let m = self.m();
        let pos = t.clamp(0.0, 1.0) * m as f64;
        let snapped = pos.round();
        if (pos - snapped).abs() <= 4.0 * f64::EPSILON * m as f64 {
            return Ok(self.samples[snapped as usize].clone());
        }
        let i = (pos.floor() as usize).min(m - 1);
        let frac = pos - i as f64;
        let (p, q) = (&self.samples[i], &self.samples[i + 1]);
        match self.manifold {
            Manifold::Euclidean(_) => {
                Ok(p.iter().zip(q).map(|(a, b)| a + frac * (b - a)).collect())
            }
            Manifold::Sphere(_) => {
                let p = SpherePoint::new(p.clone())?;
                let q = SpherePoint::new(q.clone())?;
                Ok(slerp(&p, &q, frac)?.into_coords())
            }
        }
    }
}

fn check_point(manifold: Manifold, p: &[f64], field: &str) -> Result<()> {
    let dim = manifold.ambient_dim();
    if p.len() != dim {
        return Err(Error::invalid_loop(
            field,
            format!("expected {dim} coordinates, got {}", p.len()),
        ));
    }
    if p.iter().any(|c| !c.is_finite()) {
        return Err(Error::invalid_loop(field, "non-finite coordinate"));
    }
    if manifold.is_sphere() {
        let r = norm(p);
        if (r - 1.0).abs() > UNIT_TOL {
            return Err(Error::invalid_loop(
                field,
                format!("norm {r} deviates from 1 by more than {UNIT_TOL:e}"),
            ));
        }
    }
    Ok(())
}

/// Largest distance between corresponding grid samples of two loops.
pub fn max_node_distance(a: &Loop, b: &Loop) -> f64 {
    assert_eq!(a.m(), b.m(), "loops sampled on different grids");
    a.samples
        .iter()
        .zip(&b.samples)
        .map(|(p, q)| distance(p, q))
        .fold(0.0, f64::max)
}

/// Reversal: `α*(t) = α(1 − t)`.
pub fn star(alpha: &Loop) -> Loop {
    alpha.star()
}

pub fn tf_distance(alpha: &Loop) -> f64 {
    alpha.tf_distance()
}

pub fn is_tf(alpha: &Loop, tol: f64) -> bool {
    alpha.is_tf(tol)
}

/// The two spurs attached by the push-off: `mu` at the start of the loop and
/// `nu` at its end.
#[derive(Debug, Clone, PartialEq)]
pub struct PushoffArcs {
    mu: GeodesicArc,
    nu: GeodesicArc,
}

impl PushoffArcs {
    pub fn new(mu: GeodesicArc, nu: GeodesicArc) -> Result<Self> {
        if distance(mu.start().coords(), nu.start().coords()) > UNIT_TOL {
            return Err(Error::DegenerateInput(
                "push-off arcs must share their start point".into(),
            ));
        }
        if (mu.angular_length() - nu.angular_length()).abs() > UNIT_TOL {
            return Err(Error::DegenerateInput(format!(
                "push-off arcs must have equal length ({} vs {})",
                mu.angular_length(),
                nu.angular_length()
            )));
        }
        if mu.direction().angle_to(nu.direction()) <= ANTIPODAL_GUARD {
            return Err(Error::DegenerateInput(
                "push-off arcs must leave the base point in different directions".into(),
            ));
        }
        Ok(PushoffArcs { mu, nu })
    }

    /// Opposite quarter meridians from `s0` in the `(e_1, e_{n+1})`-plane.
    pub fn quarter_meridians(n: usize) -> Self {
        let e1 = equator_base(n);
        Self::meridians_through(&e1).expect("e_1 is equatorial")
    }

    /// `μ(x)` and `ν(x) = μ(−x)`: the meridian arcs from `s0` to `x` and to `−x`.
    pub fn meridians_through(x: &SpherePoint) -> Result<Self> {
        let mu = meridian_arc(x)?;
        let nu = meridian_arc(&x.antipode())?;
        debug_assert_eq!(mu.angular_length(), FRAC_PI_2);
        PushoffArcs::new(mu, nu)
    }

    pub fn mu(&self) -> &GeodesicArc {
        &self.mu
    }

    pub fn nu(&self) -> &GeodesicArc {
        &self.nu
    }

    /// The same arcs with the roles of `mu` and `nu` exchanged.
    pub fn swapped(&self) -> Self {
        PushoffArcs {
            mu: self.nu.clone(),
            nu: self.mu.clone(),
        }
    }
}

/// The push-off deformation `α_{sμ}` evaluated on the grid of `α`.
///
/// On `[0, s/4]` the loop runs out along `mu` up to parameter `s` and back,
/// on `[s/4, 1 − s/4]` it traverses `α` at speed `2/(2 − s)`, and on
/// `[1 − s/4, 1]` it runs out along `nu` and back. Arc parameters are the
/// original ones: `μ(u)` is `mu.point_at(u)` for `u ∈ [0, s]`.
pub fn pushoff_homotopy(alpha: &Loop, s: f64, arcs: &PushoffArcs) -> Result<Loop> {
    let n = match alpha.manifold() {
        Manifold::Sphere(n) => n,
        Manifold::Euclidean(_) => {
            return Err(Error::DegenerateInput(
                "push-off is defined for loops on a sphere".into(),
            ))
        }
    };
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::DegenerateInput(format!(
            "homotopy parameter s = {s} outside [0, 1]"
        )));
    }
    let start = arcs.mu().start();
    if start.dim() != n || distance(start.coords(), alpha.base()) > UNIT_TOL {
        return Err(Error::BaseMismatch {
            loop_base: alpha.base().to_vec(),
            arc_start: start.coords().to_vec(),
        });
    }

    let m = alpha.m();
    let speed = 2.0 / (2.0 - s);
    let (eighth, quarter) = (s / 8.0, s / 4.0);
    let samples = (0..=m)
        .map(|i| {
            let t = node(i, m);
            if t >= quarter && t <= 1.0 - quarter {
                alpha.eval((speed * (t - quarter)).clamp(0.0, 1.0))
            } else if t < eighth {
                Ok(arcs.mu().point_at(8.0 * t).into_coords())
            } else if t < quarter {
                Ok(arcs.mu().point_at(2.0 * s - 8.0 * t).into_coords())
            } else if t > 1.0 - eighth {
                Ok(arcs.nu().point_at(8.0 * (1.0 - t)).into_coords())
            } else {
                Ok(arcs.nu().point_at(8.0 * (t + quarter - 1.0)).into_coords())
            }
        })
        .collect::<Result<Vec<_>>>()?;
    Loop::new(alpha.manifold(), samples, alpha.base().to_vec())
}

/// `α_μ`, the end of the push-off homotopy.
pub fn pushoff(alpha: &Loop, arcs: &PushoffArcs) -> Result<Loop> {
    pushoff_homotopy(alpha, 1.0, arcs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphere_geom::{circle_alpha, south_pole};
    use std::f64::consts::SQRT_2;

    fn s0_loop(n: usize, m: usize) -> Loop {
        Loop::constant(Manifold::Sphere(n), south_pole(n).into_coords(), m).unwrap()
    }

    fn great_circle(x: &SpherePoint, m: usize) -> Loop {
        let n = x.dim();
        Loop::from_fn(Manifold::Sphere(n), m, south_pole(n).into_coords(), |i| {
            circle_alpha(x, node(i, m)).unwrap().into_coords()
        })
        .unwrap()
    }

    #[test]
    fn rejects_bad_grids() {
        let base = south_pole(2).into_coords();
        for m in [8, 15, 24, 0] {
            let r = Loop::new(Manifold::Sphere(2), vec![base.clone(); m + 1], base.clone());
            assert!(
                matches!(r, Err(Error::InvalidLoop { ref field, .. }) if field == "m"),
                "m={m}"
            );
        }
        assert!(Loop::constant(Manifold::Sphere(2), base, 32).is_ok());
    }

    #[test]
    fn rejects_non_unit_and_open_loops() {
        let base = south_pole(2).into_coords();
        let mut samples = vec![base.clone(); 17];
        samples[3] = vec![0.0, 0.0, -1.1];
        let err = Loop::new(Manifold::Sphere(2), samples.clone(), base.clone()).unwrap_err();
        assert!(matches!(err, Error::InvalidLoop { ref field, .. } if field == "samples[3]"));

        samples[3] = base.clone();
        samples[16] = vec![1.0, 0.0, 0.0];
        let err = Loop::new(Manifold::Sphere(2), samples, base).unwrap_err();
        assert!(matches!(err, Error::InvalidLoop { ref field, .. } if field == "samples[16]"));
    }

    #[test]
    fn star_examples() {
        let x = SpherePoint::new(vec![0.6, 0.8, 0.0]).unwrap();
        let a = great_circle(&x, 64);
        assert_eq!(a.star().star(), a);
        let c = s0_loop(2, 32);
        assert_eq!(c.star(), c);
        let b = great_circle(&x.antipode(), 64);
        assert!(max_node_distance(&a.star(), &b) < 1e-12);
    }

    #[test]
    fn tf_distance_examples() {
        let x = SpherePoint::new(vec![0.0, 1.0, 0.0]).unwrap();
        let a = great_circle(&x, 64);
        assert!((a.tf_distance() - 2.0).abs() < 1e-12);
        assert_eq!(a.star().tf_distance(), a.tf_distance());
        assert!(!a.is_tf(DEFAULT_TF_TOL));
        assert!(s0_loop(3, 16).is_tf(DEFAULT_TF_TOL));
    }

    #[test]
    fn eval_examples() {
        let x = SpherePoint::new(vec![1.0, 0.0, 0.0]).unwrap();
        let a = great_circle(&x, 32);
        for i in [0, 5, 17, 32] {
            assert_eq!(a.eval(node(i, 32)).unwrap(), a.sample(i));
        }
        let mid = a.eval(node(5, 32) + 0.5 / 32.0).unwrap();
        let p = SpherePoint::new(a.sample(5).to_vec()).unwrap();
        let q = SpherePoint::new(a.sample(6).to_vec()).unwrap();
        assert_eq!(mid, slerp(&p, &q, 0.5).unwrap().into_coords());

        let e = Loop::from_fn(Manifold::Euclidean(2), 16, vec![0.0, 0.0], |i| {
            let t = node(i, 16);
            vec![(t * (1.0 - t)), 2.0 * t * (1.0 - t)]
        })
        .unwrap();
        let mid = e.eval(0.5 / 16.0 + node(3, 16)).unwrap();
        let want: Vec<f64> = (0..2)
            .map(|k| 0.5 * (e.sample(3)[k] + e.sample(4)[k]))
            .collect();
        assert!(distance(&mid, &want) < 1e-15);
    }

    #[test]
    fn eval_reports_antipodal_neighbours() {
        let n = 1;
        let m = 16;
        let base = south_pole(n).into_coords();
        let mut samples = vec![base.clone(); m + 1];
        samples[4] = vec![0.0, 1.0];
        let a = Loop::new(Manifold::Sphere(n), samples, base).unwrap();
        assert_eq!(a.eval(0.26), Err(Error::AntipodalPair));
    }

    #[test]
    fn pushoff_at_zero_is_identity() {
        let x = SpherePoint::new(vec![0.6, 0.0, 0.8, 0.0]).unwrap();
        let a = great_circle(&x, 64);
        let arcs = PushoffArcs::quarter_meridians(3);
        assert_eq!(pushoff_homotopy(&a, 0.0, &arcs).unwrap(), a);
    }

    #[test]
    fn pushoff_probe_points() {
        let m = 64;
        let a = s0_loop(2, m);
        let arcs = PushoffArcs::quarter_meridians(2);
        let p = pushoff(&a, &arcs).unwrap();
        let mid_mu = arcs.mu().point_at(0.5);
        let mid_nu = arcs.nu().point_at(0.5);
        assert!(distance(p.sample(m / 16), mid_mu.coords()) < 1e-15);
        assert!(distance(p.sample(15 * m / 16), mid_nu.coords()) < 1e-15);
        assert!((distance(mid_mu.coords(), mid_nu.coords()) - SQRT_2).abs() < 1e-12);
        assert!(p.tf_distance() >= SQRT_2 - 1e-6);
        assert!(!p.is_tf(DEFAULT_TF_TOL));
        // tips of the spurs
        assert!(distance(p.sample(m / 8), arcs.mu().point_at(1.0).coords()) < 1e-15);
        assert!(distance(p.sample(7 * m / 8), arcs.nu().point_at(1.0).coords()) < 1e-15);
    }

    #[test]
    fn pushoff_rejects_foreign_base() {
        let n = 2;
        let base = equator_base(n).into_coords();
        let a = Loop::constant(Manifold::Sphere(n), base, 16).unwrap();
        let err = pushoff(&a, &PushoffArcs::quarter_meridians(n)).unwrap_err();
        assert!(matches!(err, Error::BaseMismatch { .. }));
    }

    #[test]
    fn pushoff_arcs_validation() {
        let x = SpherePoint::new(vec![1.0, 0.0, 0.0]).unwrap();
        let mu = meridian_arc(&x).unwrap();
        assert!(PushoffArcs::new(mu.clone(), mu.clone()).is_err());
        let short = GeodesicArc::new(south_pole(2), SpherePoint::basis(2, 1), 1.0).unwrap();
        assert!(PushoffArcs::new(mu, short).is_err());
    }
}
