//! Integral functionals of loops, the coincidence gap `f(α) − f(α*)`, and
//! the reduction of `f(α) = f(α*)` for squared-distance functionals to a
//! homogeneous linear system on paths `x : [0, 1/4] → R^n` with `x(0) = 0`.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::embeddings::BasisFn;
use crate::error::{Error, Result};
use crate::loop_core::{check_grid, node, Loop, Manifold};
use crate::sphere_geom::{dot, norm};

/// Default relative singular-value threshold of [`null_space`].
pub const DEFAULT_KERNEL_TOL: f64 = 1e-10;

/// Composite trapezoid rule for samples on a uniform grid of `[0, 1]`.
pub fn quadrature(values: &[f64]) -> f64 {
    trapezoid(values, 1.0)
}

/// Composite trapezoid rule over an interval of length `width`.
pub fn trapezoid(values: &[f64], width: f64) -> f64 {
    assert!(
        values.len() >= 2,
        "trapezoid rule needs at least two samples"
    );
    let m = values.len() - 1;
    let inner: f64 = values[1..m].iter().sum();
    width / m as f64 * (0.5 * (values[0] + values[m]) + inner)
}

/// Composite Simpson rule on `[a, b]` with an even number of panels.
fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    debug_assert!(panels.is_multiple_of(2));
    let h = (b - a) / panels as f64;
    let mut acc = f(a) + f(b);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// Linear interpolation of a path sampled on a uniform grid of `[0, 1]`.
pub fn path_eval(samples: &[Vec<f64>], t: f64) -> Vec<f64> {
    let m = samples.len() - 1;
    let pos = t.clamp(0.0, 1.0) * m as f64;
    let snapped = pos.round();
    if (pos - snapped).abs() <= 4.0 * f64::EPSILON * m as f64 {
        return samples[snapped as usize].clone();
    }
    let i = (pos.floor() as usize).min(m - 1);
    let frac = pos - i as f64;
    samples[i]
        .iter()
        .zip(&samples[i + 1])
        .map(|(a, b)| a + frac * (b - a))
        .collect()
}

/// One scalar component `f_j` of a functional.
#[derive(Debug, Clone, PartialEq)]
pub enum Component {
    /// `∫ ‖α(t) − β(t)‖² dt` for a path `β` sampled on the loop grid.
    SquaredDistanceToPath { beta: Vec<Vec<f64>> },
    /// `∫ w(t) α_axis(t) dt` with `w` sampled on the loop grid.
    WeightedCoordinate { axis: usize, weights: Vec<f64> },
}

impl Component {
    fn grid(&self) -> usize {
        match self {
            Component::SquaredDistanceToPath { beta } => beta.len() - 1,
            Component::WeightedCoordinate { weights, .. } => weights.len() - 1,
        }
    }
}

/// A vector `f = (f_1, …, f_k)` of integral functionals on loops.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalSpec {
    components: Vec<Component>,
    m: usize,
    dim: Option<usize>,
}

impl FunctionalSpec {
    pub fn new(components: Vec<Component>) -> Result<Self> {
        let first = components.first().ok_or_else(|| {
            Error::InvalidSpec("a functional needs at least one component".into())
        })?;
        if first.grid() < 1 {
            return Err(Error::InvalidSpec(
                "component sampled at fewer than two nodes".into(),
            ));
        }
        let m = first.grid();
        let mut dim = None;
        for (j, c) in components.iter().enumerate() {
            if c.grid() != m {
                return Err(Error::InvalidSpec(format!(
                    "component {j} is sampled on {} intervals, component 0 on {m}",
                    c.grid()
                )));
            }
            match c {
                Component::SquaredDistanceToPath { beta } => {
                    let d = beta[0].len();
                    if d == 0 {
                        return Err(Error::InvalidSpec(format!(
                            "component {j}: empty path points"
                        )));
                    }
                    if beta
                        .iter()
                        .any(|p| p.len() != d || p.iter().any(|v| !v.is_finite()))
                    {
                        return Err(Error::InvalidSpec(format!(
                            "component {j}: path points must be finite with {d} coordinates"
                        )));
                    }
                    match dim {
                        None => dim = Some(d),
                        Some(prev) if prev != d => {
                            return Err(Error::InvalidSpec(format!(
                                "component {j}: path dimension {d} differs from {prev}"
                            )))
                        }
                        _ => {}
                    }
                }
                Component::WeightedCoordinate { weights, .. } => {
                    if weights.iter().any(|w| !w.is_finite()) {
                        return Err(Error::InvalidSpec(format!(
                            "component {j}: non-finite weight"
                        )));
                    }
                }
            }
        }
        Ok(FunctionalSpec { components, m, dim })
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn k(&self) -> usize {
        self.components.len()
    }

    /// Grid size the components are sampled on.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Ambient dimension fixed by the paths, if any component has one.
    pub fn ambient_dim(&self) -> Option<usize> {
        self.dim
    }

    /// Checks that the functional can be evaluated on loops of `manifold` sampled with `m`.
    pub fn check_compatible(&self, manifold: Manifold, m: usize) -> Result<()> {
        if m != self.m {
            return Err(Error::GridMismatch(format!(
                "functional sampled on {} intervals, loop on {m}",
                self.m
            )));
        }
        let dim = manifold.ambient_dim();
        if let Some(d) = self.dim {
            if d != dim {
                return Err(Error::GridMismatch(format!(
                    "functional paths live in R^{d}, loop in R^{dim}"
                )));
            }
        }
        for (j, c) in self.components.iter().enumerate() {
            if let Component::WeightedCoordinate { axis, .. } = c {
                if *axis >= dim {
                    return Err(Error::GridMismatch(format!(
                        "component {j} reads axis {axis} of a loop in R^{dim}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Largest norm of a path sample (at least 1); the natural size of the functional.
    pub fn scale(&self) -> f64 {
        self.components
            .iter()
            .filter_map(|c| match c {
                Component::SquaredDistanceToPath { beta } => {
                    Some(beta.iter().map(|p| norm(p)).fold(0.0, f64::max))
                }
                Component::WeightedCoordinate { .. } => None,
            })
            .fold(1.0, f64::max)
    }
}

fn eval_component(c: &Component, alpha: &Loop) -> f64 {
    let values: Vec<f64> = match c {
        Component::SquaredDistanceToPath { beta } => alpha
            .samples()
            .iter()
            .zip(beta)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum())
            .collect(),
        Component::WeightedCoordinate { axis, weights } => alpha
            .samples()
            .iter()
            .zip(weights)
            .map(|(a, w)| w * a[*axis])
            .collect(),
    };
    quadrature(&values)
}

/// `(f_1(α), …, f_k(α))`.
pub fn eval_f(spec: &FunctionalSpec, alpha: &Loop) -> Result<Vec<f64>> {
    spec.check_compatible(alpha.manifold(), alpha.m())?;
    Ok(spec
        .components
        .iter()
        .map(|c| eval_component(c, alpha))
        .collect())
}

/// `f(α) − f(α*)`; zero exactly on the coincidence set.
pub fn coincidence_gap(spec: &FunctionalSpec, alpha: &Loop) -> Result<Vec<f64>> {
    let f = eval_f(spec, alpha)?;
    let fs = eval_f(spec, &alpha.star())?;
    Ok(f.iter().zip(&fs).map(|(a, b)| a - b).collect())
}

/// The gap of a squared-distance component written as a linear functional
/// of `α`: `2 ∫ ⟨α(t), β(1 − t) − β(t)⟩ dt`. `None` for other components.
pub fn linearized_gap(spec: &FunctionalSpec, alpha: &Loop) -> Result<Vec<Option<f64>>> {
    spec.check_compatible(alpha.manifold(), alpha.m())?;
    let m = alpha.m();
    Ok(spec
        .components
        .iter()
        .map(|c| match c {
            Component::SquaredDistanceToPath { beta } => {
                let values: Vec<f64> = (0..=m)
                    .map(|i| {
                        let a = alpha.sample(i);
                        let (fwd, back) = (&beta[i], &beta[m - i]);
                        a.iter()
                            .zip(fwd.iter().zip(back))
                            .map(|(x, (b, r))| x * (r - b))
                            .sum()
                    })
                    .collect();
                Some(2.0 * quadrature(&values))
            }
            Component::WeightedCoordinate { .. } => None,
        })
        .collect())
}

/// `φ_a(t) = sin(4πat)`, `a = 1..=count`: vanishes at `0` and `1/4`.
pub fn sine_basis(count: usize) -> Vec<BasisFn> {
    (1..=count)
        .map(|a| {
            let w = 4.0 * PI * a as f64;
            Arc::new(move |t: f64| (w * t).sin()) as BasisFn
        })
        .collect()
}

/// The homogeneous system `∫_0^{1/4} ⟨x(t), h_j(t)⟩ dt = 0`, `j = 1..k`, restricted to
/// `x = Σ_a φ_a c_a`, where `h_j(t) = β_j(1−t) − β_j(t) + β_j(1/2+t) − β_j(1/2−t)`.
///
/// Column `a·n + i` holds the coefficient of coordinate `i` of `c_a`.
#[derive(Clone)]
pub struct ReducedSystem {
    matrix: DMatrix<f64>,
    n: usize,
    basis: Vec<BasisFn>,
    input_scale: f64,
}

impl std::fmt::Debug for ReducedSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ReducedSystem")
            .field("matrix", &self.matrix)
            .field("n", &self.n)
            .field("basis_size", &self.basis.len())
            .finish()
    }
}

impl ReducedSystem {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Number of equations `k`.
    pub fn k(&self) -> usize {
        self.matrix.nrows()
    }

    /// Dimension `n` of the target space of `x`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of scalar basis functions `N`.
    pub fn basis_size(&self) -> usize {
        self.basis.len()
    }

    pub fn unknowns(&self) -> usize {
        self.basis.len() * self.n
    }

    /// `x(t) = Σ_a φ_a(t) c_a`.
    pub fn path_value(&self, coeffs: &[f64], t: f64) -> Vec<f64> {
        let n = self.n;
        let mut x = vec![0.0; n];
        for (a, phi) in self.basis.iter().enumerate() {
            let p = phi(t);
            for (i, xi) in x.iter_mut().enumerate() {
                *xi += p * coeffs[a * n + i];
            }
        }
        x
    }

    /// `M c`.
    pub fn residual(&self, coeffs: &[f64]) -> Vec<f64> {
        let c = nalgebra::DVector::from_column_slice(coeffs);
        (&self.matrix * c).iter().copied().collect()
    }
}

/// Quadrature panels per grid interval of the paths; must be even.
fn panels_per_interval(intervals: usize) -> usize {
    let q = 4096usize.div_ceil(intervals.max(1));
    q + q % 2
}

/// Builds the reduced system with the default sine basis of size `basis_size`.
pub fn build_reduced_system(betas: &[Vec<Vec<f64>>], basis_size: usize) -> Result<ReducedSystem> {
    build_reduced_system_with_basis(betas, sine_basis(basis_size))
}

/// Builds the reduced system for an arbitrary basis with `φ_a(0) = 0`.
///
/// Entries are integrated with composite Simpson panels aligned to the grid of
/// the paths, so that the piecewise-linear interpolant of `β_j` is smooth on
/// every panel and the matrix is accurate far beyond the loop-grid trapezoid rule.
pub fn build_reduced_system_with_basis(
    betas: &[Vec<Vec<f64>>],
    basis: Vec<BasisFn>,
) -> Result<ReducedSystem> {
    if betas.is_empty() {
        return Err(Error::InvalidSpec("at least one path is required".into()));
    }
    if basis.is_empty() {
        return Err(Error::InvalidSpec("basis must not be empty".into()));
    }
    let spec = FunctionalSpec::new(
        betas
            .iter()
            .map(|b| Component::SquaredDistanceToPath { beta: b.clone() })
            .collect(),
    )?;
    let m = spec.m();
    if m % 4 != 0 {
        return Err(Error::GridMismatch(format!(
            "path grid {m} must be divisible by 4"
        )));
    }
    let n = spec
        .ambient_dim()
        .expect("squared-distance components carry a dimension");
    for (a, phi) in basis.iter().enumerate() {
        if phi(0.0).abs() > 1e-12 {
            return Err(Error::InvalidSpec(format!(
                "basis function {a} does not vanish at 0"
            )));
        }
    }
    let k = betas.len();
    if basis.len() * n <= k {
        log::warn!(
            "insufficient basis: {} unknowns for {k} equations, the kernel may be trivial",
            basis.len() * n
        );
    }

    let intervals = m / 4;
    let panels = panels_per_interval(intervals);
    let width = 1.0 / m as f64;
    let mut matrix = DMatrix::zeros(k, basis.len() * n);
    for (j, beta) in betas.iter().enumerate() {
        let h = |t: f64| -> Vec<f64> {
            let a = path_eval(beta, 1.0 - t);
            let b = path_eval(beta, t);
            let c = path_eval(beta, 0.5 + t);
            let d = path_eval(beta, 0.5 - t);
            (0..n).map(|i| a[i] - b[i] + c[i] - d[i]).collect()
        };
        for (a, phi) in basis.iter().enumerate() {
            for i in 0..n {
                matrix[(j, a * n + i)] = (0..intervals)
                    .map(|cell| {
                        let lo = node(cell, m);
                        simpson(|t| phi(t) * h(t)[i], lo, lo + width, panels)
                    })
                    .sum();
            }
        }
    }
    let input_scale = betas
        .iter()
        .flat_map(|b| b.iter().map(|p| norm(p)))
        .fold(0.0, f64::max);
    Ok(ReducedSystem {
        matrix,
        n,
        basis,
        input_scale,
    })
}

/// Orthonormal basis of `ker M` from the right singular vectors whose singular
/// values are at most `tol · max(σ_max, sup‖β‖)`. Each vector's largest-magnitude
/// entry is positive.
///
/// The `sup‖β‖` floor keeps a system that vanishes analytically (entries at
/// round-off level) from being read as full rank.
pub fn null_space(system: &ReducedSystem, tol: f64) -> Vec<Vec<f64>> {
    kernel_of(&system.matrix, tol, system.input_scale)
}

/// Kernel of `matrix` with singular values at most `tol · max(σ_max, floor)` treated as zero.
pub fn kernel_of(matrix: &DMatrix<f64>, tol: f64, floor: f64) -> Vec<Vec<f64>> {
    let cols = matrix.ncols();
    let rows = matrix.nrows().max(cols);
    // Pad to at least square so the SVD returns a full set of right singular vectors.
    let mut padded = DMatrix::zeros(rows, cols);
    padded.view_mut((0, 0), matrix.shape()).copy_from(matrix);
    let svd = padded.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors requested");
    let sigma_max = svd.singular_values.iter().copied().fold(0.0, f64::max);
    let threshold = tol * sigma_max.max(floor);
    svd.singular_values
        .iter()
        .enumerate()
        .filter(|(_, s)| **s <= threshold)
        .map(|(r, _)| {
            let mut v: Vec<f64> = v_t.row(r).iter().copied().collect();
            let lead = v
                .iter()
                .copied()
                .fold(0.0f64, |acc, x| if x.abs() > acc.abs() { x } else { acc });
            let sign = if lead < 0.0 { -1.0 } else { 1.0 };
            // `+ 0.0` turns negative zeros into positive ones.
            v.iter_mut().for_each(|x| *x = sign * *x + 0.0);
            v
        })
        .collect()
}

/// The loop `α_x`: `x(t)` on `[0, 1/4]`, `x(1/2 − t)` on `[1/4, 1/2]`, `0` on `[1/2, 1]`.
pub fn build_alpha_x(coeffs: &[f64], system: &ReducedSystem, m: usize) -> Result<Loop> {
    if coeffs.len() != system.unknowns() {
        return Err(Error::DegenerateInput(format!(
            "expected {} coefficients, got {}",
            system.unknowns(),
            coeffs.len()
        )));
    }
    check_grid(m)?;
    let n = system.n;
    let quarter: Vec<Vec<f64>> = (0..=m / 4)
        .map(|i| system.path_value(coeffs, node(i, m)))
        .collect();
    Loop::from_fn(Manifold::Euclidean(n), m, vec![0.0; n], |i| {
        if i <= m / 4 {
            quarter[i].clone()
        } else if i <= m / 2 {
            quarter[m / 2 - i].clone()
        } else {
            vec![0.0; n]
        }
    })
}

/// Inner product helper exposed for oracles: `∫ ⟨α(t), v(t)⟩ dt` on the loop grid.
pub fn inner_quadrature(alpha: &Loop, path: &[Vec<f64>]) -> f64 {
    let values: Vec<f64> = alpha
        .samples()
        .iter()
        .zip(path)
        .map(|(a, p)| dot(a, p))
        .collect();
    quadrature(&values)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::loop_core::node;

    fn grid_path(m: usize, f: impl Fn(f64) -> Vec<f64>) -> Vec<Vec<f64>> {
        (0..=m).map(|i| f(node(i, m))).collect()
    }

    fn euclid_loop(m: usize, f: impl Fn(f64) -> Vec<f64>) -> Loop {
        let base = f(0.0);
        Loop::from_fn(Manifold::Euclidean(base.len()), m, base, |i| f(node(i, m))).unwrap()
    }

    #[test]
    fn quadrature_examples() {
        assert_eq!(quadrature(&[1.0; 17]), 1.0);
        for m in [1, 7, 16, 64] {
            let v: Vec<f64> = (0..=m).map(|i| node(i, m)).collect();
            assert!((quadrature(&v) - 0.5).abs() < 1e-15, "m={m}");
        }
        let v: Vec<f64> = (0..=64).map(|i| (2.0 * PI * node(i, 64)).sin()).collect();
        assert!(quadrature(&v).abs() < 1e-12);
    }

    #[test]
    fn eval_f_examples() {
        let m = 64;
        let beta = grid_path(m, |t| vec![t * (1.0 - t), 0.3 * t * (1.0 - t)]);
        let alpha = euclid_loop(m, |t| vec![t * (1.0 - t), 0.3 * t * (1.0 - t)]);
        let spec = FunctionalSpec::new(vec![Component::SquaredDistanceToPath { beta }]).unwrap();
        assert_eq!(eval_f(&spec, &alpha).unwrap(), vec![0.0]);

        let zero = Loop::constant(Manifold::Euclidean(2), vec![0.0, 0.0], m).unwrap();
        let spec = FunctionalSpec::new(vec![Component::SquaredDistanceToPath {
            beta: vec![vec![1.0, 0.0]; m + 1],
        }])
        .unwrap();
        assert!((eval_f(&spec, &zero).unwrap()[0] - 1.0).abs() < 1e-15);

        // ∫ t² dt with α(t) = t, β = 0 (α is a path in R here, closed only at the base
        // point for the representation, so use the raw rule instead of a loop).
        let v: Vec<f64> = (0..=m).map(|i| node(i, m).powi(2)).collect();
        assert!((quadrature(&v) - 1.0 / 3.0).abs() < 1e-4);
    }

    #[test]
    fn eval_f_rejects_mismatched_grid() {
        let spec = FunctionalSpec::new(vec![Component::WeightedCoordinate {
            axis: 0,
            weights: vec![1.0; 33],
        }])
        .unwrap();
        let a = Loop::constant(Manifold::Euclidean(1), vec![0.0], 16).unwrap();
        assert!(matches!(eval_f(&spec, &a), Err(Error::GridMismatch(_))));
        let spec = FunctionalSpec::new(vec![Component::WeightedCoordinate {
            axis: 3,
            weights: vec![1.0; 17],
        }])
        .unwrap();
        assert!(matches!(eval_f(&spec, &a), Err(Error::GridMismatch(_))));
    }

    #[test]
    fn spec_validation() {
        assert!(FunctionalSpec::new(vec![]).is_err());
        let a = Component::WeightedCoordinate {
            axis: 0,
            weights: vec![1.0; 17],
        };
        let b = Component::WeightedCoordinate {
            axis: 0,
            weights: vec![1.0; 33],
        };
        assert!(FunctionalSpec::new(vec![a.clone(), b]).is_err());
        let c = Component::WeightedCoordinate {
            axis: 0,
            weights: vec![f64::NAN; 17],
        };
        assert!(FunctionalSpec::new(vec![a, c]).is_err());
        let p = Component::SquaredDistanceToPath {
            beta: vec![vec![0.0]; 17],
        };
        let q = Component::SquaredDistanceToPath {
            beta: vec![vec![0.0, 1.0]; 17],
        };
        assert!(FunctionalSpec::new(vec![p, q]).is_err());
    }

    #[test]
    fn gap_examples() {
        let m = 32;
        let beta = grid_path(m, |t| vec![t, t * t]);
        let spec = FunctionalSpec::new(vec![Component::SquaredDistanceToPath { beta }]).unwrap();
        let tf = euclid_loop(m, |t| vec![(PI * t).sin(), 0.0]);
        assert!(tf.is_tf(1e-12));
        assert!(coincidence_gap(&spec, &tf).unwrap()[0].abs() < 1e-12);

        let a = euclid_loop(m, |t| vec![(2.0 * PI * t).sin(), t * (1.0 - t) * (t - 0.2)]);
        let g = coincidence_gap(&spec, &a).unwrap()[0];
        let gs = coincidence_gap(&spec, &a.star()).unwrap()[0];
        assert!((g + gs).abs() < 1e-15);
        let lin = linearized_gap(&spec, &a).unwrap()[0].unwrap();
        assert!((g - lin).abs() < 1e-12, "{g} vs {lin}");
        assert!(g.abs() > 1e-3);
    }

    #[test]
    fn reduced_row_for_linear_beta() {
        // β(t) = t gives h ≡ 1, so row entry a is ∫_0^{1/4} sin(4πat) dt = (1 − cos πa)/(4πa).
        let m = 256;
        let beta = grid_path(m, |t| vec![t]);
        let sys = build_reduced_system(&[beta], 4).unwrap();
        assert_eq!(sys.matrix().shape(), (1, 4));
        let want = [1.0 / (2.0 * PI), 0.0, 1.0 / (6.0 * PI), 0.0];
        for (a, w) in want.iter().enumerate() {
            assert!((sys.matrix()[(0, a)] - w).abs() < 1e-13, "a={a}");
        }
    }

    #[test]
    fn reduced_system_vanishes_for_symmetric_paths() {
        // β(t) = β(1−t) and β(1/2+t) = β(1/2−t): h ≡ 0.
        let m = 64;
        let beta = grid_path(m, |t| vec![(4.0 * PI * t).cos(), 1.0]);
        let sys = build_reduced_system(&[beta], 3).unwrap();
        assert_eq!(sys.matrix().shape(), (1, 6));
        assert!(sys.matrix().amax() < 1e-12);
        assert_eq!(null_space(&sys, DEFAULT_KERNEL_TOL).len(), 6);
    }

    #[test]
    fn kernel_of_two_term_row() {
        let m = 64;
        let sys = build_reduced_system(&[grid_path(m, |t| vec![t])], 2).unwrap();
        let ker = null_space(&sys, DEFAULT_KERNEL_TOL);
        assert_eq!(ker.len(), 1);
        assert!((ker[0][0]).abs() < 1e-12);
        assert!((ker[0][1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn alpha_x_shape() {
        let m = 64;
        let sys = build_reduced_system(&[grid_path(m, |t| vec![t, -t])], 2).unwrap();
        let zero = build_alpha_x(&[0.0; 4], &sys, m).unwrap();
        assert!(zero.is_tf(0.0));
        let a = build_alpha_x(&[1.0, 0.0, 0.0, 0.5], &sys, m).unwrap();
        assert!(a.tf_distance() > 0.0);
        for i in 0..=m / 4 {
            assert_eq!(a.sample(i), a.sample(m / 2 - i));
        }
        for i in m / 2..=m {
            assert_eq!(a.sample(i), &[0.0, 0.0]);
        }
        assert!(build_alpha_x(&[1.0], &sys, m).is_err());
    }
}
