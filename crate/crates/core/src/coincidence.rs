//! Coincidence finding: `f(α) = f(α*)` is pulled back along an equivariant
//! embedding `e : S^{n-1} → ΩS^n` to the zero set of the odd map
//! `g(x) = f(e(x)) − f(e(−x))`, which the classical Borsuk–Ulam theorem
//! guarantees to be non-empty when `k ≤ n − 1`.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use thiserror::Error;

use crate::embeddings::{embed_alpha, embed_gamma, tf_sphere_embed, TfSphereParams};
use crate::error::{Error, Result};
use crate::functionals::{coincidence_gap, eval_f, FunctionalSpec};
use crate::loop_core::{check_grid, Loop, Manifold, DEFAULT_TF_TOL};
use crate::sphere_geom::{dot, norm, SpherePoint};

/// Certificates must stay at least this far from the to-and-fro loops.
pub const MIN_CERTIFIED_TF_DISTANCE: f64 = 1e-6;

const SIGN_SCAN_STEPS: usize = 64;
const MAX_BISECTIONS: usize = 200;
const MAX_HALVINGS: usize = 30;

/// Which equivariant embedding of the equator is used.
#[derive(Debug, Clone, PartialEq)]
pub enum Embedding {
    /// Great circles through `s0`, `x`, `−x`.
    Alpha,
    /// Push-off of a fixed to-and-fro loop along the meridians to `±x`.
    Gamma(Loop),
}

/// `g(x) = f(e(x)) − f(e(−x))` on the equator `S^{n-1}` of `S^n`.
#[derive(Debug, Clone)]
pub struct OddMapProblem {
    spec: FunctionalSpec,
    embedding: Embedding,
    n: usize,
    m: usize,
}

impl OddMapProblem {
    pub fn new(spec: FunctionalSpec, embedding: Embedding, n: usize, m: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::DegenerateInput(
                "sphere dimension must be at least 1".into(),
            ));
        }
        check_grid(m)?;
        spec.check_compatible(Manifold::Sphere(n), m)?;
        if let Embedding::Gamma(omega) = &embedding {
            if omega.manifold() != Manifold::Sphere(n) || omega.m() != m {
                return Err(Error::GridMismatch(
                    "the to-and-fro loop must live on the same sphere and grid".into(),
                ));
            }
            if !omega.is_tf(DEFAULT_TF_TOL) {
                return Err(Error::Precondition(format!(
                    "γ embedding needs a to-and-fro loop, tf distance is {:e}",
                    omega.tf_distance()
                )));
            }
        }
        Ok(OddMapProblem {
            spec,
            embedding,
            n,
            m,
        })
    }

    pub fn spec(&self) -> &FunctionalSpec {
        &self.spec
    }

    pub fn embedding(&self) -> &Embedding {
        &self.embedding
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.spec.k()
    }

    /// Whether the Borsuk–Ulam guarantee applies (`k ≤ n − 1`).
    pub fn is_guaranteed(&self) -> bool {
        self.k() < self.n
    }

    /// The loop `e(x)` for an equatorial point `x`.
    pub fn embed(&self, x: &SpherePoint) -> Result<Loop> {
        if x.dim() != self.n {
            return Err(Error::DegenerateInput(format!(
                "point of S^{} given for a problem on S^{}",
                x.dim(),
                self.n
            )));
        }
        match &self.embedding {
            Embedding::Alpha => embed_alpha(x, self.m),
            Embedding::Gamma(omega) => embed_gamma(omega, x),
        }
    }

    fn f_at(&self, x: &SpherePoint) -> Result<Vec<f64>> {
        eval_f(&self.spec, &self.embed(x)?)
    }

    fn g_at(&self, x: &SpherePoint) -> Result<Vec<f64>> {
        let f = self.f_at(x)?;
        let fm = self.f_at(&x.antipode())?;
        Ok(f.iter().zip(&fm).map(|(a, b)| a - b).collect())
    }

    /// `g` at a point of `S^{n-1}` given by its `n` equatorial coordinates.
    fn g_equatorial(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.g_at(&SpherePoint::on_equator(y)?)
    }
}

/// `g(x) = f(e(x)) − f(e(−x))`; odd in `x` by construction.
pub fn odd_map_g(problem: &OddMapProblem, x: &SpherePoint) -> Result<Vec<f64>> {
    if !x.is_equatorial() {
        return Err(Error::DegenerateInput(format!(
            "odd map is defined on the equator, last coordinate is {}",
            x.height()
        )));
    }
    problem.g_at(x)
}

#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Target for `‖g(x)‖`.
    pub tol: f64,
    /// Gauss–Newton iteration cap.
    pub iters: usize,
    /// Size of the hemisphere search grid.
    pub grid_points: usize,
    /// Central finite-difference step of the Jacobian.
    pub fd_step: f64,
    /// Admit `k ≥ n`, where a zero is not guaranteed.
    pub best_effort: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            tol: 1e-8,
            iters: 100,
            grid_points: 1 << 12,
            fd_step: 1e-5,
            best_effort: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Bisection,
    GaussNewton,
    GridOnly,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Bisection => "bisection",
            Method::GaussNewton => "gauss_newton",
            Method::GridOnly => "grid_only",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "bisection" => Some(Method::Bisection),
            "gauss_newton" => Some(Method::GaussNewton),
            "grid_only" => Some(Method::GridOnly),
            _ => None,
        }
    }
}

/// A loop `α = e(x)` off the to-and-fro set with `f(α) ≈ f(α*)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoincidenceCertificate {
    pub x: SpherePoint,
    pub loop_: Loop,
    /// `‖f(α) − f(α*)‖` computed from `loop_`.
    pub residual: f64,
    pub tf_distance: f64,
    /// `‖g(x)‖` at the returned point.
    pub g_norm: f64,
    pub iterations: usize,
    pub method: Method,
}

impl CoincidenceCertificate {
    fn build(
        problem: &OddMapProblem,
        x: SpherePoint,
        g_norm: f64,
        iterations: usize,
        method: Method,
    ) -> Result<Self> {
        let loop_ = problem.embed(&x)?;
        let residual = norm(&coincidence_gap(&problem.spec, &loop_)?);
        let tf_distance = loop_.tf_distance();
        Ok(CoincidenceCertificate {
            x,
            loop_,
            residual,
            tf_distance,
            g_norm,
            iterations,
            method,
        })
    }

    /// Recomputes residual and tf distance from the stored loop.
    pub fn validate(&self, spec: &FunctionalSpec) -> Result<()> {
        let residual = norm(&coincidence_gap(spec, &self.loop_)?);
        let tf = self.loop_.tf_distance();
        if (residual - self.residual).abs() > 1e-12 {
            return Err(Error::Precondition(format!(
                "stored residual {} but loop gives {residual}",
                self.residual
            )));
        }
        if (tf - self.tf_distance).abs() > 1e-12 {
            return Err(Error::Precondition(format!(
                "stored tf distance {} but loop gives {tf}",
                self.tf_distance
            )));
        }
        if tf <= MIN_CERTIFIED_TF_DISTANCE {
            return Err(Error::Precondition(format!(
                "certificate loop is to-and-fro (tf distance {tf:e})"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error(transparent)]
    Problem(#[from] Error),
    /// The search stalled; the best candidate is attached.
    #[error("no convergence: best candidate has |g| = {:e}", .0.g_norm)]
    NoConvergence(Box<CoincidenceCertificate>),
}

/// Deterministic point set on the closed upper hemisphere `{y_d ≥ 0}` of `S^{d-1} ⊂ R^d`.
///
/// Uniform angles on a half circle for `S^1`, a Fibonacci spiral for `S^2`, and a
/// cell-centred tensor grid of hyperspherical angles above that.
pub fn hemisphere_grid(dim: usize, count: usize) -> Vec<Vec<f64>> {
    let count = count.max(1);
    match dim {
        0 => Vec::new(),
        1 => vec![vec![1.0]],
        2 => (0..count)
            .map(|j| {
                let phi = PI * j as f64 / count as f64;
                vec![phi.cos(), phi.sin()]
            })
            .collect(),
        3 => {
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|j| {
                    let z = (j as f64 + 0.5) / count as f64;
                    let r = (1.0 - z * z).sqrt();
                    let th = golden * j as f64;
                    vec![r * th.cos(), r * th.sin(), z]
                })
                .collect()
        }
        _ => {
            let angles = dim - 1;
            let per_axis = ((count as f64).powf(1.0 / angles as f64).round() as usize).max(2);
            let total = per_axis.pow(angles as u32);
            (0..total)
                .map(|mut idx| {
                    let psi: Vec<f64> = (0..angles)
                        .map(|_| {
                            let j = idx % per_axis;
                            idx /= per_axis;
                            PI * (j as f64 + 0.5) / per_axis as f64
                        })
                        .collect();
                    hyperspherical(&psi)
                })
                .collect()
        }
    }
}

/// Point of `S^{a} ⊂ R^{a+1}` with hyperspherical angles `psi`.
fn hyperspherical(psi: &[f64]) -> Vec<f64> {
    let mut v = Vec::with_capacity(psi.len() + 1);
    let mut sin_prod = 1.0;
    for &p in psi {
        v.push(sin_prod * p.cos());
        sin_prod *= p.sin();
    }
    v.push(sin_prod);
    v
}

/// Deterministic point set covering all of `S^d ⊂ R^{d+1}`.
pub fn sphere_grid(d: usize, count: usize) -> Vec<Vec<f64>> {
    let count = count.max(1);
    match d {
        0 => vec![vec![1.0], vec![-1.0]],
        1 => (0..count)
            .map(|j| {
                let phi = TAU * j as f64 / count as f64;
                vec![phi.cos(), phi.sin()]
            })
            .collect(),
        2 => {
            let golden = PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|j| {
                    let z = 1.0 - 2.0 * (j as f64 + 0.5) / count as f64;
                    let r = (1.0 - z * z).sqrt();
                    let th = golden * j as f64;
                    vec![r * th.cos(), r * th.sin(), z]
                })
                .collect()
        }
        _ => {
            let mut pts = hemisphere_grid(d + 1, count.div_ceil(2));
            let lower: Vec<Vec<f64>> = pts.iter().map(|p| p.iter().map(|c| -c).collect()).collect();
            pts.extend(lower);
            pts
        }
    }
}

/// Orthonormal completion of the unit vector `x` in `R^n`.
fn tangent_basis(x: &[f64]) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| x[a].abs().total_cmp(&x[b].abs()).then(a.cmp(&b)));
    for &axis in &order {
        if basis.len() == n - 1 {
            break;
        }
        let mut v = vec![0.0; n];
        v[axis] = 1.0;
        for b in std::iter::once(x).chain(basis.iter().map(|b| b.as_slice())) {
            let c = dot(&v, b);
            v.iter_mut().zip(b).for_each(|(vi, bi)| *vi -= c * bi);
        }
        let r = norm(&v);
        if r > 1e-8 {
            v.iter_mut().for_each(|vi| *vi /= r);
            basis.push(v);
        }
    }
    basis
}

fn unit(v: Vec<f64>) -> Vec<f64> {
    let r = norm(&v);
    v.into_iter().map(|c| c / r).collect()
}

fn on_half_circle(x0: &[f64], y: &[f64], phi: f64) -> Vec<f64> {
    let (s, c) = phi.sin_cos();
    unit(x0.iter().zip(y).map(|(a, b)| c * a + s * b).collect())
}

struct Candidate {
    y: Vec<f64>,
    g: Vec<f64>,
}

impl Candidate {
    fn size(&self) -> f64 {
        norm(&self.g)
    }
}

/// Finds `x ∈ S^{n-1}` with `‖g(x)‖ ≤ config.tol` and certifies the loop `e(x)`.
///
/// The hemisphere grid is evaluated first; the best point (smallest `‖g‖`, ties to
/// the lowest index) seeds bisection along a half great circle when `k = 1` and a
/// damped Gauss–Newton iteration on the sphere otherwise.
pub fn solve_bu(
    problem: &OddMapProblem,
    config: &SolverConfig,
) -> std::result::Result<CoincidenceCertificate, SolveError> {
    let (n, k) = (problem.n, problem.k());
    if !problem.is_guaranteed() && !config.best_effort {
        return Err(Error::Precondition(format!(
            "k = {k} components on S^{n}: a zero is only guaranteed for k ≤ n − 1 = {}; \
             enable best-effort mode to search anyway",
            n - 1
        ))
        .into());
    }
    if !(config.tol > 0.0 && config.fd_step > 0.0) {
        return Err(Error::Precondition("tolerances must be positive".into()).into());
    }

    let grid = hemisphere_grid(n, config.grid_points);
    let values = grid
        .par_iter()
        .map(|y| problem.g_equatorial(y))
        .collect::<Result<Vec<_>>>()?;
    let (best_idx, _) = values.iter().enumerate().map(|(i, g)| (i, norm(g))).fold(
        (0, f64::INFINITY),
        |acc, (i, v)| if v < acc.1 { (i, v) } else { acc },
    );
    let best = Candidate {
        y: grid[best_idx].clone(),
        g: values[best_idx].clone(),
    };

    let certify = |c: Candidate, iterations: usize, method: Method| {
        let g_norm = c.size();
        CoincidenceCertificate::build(
            problem,
            SpherePoint::on_equator(&c.y)?,
            g_norm,
            iterations,
            method,
        )
    };

    if best.size() <= config.tol {
        let method = if k == 1 {
            Method::Bisection
        } else {
            Method::GaussNewton
        };
        return Ok(certify(best, 0, method)?);
    }

    let (found, iterations, converged) = if k == 1 && n >= 2 {
        bisect_half_circle(problem, best, config)?
    } else if n >= 2 {
        gauss_newton(problem, best, config)?
    } else {
        (best, 0, false)
    };

    if converged {
        let method = if k == 1 {
            Method::Bisection
        } else {
            Method::GaussNewton
        };
        Ok(certify(found, iterations, method)?)
    } else {
        Err(SolveError::NoConvergence(Box::new(certify(
            found,
            iterations,
            Method::GridOnly,
        )?)))
    }
}

fn bisect_half_circle(
    problem: &OddMapProblem,
    start: Candidate,
    config: &SolverConfig,
) -> Result<(Candidate, usize, bool)> {
    let x0 = start.y.clone();
    let y = tangent_basis(&x0).swap_remove(0);
    let g_of = |phi: f64| -> Result<(Vec<f64>, f64)> {
        let p = on_half_circle(&x0, &y, phi);
        let g = problem.g_equatorial(&p)?[0];
        Ok((p, g))
    };

    // g(−x0) = −g(x0), so some step of the half circle changes sign.
    let g0 = start.g[0];
    let (mut lo, mut g_lo) = (0.0, g0);
    let mut hi = PI;
    let mut best = start;
    for step in 1..=SIGN_SCAN_STEPS {
        let phi = PI * step as f64 / SIGN_SCAN_STEPS as f64;
        let (p, g) = if step == SIGN_SCAN_STEPS {
            (x0.iter().map(|c| -c).collect(), -g0)
        } else {
            g_of(phi)?
        };
        if g.abs() < best.g[0].abs() {
            best = Candidate {
                y: p.clone(),
                g: vec![g],
            };
        }
        if g.abs() <= config.tol {
            return Ok((Candidate { y: p, g: vec![g] }, step, true));
        }
        if g.signum() != g_lo.signum() {
            hi = phi;
            break;
        }
        lo = phi;
        g_lo = g;
    }

    let mut iterations = SIGN_SCAN_STEPS;
    for _ in 0..MAX_BISECTIONS {
        iterations += 1;
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let (p, g) = g_of(mid)?;
        if g.abs() < best.g[0].abs() {
            best = Candidate {
                y: p.clone(),
                g: vec![g],
            };
        }
        if g.abs() <= config.tol {
            return Ok((Candidate { y: p, g: vec![g] }, iterations, true));
        }
        if g.signum() == g_lo.signum() {
            lo = mid;
            g_lo = g;
        } else {
            hi = mid;
        }
    }
    Ok((best, iterations, false))
}

fn gauss_newton(
    problem: &OddMapProblem,
    start: Candidate,
    config: &SolverConfig,
) -> Result<(Candidate, usize, bool)> {
    let mut current = start;
    let h = config.fd_step;
    for iter in 1..=config.iters {
        let tangents = tangent_basis(&current.y);
        let k = current.g.len();
        let mut jac = DMatrix::zeros(k, tangents.len());
        for (col, b) in tangents.iter().enumerate() {
            let plus = unit(current.y.iter().zip(b).map(|(x, v)| x + h * v).collect());
            let minus = unit(current.y.iter().zip(b).map(|(x, v)| x - h * v).collect());
            let gp = problem.g_equatorial(&plus)?;
            let gm = problem.g_equatorial(&minus)?;
            for r in 0..k {
                jac[(r, col)] = (gp[r] - gm[r]) / (2.0 * h);
            }
        }
        let rhs = DVector::from_column_slice(&current.g);
        let svd = jac.svd(true, true);
        let step = match svd.solve(&rhs, 1e-12) {
            Ok(s) => -s,
            Err(_) => return Ok((current, iter, false)),
        };

        let size = current.size();
        let mut damping = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_HALVINGS {
            let y = unit(
                current
                    .y
                    .iter()
                    .enumerate()
                    .map(|(i, x)| {
                        x + damping
                            * tangents
                                .iter()
                                .zip(step.iter())
                                .map(|(b, s)| s * b[i])
                                .sum::<f64>()
                    })
                    .collect(),
            );
            let g = problem.g_equatorial(&y)?;
            if norm(&g) < size {
                accepted = Some(Candidate { y, g });
                break;
            }
            damping *= 0.5;
        }
        match accepted {
            Some(next) => current = next,
            None => return Ok((current, iter, false)),
        }
        if current.size() <= config.tol {
            return Ok((current, iter, true));
        }
    }
    Ok((current, config.iters, false))
}

/// Outcome of one fibre `ω_c` of the family sweep.
#[derive(Debug, Clone)]
pub struct FiberOutcome {
    pub c: Vec<f64>,
    pub result: std::result::Result<CoincidenceCertificate, SolveError>,
}

impl FiberOutcome {
    pub fn certificate(&self) -> Option<&CoincidenceCertificate> {
        match &self.result {
            Ok(c) => Some(c),
            Err(SolveError::NoConvergence(c)) => Some(c),
            Err(SolveError::Problem(_)) => None,
        }
    }

    pub fn is_certified(&self) -> bool {
        self.result.is_ok()
    }
}

#[derive(Debug, Clone)]
pub struct FamilyReport {
    pub fibers: Vec<FiberOutcome>,
}

impl FamilyReport {
    pub fn certified(&self) -> usize {
        self.fibers.iter().filter(|f| f.is_certified()).count()
    }

    /// Largest loop-level residual among the certified fibres.
    pub fn max_residual(&self) -> f64 {
        self.fibers
            .iter()
            .filter_map(|f| f.result.as_ref().ok())
            .map(|c| c.residual)
            .fold(0.0, f64::max)
    }

    pub fn all_certified(&self) -> bool {
        self.certified() == self.fibers.len()
    }
}

/// Default number of fibres for a family over `S^d`.
pub fn default_fiber_count(d: usize) -> usize {
    match d {
        0 => 2,
        1 => 64,
        _ => 256,
    }
}

/// Solves the γ-embedding problem on every fibre `ω_c`, `c` on a grid of `S^d`.
#[allow(clippy::too_many_arguments)]
pub fn family_demo(
    spec: &FunctionalSpec,
    params: &TfSphereParams,
    config: &SolverConfig,
    n: usize,
    m: usize,
    fibers: usize,
) -> Result<FamilyReport> {
    if spec.k() >= n && !config.best_effort {
        return Err(Error::Precondition(format!(
            "family sweep needs k ≤ n − 1, got k = {} on S^{n}",
            spec.k()
        )));
    }
    let grid = sphere_grid(params.d(), fibers);
    let fibers = grid
        .into_par_iter()
        .map(|c| {
            let result = tf_sphere_embed(&c, params, n, m)
                .and_then(|omega| OddMapProblem::new(spec.clone(), Embedding::Gamma(omega), n, m))
                .map_err(SolveError::from)
                .and_then(|problem| solve_bu(&problem, config));
            FiberOutcome { c, result }
        })
        .collect();
    Ok(FamilyReport { fibers })
}
