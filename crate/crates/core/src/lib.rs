//! Numerical tools for coincidence problems `f(α) = f(α*)` on the loop space
//! of a sphere: sampled loops with the reversal involution, the push-off
//! away from to-and-fro loops, equivariant embeddings of spheres, integral
//! functionals, and Borsuk–Ulam style solvers.

pub mod coincidence;
pub mod embeddings;
pub mod error;
pub mod functionals;
pub mod io;
pub mod loop_core;
pub mod sphere_geom;

pub use coincidence::{
    family_demo, odd_map_g, solve_bu, CoincidenceCertificate, Embedding, FamilyReport, Method,
    OddMapProblem, SolveError, SolverConfig,
};
pub use embeddings::{
    embed_alpha, embed_beta, embed_gamma, h_lambda, tf_sphere_embed, TfSphereParams,
};
pub use error::{Error, Result};
pub use functionals::{
    build_alpha_x, build_reduced_system, coincidence_gap, eval_f, null_space, quadrature,
    Component, FunctionalSpec, ReducedSystem,
};
pub use loop_core::{pushoff, pushoff_homotopy, Loop, Manifold, PushoffArcs};
pub use sphere_geom::{GeodesicArc, SpherePoint};
