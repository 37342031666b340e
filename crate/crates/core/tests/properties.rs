use std::f64::consts::{PI, SQRT_2};

use loopbu_core::embeddings::{
    embed_alpha, embed_gamma, h_lambda, tf_sphere_embed, TfSphereParams,
};
use loopbu_core::functionals::{
    build_reduced_system, coincidence_gap, linearized_gap, null_space, Component, FunctionalSpec,
};
use loopbu_core::loop_core::{
    max_node_distance, node, pushoff_homotopy, Loop, Manifold, PushoffArcs,
};
use loopbu_core::sphere_geom::{
    circle_alpha, circle_beta, equator_base, meridian_arc, slerp, SpherePoint,
};
use proptest::prelude::*;

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn unit(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, dim)
        .prop_filter("away from the origin", |v| norm(v) > 0.1)
        .prop_map(|v| {
            let r = norm(&v);
            v.into_iter().map(|x| x / r).collect()
        })
}

fn equatorial(n: usize) -> impl Strategy<Value = SpherePoint> {
    unit(n).prop_map(|mut v| {
        v.push(0.0);
        SpherePoint::new(v).unwrap()
    })
}

/// Smooth loop at the south pole: normalized `2 s0 + Σ_k a_k sin(kπt)`.
fn sphere_loop(n: usize, m: usize) -> impl Strategy<Value = Loop> {
    prop::collection::vec(prop::collection::vec(-0.3f64..0.3, n + 1), 3).prop_map(move |coeffs| {
        let mut s0 = vec![0.0; n + 1];
        s0[n] = -1.0;
        Loop::from_fn(Manifold::Sphere(n), m, s0.clone(), |i| {
            if i == 0 || i == m {
                return s0.clone();
            }
            let t = node(i, m);
            let mut v: Vec<f64> = s0.iter().map(|c| 2.0 * c).collect();
            for (k, a) in coeffs.iter().enumerate() {
                let w = ((k + 1) as f64 * PI * t).sin();
                v.iter_mut().zip(a).for_each(|(x, c)| *x += w * c);
            }
            let r = norm(&v);
            v.into_iter().map(|x| x / r).collect()
        })
        .unwrap()
    })
}

/// A to-and-fro version: the first half of a smooth loop, mirrored.
fn tf_loop(n: usize, m: usize) -> impl Strategy<Value = Loop> {
    sphere_loop(n, m).prop_map(move |l| {
        let s = l.samples();
        Loop::from_fn(Manifold::Sphere(n), m, l.base().to_vec(), |i| {
            s[i.min(m - i)].clone()
        })
        .unwrap()
    })
}

fn path(m: usize, dim: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec(-1.0f64..1.0, dim), 4).prop_map(move |c| {
        (0..=m)
            .map(|i| {
                let t = node(i, m);
                (0..dim)
                    .map(|d| {
                        c[0][d]
                            + c[1][d] * t
                            + c[2][d] * (3.0 * t).sin()
                            + c[3][d] * (7.0 * t * t).cos()
                    })
                    .collect()
            })
            .collect()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn circles_stay_on_the_sphere(x in equatorial(3), t in 0.0f64..1.0) {
        let a = circle_alpha(&x, t).unwrap();
        prop_assert!((norm(a.coords()) - 1.0).abs() < 1e-9);
        let s1 = equator_base(3);
        if x.angle_to(&s1) > 1e-3 {
            let b = circle_beta(&x, &s1, t).unwrap();
            prop_assert!((norm(b.coords()) - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn circle_alpha_reverses_under_antipode(x in equatorial(2), t in 0.0f64..1.0) {
        let a = circle_alpha(&x.antipode(), t).unwrap();
        let b = circle_alpha(&x, 1.0 - t).unwrap();
        prop_assert!(dist(a.coords(), b.coords()) < 1e-12);
    }

    #[test]
    fn meridian_ends_at_x(x in equatorial(3)) {
        let arc = meridian_arc(&x).unwrap();
        prop_assert!(dist(arc.point_at(1.0).coords(), x.coords()) < 1e-12);
    }

    #[test]
    fn slerp_is_uniform_in_angle(p in unit(4), q in unit(4), t in 0.0f64..1.0) {
        let p = SpherePoint::new(p).unwrap();
        let q = SpherePoint::new(q).unwrap();
        prop_assume!(p.angle_to(&q) < PI - 1e-3);
        let r = slerp(&p, &q, t).unwrap();
        prop_assert!((r.angle_to(&p) - t * q.angle_to(&p)).abs() < 1e-9);
    }

    #[test]
    fn star_is_an_involution(l in sphere_loop(3, 64)) {
        prop_assert_eq!(l.star().star(), l.clone());
        prop_assert_eq!(l.star().tf_distance(), l.tf_distance());
    }

    #[test]
    fn pushoff_commutes_with_reversal(l in sphere_loop(2, 64), s in 0.0f64..=1.0) {
        let arcs = PushoffArcs::quarter_meridians(2);
        let left = pushoff_homotopy(&l, s, &arcs).unwrap().star();
        let right = pushoff_homotopy(&l.star(), s, &arcs.swapped()).unwrap();
        prop_assert!(max_node_distance(&left, &right) < 1e-9);
    }

    #[test]
    fn pushoff_endpoints(l in tf_loop(3, 64)) {
        let arcs = PushoffArcs::quarter_meridians(3);
        let still = pushoff_homotopy(&l, 0.0, &arcs).unwrap();
        prop_assert_eq!(still.samples(), l.samples());
        let pushed = pushoff_homotopy(&l, 1.0, &arcs).unwrap();
        prop_assert!(pushed.tf_distance() >= SQRT_2 - 1e-6);
        prop_assert_eq!(pushed.base(), l.base());
    }

    #[test]
    fn pushoff_is_continuous_in_s(l in sphere_loop(2, 64), s in 0.0f64..0.99) {
        let arcs = PushoffArcs::quarter_meridians(2);
        let a = pushoff_homotopy(&l, s, &arcs).unwrap();
        let b = pushoff_homotopy(&l, s + 1e-7, &arcs).unwrap();
        prop_assert!(max_node_distance(&a, &b) < 1e-4);
    }

    #[test]
    fn embeddings_are_equivariant(x in equatorial(2), c in unit(2)) {
        let m = 64;
        let a = embed_alpha(&x, m).unwrap();
        let am = embed_alpha(&x.antipode(), m).unwrap();
        prop_assert!(max_node_distance(&am, &a.star()) < 1e-9);
        let omega = tf_sphere_embed(&c, &TfSphereParams::sine(1), 2, m).unwrap();
        prop_assert!(omega.is_tf(1e-8));
        let g = embed_gamma(&omega, &x).unwrap();
        let gm = embed_gamma(&omega, &x.antipode()).unwrap();
        prop_assert!(max_node_distance(&gm, &g.star()) < 1e-9);
        prop_assert!(g.tf_distance() > 1e-6);
    }

    #[test]
    fn h_lambda_is_continuous(x in equatorial(2), lambda in 0.0f64..0.99) {
        let a = h_lambda(&x, lambda, 64).unwrap();
        let b = h_lambda(&x, lambda + 1e-7, 64).unwrap();
        prop_assert!(max_node_distance(&a, &b) < 1e-5);
    }

    #[test]
    fn gap_identity(l in sphere_loop(2, 64), beta in path(64, 3)) {
        let spec = FunctionalSpec::new(vec![Component::SquaredDistanceToPath { beta }]).unwrap();
        let gap = coincidence_gap(&spec, &l).unwrap()[0];
        let lin = linearized_gap(&spec, &l).unwrap()[0].unwrap();
        prop_assert!((gap - lin).abs() <= 1e-9 * gap.abs().max(1.0));
    }

    #[test]
    fn kernel_vectors_solve_the_system(
        b1 in path(64, 2),
        b2 in path(64, 2),
        basis in 2usize..6,
    ) {
        let system = build_reduced_system(&[b1, b2], basis).unwrap();
        let kernel = null_space(&system, 1e-10);
        prop_assert!(kernel.len() >= system.unknowns().saturating_sub(system.k()));
        let scale = system.matrix().iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
        for v in &kernel {
            prop_assert!((norm(v) - 1.0).abs() < 1e-12);
            prop_assert!(norm(&system.residual(v)) <= 1e-9 * scale);
        }
        for (i, u) in kernel.iter().enumerate() {
            for w in &kernel[i + 1..] {
                let d: f64 = u.iter().zip(w).map(|(a, b)| a * b).sum();
                prop_assert!(d.abs() < 1e-12);
            }
        }
    }
}
