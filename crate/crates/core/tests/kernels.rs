use nalgebra::{Rotation3, Unit, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xylem::kernel::*;
use xylem::linalg::{Mat3, Vec3};

fn random_rotation(rng: &mut impl Rng) -> Mat3<f64> {
    let axis = Unit::new_normalize(Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let r = Rotation3::from_axis_angle(&axis, rng.gen_range(0.0..std::f64::consts::TAU));
    let m = r.matrix();
    Mat3::from_rows(
        Vec3::new(m[(0, 0)], m[(0, 1)], m[(0, 2)]),
        Vec3::new(m[(1, 0)], m[(1, 1)], m[(1, 2)]),
        Vec3::new(m[(2, 0)], m[(2, 1)], m[(2, 2)]),
    )
}

fn random_in_ball(rng: &mut impl Rng, radius: f64) -> Vec3<f64> {
    loop {
        let p = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if p.norm_squared() < 1.0 {
            return p * radius;
        }
    }
}

fn fd_gradient(f: impl Fn(Vec3<f64>) -> f64, p: Vec3<f64>, h: f64) -> Vec3<f64> {
    let d = |e: Vec3<f64>| (f(p + e * h) - f(p - e * h)) / (2.0 * h);
    Vec3::new(d(Vec3::x_axis()), d(Vec3::y_axis()), d(Vec3::z_axis()))
}

fn rel_error(g: Vec3<f64>, fd: Vec3<f64>) -> f64 {
    (g - fd).norm() / fd.norm().max(1e-6)
}

#[test]
fn reference_values() {
    assert_eq!(wyvill(0.0), 1.0);
    assert_eq!(wyvill(1.0), 0.0);
    assert_eq!(wyvill(0.5), 0.421875);
    assert_eq!(bump(0.0, 7.0), 1.0);
    assert_eq!(bump(0.999, 0.0), 1.0);
    assert!((bump(0.5_f64, 1.0) - 0.716_531_310_573_789).abs() < 1e-12);
    let g = kernel_gradient(&KernelShape::Wyvill, Vec3::new(0.5, 0.0, 0.0));
    assert!((g - Vec3::new(-1.6875, 0.0, 0.0)).norm() < 1e-15);
    assert_eq!(kernel_gradient(&KernelShape::Wyvill, Vec3::<f64>::zero()), Vec3::zero());
}

#[test]
fn wyvill_is_c1_at_the_support_edge() {
    let shape = KernelShape::Wyvill;
    for eps in [1e-3_f64, 1e-5, 1e-7] {
        let (v, dv) = shape.value_deriv_1d(1.0 - eps);
        assert!(v < 9.0 * eps * eps * eps && dv.abs() < 25.0 * eps * eps);
    }
    assert_eq!(shape.value_deriv_1d(1.0), (0.0, 0.0));
}

#[test]
fn bump_is_monotone() {
    for i in 0..200 {
        let r = i as f64 / 200.0;
        for s in [0.0, 0.5, 2.0, 10.0] {
            assert!(bump(r + 0.005, s) <= bump(r, s));
            if r > 0.0 {
                assert!(bump(r, s + 0.5) <= bump(r, s));
            }
        }
    }
}

#[test]
fn extreme_sharpness_stays_finite() {
    for r in [0.0, 0.5, 0.99, 0.999_999_9] {
        let (v, g) = KernelShape::Bump { sharpness: 1e6_f64 }.value_grad(Vec3::new(r, 0.0, 0.0));
        assert!(v.is_finite() && g.is_finite() && v >= 0.0);
    }
}

#[test]
fn kernel_gradients_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let shapes = [KernelShape::Wyvill, KernelShape::Bump { sharpness: 0.5 }, KernelShape::Bump { sharpness: 4.0 }];
    for i in 0..10_000 {
        let shape = shapes[i % shapes.len()];
        let x = random_in_ball(&mut rng, 0.97);
        let fd = fd_gradient(|p| shape.value_grad(p).0, x, 1e-5);
        let g = kernel_gradient(&shape, x);
        assert!(rel_error(g, fd) < 1e-4, "{shape:?} at {x:?}: {g:?} vs {fd:?}");
    }
}

#[test]
fn bounding_scale_examples() {
    let s = bounding_scale(&Mat3::identity(), Vec3::new(4.0, 1.0, 1.0), Vec3::splat(2.0));
    assert_eq!(s, 0.5);
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let s = bounding_scale(&random_rotation(&mut rng), Vec3::splat(1.0), Vec3::splat(1.0));
        assert!((s - 1.0).abs() < 1e-12);
    }
}

#[test]
fn scaled_ellipsoids_fit_their_cell() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10_000 {
        let r = random_rotation(&mut rng);
        let s_e = Vec3::new(rng.gen_range(0.1..5.0), rng.gen_range(0.1..5.0), rng.gen_range(0.1..5.0));
        let s_c = Vec3::new(rng.gen_range(0.1..5.0), rng.gen_range(0.1..5.0), rng.gen_range(0.1..5.0));
        let s_b = bounding_scale(&r, s_e, s_c);
        let mut reach = 0.0_f64;
        for _ in 0..20 {
            let u = random_in_ball(&mut rng, 1.0).normalize();
            let q = r.mul_vec(u.mul_elem(s_e) * s_b);
            for a in 0..3 {
                assert!(q[a].abs() <= s_c[a] * (1.0 + 1e-12));
            }
        }
        // The tightest axis is touched by the ellipsoid's extreme point.
        for a in 0..3 {
            let row = r.rows[a].mul_elem(s_e);
            let u = row.normalize();
            let q = r.mul_vec(u.mul_elem(s_e) * s_b);
            reach = reach.max(q[a].abs() / s_c[a]);
        }
        assert!((reach - 1.0).abs() < 1e-12);
    }
}

#[test]
fn oriented_gradient_is_the_chain_rule() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let shapes = [KernelShape::Wyvill, KernelShape::Bump { sharpness: 2.0 }];
    let mut checked = 0;
    while checked < 10_000 {
        let placement = KernelPlacement {
            center: Vec3::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)),
            rotation: random_rotation(&mut rng),
            kernel_scale: Vec3::new(rng.gen_range(0.2..3.0), rng.gen_range(0.2..3.0), rng.gen_range(0.2..3.0)),
            bound_scale: rng.gen_range(0.3..1.0),
        };
        let shape = shapes[checked % 2];
        let m = placement.transform();
        let Some(minv) = m.inverse() else { continue };
        let x = random_in_ball(&mut rng, 0.97);
        let p = placement.center + minv.mul_vec(x);
        let h = 1e-6 * placement.kernel_scale.min_elem();
        let fd = fd_gradient(|q| placement.oriented_eval(&shape, q).0, p, h);
        let g = placement.oriented_eval(&shape, p).1;
        assert!(rel_error(g, fd) < 1e-4, "{g:?} vs {fd:?}");
        checked += 1;
    }
}

#[test]
fn oriented_eval_special_cases() {
    let placement = KernelPlacement {
        center: Vec3::new(1.0_f64, 2.0, 3.0),
        rotation: Mat3::identity(),
        kernel_scale: Vec3::splat(1.0),
        bound_scale: 1.0,
    };
    let shape = KernelShape::Wyvill;
    assert_eq!(placement.oriented_eval(&shape, placement.center), (1.0, Vec3::zero()));
    let x = Vec3::new(0.3, -0.2, 0.4);
    let (v, g) = placement.oriented_eval(&shape, placement.center + x);
    let (v0, g0) = shape.value_grad(x);
    assert!((v - v0).abs() < 1e-15 && (g - g0).norm() < 1e-15);
    let outside = placement.oriented_eval(&shape, placement.center + Vec3::new(1.0, 0.0, 0.0));
    assert_eq!(outside, (0.0, Vec3::zero()));
}
