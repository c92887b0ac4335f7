use std::f64::consts::{FRAC_PI_2, FRAC_PI_6, PI};

use nalgebra::{Rotation3, Unit, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use xylem::bsdf::*;
use xylem::linalg::{Mat3, Vec3};
use xylem::wood::ShadingRecord;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn unit(rng: &mut impl Rng) -> Vec3<f64> {
    loop {
        let v = Vec3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let n = v.norm_squared();
        if n > 1e-6 && n < 1.0 {
            return v.normalize();
        }
    }
}

fn upper(rng: &mut impl Rng) -> Vec3<f64> {
    let v = unit(rng);
    if v.z < 0.0 {
        Vec3::new(v.x, v.y, -v.z)
    } else {
        v
    }
}

fn random_rotation(rng: &mut impl Rng) -> Mat3<f64> {
    let axis = Unit::new_normalize(Vector3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let m = *Rotation3::from_axis_angle(&axis, rng.gen_range(0.0..std::f64::consts::TAU)).matrix();
    Mat3::from_rows(
        Vec3::new(m[(0, 0)], m[(0, 1)], m[(0, 2)]),
        Vec3::new(m[(1, 0)], m[(1, 1)], m[(1, 2)]),
        Vec3::new(m[(2, 0)], m[(2, 1)], m[(2, 2)]),
    )
}

fn random_record(rng: &mut impl Rng) -> ShadingRecord<f64> {
    let long = unit(rng);
    let radial = (unit(rng) - long * unit(rng).dot(long)).normalize();
    let color = |rng: &mut dyn rand::RngCore| Vec3::new(rng.gen_range(0.01..1.0), rng.gen_range(0.01..1.0), rng.gen_range(0.01..1.0));
    ShadingRecord {
        diffuse_color: color(rng),
        fiber_color: color(rng),
        highlight_width: rng.gen_range(0.05..0.5),
        fiber_dir_longitudinal: long,
        fiber_dir_radial: (radial - long * radial.dot(long)).normalize(),
        ray_mask: rng.gen_range(0.0..1.0),
        pore_mask: 0.0,
        bump_height: 0.0,
    }
}

fn coatings() -> [Coating<f64>; 3] {
    [Coating::None, Coating::Smooth, Coating::Beckmann { roughness: 0.3 }]
}

#[test]
fn fiber_angle_reference_values() {
    let u = Vec3::z_axis();
    let v = Vec3::new(0.75_f64.sqrt(), 0.0, 0.5);
    let a = fiber_angles(u, v, Vec3::x_axis());
    assert!((a.psi_i - FRAC_PI_6).abs() < 1e-15);
    assert!((a.psi_i - 0.523599).abs() < 1e-6);
    assert_eq!(a.psi_r, 0.0);
    let mut rng = rng(1);
    for _ in 0..1000 {
        let (u, vi, vr) = (unit(&mut rng), unit(&mut rng), unit(&mut rng));
        let (a, b) = (fiber_angles(u, vi, vr), fiber_angles(u, vr, vi));
        assert_eq!(a.psi_h, b.psi_h);
        assert_eq!(a.psi_d, -b.psi_d);
    }
    // Dot products just past ±1 from rounding stay defined.
    let a = fiber_angles(Vec3::x_axis(), Vec3::new(1.0 + 1e-15, 0.0, 0.0), Vec3::x_axis());
    assert!((a.psi_i - FRAC_PI_2).abs() < 1e-15);
}

#[test]
fn gaussian_integrates_to_one() {
    for sigma in [0.05, 0.2, 1.0] {
        let n = 20_000;
        let (a, b) = (-6.0 * sigma, 6.0 * sigma);
        let h = (b - a) / n as f64;
        let mut sum = normalized_gaussian(sigma, a) + normalized_gaussian(sigma, b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * normalized_gaussian(sigma, a + i as f64 * h);
        }
        let integral = sum * h / 3.0;
        assert!((integral - 1.0).abs() < 1e-6, "sigma {sigma}: {integral}");
    }
    assert!((normalized_gaussian(0.2_f64, 0.0) - 1.994711).abs() < 1e-6);
}

#[test]
fn fiber_brdf_reference_configuration() {
    let p = FiberSpecParams { u: Vec3::z_axis(), k_f: Vec3::splat(1.0), beta: 0.2 };
    let v = Vec3::new(0.6_f64, 0.8, 0.0);
    let f = fiber_brdf(&p, v, v);
    for c in f.to_array() {
        assert!((c - 1.994711).abs() < 1e-6);
    }
    let k = FiberSpecParams { k_f: Vec3::new(0.1, 0.5, 2.0), ..p };
    assert_eq!(fiber_brdf(&k, v, v), Vec3::new(0.1, 0.5, 2.0) * f.x);
}

#[test]
fn fiber_brdf_falls_off_away_from_the_cone() {
    let p = FiberSpecParams { u: Vec3::z_axis(), k_f: Vec3::splat(1.0), beta: 0.2 };
    let at = |psi: f64| Vec3::new(psi.cos(), 0.0, psi.sin());
    // ψ_h = 2.4 rad, twelve widths from the cone.
    let f = fiber_brdf(&p, at(1.2), at(1.2));
    assert!(f.max_elem() < 1e-6);
}

/// Stationary point of `-ψ_h²/2β² - 2 ln cos(ψ_d/2)` along `ψ_r`.
fn predicted_peak_offset(beta: f64, psi_i: f64) -> f64 {
    let mut h = 0.0_f64;
    for _ in 0..100 {
        h = beta * beta * ((h - 2.0 * psi_i) / 2.0).tan();
    }
    h
}

fn sweep_peak(beta: f64, psi_i: f64) -> f64 {
    let p = FiberSpecParams { u: Vec3::z_axis(), k_f: Vec3::splat(1.0), beta };
    let v_i = Vec3::new(psi_i.cos(), 0.0, psi_i.sin());
    let mut best = (f64::NEG_INFINITY, 0.0);
    for k in -899..=899 {
        let psi_r = (k as f64 * 0.1).to_radians();
        let v_r = Vec3::new(-psi_r.cos(), 0.0, psi_r.sin());
        let f = fiber_brdf(&p, v_i, v_r).x;
        if f > best.0 {
            best = (f, psi_r + psi_i);
        }
    }
    best.1
}

#[test]
fn highlight_peak_sits_at_the_stationary_point() {
    let step = 0.1_f64.to_radians();
    for beta in [0.05, 0.1, 0.2, 0.3] {
        for deg in [0.0_f64, 10.0, 30.0, 50.0] {
            let psi_i = deg.to_radians();
            let peak = sweep_peak(beta, psi_i);
            let want = predicted_peak_offset(beta, psi_i);
            assert!((peak - want).abs() <= step, "beta {beta}, psi_i {deg}: {peak} vs {want}");
        }
    }
}

#[test]
fn normal_incidence_highlight_is_on_the_cone() {
    for beta in [0.05, 0.2, 0.4] {
        assert!(sweep_peak(beta, 0.0).abs() < 1e-12);
    }
}

#[test]
fn fresnel_limits() {
    let iface = SurfaceInterface { eta: 1.5, normal: Vec3::z_axis(), coating: Coating::None };
    let (v, t) = interface_adjust(&iface, Vec3::z_axis());
    assert_eq!(v, Vec3::z_axis());
    assert_eq!(t, 0.96);
    let grazing = Vec3::new(1.0, 0.0, 1e-9).normalize();
    assert!(interface_adjust(&iface, grazing).1 < 1e-8);
    let mut prev = 1.0;
    for i in 0..=90 {
        let theta = (i as f64).to_radians();
        let (_, t) = interface_adjust(&iface, Vec3::new(theta.sin(), 0.0, theta.cos()));
        assert!(t <= prev + 1e-15 && t >= 0.0);
        prev = t;
    }
}

#[test]
fn refraction_follows_snell() {
    let mut rng = rng(2);
    for _ in 0..10_000 {
        let n = unit(&mut rng);
        let mut v = unit(&mut rng);
        if v.dot(n) < 0.0 {
            v = -v;
        }
        let eta = rng.gen_range(1.0..2.0);
        let iface = SurfaceInterface { eta, normal: n, coating: Coating::None };
        let (t, tr) = interface_adjust(&iface, v);
        let sin_i = v.cross(n).norm();
        let sin_t = t.cross(n).norm();
        assert!((sin_t * eta - sin_i).abs() < 1e-12);
        assert!((t.norm() - 1.0).abs() < 1e-12 && t.dot(n) > 0.0);
        // Refraction stays in the plane of incidence.
        assert!(t.dot(v.cross(n)).abs() < 1e-12);
        assert!((0.0..=1.0).contains(&tr));
    }
}

#[test]
fn full_bsdf_is_reciprocal_and_nonnegative() {
    let mut rng = rng(3);
    for coating in coatings() {
        for _ in 0..10_000 {
            let rec = random_record(&mut rng);
            let iface = SurfaceInterface { eta: rng.gen_range(1.0..1.8), normal: Vec3::z_axis(), coating };
            let (vi, vr) = (upper(&mut rng), upper(&mut rng));
            let (a, b) = (wood_bsdf_eval(&rec, &iface, vi, vr), wood_bsdf_eval(&rec, &iface, vr, vi));
            assert!((a - b).norm() < 1e-12, "{coating:?}: {a:?} vs {b:?}");
            assert!(a.to_array().iter().all(|&c| c >= 0.0 && c.is_finite()));
        }
    }
}

#[test]
fn below_the_surface_is_black() {
    let mut rng = rng(4);
    let rec = random_record(&mut rng);
    let iface = SurfaceInterface { eta: 1.5, normal: Vec3::z_axis(), coating: Coating::Smooth };
    let below = Vec3::new(0.0, 0.6, -0.8);
    assert_eq!(wood_bsdf_eval(&rec, &iface, below, Vec3::z_axis()), Vec3::zero());
    assert_eq!(wood_bsdf_eval(&rec, &iface, Vec3::z_axis(), below), Vec3::zero());
}

#[test]
fn fiber_brdf_is_rotation_invariant() {
    let mut rng = rng(5);
    for _ in 0..10_000 {
        let p = FiberSpecParams { u: unit(&mut rng), k_f: Vec3::new(0.3, 0.6, 0.9), beta: rng.gen_range(0.05..0.5) };
        let (vi, vr) = (unit(&mut rng), unit(&mut rng));
        let r = random_rotation(&mut rng);
        let q = FiberSpecParams { u: r.mul_vec(p.u), ..p };
        let (a, b) = (fiber_brdf(&p, vi, vr), fiber_brdf(&q, r.mul_vec(vi), r.mul_vec(vr)));
        assert!((a - b).norm() <= 1e-9 * a.norm().max(1.0));
    }
}

#[test]
fn ray_mask_blends_the_lobes_linearly() {
    let mut rng = rng(6);
    for _ in 0..1000 {
        let mut rec = random_record(&mut rng);
        let iface = SurfaceInterface { eta: 1.5, normal: Vec3::z_axis(), coating: Coating::Smooth };
        let (vi, vr) = (upper(&mut rng), upper(&mut rng));
        let mut eval = |mask: f64| {
            rec.ray_mask = mask;
            wood_bsdf_eval(&rec, &iface, vi, vr)
        };
        let (a, b, mid) = (eval(0.0), eval(1.0), eval(0.5));
        assert!((mid - (a + b) * 0.5).norm() < 1e-12 * a.norm().max(b.norm()).max(1.0));
        // With no rays the radial direction plays no part.
        rec.ray_mask = 0.0;
        let before = wood_bsdf_eval(&rec, &iface, vi, vr);
        rec.fiber_dir_radial = unit(&mut rng);
        assert_eq!(wood_bsdf_eval(&rec, &iface, vi, vr), before);
    }
}

#[test]
fn diffuse_only_record_is_lambertian_through_the_interface() {
    let rec = ShadingRecord {
        diffuse_color: Vec3::new(0.5, 0.4, 0.3),
        fiber_color: Vec3::zero(),
        highlight_width: 0.2,
        fiber_dir_longitudinal: Vec3::x_axis(),
        fiber_dir_radial: Vec3::y_axis(),
        ray_mask: 0.0,
        pore_mask: 0.0,
        bump_height: 0.0,
    };
    let iface = SurfaceInterface { eta: 1.0, normal: Vec3::z_axis(), coating: Coating::None };
    let f = wood_bsdf_eval(&rec, &iface, Vec3::z_axis(), Vec3::new(0.6, 0.0, 0.8));
    assert!((f - rec.diffuse_color * (1.0 / PI)).norm() < 1e-15);
}
