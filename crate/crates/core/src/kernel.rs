//! Compact-support kernel envelopes and oriented ellipsoid placement.

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::linalg::{Mat3, Vec3};
use crate::scalar::Real;

/// Exponents of the bump kernel past this are treated as exactly zero.
const BUMP_EXPONENT_LIMIT: f64 = 700.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelShape<T = f64> {
    /// `(1 - r²)³`
    Wyvill,
    /// `exp(-s r² / (1 - r²))`: box as `s → 0`, spike as `s → ∞`.
    Bump { sharpness: T },
}

impl<T> Default for KernelShape<T> {
    fn default() -> Self {
        Self::Wyvill
    }
}

pub fn wyvill<T: Real>(r: T) -> T {
    wyvill_sq(r * r)
}

#[inline]
fn wyvill_sq<T: Real>(r2: T) -> T {
    if r2 >= T::one() {
        return T::zero();
    }
    let q = T::one() - r2;
    q * q * q
}

pub fn bump<T: Real>(r: T, sharpness: T) -> T {
    bump_sq(r * r, sharpness).0
}

/// Returns `(K, dK/d(r²))`.
#[inline]
fn bump_sq<T: Real>(r2: T, s: T) -> (T, T) {
    if r2 >= T::one() {
        return (T::zero(), T::zero());
    }
    let q = T::one() - r2;
    let e = s * r2 / q;
    if e > T::lit(BUMP_EXPONENT_LIMIT) {
        return (T::zero(), T::zero());
    }
    let v = (-e).exp();
    (v, -v * s / (q * q))
}

impl<T: Real> KernelShape<T> {
    pub fn cast<U: Real>(&self) -> KernelShape<U> {
        match *self {
            Self::Wyvill => KernelShape::Wyvill,
            Self::Bump { sharpness } => KernelShape::Bump { sharpness: U::lit(sharpness.f64()) },
        }
    }

    /// Value of the radial profile at `r`.
    pub fn eval(&self, r: T) -> T {
        self.eval_sq(r * r).0
    }

    /// `(K, dK/d(r²))` at squared radius `r2`.
    #[inline]
    pub fn eval_sq(&self, r2: T) -> (T, T) {
        match *self {
            Self::Wyvill => {
                if r2 >= T::one() {
                    return (T::zero(), T::zero());
                }
                let q = T::one() - r2;
                (q * q * q, -T::lit(3.0) * q * q)
            }
            Self::Bump { sharpness } => bump_sq(r2, sharpness),
        }
    }

    /// Value and gradient of `K(‖x‖)` with respect to the kernel-space point `x`.
    #[inline]
    pub fn value_grad(&self, x: Vec3<T>) -> (T, Vec3<T>) {
        let (v, dv) = self.eval_sq(x.norm_squared());
        (v, x * (dv + dv))
    }

    /// Value and derivative of the 1D profile `K(|t|)`.
    #[inline]
    pub fn value_deriv_1d(&self, t: T) -> (T, T) {
        let (v, dv) = self.eval_sq(t * t);
        (v, (dv + dv) * t)
    }
}

pub fn kernel_gradient<T: Real>(shape: &KernelShape<T>, x_kernel: Vec3<T>) -> Vec3<T> {
    shape.value_grad(x_kernel).1
}

/// Uniform scale that makes the unit ball, scaled by `kernel_scale` then
/// rotated by `rotation`, fit the axis-aligned box `[-cell_scale, cell_scale]`.
///
/// The half-extent along each world axis is the 2-norm of the matching row
/// of `R·S_e`.
pub fn bounding_scale<T: Real>(rotation: &Mat3<T>, kernel_scale: Vec3<T>, cell_scale: Vec3<T>) -> T {
    let mut s = T::infinity();
    for axis in 0..3 {
        let extent = rotation.rows[axis].mul_elem(kernel_scale).norm();
        s = s.min(cell_scale[axis] / extent);
    }
    s
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelPlacement<T> {
    pub center: Vec3<T>,
    /// Columns are the kernel's principal axes in world space.
    pub rotation: Mat3<T>,
    /// Semi-axes before the bounding scale is applied.
    pub kernel_scale: Vec3<T>,
    pub bound_scale: T,
}

impl<T: Real> KernelPlacement<T> {
    /// World-to-kernel map `M = s_b⁻¹ S_e⁻¹ Rᵀ`.
    pub fn transform(&self) -> Mat3<T> {
        let inv = (self.kernel_scale * self.bound_scale).recip();
        let rt = self.rotation.transpose();
        Mat3::from_rows(rt.rows[0] * inv.x, rt.rows[1] * inv.y, rt.rows[2] * inv.z)
    }

    /// Kernel value at `p` and its gradient `Mᵀ ∇K(M(p - k))`, holding the
    /// rotation and scale fixed.
    pub fn oriented_eval(&self, shape: &KernelShape<T>, p: Vec3<T>) -> (T, Vec3<T>) {
        let m = self.transform();
        let (v, g) = shape.value_grad(m.mul_vec(p - self.center));
        (v, m.tr_mul_vec(g))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wyvill_reference_values() {
        assert_eq!(wyvill(0.0), 1.0);
        assert_eq!(wyvill(1.0), 0.0);
        assert_eq!(wyvill(1.5), 0.0);
        assert_eq!(wyvill(0.5), 0.421875);
    }

    #[test]
    fn bump_reference_values() {
        assert_eq!(bump(0.0, 3.0), 1.0);
        assert_eq!(bump(0.999, 0.0), 1.0);
        assert_eq!(bump(1.0, 1.0), 0.0);
        assert!((bump(0.5_f64, 1.0) - 0.716_531_310_573_789_2).abs() < 1e-12);
        // Deep inside the cutoff the exponent limit returns an exact zero.
        assert_eq!(bump(0.9999, 100.0), 0.0);
    }

    #[test]
    fn wyvill_gradient_reference() {
        let g = kernel_gradient(&KernelShape::Wyvill, Vec3::new(0.5_f64, 0.0, 0.0));
        assert!((g.x + 1.6875).abs() < 1e-15);
        assert_eq!(g.y, 0.0);
        assert_eq!(kernel_gradient(&KernelShape::Wyvill, Vec3::<f64>::zero()), Vec3::zero());
        assert_eq!(kernel_gradient(&KernelShape::Bump { sharpness: 2.0 }, Vec3::<f64>::zero()), Vec3::zero());
    }

    #[test]
    fn wyvill_is_c1_at_support_edge() {
        let (v, d) = KernelShape::Wyvill.value_deriv_1d(1.0_f64 - 1e-6);
        assert!(v < 1e-17 && d.abs() < 1e-10);
    }

    #[test]
    fn bounding_scale_examples() {
        let s = bounding_scale(&Mat3::identity(), Vec3::new(4.0, 1.0, 1.0), Vec3::splat(2.0));
        assert_eq!(s, 0.5);
        let r = Mat3::rotation(Vec3::new(1.0_f64, 2.0, -0.5).normalize(), 0.9);
        let s = bounding_scale(&r, Vec3::splat(1.0), Vec3::splat(1.0));
        assert!((s - 1.0).abs() < 1e-14);
    }

    #[test]
    fn oriented_eval_peak_and_identity() {
        let place = KernelPlacement {
            center: Vec3::new(0.3, -0.2, 1.0),
            rotation: Mat3::identity(),
            kernel_scale: Vec3::splat(1.0),
            bound_scale: 1.0,
        };
        assert_eq!(place.oriented_eval(&KernelShape::Wyvill, place.center), (1.0, Vec3::zero()));
        let p = Vec3::new(0.6, 0.1, 1.2);
        let (v, g) = place.oriented_eval(&KernelShape::Wyvill, p);
        let (v0, g0) = KernelShape::Wyvill.value_grad(p - place.center);
        assert_eq!(v, v0);
        assert!((g - g0).norm() < 1e-15);
    }
}
