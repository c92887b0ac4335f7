//! Cylindrical coordinates about the pith axis (world `z`).

use crate::linalg::{Mat3, Vec3};
use crate::scalar::Real;

/// Right-handed orthonormal triple `(r̂, θ̂, ẑ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Frame<T> {
    pub r: Vec3<T>,
    pub theta: Vec3<T>,
    pub z: Vec3<T>,
}

impl<T: Real> Frame<T> {
    pub fn world() -> Self {
        Self { r: Vec3::x_axis(), theta: Vec3::y_axis(), z: Vec3::z_axis() }
    }

    /// Cylindrical frame at angle `theta`.
    pub fn at_angle(theta: T) -> Self {
        let (s, c) = theta.sin_cos();
        Self {
            r: Vec3::new(c, s, T::zero()),
            theta: Vec3::new(-s, c, T::zero()),
            z: Vec3::z_axis(),
        }
    }

    /// Columns `r̂, θ̂, ẑ`.
    pub fn matrix(&self) -> Mat3<T> {
        Mat3::from_cols(self.r, self.theta, self.z)
    }

    /// Rotation about `r̂` by `phi`; positive `phi` turns `ẑ` toward `+θ̂`.
    pub fn rotate_about_r(&self, phi: T) -> Self {
        let (s, c) = phi.sin_cos();
        Self {
            r: self.r,
            theta: self.theta * c - self.z * s,
            z: self.z * c + self.theta * s,
        }
    }

    /// Largest deviation of `[r̂ θ̂ ẑ]` from a rotation matrix.
    pub fn orthonormality_error(&self) -> T {
        let m = self.matrix();
        let handed = (self.r.cross(self.theta) - self.z).norm();
        m.orthonormality_error().max(handed)
    }

    /// Gram–Schmidt with `ẑ` kept as the primary direction.
    pub fn orthonormalized(z: Vec3<T>, r: Vec3<T>) -> Self {
        let z = z.normalize();
        let r = (r - z * r.dot(z)).normalize();
        Self { r, theta: z.cross(r), z }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cylindrical<T> {
    pub r: T,
    pub theta: T,
    pub z: T,
    pub frame: Frame<T>,
}

impl<T: Real> Cylindrical<T> {
    /// Builds from exact coordinates; `r = 0` takes the world frame.
    pub fn from_coords(r: T, theta: T, z: T) -> Self {
        let frame = if r > T::zero() { Frame::at_angle(theta) } else { Frame::world() };
        Self { r, theta, z, frame }
    }

    pub fn point(&self) -> Vec3<T> {
        let (s, c) = self.theta.sin_cos();
        Vec3::new(self.r * c, self.r * s, self.z)
    }
}

pub fn cylindrical_coords<T: Real>(p: Vec3<T>) -> Cylindrical<T> {
    let r = p.x.hypot(p.y);
    if r > T::zero() {
        let frame = Frame {
            r: Vec3::new(p.x / r, p.y / r, T::zero()),
            theta: Vec3::new(-p.y / r, p.x / r, T::zero()),
            z: Vec3::z_axis(),
        };
        Cylindrical { r, theta: p.y.atan2(p.x), z: p.z, frame }
    } else {
        Cylindrical { r, theta: T::zero(), z: p.z, frame: Frame::world() }
    }
}
