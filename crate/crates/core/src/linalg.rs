//! Small fixed-size vector and matrix types.

use std::ops::{Add, AddAssign, Index, Mul, Neg, Sub, SubAssign};

use schemars::JsonSchema;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::scalar::Real;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Vec3<T> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Vec3<T> {
    #[inline]
    pub const fn new(x: T, y: T, z: T) -> Self {
        Self { x, y, z }
    }

    #[inline]
    pub fn zero() -> Self {
        Self::splat(T::zero())
    }

    #[inline]
    pub fn splat(v: T) -> Self {
        Self::new(v, v, v)
    }

    #[inline]
    pub fn x_axis() -> Self {
        Self::new(T::one(), T::zero(), T::zero())
    }

    #[inline]
    pub fn y_axis() -> Self {
        Self::new(T::zero(), T::one(), T::zero())
    }

    #[inline]
    pub fn z_axis() -> Self {
        Self::new(T::zero(), T::zero(), T::one())
    }

    pub fn from_f64(v: [f64; 3]) -> Self {
        Self::new(T::lit(v[0]), T::lit(v[1]), T::lit(v[2]))
    }

    pub fn to_f64(self) -> [f64; 3] {
        [self.x.f64(), self.y.f64(), self.z.f64()]
    }

    pub fn cast<U: Real>(self) -> Vec3<U> {
        Vec3::from_f64(self.to_f64())
    }

    #[inline]
    pub fn dot(self, o: Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    #[inline]
    pub fn cross(self, o: Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    #[inline]
    pub fn norm_squared(self) -> T {
        self.dot(self)
    }

    #[inline]
    pub fn norm(self) -> T {
        self.norm_squared().sqrt()
    }

    /// Unit vector in the same direction; the zero vector is returned unchanged.
    #[inline]
    pub fn normalize(self) -> Self {
        let n = self.norm();
        if n > T::zero() {
            self * n.recip()
        } else {
            self
        }
    }

    #[inline]
    pub fn mul_elem(self, o: Self) -> Self {
        Self::new(self.x * o.x, self.y * o.y, self.z * o.z)
    }

    #[inline]
    pub fn div_elem(self, o: Self) -> Self {
        Self::new(self.x / o.x, self.y / o.y, self.z / o.z)
    }

    #[inline]
    pub fn recip(self) -> Self {
        Self::new(self.x.recip(), self.y.recip(), self.z.recip())
    }

    #[inline]
    pub fn map(self, f: impl Fn(T) -> T) -> Self {
        Self::new(f(self.x), f(self.y), f(self.z))
    }

    #[inline]
    pub fn floor(self) -> Self {
        self.map(T::floor)
    }

    #[inline]
    pub fn max_elem(self) -> T {
        self.x.max(self.y).max(self.z)
    }

    #[inline]
    pub fn min_elem(self) -> T {
        self.x.min(self.y).min(self.z)
    }

    #[inline]
    pub fn product(self) -> T {
        self.x * self.y * self.z
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    #[inline]
    pub fn to_array(self) -> [T; 3] {
        [self.x, self.y, self.z]
    }
}

impl<T: Real> From<[T; 3]> for Vec3<T> {
    fn from(a: [T; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }
}

impl<T> Index<usize> for Vec3<T> {
    type Output = T;

    fn index(&self, i: usize) -> &T {
        match i {
            0 => &self.x,
            1 => &self.y,
            2 => &self.z,
            _ => panic!("Vec3 index {i} out of range"),
        }
    }
}

impl<T: Real> Add for Vec3<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Real> AddAssign for Vec3<T> {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl<T: Real> Sub for Vec3<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Real> SubAssign for Vec3<T> {
    #[inline]
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}

impl<T: Real> Mul<T> for Vec3<T> {
    type Output = Self;
    #[inline]
    fn mul(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

impl<T: Real> Neg for Vec3<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

impl<T: Serialize> Serialize for Vec3<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [&self.x, &self.y, &self.z].serialize(s)
    }
}

impl<'de, T: Deserialize<'de>> Deserialize<'de> for Vec3<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let [x, y, z] = <[T; 3]>::deserialize(d)?;
        Ok(Self { x, y, z })
    }
}

impl<T: JsonSchema> JsonSchema for Vec3<T> {
    fn schema_name() -> String {
        format!("Vec3_{}", T::schema_name())
    }

    fn json_schema(gen: &mut schemars::gen::SchemaGenerator) -> schemars::schema::Schema {
        <[T; 3]>::json_schema(gen)
    }
}

/// Row-major 3x3 matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat3<T> {
    pub rows: [Vec3<T>; 3],
}

impl<T: Real> Mat3<T> {
    pub fn identity() -> Self {
        Self::from_rows(Vec3::x_axis(), Vec3::y_axis(), Vec3::z_axis())
    }

    pub fn zero() -> Self {
        Self::from_rows(Vec3::zero(), Vec3::zero(), Vec3::zero())
    }

    #[inline]
    pub fn from_rows(a: Vec3<T>, b: Vec3<T>, c: Vec3<T>) -> Self {
        Self { rows: [a, b, c] }
    }

    #[inline]
    pub fn from_cols(a: Vec3<T>, b: Vec3<T>, c: Vec3<T>) -> Self {
        Self::from_rows(a, b, c).transpose()
    }

    pub fn diagonal(d: Vec3<T>) -> Self {
        let z = T::zero();
        Self::from_rows(
            Vec3::new(d.x, z, z),
            Vec3::new(z, d.y, z),
            Vec3::new(z, z, d.z),
        )
    }

    /// `a ⊗ b`, the matrix with entries `a_i b_j`.
    #[inline]
    pub fn outer(a: Vec3<T>, b: Vec3<T>) -> Self {
        Self::from_rows(b * a.x, b * a.y, b * a.z)
    }

    /// Rotation by `angle` about the unit vector `axis` (right-hand rule).
    pub fn rotation(axis: Vec3<T>, angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        let t = T::one() - c;
        let Vec3 { x, y, z } = axis;
        Self::from_rows(
            Vec3::new(t * x * x + c, t * x * y - s * z, t * x * z + s * y),
            Vec3::new(t * x * y + s * z, t * y * y + c, t * y * z - s * x),
            Vec3::new(t * x * z - s * y, t * y * z + s * x, t * z * z + c),
        )
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.rows[i][j]
    }

    #[inline]
    pub fn col(&self, j: usize) -> Vec3<T> {
        Vec3::new(self.rows[0][j], self.rows[1][j], self.rows[2][j])
    }

    #[inline]
    pub fn transpose(&self) -> Self {
        Self::from_rows(self.col(0), self.col(1), self.col(2))
    }

    #[inline]
    pub fn mul_vec(&self, v: Vec3<T>) -> Vec3<T> {
        Vec3::new(self.rows[0].dot(v), self.rows[1].dot(v), self.rows[2].dot(v))
    }

    /// `selfᵀ v` without forming the transpose.
    #[inline]
    pub fn tr_mul_vec(&self, v: Vec3<T>) -> Vec3<T> {
        self.rows[0] * v.x + self.rows[1] * v.y + self.rows[2] * v.z
    }

    pub fn mul_mat(&self, o: &Self) -> Self {
        let t = o.transpose();
        let row = |r: Vec3<T>| Vec3::new(r.dot(t.rows[0]), r.dot(t.rows[1]), r.dot(t.rows[2]));
        Self::from_rows(row(self.rows[0]), row(self.rows[1]), row(self.rows[2]))
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::from_rows(
            self.rows[0] + o.rows[0],
            self.rows[1] + o.rows[1],
            self.rows[2] + o.rows[2],
        )
    }

    pub fn scale(&self, s: T) -> Self {
        Self::from_rows(self.rows[0] * s, self.rows[1] * s, self.rows[2] * s)
    }

    pub fn determinant(&self) -> T {
        self.rows[0].dot(self.rows[1].cross(self.rows[2]))
    }

    /// Inverse via the adjugate; `None` when the determinant is zero or not finite.
    pub fn inverse(&self) -> Option<Self> {
        let [a, b, c] = self.rows;
        let det = a.dot(b.cross(c));
        if det == T::zero() || !det.is_finite() {
            return None;
        }
        let inv = det.recip();
        Some(Self::from_cols(b.cross(c) * inv, c.cross(a) * inv, a.cross(b) * inv))
    }

    /// Symmetric part `(M + Mᵀ) / 2`.
    pub fn symmetric_part(&self) -> Self {
        self.add(&self.transpose()).scale(T::lit(0.5))
    }

    pub fn frobenius_norm(&self) -> T {
        self.rows.iter().map(|r| r.norm_squared()).fold(T::zero(), |a, b| a + b).sqrt()
    }

    /// Largest entry-wise deviation of `MᵀM` from the identity.
    pub fn orthonormality_error(&self) -> T {
        let g = self.transpose().mul_mat(self);
        let mut worst = T::zero();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { T::one() } else { T::zero() };
                worst = worst.max((g.get(i, j) - want).abs());
            }
        }
        worst
    }

    /// Smallest eigenvalue of a symmetric matrix (closed-form trigonometric solution).
    pub fn min_symmetric_eigenvalue(&self) -> T {
        let a = self;
        let p1 = a.get(0, 1).powi(2) + a.get(0, 2).powi(2) + a.get(1, 2).powi(2);
        let q = (a.get(0, 0) + a.get(1, 1) + a.get(2, 2)) / T::lit(3.0);
        if p1 == T::zero() {
            return a.get(0, 0).min(a.get(1, 1)).min(a.get(2, 2));
        }
        let p2 = (a.get(0, 0) - q).powi(2)
            + (a.get(1, 1) - q).powi(2)
            + (a.get(2, 2) - q).powi(2)
            + T::lit(2.0) * p1;
        let p = (p2 / T::lit(6.0)).sqrt();
        let b = a.add(&Self::identity().scale(-q)).scale(p.recip());
        let r = (b.determinant() / T::lit(2.0)).max(-T::one()).min(T::one());
        let phi = r.acos() / T::lit(3.0);
        // Eigenvalues are q + 2p cos(phi + 2πk/3); k = 1 gives the smallest.
        q + T::lit(2.0) * p * (phi + T::lit(2.0) * T::PI() / T::lit(3.0)).cos()
    }
}
