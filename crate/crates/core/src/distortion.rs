//! Lookup warps `f(p) = p + Σ m_d(p) a_d(p)` and Jacobian transport of
//! vectors and gradients through them.

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::cylindrical::{cylindrical_coords, Cylindrical};
use crate::error::Result;
use crate::grid::CellHashSeed;
use crate::linalg::{Mat3, Vec3};
use crate::noise::{FrameSample, Noise, NoiseSample, NoiseSpec, Orientation};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields, bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct AxisDistortionSpec<T = f64> {
    #[serde(default)]
    pub enabled: bool,
    /// Magnitude noise; semi-axes are along `(r̂, θ̂, ẑ)` when frame oriented.
    pub noise: NoiseSpec<T>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields, bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct DistortionSpec<T = f64> {
    pub r: AxisDistortionSpec<T>,
    pub theta: AxisDistortionSpec<T>,
    pub z: AxisDistortionSpec<T>,
}

impl<T: Real> AxisDistortionSpec<T> {
    pub fn cast<U: Real>(&self) -> AxisDistortionSpec<U> {
        AxisDistortionSpec { enabled: self.enabled, noise: self.noise.cast() }
    }
}

impl<T: Real> DistortionSpec<T> {
    pub fn cast<U: Real>(&self) -> DistortionSpec<U> {
        DistortionSpec { r: self.r.cast(), theta: self.theta.cast(), z: self.z.cast() }
    }

    pub fn axes(&self) -> [(&'static str, &AxisDistortionSpec<T>); 3] {
        [("r", &self.r), ("theta", &self.theta), ("z", &self.z)]
    }

    pub fn axes_mut(&mut self) -> [&mut AxisDistortionSpec<T>; 3] {
        [&mut self.r, &mut self.theta, &mut self.z]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DirectionField<T> {
    /// Moves along `r̂`.
    Radial,
    /// Moves along the circle of constant `r`, by arc length.
    Tangential,
    Longitudinal,
    Constant(Vec3<T>),
}

#[derive(Clone, Debug)]
pub enum Magnitude<T> {
    Noise(Noise<T>),
    Constant(T),
    /// `offset + gradient · p`.
    Linear { offset: T, gradient: Vec3<T> },
}

impl<T: Real> Magnitude<T> {
    fn eval(&self, p: Vec3<T>, cyl: &Cylindrical<T>) -> NoiseSample<T> {
        match self {
            Self::Noise(n) => match n.spec().orientation {
                Orientation::AxisAligned => n.eval(p),
                Orientation::FrameField => {
                    let f = FrameSample { rotation: cyl.frame.matrix(), scale: Vec3::splat(T::one()) };
                    n.eval_with(p, Some(&f))
                }
            },
            Self::Constant(c) => NoiseSample { value: *c, gradient: Vec3::zero() },
            Self::Linear { offset, gradient } => NoiseSample { value: *offset + gradient.dot(p), gradient: *gradient },
        }
    }
}

#[derive(Clone, Debug)]
pub struct DistortionTerm<T> {
    pub direction: DirectionField<T>,
    pub magnitude: Magnitude<T>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum JacobianMode {
    /// `I + G / (1 + ‖G‖_F)` with `G = Σ a_d ⊗ ∇m_d`; always positive-definite.
    #[default]
    Compressed,
    /// `I + G`.
    Exact,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JacobianSample<T> {
    pub j: Mat3<T>,
    pub j_inv: Mat3<T>,
    pub j_t: Mat3<T>,
}

impl<T: Real> JacobianSample<T> {
    pub fn identity() -> Self {
        Self { j: Mat3::identity(), j_inv: Mat3::identity(), j_t: Mat3::identity() }
    }

    fn from_matrix(j: Mat3<T>) -> Self {
        let j_inv = j.inverse().unwrap_or_else(|| Mat3::zero().scale(T::nan()));
        Self { j, j_inv, j_t: j.transpose() }
    }
}

/// Everything the DAG needs about one warped lookup.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Warp<T> {
    /// `f(p)`.
    pub point: Vec3<T>,
    /// Cylindrical coordinates of `f(p)`, carried exactly through cylindrical moves.
    pub lookup: Cylindrical<T>,
    pub jacobian: JacobianSample<T>,
}

#[derive(Clone, Debug, Default)]
pub struct Distortion<T> {
    terms: Vec<DistortionTerm<T>>,
    mode: JacobianMode,
}

impl<T: Real> Distortion<T> {
    pub fn identity() -> Self {
        Self { terms: Vec::new(), mode: JacobianMode::Compressed }
    }

    pub fn new(spec: &DistortionSpec<T>, seed: CellHashSeed) -> Result<Self> {
        let directions = [DirectionField::Radial, DirectionField::Tangential, DirectionField::Longitudinal];
        let mut terms = Vec::new();
        for (i, ((_, axis), direction)) in spec.axes().into_iter().zip(directions).enumerate() {
            let noise = Noise::new(&axis.noise, seed.derive(&[i as i64]))?;
            if axis.enabled {
                terms.push(DistortionTerm { direction, magnitude: Magnitude::Noise(noise) });
            }
        }
        Ok(Self { terms, mode: JacobianMode::Compressed })
    }

    pub fn from_terms(terms: Vec<DistortionTerm<T>>) -> Self {
        Self { terms, mode: JacobianMode::Compressed }
    }

    pub fn with_mode(mut self, mode: JacobianMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn terms(&self) -> &[DistortionTerm<T>] {
        &self.terms
    }

    pub fn is_identity(&self) -> bool {
        self.terms.is_empty()
    }

    /// Magnitude samples `m_d(p)` in term order.
    pub fn magnitudes(&self, p: Vec3<T>) -> Vec<NoiseSample<T>> {
        let cyl = cylindrical_coords(p);
        self.terms.iter().map(|t| t.magnitude.eval(p, &cyl)).collect()
    }

    pub fn warp(&self, p: Vec3<T>) -> Warp<T> {
        let cyl = cylindrical_coords(p);
        if self.terms.is_empty() {
            return Warp { point: p, lookup: cyl, jacobian: JacobianSample::identity() };
        }
        let (mut dr, mut dt, mut dz) = (T::zero(), T::zero(), T::zero());
        let mut shift = Vec3::zero();
        let mut g = Mat3::zero();
        for term in &self.terms {
            let m = term.magnitude.eval(p, &cyl);
            let a = match term.direction {
                DirectionField::Radial => {
                    dr = dr + m.value;
                    cyl.frame.r
                }
                DirectionField::Tangential => {
                    dt = dt + m.value;
                    cyl.frame.theta
                }
                DirectionField::Longitudinal => {
                    dz = dz + m.value;
                    cyl.frame.z
                }
                DirectionField::Constant(a) => {
                    shift += a * m.value;
                    a
                }
            };
            g = g.add(&Mat3::outer(a, m.gradient));
        }
        let (base, lookup) = if dr == T::zero() && dt == T::zero() {
            (Vec3::new(p.x, p.y, p.z + dz), Cylindrical { z: cyl.z + dz, ..cyl })
        } else {
            let c = move_cylindrical(&cyl, dr, dt, dz);
            (c.point(), c)
        };
        let (point, lookup) = if shift == Vec3::zero() {
            (base, lookup)
        } else {
            let q = base + shift;
            (q, cylindrical_coords(q))
        };
        let j = match self.mode {
            JacobianMode::Compressed => Mat3::identity().add(&g.scale((T::one() + g.frobenius_norm()).recip())),
            JacobianMode::Exact => Mat3::identity().add(&g),
        };
        Warp { point, lookup, jacobian: JacobianSample::from_matrix(j) }
    }

    pub fn distort_point(&self, p: Vec3<T>) -> Vec3<T> {
        self.warp(p).point
    }

    pub fn jacobian(&self, p: Vec3<T>) -> JacobianSample<T> {
        self.warp(p).jacobian
    }

    /// `s(f(p))`.
    pub fn pull_scalar(&self, p: Vec3<T>, s: impl Fn(Vec3<T>) -> T) -> T {
        s(self.warp(p).point)
    }

    /// `J⁻¹ v(f(p))`.
    pub fn pull_vector(&self, p: Vec3<T>, v: impl Fn(Vec3<T>) -> Vec3<T>) -> Vec3<T> {
        let w = self.warp(p);
        w.jacobian.j_inv.mul_vec(v(w.point))
    }

    /// `Jᵀ g(f(p))`.
    pub fn pull_gradient(&self, p: Vec3<T>, g: impl Fn(Vec3<T>) -> Vec3<T>) -> Vec3<T> {
        let w = self.warp(p);
        w.jacobian.j_t.mul_vec(g(w.point))
    }
}

/// `(r + dr, θ + dt / r, z + dz)`, with a negative radius folded through the axis.
fn move_cylindrical<T: Real>(c: &Cylindrical<T>, dr: T, dt: T, dz: T) -> Cylindrical<T> {
    let z = c.z + dz;
    if c.r == T::zero() {
        // On the axis the tangential direction is the frame's θ̂ (world y).
        let q = Vec3::new(dr, dt, z);
        return cylindrical_coords(q);
    }
    let mut r = c.r + dr;
    let mut theta = if dt == T::zero() { c.theta } else { c.theta + dt / c.r };
    if r < T::zero() {
        r = -r;
        theta = theta + T::PI();
    }
    Cylindrical::from_coords(r, theta, z)
}
