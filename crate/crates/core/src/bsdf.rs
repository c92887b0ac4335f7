//! Layered wood BSDF: Lambertian diffuse plus subsurface fiber reflection
//! for two fiber populations, under a dielectric interface with an optional
//! microfacet coating.

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::linalg::Vec3;
use crate::scalar::Real;
use crate::wood::ShadingRecord;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Coating<T = f64> {
    None,
    /// Mirror-smooth; contributes only through the interface Fresnel factors.
    Smooth,
    Beckmann { roughness: T },
}

impl<T> Default for Coating<T> {
    fn default() -> Self {
        Self::Smooth
    }
}

impl<T: Real> Coating<T> {
    pub fn cast<U: Real>(&self) -> Coating<U> {
        match *self {
            Self::None => Coating::None,
            Self::Smooth => Coating::Smooth,
            Self::Beckmann { roughness } => Coating::Beckmann { roughness: U::lit(roughness.f64()) },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiberSpecParams<T> {
    pub u: Vec3<T>,
    pub k_f: Vec3<T>,
    /// Highlight width in radians.
    pub beta: T,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SurfaceInterface<T> {
    pub eta: T,
    pub normal: Vec3<T>,
    pub coating: Coating<T>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiberAngles<T> {
    pub psi_i: T,
    pub psi_r: T,
    pub psi_d: T,
    pub psi_h: T,
}

#[inline]
fn clamped_asin<T: Real>(x: T) -> T {
    x.max(-T::one()).min(T::one()).asin()
}

pub fn fiber_angles<T: Real>(u: Vec3<T>, v_i: Vec3<T>, v_r: Vec3<T>) -> FiberAngles<T> {
    let psi_i = clamped_asin(v_i.dot(u));
    let psi_r = clamped_asin(v_r.dot(u));
    FiberAngles { psi_i, psi_r, psi_d: psi_r - psi_i, psi_h: psi_r + psi_i }
}

pub fn normalized_gaussian<T: Real>(sigma: T, x: T) -> T {
    let two = T::lit(2.0);
    (-(x * x) / (two * sigma * sigma)).exp() / (sigma * (two * T::PI()).sqrt())
}

pub fn fiber_brdf<T: Real>(params: &FiberSpecParams<T>, v_i: Vec3<T>, v_r: Vec3<T>) -> Vec3<T> {
    let a = fiber_angles(params.u, v_i, v_r);
    let c = (a.psi_d / T::lit(2.0)).cos();
    params.k_f * (normalized_gaussian(params.beta, a.psi_h) / (c * c))
}

/// Unpolarized reflectance of a dielectric boundary entered from outside at `cos_i`.
pub fn fresnel_dielectric<T: Real>(cos_i: T, eta: T) -> T {
    let cos_i = cos_i.max(T::zero()).min(T::one());
    let sin_t2 = (T::one() - cos_i * cos_i) / (eta * eta);
    if sin_t2 >= T::one() {
        return T::one();
    }
    let cos_t = (T::one() - sin_t2).sqrt();
    let rs = (cos_i - eta * cos_t) / (cos_i + eta * cos_t);
    let rp = (eta * cos_i - cos_t) / (eta * cos_i + cos_t);
    (rs * rs + rp * rp) / T::lit(2.0)
}

/// Refracted direction, mirrored back to the outside hemisphere, and the
/// Fresnel transmittance of the crossing.
pub fn interface_adjust<T: Real>(iface: &SurfaceInterface<T>, v: Vec3<T>) -> (Vec3<T>, T) {
    let n = iface.normal;
    let cos_i = v.dot(n);
    if iface.eta == T::one() {
        return (v, T::one());
    }
    let tangential = (v - n * cos_i) * iface.eta.recip();
    let cos_t = (T::one() - tangential.norm_squared()).max(T::zero()).sqrt();
    (tangential + n * cos_t, T::one() - fresnel_dielectric(cos_i, iface.eta))
}

fn beckmann_coating<T: Real>(eta: T, alpha: T, n: Vec3<T>, v_i: Vec3<T>, v_r: Vec3<T>) -> T {
    let h = (v_i + v_r).normalize();
    let nh = n.dot(h);
    if nh <= T::zero() {
        return T::zero();
    }
    let (ni, nr) = (n.dot(v_i), n.dot(v_r));
    // Equal for both directions in exact arithmetic; averaged so rounding is symmetric too.
    let vh = (v_i.dot(h) + v_r.dot(h)) / T::lit(2.0);
    let nh2 = nh * nh;
    let tan2 = (T::one() - nh2) / nh2;
    let a2 = alpha * alpha;
    let d = (-tan2 / a2).exp() / (T::PI() * a2 * nh2 * nh2);
    let two = T::lit(2.0);
    let g = T::one().min(two * nh * nr / vh).min(two * nh * ni / vh);
    fresnel_dielectric(vh, eta) * d * g / (T::lit(4.0) * ni * nr)
}

/// Full BSDF in RGB. Both directions point away from the surface.
pub fn wood_bsdf_eval<T: Real>(
    record: &ShadingRecord<T>,
    iface: &SurfaceInterface<T>,
    v_i: Vec3<T>,
    v_r: Vec3<T>,
) -> Vec3<T> {
    let n = iface.normal;
    if v_i.dot(n) <= T::zero() || v_r.dot(n) <= T::zero() {
        return Vec3::zero();
    }
    let (ri, ti) = interface_adjust(iface, v_i);
    let (rr, tr) = interface_adjust(iface, v_r);
    let beta = record.highlight_width;
    let long = FiberSpecParams { u: record.fiber_dir_longitudinal, k_f: record.fiber_color, beta };
    let radial = FiberSpecParams { u: record.fiber_dir_radial, k_f: record.fiber_color, beta };
    let ray = record.ray_mask;
    let wood = record.diffuse_color * T::FRAC_1_PI()
        + fiber_brdf(&long, ri, rr) * (T::one() - ray)
        + fiber_brdf(&radial, ri, rr) * ray;
    let coat = match iface.coating {
        Coating::Beckmann { roughness } => beckmann_coating(iface.eta, roughness, n, v_i, v_r),
        Coating::None | Coating::Smooth => T::zero(),
    };
    wood * (ti * tr) + Vec3::splat(coat)
}
