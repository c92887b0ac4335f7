//! Shade evaluation: from a world point to a complete [`ShadingRecord`].

use crate::cylindrical::{Cylindrical, Frame};
use crate::distortion::{Distortion, Warp};
use crate::error::Result;
use crate::grid::{CellHashSeed, CylindricalGrid, CylindricalGridSpec};
use crate::kernel::{bounding_scale, KernelShape};
use crate::linalg::{Mat3, Vec3};
use crate::noise::{FrameSample, Noise, Noise1d, NoiseSpec, Orientation};
use crate::scalar::Real;
use crate::wood::params::WoodParams;
use crate::wood::time::{TimeSample, TimeVolume};
use crate::wood::waves::RectWave;
use crate::wood::ShadingRecord;

/// Pores whose size multiplier falls below this are dropped entirely.
const MIN_PORE_SCALE: f64 = 1e-3;

const SEED_GROWTH: i64 = 1;
const SEED_INTERLOCK: i64 = 2;
const SEED_PORES: i64 = 3;
const SEED_RAYS: i64 = 4;
const SEED_DISTORTION: i64 = 5;

/// Every volume of the DAG before distortion is applied, at one lookup point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Volumes<T> {
    pub time: TimeSample<T>,
    pub ring: T,
    pub highlight_width: T,
    pub pore_scale: T,
    pub interlock_angle: T,
    pub frame: Frame<T>,
    pub pore_mask: T,
    pub ray_mask: T,
}

#[derive(Clone, Debug)]
struct PoreVolume<T> {
    noise: Noise<T>,
}

impl<T: Real> PoreVolume<T> {
    fn new(params: &WoodParams, seed: CellHashSeed) -> Result<Self> {
        let p = &params.pores;
        let length = p.aspect_ratio;
        // Room for the cross-section to tilt with the interlocked grain.
        let tilt = params.interlock.magnitude.abs().min(std::f64::consts::FRAC_PI_2).sin();
        let across = (1.0 + length * tilt).min(length.max(1.0));
        let spec = NoiseSpec {
            shape: KernelShape::Bump { sharpness: p.sharpness },
            base_scale: Vec3::from_f64([p.size, p.size, p.size * length]),
            density: p.density,
            magnitude: 1.0,
            bands: 1,
            band_factor: 0.5,
            dropoff: 1.0,
            orientation: Orientation::FrameField,
            cell_aspect: Vec3::from_f64([across, across, length]),
            signed: false,
        };
        Ok(Self { noise: Noise::new(&spec.cast(), seed)? })
    }

    #[inline]
    fn eval(&self, q: Vec3<T>, frame: &Frame<T>, scale: T) -> T {
        if scale < T::lit(MIN_PORE_SCALE) {
            return T::zero();
        }
        let f = FrameSample { rotation: frame.matrix(), scale: Vec3::splat(scale) };
        self.noise.band(0, q, Some(&f)).value.min(T::one())
    }
}

#[derive(Clone, Debug)]
struct RayVolume<T> {
    grid: CylindricalGrid<T>,
    semi_axes: Vec3<T>,
    shape: KernelShape<T>,
}

impl<T: Real> RayVolume<T> {
    fn new(params: &WoodParams, seed: CellHashSeed) -> Result<Self> {
        let r = &params.rays;
        let semi = [r.size * r.aspect_ratio, r.size, r.size];
        let cell_volume = semi[0] * semi[1] * semi[2];
        let kernel_volume = 4.0 / 3.0 * std::f64::consts::PI * cell_volume;
        let spec = CylindricalGridSpec {
            band_thickness: T::lit(semi[0]),
            z_height: T::lit(semi[2]),
            target_cell_volume: T::lit(cell_volume),
            density: T::lit(r.density * cell_volume / kernel_volume),
        };
        Ok(Self {
            grid: CylindricalGrid::new(&spec, seed)?,
            semi_axes: Vec3::from_f64(semi),
            shape: KernelShape::Bump { sharpness: T::lit(r.sharpness) },
        })
    }

    #[inline]
    fn eval(&self, q: Vec3<T>, lookup: &Cylindrical<T>, frame: &Frame<T>) -> T {
        let spec = self.grid.spec();
        let band = (lookup.r / spec.band_thickness).floor();
        let n = self.grid.angular_cells(band.to_i64().unwrap_or(0));
        let r_mid = (band + T::lit(0.5)) * spec.band_thickness;
        let arc = T::TAU() * r_mid / T::lit(n as f64);
        let cell = Vec3::new(spec.band_thickness, arc, spec.z_height);
        // Kernel axes in the local cylinder frame, where the cells are boxes.
        let c = &lookup.frame;
        let local = Mat3::from_cols(
            Vec3::new(frame.r.dot(c.r), frame.r.dot(c.theta), frame.r.dot(c.z)),
            Vec3::new(frame.theta.dot(c.r), frame.theta.dot(c.theta), frame.theta.dot(c.z)),
            Vec3::new(frame.z.dot(c.r), frame.z.dot(c.theta), frame.z.dot(c.z)),
        );
        let s_b = bounding_scale(&local, self.semi_axes, cell).min(T::one());
        let inv = (self.semi_axes * s_b).recip();
        let m = Mat3::from_rows(frame.r * inv.x, frame.theta * inv.y, frame.z * inv.z);
        let mut sum = T::zero();
        self.grid.for_each_near(q, |imp| {
            let x = m.mul_vec(q - imp.center);
            let r2 = x.norm_squared();
            if r2 < T::one() {
                sum = sum + self.shape.eval_sq(r2).0;
            }
        });
        sum.min(T::one())
    }
}

/// The wood model compiled for scalar type `T`.
#[derive(Clone, Debug)]
pub struct WoodModel<T> {
    params: WoodParams,
    time: TimeVolume<T>,
    rings: RectWave<T>,
    highlight: RectWave<T>,
    porosity: RectWave<T>,
    porousness: T,
    interlock: Option<Noise1d<T>>,
    pores: PoreVolume<T>,
    rays: RayVolume<T>,
    distortion: Distortion<T>,
    sigma: Vec3<T>,
    path_offset: T,
    ring_path: T,
    pore_path: T,
    fiber_scale: T,
    bump_scale: T,
}

impl<T: Real> WoodModel<T> {
    pub fn new(params: &WoodParams) -> Result<Self> {
        params.validate()?;
        let seed = params.seed;
        let interlock = Noise1d::new(&params.interlock.cast(), seed.derive(&[SEED_INTERLOCK]))?;
        let color = &params.color;
        Ok(Self {
            params: params.clone(),
            time: TimeVolume::new(
                params.growth.mean_ring_width,
                &params.growth.wave,
                &params.growth.noise,
                seed.derive(&[SEED_GROWTH]),
            )?,
            rings: RectWave::new(&params.rings),
            highlight: RectWave::new(&params.highlight_width),
            porosity: RectWave::new(&params.ring_porosity.wave),
            porousness: T::lit(params.ring_porosity.porousness),
            interlock: (params.interlock.magnitude != 0.0).then_some(interlock),
            pores: PoreVolume::new(params, seed.derive(&[SEED_PORES]))?,
            rays: RayVolume::new(params, seed.derive(&[SEED_RAYS]))?,
            distortion: Distortion::new(&params.distortion.cast(), seed.derive(&[SEED_DISTORTION]))?,
            sigma: Vec3::from_f64(color.sigma),
            path_offset: T::lit(color.path_offset),
            ring_path: T::lit(color.ring_path),
            pore_path: T::lit(params.pores.darkening),
            fiber_scale: T::lit(color.fiber_scale),
            bump_scale: T::lit(params.bump_scale),
        })
    }

    pub fn params(&self) -> &WoodParams {
        &self.params
    }

    pub fn distortion(&self) -> &Distortion<T> {
        &self.distortion
    }

    /// Replaces the distortion, for experiments on a single axis.
    pub fn with_distortion(mut self, distortion: Distortion<T>) -> Self {
        self.distortion = distortion;
        self
    }

    pub fn time(&self, r: T) -> TimeSample<T> {
        self.time.eval(r)
    }

    pub fn ring_value(&self, t: T) -> T {
        self.rings.value(t)
    }

    /// Pore size multiplier: uniform blended with a wave that is large in earlywood.
    pub fn ring_porosity(&self, t: T) -> T {
        (T::one() - self.porousness) + self.porousness * self.porosity.inverted(t)
    }

    pub fn interlock_angle(&self, r: T) -> T {
        match &self.interlock {
            Some(n) => n.eval(r).0,
            None => T::zero(),
        }
    }

    pub fn interlocked_frame(&self, lookup: &Cylindrical<T>) -> Frame<T> {
        lookup.frame.rotate_about_r(self.interlock_angle(lookup.r))
    }

    /// All pre-distortion volumes at the lookup point `q`.
    pub fn volumes(&self, q: Vec3<T>, lookup: &Cylindrical<T>) -> Volumes<T> {
        let time = self.time.eval(lookup.r);
        let t = time.t;
        let interlock_angle = self.interlock_angle(lookup.r);
        let frame = lookup.frame.rotate_about_r(interlock_angle);
        let pore_scale = self.ring_porosity(t);
        Volumes {
            time,
            ring: self.rings.value(t),
            highlight_width: self.highlight.value(t),
            pore_scale,
            interlock_angle,
            frame,
            pore_mask: self.pores.eval(q, &frame, pore_scale),
            ray_mask: self.rays.eval(q, lookup, &frame),
        }
    }

    pub fn warp(&self, p: Vec3<T>) -> Warp<T> {
        self.distortion.warp(p)
    }

    /// Distorted ring value `g(f(p))`.
    pub fn ring_at(&self, p: Vec3<T>) -> T {
        let w = self.distortion.warp(p);
        self.rings.value(self.time.eval(w.lookup.r).t)
    }

    pub fn evaluate(&self, p: Vec3<T>) -> ShadingRecord<T> {
        let w = self.distortion.warp(p);
        let v = self.volumes(w.point, &w.lookup);
        self.assemble(&w, &v)
    }

    /// Post-distortion stage: colors, transported fiber directions, bump.
    pub fn assemble(&self, w: &Warp<T>, v: &Volumes<T>) -> ShadingRecord<T> {
        let path = self.path_offset + self.ring_path * v.ring + self.pore_path * v.pore_mask;
        let absorb = self.sigma * path;
        let diffuse = absorb.map(|a| (-a).exp());
        let fiber = (absorb * self.fiber_scale).map(|a| (-a).exp());
        let (long, radial) = if self.distortion.is_identity() {
            (v.frame.z, v.frame.r)
        } else {
            let f = Frame::orthonormalized(
                w.jacobian.j_inv.mul_vec(v.frame.z),
                w.jacobian.j_inv.mul_vec(v.frame.r),
            );
            (f.z, f.r)
        };
        ShadingRecord {
            diffuse_color: diffuse,
            fiber_color: fiber,
            highlight_width: v.highlight_width,
            fiber_dir_longitudinal: long,
            fiber_dir_radial: radial,
            ray_mask: v.ray_mask,
            pore_mask: v.pore_mask,
            bump_height: -self.bump_scale * v.pore_mask,
        }
    }
}
