//! Sparse convolution noise.
//!
//! A band is a sum of compact kernels centred on hashed impulses. Band `i`
//! shrinks kernels and cells by `β^i` and scales amplitude by `β^(γ i)`, so
//! every band has the same mean number of overlapping kernels.

use std::f64::consts::PI;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{CartesianGrid, CartesianGridSpec, CellHashSeed, Poisson};
use crate::kernel::{bounding_scale, KernelShape};
use crate::linalg::{Mat3, Vec3};
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// Kernels keep the world axes; cells match the kernel semi-axes.
    #[default]
    AxisAligned,
    /// Kernels follow a frame field sampled at the evaluation point.
    FrameField,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields, bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct NoiseSpec<T = f64> {
    #[serde(default)]
    pub shape: KernelShape<T>,
    /// Kernel semi-axes of the base band (in frame axes when oriented).
    pub base_scale: Vec3<T>,
    /// Mean number of kernels overlapping any point.
    pub density: T,
    pub magnitude: T,
    pub bands: u32,
    /// Size factor from one band to the next, in (0, 1).
    pub band_factor: T,
    /// Power-law exponent of the amplitude drop between bands.
    pub dropoff: T,
    #[serde(default)]
    pub orientation: Orientation,
    /// Relative cell proportions for oriented noise; equal to the kernel
    /// aspect gives the tightest cells, all-ones the conservative sphere bound.
    pub cell_aspect: Vec3<T>,
    pub signed: bool,
}

impl<T: Real> NoiseSpec<T> {
    /// Single-band isotropic Wyvill noise with the default band parameters.
    pub fn isotropic(scale: T, density: T, magnitude: T) -> Self {
        Self {
            shape: KernelShape::Wyvill,
            base_scale: Vec3::splat(scale),
            density,
            magnitude,
            bands: 1,
            band_factor: T::lit(0.5),
            dropoff: T::one(),
            orientation: Orientation::AxisAligned,
            cell_aspect: Vec3::splat(T::one()),
            signed: true,
        }
    }

    pub fn cast<U: Real>(&self) -> NoiseSpec<U> {
        NoiseSpec {
            shape: self.shape.cast(),
            base_scale: self.base_scale.cast(),
            density: U::lit(self.density.f64()),
            magnitude: U::lit(self.magnitude.f64()),
            bands: self.bands,
            band_factor: U::lit(self.band_factor.f64()),
            dropoff: U::lit(self.dropoff.f64()),
            orientation: self.orientation,
            cell_aspect: self.cell_aspect.cast(),
            signed: self.signed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.bands < 1 {
            return Err(Error::invalid("bands", "at least one band is required"));
        }
        if !(self.band_factor > T::zero() && self.band_factor < T::one()) {
            return Err(Error::invalid("band_factor", "must lie strictly between 0 and 1"));
        }
        if !(self.density > T::zero()) || !self.density.is_finite() {
            return Err(Error::invalid("density", "must be positive"));
        }
        if !(self.base_scale.min_elem() > T::zero()) || !self.base_scale.is_finite() {
            return Err(Error::invalid("base_scale", "every semi-axis must be positive"));
        }
        if !(self.cell_aspect.min_elem() > T::zero()) || !self.cell_aspect.is_finite() {
            return Err(Error::invalid("cell_aspect", "every component must be positive"));
        }
        if let KernelShape::Bump { sharpness } = self.shape {
            if !(sharpness >= T::zero()) {
                return Err(Error::invalid("shape.sharpness", "must be non-negative"));
            }
        }
        if !self.magnitude.is_finite() || !self.dropoff.is_finite() {
            return Err(Error::invalid("magnitude", "must be finite"));
        }
        Ok(())
    }
}

/// Orientation and scale of the kernels at an evaluation point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameSample<T> {
    /// Columns are the kernel axes in world space.
    pub rotation: Mat3<T>,
    /// Per-axis multiplier on the band's kernel semi-axes.
    pub scale: Vec3<T>,
}

impl<T: Real> FrameSample<T> {
    pub fn identity() -> Self {
        Self { rotation: Mat3::identity(), scale: Vec3::splat(T::one()) }
    }
}

/// A queryable frame field `p ↦ (R(p), S_e(p))`.
pub trait FrameField<T> {
    fn sample(&self, p: Vec3<T>) -> FrameSample<T>;
}

impl<T, F: Fn(Vec3<T>) -> FrameSample<T>> FrameField<T> for F {
    fn sample(&self, p: Vec3<T>) -> FrameSample<T> {
        self(p)
    }
}

/// Value and gradient of a scalar field.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct NoiseSample<T> {
    pub value: T,
    pub gradient: Vec3<T>,
}

impl<T: Real> NoiseSample<T> {
    pub fn zero() -> Self {
        Self { value: T::zero(), gradient: Vec3::zero() }
    }
}

/// Kernel placement data that is constant within one band.
#[derive(Clone, Debug)]
pub struct Band<T> {
    grid: CartesianGrid<T>,
    kernel_scale: Vec3<T>,
    amplitude: T,
}

impl<T: Real> Band<T> {
    pub fn grid(&self) -> &CartesianGrid<T> {
        &self.grid
    }

    pub fn kernel_scale(&self) -> Vec3<T> {
        self.kernel_scale
    }

    pub fn amplitude(&self) -> T {
        self.amplitude
    }
}

#[derive(Clone, Debug)]
pub struct Noise<T> {
    spec: NoiseSpec<T>,
    bands: Vec<Band<T>>,
}

/// Mean impulses per cell that yields `overlap` kernels over a point.
fn cell_density(overlap: f64, cell_volume: f64, kernel_volume: f64) -> f64 {
    overlap * cell_volume / kernel_volume
}

impl<T: Real> Noise<T> {
    pub fn new(spec: &NoiseSpec<T>, seed: CellHashSeed) -> Result<Self> {
        spec.validate()?;
        let mut bands = Vec::with_capacity(spec.bands as usize);
        for i in 0..spec.bands {
            let size = spec.band_factor.powi(i as i32);
            let kernel_scale = spec.base_scale * size;
            let cell_scale = match spec.orientation {
                Orientation::AxisAligned => kernel_scale,
                Orientation::FrameField => {
                    spec.cell_aspect * (kernel_scale.max_elem() / spec.cell_aspect.max_elem())
                }
            };
            let kernel_volume = 4.0 / 3.0 * PI * kernel_scale.product().f64();
            let density = cell_density(spec.density.f64(), cell_scale.product().f64(), kernel_volume);
            let grid = CartesianGrid::new(
                &CartesianGridSpec { cell_scale, density: T::lit(density) },
                seed.derive(&[i as i64]),
            )?;
            let amplitude = spec.magnitude * spec.band_factor.powf(spec.dropoff * T::lit(i as f64));
            bands.push(Band { grid, kernel_scale, amplitude });
        }
        Ok(Self { spec: spec.clone(), bands })
    }

    pub fn spec(&self) -> &NoiseSpec<T> {
        &self.spec
    }

    pub fn bands(&self) -> &[Band<T>] {
        &self.bands
    }

    /// Largest absolute value the noise can take at a point is bounded by
    /// this sum of band amplitudes times the local kernel count.
    pub fn amplitude_sum(&self) -> T {
        self.bands.iter().fold(T::zero(), |a, b| a + b.amplitude.abs())
    }

    /// One band at `p`; `frame` is ignored for axis-aligned noise.
    pub fn band(&self, index: usize, p: Vec3<T>, frame: Option<&FrameSample<T>>) -> NoiseSample<T> {
        self.band_counted(index, p, frame).0
    }

    /// [`Noise::band`] plus the number of impulses the cell search visited.
    pub fn band_counted(&self, index: usize, p: Vec3<T>, frame: Option<&FrameSample<T>>) -> (NoiseSample<T>, u32) {
        let band = &self.bands[index];
        match (self.spec.orientation, frame) {
            (Orientation::FrameField, Some(f)) => self.eval_oriented(band, p, f),
            _ => self.eval_axis(band, p),
        }
    }

    #[inline]
    fn eval_axis(&self, band: &Band<T>, p: Vec3<T>) -> (NoiseSample<T>, u32) {
        let inv = band.kernel_scale.recip();
        let shape = self.spec.shape;
        let signed = self.spec.signed;
        let mut value = T::zero();
        let mut grad = Vec3::zero();
        let visited = band.grid.for_each_near(p, 1, |imp| {
            let x = (p - imp.center).mul_elem(inv);
            let r2 = x.norm_squared();
            if r2 >= T::one() {
                return;
            }
            let (v, dv) = shape.eval_sq(r2);
            let w = if signed && imp.sign() < 0 { -T::one() } else { T::one() };
            value = value + w * v;
            grad += x.mul_elem(inv) * (w * (dv + dv));
        });
        (NoiseSample { value: value * band.amplitude, gradient: grad * band.amplitude }, visited)
    }

    #[inline]
    fn eval_oriented(&self, band: &Band<T>, p: Vec3<T>, frame: &FrameSample<T>) -> (NoiseSample<T>, u32) {
        let s_e = band.kernel_scale.mul_elem(frame.scale);
        if !(s_e.min_elem() > T::zero()) {
            return (NoiseSample::zero(), 0);
        }
        // Kernels only ever shrink to fit their cell, never grow.
        let s_b = bounding_scale(&frame.rotation, s_e, band.grid.cell_scale()).min(T::one());
        let inv = (s_e * s_b).recip();
        let rt = frame.rotation.transpose();
        let m = Mat3::from_rows(rt.rows[0] * inv.x, rt.rows[1] * inv.y, rt.rows[2] * inv.z);
        let shape = self.spec.shape;
        let signed = self.spec.signed;
        let mut value = T::zero();
        let mut gk = Vec3::zero();
        let visited = band.grid.for_each_near(p, 1, |imp| {
            let x = m.mul_vec(p - imp.center);
            let r2 = x.norm_squared();
            if r2 >= T::one() {
                return;
            }
            let (v, dv) = shape.eval_sq(r2);
            let w = if signed && imp.sign() < 0 { -T::one() } else { T::one() };
            value = value + w * v;
            gk += x * (w * (dv + dv));
        });
        let gradient = m.tr_mul_vec(gk) * band.amplitude;
        (NoiseSample { value: value * band.amplitude, gradient }, visited)
    }

    /// Sum of all bands at `p` with a pre-sampled frame (shared by every band).
    pub fn eval_with(&self, p: Vec3<T>, frame: Option<&FrameSample<T>>) -> NoiseSample<T> {
        let mut out = NoiseSample::zero();
        for i in 0..self.bands.len() {
            let s = self.band(i, p, frame);
            out.value = out.value + s.value;
            out.gradient += s.gradient;
        }
        out
    }

    pub fn eval(&self, p: Vec3<T>) -> NoiseSample<T> {
        self.eval_with(p, None)
    }

    /// Queries `field` once at `p` and evaluates every band with it.
    pub fn eval_field(&self, p: Vec3<T>, field: &impl FrameField<T>) -> NoiseSample<T> {
        let f = field.sample(p);
        self.eval_with(p, Some(&f))
    }

    /// Impulses visited across all bands, for efficiency measurements.
    pub fn impulses_considered(&self, p: Vec3<T>, frame: Option<&FrameSample<T>>) -> u32 {
        (0..self.bands.len()).map(|i| self.band_counted(i, p, frame).1).sum()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields, bound(deserialize = "T: Real + Deserialize<'de>"))]
#[schemars(bound = "T: Real + JsonSchema")]
pub struct Noise1dSpec<T = f64> {
    #[serde(default)]
    pub shape: KernelShape<T>,
    /// Kernel half-width of the base band.
    pub scale: T,
    /// Mean number of kernels overlapping any point.
    pub density: T,
    pub magnitude: T,
    #[serde(default = "one_band")]
    pub bands: u32,
    #[serde(default = "half::<T>")]
    pub band_factor: T,
    #[serde(default = "unit::<T>")]
    pub dropoff: T,
    #[serde(default = "yes")]
    pub signed: bool,
}

fn one_band() -> u32 {
    1
}

fn half<T: Real>() -> T {
    T::lit(0.5)
}

fn unit<T: Real>() -> T {
    T::one()
}

fn yes() -> bool {
    true
}

impl<T: Real> Noise1dSpec<T> {
    pub fn wyvill(scale: T, density: T, magnitude: T) -> Self {
        Self {
            shape: KernelShape::Wyvill,
            scale,
            density,
            magnitude,
            bands: 1,
            band_factor: T::lit(0.5),
            dropoff: T::one(),
            signed: true,
        }
    }

    pub fn cast<U: Real>(&self) -> Noise1dSpec<U> {
        Noise1dSpec {
            shape: self.shape.cast(),
            scale: U::lit(self.scale.f64()),
            density: U::lit(self.density.f64()),
            magnitude: U::lit(self.magnitude.f64()),
            bands: self.bands,
            band_factor: U::lit(self.band_factor.f64()),
            dropoff: U::lit(self.dropoff.f64()),
            signed: self.signed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.bands < 1 {
            return Err(Error::invalid("bands", "at least one band is required"));
        }
        if !(self.band_factor > T::zero() && self.band_factor < T::one()) {
            return Err(Error::invalid("band_factor", "must lie strictly between 0 and 1"));
        }
        if !(self.scale > T::zero()) || !self.scale.is_finite() {
            return Err(Error::invalid("scale", "must be positive"));
        }
        if !(self.density > T::zero()) || !self.density.is_finite() {
            return Err(Error::invalid("density", "must be positive"));
        }
        if !self.magnitude.is_finite() {
            return Err(Error::invalid("magnitude", "must be finite"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
struct Band1d<T> {
    cell: T,
    inv_scale: T,
    amplitude: T,
    poisson: Poisson,
    seed: u64,
}

/// Sparse convolution noise over the real line, with interval cells.
#[derive(Clone, Debug)]
pub struct Noise1d<T> {
    shape: KernelShape<T>,
    signed: bool,
    bands: Vec<Band1d<T>>,
}

impl<T: Real> Noise1d<T> {
    pub fn new(spec: &Noise1dSpec<T>, seed: CellHashSeed) -> Result<Self> {
        spec.validate()?;
        let mut bands = Vec::with_capacity(spec.bands as usize);
        for i in 0..spec.bands {
            let scale = spec.scale * spec.band_factor.powi(i as i32);
            // A kernel covers 2·scale; cells are one scale wide.
            let poisson = Poisson::new(spec.density.f64() / 2.0)?;
            bands.push(Band1d {
                cell: scale,
                inv_scale: scale.recip(),
                amplitude: spec.magnitude * spec.band_factor.powf(spec.dropoff * T::lit(i as f64)),
                poisson,
                seed: seed.derive(&[i as i64]).0,
            });
        }
        Ok(Self { shape: spec.shape, signed: spec.signed, bands })
    }

    /// Impulse positions (with their signs) of one cell of one band.
    pub fn cell_impulses(&self, band: usize, cell: i64, mut f: impl FnMut(T, T)) {
        let b = &self.bands[band];
        let h = crate::grid::hash_u64(b.seed, &[cell]);
        for n in 0..b.poisson.sample(h) {
            let stream = crate::grid::hash_u64(h, &[n as i64]);
            let imp = crate::grid::Impulse { center: Vec3::<T>::zero(), stream };
            let u = T::unit(imp.draw(0));
            let w = if self.signed && imp.sign() < 0 { -T::one() } else { T::one() };
            f((T::lit(cell as f64) + u) * b.cell, w);
        }
    }

    pub fn band_count(&self) -> usize {
        self.bands.len()
    }

    /// Half-width of the kernels in `band`.
    pub fn band_scale(&self, band: usize) -> T {
        self.bands[band].cell
    }

    pub fn band_amplitude(&self, band: usize) -> T {
        self.bands[band].amplitude
    }

    /// `(n(t), n'(t))`.
    pub fn eval(&self, t: T) -> (T, T) {
        let mut value = T::zero();
        let mut deriv = T::zero();
        for (i, b) in self.bands.iter().enumerate() {
            let c = (t * b.inv_scale).floor().to_i64().unwrap_or(0);
            let mut v = T::zero();
            let mut d = T::zero();
            for cell in c - 1..=c + 1 {
                self.cell_impulses(i, cell, |k, w| {
                    let x = (t - k) * b.inv_scale;
                    let (kv, kd) = self.shape.value_deriv_1d(x);
                    v = v + w * kv;
                    d = d + w * kd;
                });
            }
            value = value + v * b.amplitude;
            deriv = deriv + d * b.inv_scale * b.amplitude;
        }
        (value, deriv)
    }
}
