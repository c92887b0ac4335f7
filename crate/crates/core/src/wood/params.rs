//! The complete wood parameter tree. Lengths are in millimetres, angles in radians.

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::bsdf::Coating;
use crate::distortion::DistortionSpec;
use crate::error::{Error, FieldError, Result};
use crate::grid::CellHashSeed;
use crate::noise::{Noise1dSpec, NoiseSpec, Orientation};
use crate::wood::waves::{RectWaveSpec, TriangleWaveSpec};

pub const SCHEMA_VERSION: u32 = 1;

fn schema_version() -> u32 {
    SCHEMA_VERSION
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct GrowthParams {
    pub mean_ring_width: f64,
    /// Growth-rate wave over one year of radius.
    pub wave: TriangleWaveSpec,
    /// Year-to-year variation, a function of time measured in years.
    pub noise: Noise1dSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct RingPorosity {
    /// 0 is diffuse-porous (uniform pores), 1 fully ring-porous.
    pub porousness: f64,
    /// Pore size multiplier over the year; `max` applies on the first (earlywood) plateau.
    pub wave: RectWaveSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct PoreParams {
    /// Cross-section semi-axis.
    pub size: f64,
    /// Length over cross-section.
    pub aspect_ratio: f64,
    /// Mean number of pores overlapping a point.
    pub density: f64,
    pub sharpness: f64,
    /// Extra absorption path per unit of pore mask.
    pub darkening: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct RayParams {
    /// Tangential and longitudinal semi-axis.
    pub size: f64,
    /// Radial length over `size`.
    pub aspect_ratio: f64,
    pub density: f64,
    pub sharpness: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ColorParams {
    /// Absorption per unit path length, per RGB channel.
    pub sigma: [f64; 3],
    /// Path length `ℓ₀`.
    pub path_offset: f64,
    /// Path length per unit of ring value, `ℓ_g`.
    pub ring_path: f64,
    /// Fiber absorption relative to the diffuse absorption.
    pub fiber_scale: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct BsdfParams {
    pub eta: f64,
    #[serde(default)]
    pub coating: Coating,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct WoodParams {
    #[serde(default = "schema_version")]
    pub schema_version: u32,
    #[serde(default)]
    pub seed: CellHashSeed,
    pub growth: GrowthParams,
    /// Ring value `g`; `min` is the earlywood, `max` the latewood.
    pub rings: RectWaveSpec,
    /// Highlight width per point; `min` is the earlywood width.
    pub highlight_width: RectWaveSpec,
    pub ring_porosity: RingPorosity,
    /// Grain rotation angle about `r̂` as a function of radius.
    pub interlock: Noise1dSpec,
    pub pores: PoreParams,
    pub rays: RayParams,
    pub color: ColorParams,
    /// Bump height per unit of pore mask.
    pub bump_scale: f64,
    pub distortion: DistortionSpec,
    pub bsdf: BsdfParams,
}

struct Checker {
    errors: Vec<FieldError>,
}

impl Checker {
    fn push(&mut self, path: &str, message: &str) {
        self.errors.push(FieldError::new(path, message));
    }

    fn positive(&mut self, path: &str, v: f64) {
        if !(v > 0.0) || !v.is_finite() {
            self.push(path, "must be positive");
        }
    }

    fn non_negative(&mut self, path: &str, v: f64) {
        if !(v >= 0.0) || !v.is_finite() {
            self.push(path, "must be non-negative");
        }
    }

    fn unit_interval(&mut self, path: &str, v: f64) {
        if !(0.0..=1.0).contains(&v) {
            self.push(path, "must lie in [0, 1]");
        }
    }

    fn absorb(&mut self, path: &str, r: Result<()>) {
        if let Err(e) = r {
            for f in e.field_errors() {
                self.errors.push(FieldError::new(format!("{path}.{}", f.path), f.message));
            }
        }
    }

    fn noise_1d(&mut self, path: &str, spec: &Noise1dSpec) {
        self.absorb(path, spec.validate());
    }

    fn noise(&mut self, path: &str, spec: &NoiseSpec) {
        self.absorb(path, spec.validate());
    }
}

impl WoodParams {
    /// Every violated constraint, addressed by dotted path.
    pub fn validation_errors(&self) -> Vec<FieldError> {
        let mut c = Checker { errors: Vec::new() };
        if self.schema_version != SCHEMA_VERSION {
            c.push("schema_version", &format!("unsupported version, expected {SCHEMA_VERSION}"));
        }
        c.positive("growth.mean_ring_width", self.growth.mean_ring_width);
        self.growth.wave.validate("growth.wave", &mut c.errors);
        if c.errors.iter().all(|e| !e.path.starts_with("growth.wave")) {
            let k = crate::wood::time::time_scale(&self.growth.wave);
            let (a, b) = (self.growth.wave.fall_slope, self.growth.wave.rise_slope);
            if !(1.0 - k * a > 0.0 && 1.0 + k * b > 0.0) {
                c.push("growth.wave.fall_slope", "scaled wave makes time decrease with radius");
            }
        }
        c.noise_1d("growth.noise", &self.growth.noise);
        self.rings.validate("rings", &mut c.errors);
        self.highlight_width.validate("highlight_width", &mut c.errors);
        if !(self.highlight_width.min > 0.0) {
            c.push("highlight_width", "highlight width must be positive");
        }
        c.unit_interval("ring_porosity.porousness", self.ring_porosity.porousness);
        self.ring_porosity.wave.validate("ring_porosity.wave", &mut c.errors);
        c.non_negative("ring_porosity.wave.min", self.ring_porosity.wave.min);
        c.noise_1d("interlock", &self.interlock);

        c.positive("pores.size", self.pores.size);
        c.positive("pores.aspect_ratio", self.pores.aspect_ratio);
        c.positive("pores.density", self.pores.density);
        c.non_negative("pores.sharpness", self.pores.sharpness);
        c.non_negative("pores.darkening", self.pores.darkening);
        c.positive("rays.size", self.rays.size);
        c.positive("rays.aspect_ratio", self.rays.aspect_ratio);
        c.positive("rays.density", self.rays.density);
        c.non_negative("rays.sharpness", self.rays.sharpness);

        for (i, s) in self.color.sigma.iter().enumerate() {
            c.non_negative(&format!("color.sigma.{i}"), *s);
        }
        c.non_negative("color.path_offset", self.color.path_offset);
        c.non_negative("color.ring_path", self.color.ring_path);
        c.non_negative("color.fiber_scale", self.color.fiber_scale);
        if self.rings.min < 0.0 {
            c.push("rings.min", "ring value must be non-negative");
        }
        c.non_negative("bump_scale", self.bump_scale);

        for (name, axis) in self.distortion.axes() {
            c.noise(&format!("distortion.{name}.noise"), &axis.noise);
        }

        if !(self.bsdf.eta >= 1.0) || !self.bsdf.eta.is_finite() {
            c.push("bsdf.eta", "must be at least 1");
        }
        if let Coating::Beckmann { roughness } = self.bsdf.coating {
            c.positive("bsdf.coating.roughness", roughness);
        }
        c.errors
    }

    pub fn validate(&self) -> Result<()> {
        let errors = self.validation_errors();
        if errors.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(errors))
        }
    }

    /// Strict parse: unknown fields are rejected with their path.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| Error::Json {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })
    }

    pub fn from_value(value: serde_json::Value) -> Result<Self> {
        serde_path_to_error::deserialize(value).map_err(|e| Error::Json {
            path: e.path().to_string(),
            message: e.inner().to_string(),
        })
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("parameters always serialize")
    }

    /// Keeps at most `bands` bands in every distortion axis.
    pub fn limit_distortion_bands(&mut self, bands: u32) {
        for axis in self.distortion.axes_mut() {
            axis.noise.bands = axis.noise.bands.min(bands.max(1));
        }
    }

    /// Zeroes every noise and distortion magnitude, leaving the idealized cylinder.
    pub fn without_noise(mut self) -> Self {
        self.growth.noise.magnitude = 0.0;
        self.interlock.magnitude = 0.0;
        for axis in self.distortion.axes_mut() {
            axis.enabled = false;
        }
        self
    }
}

/// Multiband distortion magnitude noise with cylinder-aligned kernels.
pub fn distortion_noise(kernel: [f64; 3], magnitude: f64, bands: u32) -> NoiseSpec {
    NoiseSpec {
        shape: Default::default(),
        base_scale: crate::linalg::Vec3::from_f64(kernel),
        density: 2.0,
        magnitude,
        bands,
        band_factor: 0.5,
        dropoff: 1.0,
        orientation: Orientation::FrameField,
        // The cylinder frame only turns about ẑ, so square cross-section cells fit every frame.
        cell_aspect: crate::linalg::Vec3::from_f64([kernel[0].max(kernel[1]), kernel[0].max(kernel[1]), kernel[2]]),
        signed: true,
    }
}
