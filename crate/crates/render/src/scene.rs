//! Slab scenes: a cut plane through the tree, an orthographic camera looking
//! straight down on it and one directional light.

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use xylem::linalg::Vec3;
use xylem::FieldError;

use crate::board::BoardPattern;

/// Where the slab surface lies in tree space. The pith runs along `z`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Cut {
    /// Flat-sawn face tangent to the ring at `distance` from the pith.
    Tangential { distance: f64 },
    /// Quarter-sawn face through the pith, centered `distance` from it.
    Radial { distance: f64 },
    /// End grain at height `z`.
    Transverse { z: f64 },
    /// Arbitrary plane; `u` is image right, `v` image down.
    Plane { origin: [f64; 3], u: [f64; 3], v: [f64; 3] },
}

impl Default for Cut {
    fn default() -> Self {
        Self::Tangential { distance: 40.0 }
    }
}

/// Cut plane with its right-handed frame; `n = u × v` faces the camera.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CutPlane {
    pub origin: Vec3<f64>,
    pub u: Vec3<f64>,
    pub v: Vec3<f64>,
    pub n: Vec3<f64>,
}

impl CutPlane {
    pub fn new(origin: Vec3<f64>, u: Vec3<f64>, v: Vec3<f64>) -> Self {
        Self { origin, u, v, n: u.cross(v) }
    }

    pub fn point(&self, s: [f64; 2]) -> Vec3<f64> {
        self.origin + self.u * s[0] + self.v * s[1]
    }
}

impl Cut {
    pub fn plane(&self) -> CutPlane {
        let (x, y, z) = (Vec3::x_axis(), Vec3::y_axis(), Vec3::z_axis());
        match *self {
            Self::Tangential { distance } => CutPlane::new(x * distance, y, z),
            Self::Radial { distance } => CutPlane::new(x * distance, x, z),
            Self::Transverse { z: height } => CutPlane::new(z * height, x, y),
            Self::Plane { origin, u, v } => CutPlane::new(Vec3::from_f64(origin), Vec3::from_f64(u), Vec3::from_f64(v)),
        }
    }

    fn validate(&self, path: &str, errors: &mut Vec<FieldError>) {
        match self {
            Self::Tangential { distance } | Self::Radial { distance } => {
                if !distance.is_finite() {
                    errors.push(FieldError::new(format!("{path}.distance"), "must be finite"));
                }
            }
            Self::Transverse { z } => {
                if !z.is_finite() {
                    errors.push(FieldError::new(format!("{path}.z"), "must be finite"));
                }
            }
            Self::Plane { origin, u, v } => {
                let all = origin.iter().chain(u).chain(v);
                if !all.into_iter().all(|c| c.is_finite()) {
                    errors.push(FieldError::new(path, "plane coordinates must be finite"));
                    return;
                }
                let (u, v) = (Vec3::<f64>::from_f64(*u), Vec3::<f64>::from_f64(*v));
                let tol = 1e-9;
                if (u.norm() - 1.0).abs() > tol || (v.norm() - 1.0).abs() > tol || u.dot(v).abs() > tol {
                    errors.push(FieldError::new(format!("{path}.u"), "u and v must be orthonormal"));
                }
            }
        }
    }
}

/// Directional light over the slab, in degrees. Elevation is measured from
/// the `+u` horizon through the normal, so it may run to 180.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct Light {
    pub elevation: f64,
    /// Angle of the light's arc plane from `u` toward `v`.
    pub azimuth: f64,
}

impl Default for Light {
    fn default() -> Self {
        Self { elevation: 60.0, azimuth: 90.0 }
    }
}

impl Light {
    /// Unit direction toward the light in the local `(u, v, n)` frame.
    pub fn local_direction(&self) -> Vec3<f64> {
        let (se, ce) = self.elevation.to_radians().sin_cos();
        let (sa, ca) = self.azimuth.to_radians().sin_cos();
        Vec3::new(ce * ca, ce * sa, se).normalize()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SlabScene {
    #[serde(default)]
    pub cut: Cut,
    /// Width and height of the visible slab in world units.
    pub extent: [f64; 2],
    /// Image width and height in pixels.
    pub resolution: [u32; 2],
    #[serde(default)]
    pub light: Light,
    #[serde(default = "unit")]
    pub exposure: f64,
    /// Covers the slab with boards instead of a single cut.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boards: Option<BoardPattern>,
}

fn unit() -> f64 {
    1.0
}

impl Default for SlabScene {
    fn default() -> Self {
        Self {
            cut: Cut::default(),
            extent: [40.0, 40.0],
            resolution: [256, 256],
            light: Light::default(),
            exposure: 1.0,
            boards: None,
        }
    }
}

impl SlabScene {
    /// Geometric problems that leave nothing sensible to render.
    pub fn degeneracies(&self) -> Vec<FieldError> {
        let mut errors = Vec::new();
        self.cut.validate("scene.cut", &mut errors);
        if !self.extent.iter().all(|e| *e > 0.0 && e.is_finite()) {
            errors.push(FieldError::new("scene.extent", "must be positive"));
        }
        if self.resolution.contains(&0) {
            errors.push(FieldError::new("scene.resolution", "must be at least 1x1"));
        }
        if !(self.light.elevation.is_finite() && self.light.azimuth.is_finite()) {
            errors.push(FieldError::new("scene.light", "angles must be finite"));
        }
        if !(self.exposure >= 0.0) || !self.exposure.is_finite() {
            errors.push(FieldError::new("scene.exposure", "must be non-negative"));
        }
        if let Some(b) = &self.boards {
            b.validate("scene.boards", &mut errors);
        }
        errors
    }

    pub fn width(&self) -> usize {
        self.resolution[0] as usize
    }

    pub fn height(&self) -> usize {
        self.resolution[1] as usize
    }

    /// Pixel spacing in world units along `u` and `v`.
    pub fn spacing(&self) -> [f64; 2] {
        [self.extent[0] / self.resolution[0] as f64, self.extent[1] / self.resolution[1] as f64]
    }

    /// Surface coordinates of a pixel center; the slab is centered on the cut origin.
    /// Indices may fall outside the image for neighbour lookups.
    pub fn surface_coords(&self, i: i64, j: i64) -> [f64; 2] {
        let [w, h] = self.resolution.map(f64::from);
        [
            ((i as f64 + 0.5) / w - 0.5) * self.extent[0],
            ((j as f64 + 0.5) / h - 0.5) * self.extent[1],
        ]
    }
}
