//! The procedural wood volume: growth rings, interlocked grain, pores, rays,
//! color and the distortion that ties them together.

mod estimate;
mod model;
mod params;
mod presets;
pub mod time;
pub mod waves;

pub use estimate::{estimate_color_params, ColorEstimate, DARKEST};
pub use model::{Volumes, WoodModel};
pub use params::*;
pub use presets::{preset, presets, DEFAULT_PRESET, PRESET_NAMES};

use crate::linalg::Vec3;

/// Every BSDF input at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShadingRecord<T> {
    pub diffuse_color: Vec3<T>,
    pub fiber_color: Vec3<T>,
    /// Radians.
    pub highlight_width: T,
    pub fiber_dir_longitudinal: Vec3<T>,
    pub fiber_dir_radial: Vec3<T>,
    pub ray_mask: T,
    pub pore_mask: T,
    pub bump_height: T,
}
