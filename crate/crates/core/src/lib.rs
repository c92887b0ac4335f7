//! Procedural wood engine: sparse convolution noise, anatomical wood model
//! and a layered wood BSDF.

pub mod bsdf;
pub mod cylindrical;
pub mod distortion;
pub mod error;
pub mod grid;
pub mod kernel;
pub mod linalg;
pub mod noise;
pub mod scalar;
pub mod wood;

pub use error::{Error, FieldError, Result};
pub use scalar::Real;

pub type Vec3f = linalg::Vec3<f32>;
pub type Vec3d = linalg::Vec3<f64>;
pub type Mat3f = linalg::Mat3<f32>;
pub type Mat3d = linalg::Mat3<f64>;
pub type Noise = noise::Noise<f64>;
pub type NoiseF32 = noise::Noise<f32>;
pub type WoodModel = wood::WoodModel<f64>;
pub type WoodModelF32 = wood::WoodModel<f32>;
pub type ShadingRecord = wood::ShadingRecord<f64>;
