//! Slab rendering, light sweeps, texture baking and board layouts on top of
//! the `xylem` wood model.

pub mod bake;
pub mod board;
pub mod raster;
pub mod render;
pub mod scene;

use std::path::{Path, PathBuf};

use xylem::FieldError;

pub use bake::{bake, MapKind, TextureSet};
pub use board::{board_map, BoardKind, BoardPattern, BoardSample, Region};
pub use raster::LinearImage;
pub use render::{frame_name, render_slab, Quality, ShadingBuffer, Slab, SweepSpec};
pub use scene::{Cut, CutPlane, Light, SlabScene};

#[derive(Debug, thiserror::Error)]
pub enum RenderError {
    #[error("invalid parameters: {}", summary(.0))]
    Invalid(Vec<FieldError>),
    #[error("degenerate scene: {}", summary(.0))]
    Degenerate(Vec<FieldError>),
    #[error("image: {0}")]
    Image(#[from] image::ImageError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

impl RenderError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io { path: path.to_owned(), source }
    }
}

impl From<xylem::Error> for RenderError {
    fn from(e: xylem::Error) -> Self {
        Self::Invalid(e.field_errors())
    }
}

fn summary(errors: &[FieldError]) -> String {
    errors.iter().map(|e| format!("{}: {}", e.path, e.message)).collect::<Vec<_>>().join("; ")
}
