//! Direct-lit slab renders: one wood evaluation per surface sample, bump
//! normals from neighbouring samples, and the wood BSDF under a directional
//! light seen from straight above.

use rayon::prelude::*;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};
use xylem::bsdf::{wood_bsdf_eval, Coating, SurfaceInterface};
use xylem::grid::CellHashSeed;
use xylem::linalg::{Mat3, Vec3};
use xylem::wood::WoodParams;
use xylem::ShadingRecord;
use xylem::WoodModel;

use crate::board::board_map;
use crate::raster::LinearImage;
use crate::scene::{CutPlane, Light, SlabScene};
use crate::RenderError;

const BOARD_SEED: i64 = 0x424f;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
#[serde(rename_all = "snake_case")]
pub enum Quality {
    /// Resolution capped at 256 on the long side and at most two
    /// distortion bands per axis.
    #[default]
    Draft,
    Full,
}

impl Quality {
    pub const DRAFT_MAX_SIDE: u32 = 256;
    pub const DRAFT_BANDS: u32 = 2;

    pub fn as_str(self) -> &'static str {
        match self {
            Self::Draft => "draft",
            Self::Full => "full",
        }
    }

    pub fn apply(self, scene: &SlabScene, params: &WoodParams) -> (SlabScene, WoodParams) {
        let (mut scene, mut params) = (scene.clone(), params.clone());
        if self == Self::Draft {
            let long = scene.resolution[0].max(scene.resolution[1]);
            if long > Self::DRAFT_MAX_SIDE {
                let k = f64::from(Self::DRAFT_MAX_SIDE) / f64::from(long);
                scene.resolution = scene.resolution.map(|r| ((f64::from(r) * k).round() as u32).max(1));
            }
            params.limit_distortion_bands(Self::DRAFT_BANDS);
        }
        (scene, params)
    }
}

/// Runs `f` on every row of `out`, in parallel, on `workers` threads or the
/// global pool.
pub(crate) fn for_each_row<T: Send>(
    out: &mut [T],
    row_len: usize,
    workers: Option<usize>,
    f: impl Fn(usize, &mut [T]) + Sync,
) -> Result<(), RenderError> {
    let mut run = || out.par_chunks_mut(row_len.max(1)).enumerate().for_each(|(j, row)| f(j, row));
    match workers {
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build()?.install(run),
        None => run(),
    }
    Ok(())
}

/// A scene bound to a compiled wood model.
#[derive(Clone, Debug)]
pub struct Slab {
    scene: SlabScene,
    model: WoodModel,
    plane: CutPlane,
    seed: CellHashSeed,
}

impl Slab {
    pub fn new(scene: &SlabScene, params: &WoodParams) -> Result<Self, RenderError> {
        let errors = params.validation_errors();
        if !errors.is_empty() {
            return Err(RenderError::Invalid(errors));
        }
        let degenerate = scene.degeneracies();
        if !degenerate.is_empty() {
            return Err(RenderError::Degenerate(degenerate));
        }
        Ok(Self {
            scene: scene.clone(),
            model: WoodModel::new(params)?,
            plane: scene.cut.plane(),
            seed: params.seed.derive(&[BOARD_SEED]),
        })
    }

    pub fn scene(&self) -> &SlabScene {
        &self.scene
    }

    pub fn model(&self) -> &WoodModel {
        &self.model
    }

    /// Tree-space point of pixel `(i, j)` and the tree-space images of the
    /// surface `(u, v, n)` axes there.
    pub fn surface_point(&self, i: i64, j: i64) -> (Vec3<f64>, Mat3<f64>) {
        let s = self.scene.surface_coords(i, j);
        match &self.scene.boards {
            Some(pattern) => {
                let b = board_map(pattern, s, self.seed);
                (b.tree, b.frame)
            }
            None => (self.plane.point(s), Mat3::from_cols(self.plane.u, self.plane.v, self.plane.n)),
        }
    }

    /// Shading record at pixel `(i, j)` with fiber directions in the local
    /// surface frame.
    pub fn local_record(&self, i: i64, j: i64) -> (Vec3<f64>, ShadingRecord) {
        let (p, frame) = self.surface_point(i, j);
        let mut rec = self.model.evaluate(p);
        rec.fiber_dir_longitudinal = frame.tr_mul_vec(rec.fiber_dir_longitudinal);
        rec.fiber_dir_radial = frame.tr_mul_vec(rec.fiber_dir_radial);
        (p, rec)
    }

    /// Evaluates the wood at every pixel plus a one-pixel border.
    pub fn shading_buffer(&self, workers: Option<usize>) -> Result<ShadingBuffer, RenderError> {
        let (w, h) = (self.scene.width(), self.scene.height());
        let stride = w + 2;
        let mut records = vec![blank_record(); stride * (h + 2)];
        for_each_row(&mut records, stride, workers, |j, row| {
            for (i, rec) in row.iter_mut().enumerate() {
                *rec = self.local_record(i as i64 - 1, j as i64 - 1).1;
            }
        })?;
        Ok(ShadingBuffer { width: w, height: h, records, shader: self.shader() })
    }

    fn shader(&self) -> Shader {
        let bsdf = &self.model.params().bsdf;
        Shader { spacing: self.scene.spacing(), eta: bsdf.eta, coating: bsdf.coating }
    }

    pub fn render(&self, workers: Option<usize>) -> Result<LinearImage, RenderError> {
        self.shading_buffer(workers)?.shade(&self.scene.light, self.scene.exposure, workers)
    }

    /// One pixel on its own, identical to the same pixel of [`Slab::render`].
    pub fn render_pixel(&self, i: usize, j: usize) -> [f32; 3] {
        let (i, j) = (i as i64, j as i64);
        let rec = |di: i64, dj: i64| self.local_record(i + di, j + dj).1;
        let heights = [rec(-1, 0), rec(1, 0), rec(0, -1), rec(0, 1)].map(|r| r.bump_height);
        let light = self.scene.light.local_direction();
        self.shader().shade(&rec(0, 0), heights, light, self.scene.exposure)
    }

    pub fn sweep(&self, spec: &SweepSpec, workers: Option<usize>) -> Result<Vec<LinearImage>, RenderError> {
        let mut frames = Vec::with_capacity(spec.frames);
        self.sweep_each(spec, workers, |_, img| {
            frames.push(img);
            Ok(())
        })?;
        Ok(frames)
    }

    /// Renders the sweep frame by frame, evaluating the wood only once.
    pub fn sweep_each(
        &self,
        spec: &SweepSpec,
        workers: Option<usize>,
        mut sink: impl FnMut(usize, LinearImage) -> Result<(), RenderError>,
    ) -> Result<(), RenderError> {
        let buffer = self.shading_buffer(workers)?;
        for (k, elevation) in spec.elevations().into_iter().enumerate() {
            let light = Light { elevation, ..self.scene.light };
            sink(k, buffer.shade(&light, self.scene.exposure, workers)?)?;
        }
        Ok(())
    }
}

pub fn render_slab(scene: &SlabScene, params: &WoodParams) -> Result<LinearImage, RenderError> {
    Slab::new(scene, params)?.render(None)
}

#[derive(Clone, Copy, Debug)]
struct Shader {
    spacing: [f64; 2],
    eta: f64,
    coating: Coating,
}

impl Shader {
    /// `heights` are the bump heights left, right, above and below.
    fn shade(&self, rec: &ShadingRecord, heights: [f64; 4], light: Vec3<f64>, exposure: f64) -> [f32; 3] {
        let [l, r, u, d] = heights;
        let hx = (r - l) / (2.0 * self.spacing[0]);
        let hy = (d - u) / (2.0 * self.spacing[1]);
        let normal = Vec3::new(-hx, -hy, 1.0).normalize();
        let cos = normal.dot(light);
        if cos <= 0.0 {
            return [0.0; 3];
        }
        let iface = SurfaceInterface { eta: self.eta, normal, coating: self.coating };
        let f = wood_bsdf_eval(rec, &iface, light, Vec3::z_axis());
        (f * (std::f64::consts::PI * cos * exposure)).to_array().map(|c| c as f32)
    }
}

/// Wood evaluated over an image plus a one-pixel border, ready to be lit.
#[derive(Clone, Debug)]
pub struct ShadingBuffer {
    width: usize,
    height: usize,
    records: Vec<ShadingRecord>,
    shader: Shader,
}

impl ShadingBuffer {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// Record of pixel `(i, j)`; indices run from -1 to the size inclusive.
    pub fn record(&self, i: i64, j: i64) -> &ShadingRecord {
        &self.records[(j + 1) as usize * (self.width + 2) + (i + 1) as usize]
    }

    pub fn shade(&self, light: &Light, exposure: f64, workers: Option<usize>) -> Result<LinearImage, RenderError> {
        let mut img = LinearImage::new(self.width, self.height);
        let dir = light.local_direction();
        for_each_row(&mut img.pixels, self.width, workers, |j, row| {
            let j = j as i64;
            for (i, px) in row.iter_mut().enumerate() {
                let i = i as i64;
                let h = |di: i64, dj: i64| self.record(i + di, j + dj).bump_height;
                *px = self.shader.shade(self.record(i, j), [h(-1, 0), h(1, 0), h(0, -1), h(0, 1)], dir, exposure);
            }
        })?;
        Ok(img)
    }
}

pub(crate) fn blank_record() -> ShadingRecord {
    let z = Vec3::zero();
    ShadingRecord {
        diffuse_color: z,
        fiber_color: z,
        highlight_width: 0.0,
        fiber_dir_longitudinal: z,
        fiber_dir_radial: z,
        ray_mask: 0.0,
        pore_mask: 0.0,
        bump_height: 0.0,
    }
}

/// Light elevations swept over an arc at fixed azimuth.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub frames: usize,
    /// First and last elevation, degrees.
    pub arc: [f64; 2],
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self { frames: 64, arc: [10.0, 170.0] }
    }
}

impl SweepSpec {
    pub fn elevations(&self) -> Vec<f64> {
        let [a, b] = self.arc;
        match self.frames {
            0 => Vec::new(),
            1 => vec![a],
            n => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
        }
    }
}

/// `frame_007.png`: zero-padded to at least three digits, more when there
/// are enough frames to need them.
pub fn frame_name(index: usize, count: usize) -> String {
    let digits = count.saturating_sub(1).max(1).to_string().len().max(3);
    format!("frame_{index:0digits$}.png")
}
