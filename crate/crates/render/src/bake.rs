//! Bakes the solid texture onto a surface as flat texture maps.

use std::path::Path;
use std::str::FromStr;

use image::ExtendedColorType;
use serde_json::json;
use xylem::linalg::Vec3;
use xylem::wood::WoodParams;
use xylem::ShadingRecord;

use crate::raster::{encode_png, srgb8, write_file};
use crate::render::{blank_record, for_each_row, Slab};
use crate::scene::SlabScene;
use crate::RenderError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MapKind {
    Diffuse,
    Fiber,
    Longitudinal,
    Radial,
    RayMask,
    PoreMask,
    Bump,
    Highlight,
}

impl MapKind {
    pub const ALL: [MapKind; 8] = [
        Self::Diffuse,
        Self::Fiber,
        Self::Longitudinal,
        Self::Radial,
        Self::RayMask,
        Self::PoreMask,
        Self::Bump,
        Self::Highlight,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::Diffuse => "diffuse",
            Self::Fiber => "fiber",
            Self::Longitudinal => "fiber_dir_longitudinal",
            Self::Radial => "fiber_dir_radial",
            Self::RayMask => "ray_mask",
            Self::PoreMask => "pore_mask",
            Self::Bump => "bump",
            Self::Highlight => "highlight_width",
        }
    }

    fn channels(self) -> usize {
        match self {
            Self::Diffuse | Self::Fiber | Self::Longitudinal | Self::Radial => 3,
            _ => 1,
        }
    }

    /// Parses `all` or a comma separated list of map names.
    pub fn parse_list(list: &str) -> Result<Vec<MapKind>, String> {
        if list.trim() == "all" {
            return Ok(Self::ALL.to_vec());
        }
        list.split(',').map(|s| s.trim().parse()).collect()
    }
}

impl FromStr for MapKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown map `{s}`; expected all or one of {}", Self::ALL.map(|k| k.name()).join(", ")))
    }
}

/// Encodes a unit vector as `0.5·(d + 1)` in 8 bits, picking the rounding
/// whose decoded length is closest to one.
pub fn encode_direction(d: Vec3<f64>) -> [u8; 3] {
    let exact = d.to_array().map(|c| ((c + 1.0) * 127.5).clamp(0.0, 255.0));
    let mut best = [0u8; 3];
    let mut best_err = f64::INFINITY;
    for mask in 0..8 {
        let c: [u8; 3] = std::array::from_fn(|k| {
            let v = if mask >> k & 1 == 1 { exact[k].ceil() } else { exact[k].floor() };
            v as u8
        });
        let err = (Vec3::<f64>::from_f64(decode_direction(c)).norm() - 1.0).abs();
        if err < best_err {
            (best, best_err) = (c, err);
        }
    }
    best
}

pub fn decode_direction(c: [u8; 3]) -> [f64; 3] {
    c.map(|v| v as f64 / 127.5 - 1.0)
}

fn unit8(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

/// Every map of a bake, from a single evaluation per texel. Fiber
/// directions are in the surface frame: `u` right, `v` down, `n` out.
#[derive(Clone, Debug, PartialEq)]
pub struct TextureSet {
    pub width: usize,
    pub height: usize,
    pub points: Vec<Vec3<f64>>,
    pub records: Vec<ShadingRecord>,
    /// Bump heights are stored as `0.5 + 0.5·h / bump_scale`.
    pub bump_scale: f64,
    /// Highlight widths are stored as `β / highlight_scale`, radians.
    pub highlight_scale: f64,
}

/// Bakes the surface of `scene` (its cut or board layout and extent) at `resolution`.
pub fn bake(
    scene: &SlabScene,
    params: &WoodParams,
    resolution: [u32; 2],
    workers: Option<usize>,
) -> Result<TextureSet, RenderError> {
    let scene = SlabScene { resolution, ..scene.clone() };
    let slab = Slab::new(&scene, params)?;
    let (w, h) = (scene.width(), scene.height());
    let mut texels = vec![(Vec3::zero(), blank_record()); w * h];
    for_each_row(&mut texels, w, workers, |j, row| {
        for (i, t) in row.iter_mut().enumerate() {
            *t = slab.local_record(i as i64, j as i64);
        }
    })?;
    let (points, records) = texels.into_iter().unzip();
    let hw = &params.highlight_width;
    Ok(TextureSet {
        width: w,
        height: h,
        points,
        records,
        bump_scale: if params.bump_scale > 0.0 { params.bump_scale } else { 1.0 },
        highlight_scale: hw.min.max(hw.max),
    })
}

impl TextureSet {
    /// Raw 8-bit texels of one map: sRGB for colors, linear otherwise.
    pub fn texels(&self, kind: MapKind) -> Vec<u8> {
        let mut out = Vec::with_capacity(self.records.len() * kind.channels());
        for r in &self.records {
            match kind {
                MapKind::Diffuse => out.extend(r.diffuse_color.to_array().map(srgb8)),
                MapKind::Fiber => out.extend(r.fiber_color.to_array().map(srgb8)),
                MapKind::Longitudinal => out.extend(encode_direction(r.fiber_dir_longitudinal)),
                MapKind::Radial => out.extend(encode_direction(r.fiber_dir_radial)),
                MapKind::RayMask => out.push(unit8(r.ray_mask)),
                MapKind::PoreMask => out.push(unit8(r.pore_mask)),
                MapKind::Bump => out.push(unit8(0.5 + 0.5 * r.bump_height / self.bump_scale)),
                MapKind::Highlight => out.push(unit8(r.highlight_width / self.highlight_scale)),
            }
        }
        out
    }

    pub fn png(&self, kind: MapKind) -> Result<Vec<u8>, RenderError> {
        let color = if kind.channels() == 3 { ExtendedColorType::Rgb8 } else { ExtendedColorType::L8 };
        encode_png(&self.texels(kind), self.width, self.height, color)
    }

    pub fn manifest(&self, kinds: &[MapKind]) -> serde_json::Value {
        let maps: serde_json::Map<_, _> = kinds
            .iter()
            .map(|k| {
                let encoding = match k {
                    MapKind::Diffuse | MapKind::Fiber => json!({ "encoding": "srgb" }),
                    MapKind::Longitudinal | MapKind::Radial => json!({ "encoding": "unit_vector", "decode": "2c - 1" }),
                    MapKind::RayMask | MapKind::PoreMask => json!({ "encoding": "linear" }),
                    MapKind::Bump => json!({ "encoding": "signed", "decode": "(2c - 1) * scale", "scale": self.bump_scale }),
                    MapKind::Highlight => json!({ "encoding": "linear", "decode": "c * scale", "unit": "radians", "scale": self.highlight_scale }),
                };
                let mut entry = encoding;
                entry["file"] = json!(format!("{}.png", k.name()));
                (k.name().to_owned(), entry)
            })
            .collect();
        json!({
            "width": self.width,
            "height": self.height,
            "direction_frame": "surface: u right, v down, n toward the viewer",
            "maps": maps,
        })
    }

    /// Writes one PNG per map and `manifest.json` into `dir`.
    pub fn write(&self, dir: &Path, kinds: &[MapKind]) -> Result<(), RenderError> {
        std::fs::create_dir_all(dir).map_err(|e| RenderError::io(dir, e))?;
        for &k in kinds {
            write_file(&dir.join(format!("{}.png", k.name())), &self.png(k)?)?;
        }
        let manifest = serde_json::to_string_pretty(&self.manifest(kinds)).expect("manifest serializes");
        write_file(&dir.join("manifest.json"), manifest.as_bytes())
    }
}
