//! Linear RGB images, tone mapping and encoders.

use std::io::Write;
use std::path::Path;

use image::codecs::png::PngEncoder;
use image::{ExtendedColorType, ImageEncoder};

use crate::RenderError;

pub fn srgb_encode(linear: f64) -> f64 {
    let c = linear.clamp(0.0, 1.0);
    if c <= 0.003_130_8 {
        12.92 * c
    } else {
        1.055 * c.powf(1.0 / 2.4) - 0.055
    }
}

pub fn srgb_decode(encoded: f64) -> f64 {
    let c = encoded.clamp(0.0, 1.0);
    if c <= 0.040_45 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

pub fn srgb8(linear: f64) -> u8 {
    (srgb_encode(linear) * 255.0).round() as u8
}

/// Rec. 709 luminance of a linear color.
pub fn luminance(c: [f32; 3]) -> f64 {
    0.2126 * c[0] as f64 + 0.7152 * c[1] as f64 + 0.0722 * c[2] as f64
}

/// Row-major linear RGB, top row first.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<[f32; 3]>,
}

impl LinearImage {
    pub fn new(width: usize, height: usize) -> Self {
        Self { width, height, pixels: vec![[0.0; 3]; width * height] }
    }

    pub fn get(&self, i: usize, j: usize) -> [f32; 3] {
        self.pixels[j * self.width + i]
    }

    pub fn mean_luminance(&self) -> f64 {
        self.pixels.iter().map(|p| luminance(*p)).sum::<f64>() / self.pixels.len().max(1) as f64
    }

    /// 8-bit sRGB, three bytes per pixel.
    pub fn to_srgb8(&self) -> Vec<u8> {
        self.pixels.iter().flat_map(|p| p.map(|c| srgb8(c as f64))).collect()
    }

    pub fn png_bytes(&self) -> Result<Vec<u8>, RenderError> {
        encode_png(&self.to_srgb8(), self.width, self.height, ExtendedColorType::Rgb8)
    }

    /// Portable float map: little-endian, rows stored bottom to top.
    pub fn pfm_bytes(&self) -> Vec<u8> {
        let mut out = format!("PF\n{} {}\n-1.0\n", self.width, self.height).into_bytes();
        for j in (0..self.height).rev() {
            for p in &self.pixels[j * self.width..(j + 1) * self.width] {
                for c in p {
                    out.extend_from_slice(&c.to_le_bytes());
                }
            }
        }
        out
    }

    /// Writes PNG, or PFM when the extension is `pfm`.
    pub fn save(&self, path: &Path) -> Result<(), RenderError> {
        let bytes = match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("pfm") => self.pfm_bytes(),
            _ => self.png_bytes()?,
        };
        write_file(path, &bytes)
    }
}

pub(crate) fn encode_png(
    data: &[u8],
    width: usize,
    height: usize,
    color: ExtendedColorType,
) -> Result<Vec<u8>, RenderError> {
    let mut out = Vec::new();
    PngEncoder::new(&mut out).write_image(data, width as u32, height as u32, color)?;
    Ok(out)
}

pub(crate) fn write_file(path: &Path, bytes: &[u8]) -> Result<(), RenderError> {
    let mut f = std::fs::File::create(path).map_err(|e| RenderError::io(path, e))?;
    f.write_all(bytes).map_err(|e| RenderError::io(path, e))
}

/// Decodes any supported image into linear RGB, dropping alpha.
pub fn decode_linear(bytes: &[u8]) -> Result<Vec<[f64; 3]>, RenderError> {
    let img = image::load_from_memory(bytes)?.to_rgb8();
    let lut: Vec<f64> = (0..=255u8).map(|v| srgb_decode(v as f64 / 255.0)).collect();
    Ok(img.pixels().map(|p| p.0.map(|c| lut[c as usize])).collect())
}
