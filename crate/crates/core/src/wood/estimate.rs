//! Color parameters from a photograph.

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::wood::params::WoodParams;

/// Channel values below this are treated as this, so logarithms stay finite.
pub const DARKEST: f64 = 1.0 / 255.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct ColorEstimate {
    pub sigma: [f64; 3],
    pub path_offset: f64,
    pub ring_path: f64,
    /// Per-channel 75th percentile.
    pub earlywood: [f64; 3],
    /// Per-channel 25th percentile.
    pub latewood: [f64; 3],
}

/// Nearest-rank percentile of a sorted slice.
fn percentile(sorted: &[f64], p: f64) -> f64 {
    let rank = (p * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

/// Treats the 75th and 25th percentiles of each channel as the earlywood and
/// latewood colors, with rings spanning `[0, 1]` and `ℓ₀ = 1`.
pub fn estimate_color_params(pixels: &[[f64; 3]]) -> Result<ColorEstimate> {
    if pixels.is_empty() {
        return Err(Error::EmptyImage);
    }
    let mut early = [0.0; 3];
    let mut late = [0.0; 3];
    let mut channel = Vec::with_capacity(pixels.len());
    for c in 0..3 {
        channel.clear();
        channel.extend(pixels.iter().map(|p| p[c].clamp(DARKEST, 1.0)));
        channel.sort_by(f64::total_cmp);
        late[c] = percentile(&channel, 0.25);
        early[c] = percentile(&channel, 0.75);
    }
    let sigma = early.map(|e| -e.ln());
    // One ring path shared by all channels: log-space least squares.
    let (num, den) = (0..3).fold((0.0, 0.0), |(n, d), c| (n - sigma[c] * late[c].ln(), d + sigma[c] * sigma[c]));
    let ring_path = if den > 0.0 { (num / den - 1.0).max(0.0) } else { 0.0 };
    Ok(ColorEstimate { sigma, path_offset: 1.0, ring_path, earlywood: early, latewood: late })
}

impl ColorEstimate {
    /// Writes the estimate into `params`, normalizing the ring wave to `[0, 1]`.
    pub fn apply(&self, params: &mut WoodParams) {
        params.color.sigma = self.sigma;
        params.color.path_offset = self.path_offset;
        params.color.ring_path = self.ring_path;
        params.rings.min = 0.0;
        params.rings.max = 1.0;
    }

    /// Colors the estimated parameters give on the two ring plateaus.
    pub fn modeled_colors(&self) -> ([f64; 3], [f64; 3]) {
        let early = self.sigma.map(|s| (-s * self.path_offset).exp());
        let late = self.sigma.map(|s| (-s * (self.path_offset + self.ring_path)).exp());
        (early, late)
    }
}
