//! Artist-tuned species presets.

use std::f64::consts::PI;

use crate::bsdf::Coating;
use crate::distortion::{AxisDistortionSpec, DistortionSpec};
use crate::grid::CellHashSeed;
use crate::noise::Noise1dSpec;
use crate::wood::params::*;
use crate::wood::waves::{RectWaveSpec, TriangleWaveSpec};

pub const PRESET_NAMES: [&str; 5] = ["mahogany", "curly_maple", "padauk", "yellowheart", "red_oak"];

pub const DEFAULT_PRESET: &str = "mahogany";

fn degrees(d: f64) -> f64 {
    d * PI / 180.0
}

fn axis(enabled: bool, kernel: [f64; 3], magnitude: f64) -> AxisDistortionSpec {
    AxisDistortionSpec { enabled, noise: distortion_noise(kernel, magnitude, 4) }
}

/// Beer absorption that gives `early` at unit path length.
fn sigma_for(early: [f64; 3]) -> [f64; 3] {
    early.map(|c: f64| -c.ln())
}

fn mahogany() -> WoodParams {
    WoodParams {
        schema_version: SCHEMA_VERSION,
        seed: CellHashSeed(0),
        growth: GrowthParams {
            mean_ring_width: 4.0,
            wave: TriangleWaveSpec { fall_slope: 0.5, rise_slope: 2.0, fall_to_rise: 0.1, rise_to_fall: 0.1 },
            noise: Noise1dSpec::wyvill(1.5, 2.0, 0.15),
        },
        rings: RectWaveSpec { min: 0.0, max: 1.0, low: 0.55, rise: 0.15, high: 0.2, fall: 0.1 },
        highlight_width: RectWaveSpec::constant(degrees(12.0)),
        ring_porosity: RingPorosity {
            porousness: 0.0,
            wave: RectWaveSpec { min: 0.3, max: 1.0, low: 0.4, rise: 0.2, high: 0.3, fall: 0.1 },
        },
        interlock: Noise1dSpec::wyvill(3.0, 2.0, 0.12),
        pores: PoreParams { size: 0.1, aspect_ratio: 8.0, density: 0.08, sharpness: 2.0, darkening: 0.6 },
        rays: RayParams { size: 0.05, aspect_ratio: 8.0, density: 0.1, sharpness: 1.0 },
        color: ColorParams {
            sigma: sigma_for([0.55, 0.30, 0.18]),
            path_offset: 1.0,
            ring_path: 0.3,
            fiber_scale: 0.5,
        },
        bump_scale: 0.05,
        distortion: DistortionSpec {
            r: axis(true, [6.0, 6.0, 30.0], 1.0),
            theta: axis(false, [6.0, 6.0, 30.0], 1.0),
            z: axis(false, [6.0, 6.0, 30.0], 1.0),
        },
        bsdf: BsdfParams { eta: 1.5, coating: Coating::Smooth },
    }
}

fn curly_maple() -> WoodParams {
    let mut p = mahogany();
    p.growth.mean_ring_width = 3.0;
    p.rings = RectWaveSpec { min: 0.0, max: 1.0, low: 0.6, rise: 0.15, high: 0.15, fall: 0.1 };
    p.color = ColorParams { sigma: sigma_for([0.86, 0.72, 0.52]), path_offset: 1.0, ring_path: 0.25, fiber_scale: 0.4 };
    p.interlock.magnitude = 0.0;
    p.pores = PoreParams { size: 0.05, aspect_ratio: 8.0, density: 0.06, sharpness: 2.0, darkening: 0.3 };
    p.rays = RayParams { size: 0.04, aspect_ratio: 10.0, density: 0.15, sharpness: 1.0 };
    // Fiddleback: short tangential waves along the trunk.
    p.distortion.theta = axis(true, [8.0, 8.0, 2.5], 0.6);
    p.distortion.r = axis(true, [8.0, 8.0, 40.0], 0.6);
    p
}

fn padauk() -> WoodParams {
    let mut p = mahogany();
    p.growth.mean_ring_width = 5.0;
    p.color = ColorParams { sigma: sigma_for([0.72, 0.24, 0.12]), path_offset: 1.0, ring_path: 0.2, fiber_scale: 0.5 };
    p.interlock = Noise1dSpec::wyvill(4.0, 2.0, 0.25);
    p.pores = PoreParams { size: 0.12, aspect_ratio: 8.0, density: 0.1, sharpness: 2.0, darkening: 0.8 };
    p
}

fn yellowheart() -> WoodParams {
    let mut p = mahogany();
    p.growth.mean_ring_width = 5.0;
    p.color = ColorParams { sigma: sigma_for([0.9, 0.74, 0.3]), path_offset: 1.0, ring_path: 0.15, fiber_scale: 0.3 };
    // Pronounced interlocked grain for a ribbon stripe.
    p.interlock = Noise1dSpec::wyvill(4.0, 2.0, 0.35);
    p.highlight_width = RectWaveSpec::constant(degrees(10.0));
    p.pores = PoreParams { size: 0.08, aspect_ratio: 8.0, density: 0.06, sharpness: 2.0, darkening: 0.4 };
    p.distortion.r.noise.magnitude = 0.5;
    p
}

fn red_oak() -> WoodParams {
    let mut p = mahogany();
    p.growth.mean_ring_width = 3.0;
    p.color = ColorParams { sigma: sigma_for([0.78, 0.55, 0.40]), path_offset: 1.0, ring_path: 0.35, fiber_scale: 0.5 };
    p.interlock.magnitude = 0.0;
    p.ring_porosity = RingPorosity {
        porousness: 1.0,
        wave: RectWaveSpec { min: 0.0, max: 1.0, low: 0.3, rise: 0.1, high: 0.5, fall: 0.1 },
    };
    p.pores = PoreParams { size: 0.18, aspect_ratio: 10.0, density: 0.25, sharpness: 2.0, darkening: 1.0 };
    p.rays = RayParams { size: 0.12, aspect_ratio: 20.0, density: 0.1, sharpness: 1.0 };
    p
}

pub fn preset(name: &str) -> Option<WoodParams> {
    Some(match name {
        "mahogany" => mahogany(),
        "curly_maple" => curly_maple(),
        "padauk" => padauk(),
        "yellowheart" => yellowheart(),
        "red_oak" => red_oak(),
        _ => return None,
    })
}

pub fn presets() -> Vec<(&'static str, WoodParams)> {
    PRESET_NAMES.iter().map(|&n| (n, preset(n).expect("listed preset exists"))).collect()
}

impl Default for WoodParams {
    fn default() -> Self {
        mahogany()
    }
}
