//! Measures `evaluate` calls per second for a preset on one thread.

use std::time::Instant;

use xylem::linalg::Vec3;
use xylem::wood::{preset, WoodModel, DEFAULT_PRESET};

fn main() {
    let name = std::env::args().nth(1).unwrap_or_else(|| DEFAULT_PRESET.to_string());
    let params = preset(&name).expect("unknown preset");
    let model = WoodModel::<f64>::new(&params).expect("preset is valid");
    let n = 200_000;
    let mut acc = 0.0;
    let start = Instant::now();
    for i in 0..n {
        let f = i as f64;
        let p = Vec3::new(150.0 + (f * 0.618).fract() * 50.0, (f * 0.414).fract() * 50.0, (f * 0.732).fract() * 80.0);
        acc += model.evaluate(p).diffuse_color.x;
    }
    let secs = start.elapsed().as_secs_f64();
    println!("{name}: {:.0} evaluations/s (checksum {acc:.3})", n as f64 / secs);
}
