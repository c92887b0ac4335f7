//! Time volume: the year in which each radius was laid down.

use crate::error::Result;
use crate::grid::CellHashSeed;
use crate::noise::{Noise1d, Noise1dSpec};
use crate::scalar::Real;
use crate::wood::waves::{TriangleWave, TriangleWaveSpec};

/// Wave scale `k` that makes the tree spend half of each year growing faster
/// than its mean rate.
pub fn time_scale(spec: &TriangleWaveSpec) -> f64 {
    let w = TriangleWave::<f64>::new(spec);
    let (measure, drop) = w.falling_measure_and_drop();
    if drop > 0.0 {
        (measure - 0.5) / drop
    } else {
        0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeSample<T> {
    pub t_pre: T,
    pub t: T,
    pub dt_dr: T,
}

#[derive(Clone, Debug)]
pub struct TimeVolume<T> {
    inv_width: T,
    wave: TriangleWave<T>,
    k: T,
    phase: T,
    noise: Option<Noise1d<T>>,
}

impl<T: Real> TimeVolume<T> {
    pub fn new(
        mean_ring_width: f64,
        wave: &TriangleWaveSpec,
        noise: &Noise1dSpec,
        seed: CellHashSeed,
    ) -> Result<Self> {
        let w = TriangleWave::new(wave);
        let k = time_scale(wave);
        let noise = Noise1d::new(&noise.cast(), seed)?;
        let active = noise.band_amplitude(0) != T::zero();
        Ok(Self {
            inv_width: T::lit(mean_ring_width.recip()),
            wave: w,
            k: T::lit(k),
            // Shifts the wave so each year begins where fast growth begins.
            phase: -T::lit(k) * w.start_value(),
            noise: active.then_some(noise),
        })
    }

    pub fn scale(&self) -> T {
        self.k
    }

    #[inline]
    pub fn eval(&self, r: T) -> TimeSample<T> {
        let x = r * self.inv_width;
        let (w, dw) = self.wave.eval(x - self.phase);
        let t_pre = x + self.k * w;
        let dpre = T::one() + self.k * dw;
        let (n, dn) = match &self.noise {
            Some(n) => n.eval(t_pre),
            None => (T::zero(), T::zero()),
        };
        TimeSample { t_pre, t: t_pre + n, dt_dr: dpre * (T::one() + dn) * self.inv_width }
    }
}
