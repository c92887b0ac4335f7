//! Periodic waves with unit period: the smoothed triangle wave for growth rate
//! and the smoothed rectangle wave for seasonal volumes.

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::FieldError;
use crate::scalar::Real;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct TriangleWaveSpec {
    /// Slope magnitude of the falling segment (growing season).
    pub fall_slope: f64,
    /// Slope of the rising segment (off-season).
    pub rise_slope: f64,
    /// Length of the blend from falling to rising, as a fraction of a period.
    pub fall_to_rise: f64,
    /// Length of the blend from rising to falling.
    pub rise_to_fall: f64,
}

impl TriangleWaveSpec {
    pub fn validate(&self, path: &str, errors: &mut Vec<FieldError>) {
        let at = |f: &str| format!("{path}.{f}");
        if !(self.fall_slope > 0.0) || !self.fall_slope.is_finite() {
            errors.push(FieldError::new(at("fall_slope"), "must be positive"));
        }
        if !(self.rise_slope > 0.0) || !self.rise_slope.is_finite() {
            errors.push(FieldError::new(at("rise_slope"), "must be positive"));
        }
        for (name, v) in [("fall_to_rise", self.fall_to_rise), ("rise_to_fall", self.rise_to_fall)] {
            if !(v >= 0.0) || !v.is_finite() {
                errors.push(FieldError::new(at(name), "must be non-negative"));
            }
        }
        if errors.is_empty() {
            let (lf, lr) = self.linear_lengths();
            if !(lf > 0.0 && lr > 0.0) {
                errors.push(FieldError::new(
                    at("fall_to_rise"),
                    "transitions leave no room for both linear segments",
                ));
            }
        }
    }

    /// Lengths of the falling and rising linear segments that make the wave periodic.
    pub fn linear_lengths(&self) -> (f64, f64) {
        let (a, b) = (self.fall_slope, self.rise_slope);
        let t = self.fall_to_rise + self.rise_to_fall;
        (b / (a + b) - t / 2.0, a / (a + b) - t / 2.0)
    }
}

/// Zero-mean C¹ triangle wave. One period starts at the top of the falling segment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TriangleWave<T> {
    a: T,
    b: T,
    ends: [T; 4],
    lengths: [T; 4],
    starts: [T; 4],
}

impl<T: Real> TriangleWave<T> {
    /// Assumes a spec that passed validation.
    pub fn new(spec: &TriangleWaveSpec) -> Self {
        let (a, b) = (spec.fall_slope, spec.rise_slope);
        let (lf, lr) = spec.linear_lengths();
        let (t1, t2) = (spec.fall_to_rise, spec.rise_to_fall);
        let lengths = [lf, t1, lr, t2];
        // Value at the start of each segment and each segment's integral.
        let mut v = [0.0; 4];
        v[1] = -a * lf;
        v[2] = v[1] - a * t1 + (a + b) * t1 / 2.0;
        v[3] = v[2] + b * lr;
        let integral = (v[0] * lf - a * lf * lf / 2.0)
            + (v[1] * t1 - a * t1 * t1 / 2.0 + (a + b) * t1 * t1 / 6.0)
            + (v[2] * lr + b * lr * lr / 2.0)
            + (v[3] * t2 + b * t2 * t2 / 2.0 - (a + b) * t2 * t2 / 6.0);
        let mut ends = [0.0; 4];
        let mut acc = 0.0;
        for (e, l) in ends.iter_mut().zip(lengths) {
            acc += l;
            *e = acc;
        }
        Self {
            a: T::lit(a),
            b: T::lit(b),
            ends: ends.map(T::lit),
            lengths: lengths.map(T::lit),
            starts: v.map(|x| T::lit(x - integral)),
        }
    }

    /// `(w(x), w'(x))`.
    #[inline]
    pub fn eval(&self, x: T) -> (T, T) {
        let u = x - x.floor();
        let (a, b) = (self.a, self.b);
        let ab = a + b;
        let two = T::lit(2.0);
        if u < self.ends[0] {
            (self.starts[0] - a * u, -a)
        } else if u < self.ends[1] {
            let s = u - self.ends[0];
            let l = self.lengths[1];
            (self.starts[1] - a * s + ab * s * s / (two * l), -a + ab * s / l)
        } else if u < self.ends[2] {
            let s = u - self.ends[1];
            (self.starts[2] + b * s, b)
        } else {
            let s = u - self.ends[2];
            let l = self.lengths[3];
            if l > T::zero() {
                (self.starts[3] + b * s - ab * s * s / (two * l), b - ab * s / l)
            } else {
                (self.starts[0], -a)
            }
        }
    }

    pub fn value(&self, x: T) -> T {
        self.eval(x).0
    }

    /// Value at the top of the falling segment, where each period starts.
    pub fn start_value(&self) -> T {
        self.starts[0]
    }

    /// Measure of the period where the wave falls, and the total drop.
    pub fn falling_measure_and_drop(&self) -> (T, T) {
        let (a, b) = (self.a, self.b);
        let ab = a + b;
        let two = T::lit(2.0);
        let share = a / ab;
        let blends = self.lengths[1] + self.lengths[3];
        let measure = self.lengths[0] + blends * share;
        let drop = a * self.lengths[0] + a * share * blends / two;
        (measure, drop)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct RectWaveSpec {
    pub min: f64,
    pub max: f64,
    /// Fractions of a year; the four must sum to one.
    pub low: f64,
    pub rise: f64,
    pub high: f64,
    pub fall: f64,
}

impl RectWaveSpec {
    pub fn constant(v: f64) -> Self {
        Self { min: v, max: v, low: 0.25, rise: 0.25, high: 0.25, fall: 0.25 }
    }

    pub fn validate(&self, path: &str, errors: &mut Vec<FieldError>) {
        let at = |f: &str| format!("{path}.{f}");
        for (name, v) in [("min", self.min), ("max", self.max)] {
            if !v.is_finite() {
                errors.push(FieldError::new(at(name), "must be finite"));
            }
        }
        if self.min > self.max {
            errors.push(FieldError::new(at("min"), "must not exceed max"));
        }
        let parts = [("low", self.low), ("rise", self.rise), ("high", self.high), ("fall", self.fall)];
        for (name, v) in parts {
            if !(v > 0.0) || !v.is_finite() {
                errors.push(FieldError::new(at(name), "proportions must be positive"));
            }
        }
        let sum: f64 = parts.iter().map(|p| p.1).sum();
        if (sum - 1.0).abs() > 1e-9 {
            errors.push(FieldError::new(at("low"), format!("proportions sum to {sum}, expected 1")));
        }
    }
}

/// C² step from 0 to 1 on `[0, 1]`, piecewise cubic with `f‴ = ±32` on quarters.
#[inline]
pub fn smooth_step<T: Real>(u: T) -> T {
    let half = T::lit(0.5);
    if u > half {
        return T::one() - smooth_step(T::one() - u);
    }
    let quarter = T::lit(0.25);
    let c = T::lit(16.0 / 3.0);
    if u <= quarter {
        c * u * u * u
    } else {
        let s = u - quarter;
        T::lit(1.0 / 12.0) + s + T::lit(4.0) * s * s - c * s * s * s
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RectWave<T> {
    min: T,
    max: T,
    span: T,
    ends: [T; 3],
    rise: T,
    fall: T,
}

impl<T: Real> RectWave<T> {
    pub fn new(spec: &RectWaveSpec) -> Self {
        Self {
            min: T::lit(spec.min),
            max: T::lit(spec.max),
            span: T::lit(spec.max - spec.min),
            ends: [spec.low, spec.low + spec.rise, spec.low + spec.rise + spec.high].map(T::lit),
            rise: T::lit(spec.rise),
            fall: T::lit(spec.fall),
        }
    }

    /// Position within the year mapped to `[0, 1]`: 0 on the low plateau, 1 on the high one.
    #[inline]
    pub fn unit(&self, t: T) -> T {
        let u = t - t.floor();
        if u < self.ends[0] {
            T::zero()
        } else if u < self.ends[1] {
            smooth_step((u - self.ends[0]) / self.rise)
        } else if u < self.ends[2] {
            T::one()
        } else {
            T::one() - smooth_step(((u - self.ends[2]) / self.fall).min(T::one()))
        }
    }

    #[inline]
    fn lerp(&self, u: T) -> T {
        if u == T::one() {
            self.max
        } else {
            self.min + self.span * u
        }
    }

    #[inline]
    pub fn value(&self, t: T) -> T {
        self.lerp(self.unit(t))
    }

    /// The wave with its plateaus swapped: `max` on the low plateau.
    #[inline]
    pub fn inverted(&self, t: T) -> T {
        self.lerp(T::one() - self.unit(t))
    }
}
