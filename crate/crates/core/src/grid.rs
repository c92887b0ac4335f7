//! Hashed impulse grids.
//!
//! Space is cut into cells; each cell owns a Poisson-distributed number of
//! impulses placed uniformly inside it. Counts and positions are pure
//! functions of `(seed, cell index, impulse index)`, so any query sees the
//! same impulses no matter what was evaluated before it.
//!
//! The hash is a splitmix64 finalizer folded left to right over the
//! zig-zag encoded parts:
//!
//! ```text
//! h0 = mix(seed + GOLDEN)
//! h  = mix((h + GOLDEN) ^ zigzag(part))   for each part
//! ```

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Vec3;
use crate::scalar::Real;

pub const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// splitmix64 output finalizer.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[inline]
pub fn zigzag(v: i64) -> u64 {
    ((v << 1) ^ (v >> 63)) as u64
}

#[inline]
fn fold(h: u64, part: i64) -> u64 {
    mix64(h.wrapping_add(GOLDEN) ^ zigzag(part))
}

#[inline]
fn start(seed: u64) -> u64 {
    mix64(seed.wrapping_add(GOLDEN))
}

pub fn hash_u64(seed: u64, parts: &[i64]) -> u64 {
    parts.iter().fold(start(seed), |h, &p| fold(h, p))
}

#[inline]
fn hash3(seed: u64, c: [i64; 3]) -> u64 {
    fold(fold(fold(start(seed), c[0]), c[1]), c[2])
}

/// Global texture seed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize, JsonSchema)]
#[serde(transparent)]
pub struct CellHashSeed(pub u64);

impl CellHashSeed {
    /// Independent sub-seed for a named consumer (a noise band, a mask, ...).
    pub fn derive(self, tag: &[i64]) -> Self {
        Self(hash_u64(self.0, tag))
    }
}

/// Deterministic Poisson sampler driven by a hashed uniform.
///
/// Inverts the CDF by walking it from zero, stopping at `ceil(λ + 10√λ)`.
#[derive(Clone, Copy, Debug)]
pub struct Poisson {
    lambda: f64,
    exp_neg: f64,
    cap: u32,
}

const LOG_DOMAIN_LAMBDA: f64 = 600.0;

impl Poisson {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::invalid("density", format!("Poisson mean must be positive and finite, got {lambda}")));
        }
        Ok(Self { lambda, exp_neg: (-lambda).exp(), cap: (lambda + 10.0 * lambda.sqrt()).ceil() as u32 })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Largest count this sampler can produce.
    pub fn cap(&self) -> u32 {
        self.cap
    }

    #[inline]
    pub fn sample(&self, u: u64) -> u32 {
        let x = f64::unit(u);
        if self.lambda > LOG_DOMAIN_LAMBDA {
            return self.sample_log(x);
        }
        let mut k = 0;
        let mut p = self.exp_neg;
        let mut cdf = p;
        while x >= cdf && k < self.cap {
            k += 1;
            p *= self.lambda / k as f64;
            cdf += p;
        }
        k
    }

    // e^-λ underflows for large means; accumulate the pmf from its logarithm.
    fn sample_log(&self, x: f64) -> u32 {
        let ln_lambda = self.lambda.ln();
        let mut k = 0;
        let mut log_p = -self.lambda;
        let mut cdf = log_p.exp();
        while x >= cdf && k < self.cap {
            k += 1;
            log_p += ln_lambda - (k as f64).ln();
            cdf += log_p.exp();
        }
        k
    }
}

pub fn poisson_count(u: u64, lambda: f64) -> Result<u32> {
    Ok(Poisson::new(lambda)?.sample(u))
}

/// A kernel center together with its private random stream.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Impulse<T> {
    pub center: Vec3<T>,
    pub stream: u64,
}

impl<T> Impulse<T> {
    /// `k`-th random draw for this impulse; draws 0..3 are reserved for its position.
    #[inline]
    pub fn draw(&self, k: i64) -> u64 {
        hash_u64(self.stream, &[k])
    }

    /// Random ±1 carried by signed noise.
    #[inline]
    pub fn sign(&self) -> i8 {
        if self.draw(3) >> 63 == 0 {
            1
        } else {
            -1
        }
    }
}

/// Draw index of the first kernel attribute after the position draws.
pub const FIRST_ATTRIBUTE_DRAW: i64 = 3;

/// Uniform in-cell coordinates of impulse `index` of the cell with hash `cell_hash`.
#[inline]
fn impulse_stream(cell_hash: u64, index: u32) -> (u64, [u64; 3]) {
    let stream = fold(start(cell_hash), index as i64);
    let s0 = start(stream);
    (stream, [fold(s0, 0), fold(s0, 1), fold(s0, 2)])
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct CartesianGridSpec<T = f64> {
    /// World units per cell along each axis.
    pub cell_scale: Vec3<T>,
    /// Mean impulses per cell.
    pub density: T,
}

#[derive(Clone, Debug)]
pub struct CartesianGrid<T> {
    cell: Vec3<T>,
    inv_cell: Vec3<T>,
    poisson: Poisson,
    seed: u64,
}

impl<T: Real> CartesianGrid<T> {
    pub fn new(spec: &CartesianGridSpec<T>, seed: CellHashSeed) -> Result<Self> {
        let c = spec.cell_scale;
        if !(c.min_elem() > T::zero()) || !c.is_finite() {
            return Err(Error::invalid("cell_scale", "every cell dimension must be positive"));
        }
        Ok(Self { cell: c, inv_cell: c.recip(), poisson: Poisson::new(spec.density.f64())?, seed: seed.0 })
    }

    pub fn cell_scale(&self) -> Vec3<T> {
        self.cell
    }

    pub fn poisson(&self) -> &Poisson {
        &self.poisson
    }

    #[inline]
    pub fn cell_of(&self, p: Vec3<T>) -> [i64; 3] {
        let c = p.mul_elem(self.inv_cell).floor();
        [to_index(c.x), to_index(c.y), to_index(c.z)]
    }

    /// Impulses owned by one cell, in impulse-index order.
    #[inline]
    pub fn cell_impulses(&self, cell: [i64; 3], mut f: impl FnMut(Impulse<T>)) -> u32 {
        let h = hash3(self.seed, cell);
        let count = self.poisson.sample(h);
        let origin = Vec3::new(T::lit(cell[0] as f64), T::lit(cell[1] as f64), T::lit(cell[2] as f64));
        for n in 0..count {
            let (stream, u) = impulse_stream(h, n);
            let local = Vec3::new(T::unit(u[0]), T::unit(u[1]), T::unit(u[2]));
            f(Impulse { center: (origin + local).mul_elem(self.cell), stream });
        }
        count
    }

    /// Visits every impulse in the Chebyshev neighbourhood of `p`'s cell, in
    /// cell-lexicographic order. Returns the number of impulses visited.
    #[inline]
    pub fn for_each_near(&self, p: Vec3<T>, radius_cells: i64, mut f: impl FnMut(Impulse<T>)) -> u32 {
        let [ci, cj, ck] = self.cell_of(p);
        let mut visited = 0;
        for i in ci - radius_cells..=ci + radius_cells {
            for j in cj - radius_cells..=cj + radius_cells {
                for k in ck - radius_cells..=ck + radius_cells {
                    visited += self.cell_impulses([i, j, k], &mut f);
                }
            }
        }
        visited
    }
}

#[inline]
fn to_index<T: Real>(v: T) -> i64 {
    v.to_i64().unwrap_or(if v > T::zero() { i64::MAX / 4 } else { i64::MIN / 4 })
}

pub fn impulses_cartesian<T: Real>(grid: &CartesianGrid<T>, p: Vec3<T>, radius_cells: i64) -> Vec<Impulse<T>> {
    let side = (2 * radius_cells + 1) as usize;
    let mut out = Vec::with_capacity(side * side * side * 2);
    grid.for_each_near(p, radius_cells.max(1), |imp| out.push(imp));
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct CylindricalGridSpec<T = f64> {
    pub band_thickness: T,
    pub z_height: T,
    pub target_cell_volume: T,
    /// Mean impulses per cell.
    pub density: T,
}

/// Index of a cylindrical cell: radial band, angular slot, z slab.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CylCell {
    pub band: i64,
    pub slot: i64,
    pub slab: i64,
}

/// Concentric bands of equal-volume cells around the z axis.
///
/// Band 0 (the pith) is a single angular cell; band `b ≥ 1` holds
/// `round(2π r_mid Δr Δz / V)` cells.
#[derive(Clone, Debug)]
pub struct CylindricalGrid<T> {
    spec: CylindricalGridSpec<T>,
    cells_per_radian: f64,
    poisson: Poisson,
    seed: u64,
}

impl<T: Real> CylindricalGrid<T> {
    pub fn new(spec: &CylindricalGridSpec<T>, seed: CellHashSeed) -> Result<Self> {
        for (name, v) in [
            ("band_thickness", spec.band_thickness),
            ("z_height", spec.z_height),
            ("target_cell_volume", spec.target_cell_volume),
        ] {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::invalid(name, "must be positive"));
            }
        }
        let cells_per_radian = (spec.band_thickness * spec.z_height / spec.target_cell_volume).f64();
        Ok(Self { spec: *spec, cells_per_radian, poisson: Poisson::new(spec.density.f64())?, seed: seed.0 })
    }

    pub fn spec(&self) -> &CylindricalGridSpec<T> {
        &self.spec
    }

    pub fn poisson(&self) -> &Poisson {
        &self.poisson
    }

    pub fn angular_cells(&self, band: i64) -> i64 {
        if band <= 0 {
            return 1;
        }
        let r_mid = (band as f64 + 0.5) * self.spec.band_thickness.f64();
        ((std::f64::consts::TAU * r_mid * self.cells_per_radian).round() as i64).max(1)
    }

    /// Exact volume of a cell in `band`.
    pub fn cell_volume(&self, band: i64) -> T {
        let dr = self.spec.band_thickness;
        let b = T::lit(band as f64);
        let ring = T::PI() * ((b + T::one()).powi(2) - b * b) * dr * dr * self.spec.z_height;
        ring / T::lit(self.angular_cells(band) as f64)
    }

    fn slot_of(&self, theta: T, band: i64) -> i64 {
        let n = self.angular_cells(band);
        let s = to_index((wrap_angle(theta) / T::TAU() * T::lit(n as f64)).floor());
        s.clamp(0, n - 1)
    }

    pub fn cell_of(&self, p: Vec3<T>) -> CylCell {
        let r = p.x.hypot(p.y);
        let band = to_index((r / self.spec.band_thickness).floor());
        let slab = to_index((p.z / self.spec.z_height).floor());
        let slot = if r > T::zero() { self.slot_of(p.y.atan2(p.x), band) } else { 0 };
        CylCell { band, slot, slab }
    }

    pub fn cell_impulses(&self, cell: CylCell, mut f: impl FnMut(Impulse<T>)) -> u32 {
        let h = hash3(self.seed, [cell.band, cell.slot, cell.slab]);
        let count = self.poisson.sample(h);
        let dr = self.spec.band_thickness;
        let r0 = T::lit(cell.band as f64) * dr;
        let r1 = r0 + dr;
        let dtheta = T::TAU() / T::lit(self.angular_cells(cell.band) as f64);
        for n in 0..count {
            let (stream, u) = impulse_stream(h, n);
            // Area-uniform radius inside the annulus.
            let r = (r0 * r0 + T::unit(u[0]) * (r1 * r1 - r0 * r0)).sqrt();
            let theta = (T::lit(cell.slot as f64) + T::unit(u[1])) * dtheta;
            let z = (T::lit(cell.slab as f64) + T::unit(u[2])) * self.spec.z_height;
            let (s, c) = theta.sin_cos();
            f(Impulse { center: Vec3::new(r * c, r * s, z), stream });
        }
        count
    }

    /// Visits the containing cell and its radial, angular (with wraparound)
    /// and z neighbours. Neighbouring bands re-bin the query angle into their
    /// own slot count. Returns the number of impulses visited.
    pub fn for_each_near(&self, p: Vec3<T>, mut f: impl FnMut(Impulse<T>)) -> u32 {
        let home = self.cell_of(p);
        let r = p.x.hypot(p.y);
        let theta = p.y.atan2(p.x);
        let mut visited = 0;
        for band in (home.band - 1).max(0)..=home.band + 1 {
            let n = self.angular_cells(band);
            let mut slots = [0i64; 3];
            let (first, count) = if n <= 3 || r == T::zero() {
                // Small bands, and every band seen from the axis, are adjacent in full.
                (0, n)
            } else {
                let s = self.slot_of(theta, band);
                slots = [(s - 1).rem_euclid(n), s, (s + 1).rem_euclid(n)];
                slots.sort_unstable();
                (-1, 3)
            };
            for idx in 0..count {
                let slot = if first < 0 { slots[idx as usize] } else { idx };
                for slab in home.slab - 1..=home.slab + 1 {
                    visited += self.cell_impulses(CylCell { band, slot, slab }, &mut f);
                }
            }
        }
        visited
    }
}

/// Angle mapped into `[0, 2π)`.
#[inline]
pub fn wrap_angle<T: Real>(theta: T) -> T {
    let t = theta % T::TAU();
    let t = if t < T::zero() { t + T::TAU() } else { t };
    if t >= T::TAU() {
        T::zero()
    } else {
        t
    }
}

pub fn impulses_cylindrical<T: Real>(grid: &CylindricalGrid<T>, p: Vec3<T>) -> Vec<Impulse<T>> {
    let mut out = Vec::with_capacity(64);
    grid.for_each_near(p, |imp| out.push(imp));
    out
}
