//! Seeded sampling of admissible chart points and random holomorphic data,
//! plus the order-preserving map used to evaluate residuals over samples.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::holo::HoloFn;
use crate::{GeomError, Result};

/// Redraws allowed per point before giving up.
pub const MAX_ATTEMPTS: usize = 1000;

/// A coordinate box, optionally with the first two coordinates drawn from
/// an annulus `r_min ≤ |(x, y)| ≤ r_max` instead.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Region<const N: usize> {
    pub ranges: [(f64, f64); N],
    pub annulus: Option<(f64, f64)>,
}

impl<const N: usize> Region<N> {
    pub fn boxed(ranges: [(f64, f64); N]) -> Self {
        Self {
            ranges,
            annulus: None,
        }
    }

    pub fn with_annulus(mut self, r_min: f64, r_max: f64) -> Self {
        self.annulus = Some((r_min, r_max));
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (i, (lo, hi)) in self.ranges.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                return Err(GeomError::InvalidParameter(format!(
                    "empty range [{lo}, {hi}] for coordinate {i}"
                )));
            }
        }
        if let Some((a, b)) = self.annulus {
            if N < 2 || !(a >= 0.0 && a <= b && b.is_finite()) {
                return Err(GeomError::InvalidParameter(format!("bad annulus [{a}, {b}]")));
            }
        }
        Ok(())
    }
}

/// The three-dimensional sampling box `(x, y, z)` with `ζ` in an annulus.
pub fn chart_region(zeta: (f64, f64), z: (f64, f64)) -> Region<3> {
    Region::boxed([(-zeta.1, zeta.1), (-zeta.1, zeta.1), z]).with_annulus(zeta.0, zeta.1)
}

#[derive(Clone, Debug)]
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        if lo == hi {
            lo
        } else {
            self.rng.random_range(lo..hi)
        }
    }

    /// Uniform point of the closed unit disc.
    pub fn unit_disc(&mut self) -> Complex64 {
        let r = self.rng.random::<f64>().sqrt();
        let t = self.uniform(0.0, std::f64::consts::TAU);
        Complex64::from_polar(r, t)
    }

    pub fn draw<const N: usize>(&mut self, region: &Region<N>) -> [f64; N] {
        let mut p: [f64; N] = std::array::from_fn(|i| {
            let (lo, hi) = region.ranges[i];
            self.uniform(lo, hi)
        });
        if let Some((a, b)) = region.annulus {
            // uniform in area
            let r = self.uniform(a * a, b * b).sqrt();
            let t = self.uniform(0.0, std::f64::consts::TAU);
            p[0] = r * t.cos();
            p[1] = r * t.sin();
        }
        p
    }

    /// Draws until `accept` succeeds, at most [`MAX_ATTEMPTS`] times.
    pub fn admissible<const N: usize>(
        &mut self,
        region: &Region<N>,
        accept: &dyn Fn(&[f64; N]) -> Result<()>,
    ) -> Result<[f64; N]> {
        let mut last = None;
        for _ in 0..MAX_ATTEMPTS {
            let p = self.draw(region);
            match accept(&p) {
                Ok(()) => return Ok(p),
                Err(e) => last = Some(e),
            }
        }
        Err(GeomError::Coverage(format!(
            "no admissible point after {MAX_ATTEMPTS} attempts (last rejection: {})",
            last.map_or_else(|| "none".into(), |e| e.to_string())
        )))
    }

    pub fn admissible_points<const N: usize>(
        &mut self,
        n: usize,
        region: &Region<N>,
        accept: &dyn Fn(&[f64; N]) -> Result<()>,
    ) -> Result<Vec<[f64; N]>> {
        region.validate()?;
        (0..n).map(|_| self.admissible(region, accept)).collect()
    }

    /// `shift + Σ c_k ζ^k` for `k ≤ degree` with each `c_k` in the unit disc.
    pub fn polynomial(&mut self, degree: usize, shift: f64) -> HoloFn {
        let mut c: Vec<Complex64> = (0..=degree).map(|_| self.unit_disc()).collect();
        c[0] += shift;
        HoloFn::polynomial(c)
    }

    /// A polynomial `h` with `Re h ≥ 0.5` on `|ζ| ≤ 0.5`.
    pub fn toda_h(&mut self) -> HoloFn {
        let d = self.rng.random_range(1..=3);
        self.polynomial(d, 2.5)
    }
}

/// Maps `f` over `items`, keeping their order.
#[cfg(feature = "parallel")]
pub fn map_points<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

/// Maps `f` over `items`, keeping their order.
#[cfg(not(feature = "parallel"))]
pub fn map_points<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    map_points_sequential(items, f)
}

pub fn map_points_sequential<T, R, F>(items: &[T], f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}
