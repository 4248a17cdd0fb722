use num_complex::Complex64;
use serde::Serialize;

use super::families::sfk_parts;
use super::{curvature, einstein_metric, pedersen_metric, sfk_metric};
use crate::connection::{self, Mat};
use crate::ew3::geodesic_symmetry_family;
use crate::holo::HoloFn;
use crate::jet::Jet4;
use crate::{GeomError, Point3, Result};

/// Largest component of `dΩ` for `Ω = A dx∧dy + dz∧θ`, on a `t`-independent chart.
pub fn kahler_form_defect(a: &Jet4, theta: &[Jet4; 4]) -> f64 {
    // Ω_xy = A, Ω_zj = θ_j, Ω_jz = −θ_j.
    let mut om = [[Jet4::zero(); 4]; 4];
    om[0][1] = *a;
    om[1][0] = -*a;
    for j in [0, 1, 3] {
        om[2][j] = theta[j];
        om[j][2] = -theta[j];
    }
    let mut worst = 0.0_f64;
    for i in 0..4 {
        for j in i + 1..4 {
            for k in j + 1..4 {
                let d = om[j][k].grad[i] + om[k][i].grad[j] + om[i][j].grad[k];
                worst = worst.max(d.abs());
            }
        }
    }
    worst
}

/// Closedness of `Ω = w e^u dx∧dy + dz∧(dt+θ)` on the LeBrun metric of `(h, f)`
/// at `p = (x, y, z)`.
pub fn kahler_form_closedness(h: &HoloFn, f: &HoloFn, p: &Point3) -> Result<f64> {
    let s = sfk_parts(h, f, &[p[0], p[1], p[2], 0.0])?;
    Ok(kahler_form_defect(&(s.w * s.q * s.s), &s.theta))
}

/// The quotient of `g_M − ξ⊗ξ` by `∂_z`, on `(x, y, t)`, scaled so that its
/// `tt` component is one.
pub fn quotient_representative(h: &HoloFn, f: &HoloFn, p: &Point3) -> Result<Mat<3>> {
    let g = connection::values(&sfk_metric(h.clone(), f.clone()).components(&[
        p[0], p[1], p[2], 0.0,
    ])?);
    let gzz = g[2][2];
    let keep = [0, 1, 3];
    let q: Mat<3> = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let (a, b) = (keep[i], keep[j]);
            g[a][b] - g[2][a] * g[2][b] / gzz
        })
    });
    let tt = q[2][2];
    Ok(std::array::from_fn(|i| std::array::from_fn(|j| q[i][j] / tt)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QuotientCheck {
    pub max_z_variation: f64,
    pub match_residual: f64,
}

/// Spread of the quotient representative over `z_samples` at `(x, y)`, and its
/// distance from the geodesic-symmetry metric with `H = 1/f`.
pub fn quotient_check(
    h: &HoloFn,
    f: &HoloFn,
    xy: [f64; 2],
    z_samples: &[f64],
) -> Result<QuotientCheck> {
    if z_samples.is_empty() {
        return Err(GeomError::InvalidParameter("no z samples".into()));
    }
    let fv = f.eval_value(Complex64::new(xy[0], xy[1]))?;
    if fv.norm() <= crate::DELTA_POS {
        return Err(GeomError::Domain {
            what: "f vanishes, so H = 1/f has a pole",
            value: fv.norm(),
        });
    }
    let target = geodesic_symmetry_family(f.recip()?)?;
    let tg = connection::values(&target.metric(&[xy[0], xy[1], 0.0])?);
    let reps = z_samples
        .iter()
        .map(|&z| quotient_representative(h, f, &[xy[0], xy[1], z]))
        .collect::<Result<Vec<_>>>()?;
    let mut spread = 0.0_f64;
    let mut matched = 0.0_f64;
    for i in 0..3 {
        for j in 0..3 {
            let (lo, hi) = reps.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| {
                (lo.min(r[i][j]), hi.max(r[i][j]))
            });
            spread = spread.max(hi - lo);
            for r in &reps {
                matched = matched.max((r[i][j] - tg[i][j]).abs());
            }
        }
    }
    Ok(QuotientCheck {
        max_z_variation: spread,
        match_residual: matched,
    })
}

const OURS_ANGLES: [f64; 2] = [0.6, 0.3];
const PEDERSEN_THETA: f64 = 1.1;

fn ours_at(m: f64, z: f64) -> Result<super::Curvature4> {
    let h = HoloFn::constant(Complex64::new(1.0, m));
    curvature(&einstein_metric(h), &[OURS_ANGLES[0], OURS_ANGLES[1], z, 0.0])
}

fn pedersen_at(m: f64, z: f64) -> Result<super::Curvature4> {
    let rho = (1.0 + z).powf(-0.5);
    curvature(&pedersen_metric(m), &[rho, PEDERSEN_THETA, 0.0, 0.0])
}

/// `|W|²` of `einstein_metric(1+im)` at height `z` and of `pedersen_metric(m)`
/// at `ρ = (1+z)^{-1/2}`, the latter rescaled by the homothety that matches the
/// scalar curvatures at `z = 1`.
pub fn pedersen_correspondence(m: f64, z: f64) -> Result<(f64, f64)> {
    if !(z > 0.0 && z.is_finite()) {
        return Err(GeomError::Domain {
            what: "correspondence height must be positive",
            value: z,
        });
    }
    let lambda = ours_at(m, 1.0)?.scal / pedersen_at(m, 1.0)?.scal;
    let ours = ours_at(m, z)?;
    let ped = pedersen_at(m, z)?;
    Ok((ours.weyl_norm2, lambda * lambda * ped.weyl_norm2))
}
