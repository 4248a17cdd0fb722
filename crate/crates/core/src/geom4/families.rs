use std::sync::Arc;

use super::{DomainFn4, Metric4, MetricFn4, ScalarFn4};
use crate::connection::SymJet;
use crate::conventions::MONOPOLE_THETA_SIGN;
use crate::holo::{beta_potential, sphere_conformal_factor, HoloFn};
use crate::jet::{seed_point, Jet, Jet4};
use crate::{GeomError, Point4, Result, DELTA_POS, EPS_CHART};

/// Pointwise data of the LeBrun metric in the chart `(x, y, z, t)`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct SfkParts {
    pub w: Jet4,
    /// `(z+h)(z+h̄)`.
    pub q: Jet4,
    /// Conformal factor of `g_{S²}`.
    pub s: Jet4,
    /// `dt + θ` on `(dx, dy, dz, dt)`.
    pub theta: [Jet4; 4],
}

fn chart_check(p: &Point4) -> Result<()> {
    let r = p[0].hypot(p[1]);
    if !(r > EPS_CHART) {
        return Err(GeomError::Inadmissible(format!(
            "|ζ| = {r:e} inside the excluded chart disc"
        )));
    }
    Ok(())
}

pub(crate) fn sfk_parts(h: &HoloFn, f: &HoloFn, p: &Point4) -> Result<SfkParts> {
    chart_check(p)?;
    let z = seed_point(p)[2];
    let zh = h.eval(p)? + z;
    let q = zh.norm_sqr();
    if !(q.value > DELTA_POS) {
        return Err(GeomError::Inadmissible(format!(
            "(z+h)(z+h̄) = {:e} is not positive",
            q.value
        )));
    }
    let ratio = f.eval(p)?.try_div(&zh)?;
    let (w, v) = (ratio.re, -ratio.im);
    if !(w.value > DELTA_POS) {
        return Err(GeomError::Inadmissible(format!(
            "monopole w = {:e} is not positive",
            w.value
        )));
    }
    let b = beta_potential(f, p)?;
    Ok(SfkParts {
        w,
        q,
        s: sphere_conformal_factor(p),
        theta: [b.dx, b.dy, v * MONOPOLE_THETA_SIGN, b.dt],
    })
}

/// `A (dx² + dy²) + B dz² + C θ⊗θ`.
fn lebrun_form(a: Jet4, b: Jet4, c: Jet4, theta: &[Jet4; 4]) -> SymJet<4> {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let base = match (i, j) {
                (0, 0) | (1, 1) => a,
                (2, 2) => b,
                _ => Jet::zero(),
            };
            base + c * theta[i] * theta[j]
        })
    })
}

/// `g_M = w(z+h)(z+h̄) g_{S²} + w dz² + w⁻¹(dt+θ)²` in `(x, y, z, t)`, with
/// `w = Re(f/(z+h))`, `v = −Im(f/(z+h))` and `dt + θ = β − v dz`.
pub fn sfk_metric(h: HoloFn, f: HoloFn) -> Metric4 {
    let name = format!("sfk h={h} f={f}");
    let (h1, f1) = (h.clone(), f.clone());
    let metric: MetricFn4 = Arc::new(move |p: &Point4| {
        let s = sfk_parts(&h1, &f1, p)?;
        Ok(lebrun_form(s.w * s.q * s.s, s.w, s.w.try_recip()?, &s.theta))
    });
    let domain: DomainFn4 = Arc::new(move |p: &Point4| sfk_parts(&h, &f, p).map(|_| ()));
    Metric4::new(name, ["x", "y", "z", "t"], Some(3), metric, domain)
}

/// `P = ½(h+h̄)z + hh̄` and the parts of the `f = h` metric.
fn einstein_parts(h: &HoloFn, p: &Point4) -> Result<(Jet4, SfkParts)> {
    if !(p[2] > DELTA_POS) {
        return Err(GeomError::Inadmissible(format!("z = {:e} is not positive", p[2])));
    }
    chart_check(p)?;
    let z = seed_point(p)[2];
    let hj = h.eval(p)?;
    let big_p = hj.re * z + hj.norm_sqr();
    if !(big_p.value > DELTA_POS) {
        return Err(GeomError::Inadmissible(format!(
            "½(h+h̄)z + hh̄ = {:e} is not positive",
            big_p.value
        )));
    }
    Ok((big_p, sfk_parts(h, h, p)?))
}

/// The selfdual Einstein metric
/// `z⁻²[P/Q dz² + P g_{S²} + Q/P (dt+θ)²]` with `P = ½(h+h̄)z + hh̄`,
/// `Q = (z+h)(z+h̄)` and `dt + θ = β − v dz` for the monopole `f = h`.
pub fn einstein_metric(h: HoloFn) -> Metric4 {
    let name = format!("einstein h={h}");
    let h1 = h.clone();
    let metric: MetricFn4 = Arc::new(move |p: &Point4| {
        let (big_p, s) = einstein_parts(&h1, p)?;
        let z2 = seed_point(p)[2].square();
        let a = (big_p * s.s).try_div(&z2)?;
        let b = big_p.try_div(&(s.q * z2))?;
        let c = s.q.try_div(&(big_p * z2))?;
        Ok(lebrun_form(a, b, c, &s.theta))
    });
    let domain: DomainFn4 = Arc::new(move |p: &Point4| einstein_parts(&h, p).map(|_| ()));
    Metric4::new(name, ["x", "y", "z", "t"], Some(3), metric, domain)
}

/// The scalar-flat Kähler metric of the monopole `a(1 − ½zu_z)`, i.e. `f = ah`,
/// rescaled by `1/(az)²`.
pub fn einstein_metric_scaled(h: HoloFn, a: f64) -> Result<Metric4> {
    if !(a > 0.0) {
        return Err(GeomError::InvalidParameter(format!(
            "Einstein scale a must be positive, got {a}"
        )));
    }
    let f = h.affine(a, 0.0);
    let factor: ScalarFn4 = Arc::new(move |p: &Point4| {
        let z = seed_point::<4>(p)[2] * a;
        z.square().try_recip()
    });
    let mut m = super::conformal_rescale(&sfk_metric(h.clone(), f), factor);
    m.name = format!("einstein h={h} a={a}");
    Ok(m)
}

fn pedersen_check(m: f64, p: &Point4) -> Result<()> {
    let rho = p[0];
    if !(rho > DELTA_POS && rho < 1.0 - DELTA_POS) {
        return Err(GeomError::Inadmissible(format!("ρ = {rho} outside (0, 1)")));
    }
    if !(p[1].sin() > EPS_CHART) {
        return Err(GeomError::Inadmissible(format!(
            "θ = {} too close to a pole",
            p[1]
        )));
    }
    if !m.is_finite() {
        return Err(GeomError::InvalidParameter(format!("m = {m} is not finite")));
    }
    Ok(())
}

/// Pedersen metric
/// `(1−ρ²)⁻²[(1+m²ρ²)/(1+m²ρ⁴) dρ² + ¼ρ²((1+m²ρ²)(σ₁²+σ₂²) + (1+m²ρ⁴)/(1+m²ρ²) σ₃²)]`
/// in `(ρ, θ, φ, ψ)`, with `σ₁²+σ₂² = dθ² + sin²θ dφ²` and `σ₃ = dψ + cosθ dφ`.
pub fn pedersen_metric(m: f64) -> Metric4 {
    let m2 = m * m;
    let metric: MetricFn4 = Arc::new(move |p: &Point4| {
        pedersen_check(m, p)?;
        let [rho, th, _, _] = seed_point(p);
        let r2 = rho.square();
        let a = 1.0 + r2 * m2;
        let b = 1.0 + r2.square() * m2;
        let pre = (1.0 - r2).square().try_recip()?;
        let grr = pre * a.try_div(&b)?;
        let base = pre * r2 * 0.25;
        let s12 = base * a;
        let s3 = base * b.try_div(&a)?;
        let (sn, cs) = (th.sin(), th.cos());
        let zero = Jet::zero();
        let gpp = s12 * sn.square() + s3 * cs.square();
        let gps = s3 * cs;
        Ok([
            [grr, zero, zero, zero],
            [zero, s12, zero, zero],
            [zero, zero, gpp, gps],
            [zero, zero, gps, s3],
        ])
    });
    let domain: DomainFn4 = Arc::new(move |p: &Point4| pedersen_check(m, p));
    Metric4::new(format!("pedersen m={m}"), ["ρ", "θ", "φ", "ψ"], Some(3), metric, domain)
}

/// Unit round `S⁴` in stereographic coordinates, `4|dx|²/(1+|x|²)²`.
pub fn round_sphere4() -> Metric4 {
    let metric: MetricFn4 = Arc::new(|p: &Point4| {
        let v = seed_point(p);
        let r2: Jet4 = v.iter().map(|c| c.square()).sum();
        let s = (1.0 + r2).powi(-2) * 4.0;
        Ok(std::array::from_fn(|i| {
            std::array::from_fn(|j| if i == j { s } else { Jet::zero() })
        }))
    });
    let domain: DomainFn4 = Arc::new(|_: &Point4| Ok(()));
    Metric4::new("round S4", ["x1", "x2", "x3", "x4"], None, metric, domain)
}

/// Euclidean `ℝ⁴`.
pub fn flat_metric() -> Metric4 {
    let metric: MetricFn4 = Arc::new(|_: &Point4| {
        Ok(std::array::from_fn(|i| {
            std::array::from_fn(|j| Jet::constant(if i == j { 1.0 } else { 0.0 }))
        }))
    });
    let domain: DomainFn4 = Arc::new(|_: &Point4| Ok(()));
    Metric4::new("flat R4", ["x1", "x2", "x3", "x4"], Some(3), metric, domain)
}
