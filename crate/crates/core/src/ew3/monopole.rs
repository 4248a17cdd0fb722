use super::{weyl_connection, TodaFamily};
use crate::conventions::MONOPOLE_THETA_SIGN;
use crate::holo::{beta_potential, HoloFn};
use crate::jet::Jet3;
use crate::{GeomError, Point3, Result, DELTA_POS};

/// A monopole on the hyperCR Toda space, with the 1-form `θ` of
/// `dt + θ = β − v dz`.
#[derive(Clone, Copy, Debug)]
pub struct MonopoleData {
    pub w: Jet3,
    pub v: Jet3,
    /// `θ` on `(dx, dy, dz)`.
    pub theta: [Jet3; 3],
}

/// `w = Re(f/(z+h))` and `v = −Im(f/(z+h))`, without a sign requirement on `w`.
pub(crate) fn strachan_fields(fam: &TodaFamily, f: &HoloFn, p: &Point3) -> Result<(Jet3, Jet3)> {
    fam.admissible(p)?;
    let q = f.eval(p)?.try_div(&fam.z_plus_h(p)?)?;
    Ok((q.re, -q.im))
}

/// `w = f/(2(z+h)) + f̄/(2(z+h̄))` with `v` and `θ = β − v dz − dt`.
pub fn strachan_monopole(fam: &TodaFamily, f: &HoloFn, p: &Point3) -> Result<MonopoleData> {
    let (w, v) = strachan_fields(fam, f, p)?;
    if !(w.value > DELTA_POS) {
        return Err(GeomError::Inadmissible(format!(
            "monopole w = {:e} is not positive",
            w.value
        )));
    }
    let b = beta_potential(f, p)?;
    Ok(MonopoleData {
        w,
        v,
        theta: [b.dx, b.dy, v * MONOPOLE_THETA_SIGN],
    })
}

/// `w_xx + w_yy + (e^u w)_zz`.
pub fn monopole_residual(
    u: &dyn Fn(&Point3) -> Result<Jet3>,
    w: &dyn Fn(&Point3) -> Result<Jet3>,
    p: &Point3,
) -> Result<f64> {
    let wj = w(p)?;
    let ew = u(p)?.exp() * wj;
    Ok(wj.hess[0][0] + wj.hess[1][1] + ew.hess[2][2])
}

/// Gauge norm of `*(dw − ωw) − dθ` on the Toda family.
pub fn theta_consistency(fam: &TodaFamily, m: &MonopoleData, p: &Point3) -> Result<f64> {
    let wc = weyl_connection(&fam.weyl_structure(), p)?;
    let dw: [f64; 3] = std::array::from_fn(|i| m.w.grad[i] - wc.omega[i].value * m.w.value);
    let lhs = wc.star_1form(&dw);
    let mut defect = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let dtheta = m.theta[j].grad[i] - m.theta[i].grad[j];
            defect[i][j] = lhs[i][j] - dtheta;
        }
    }
    // 2-form norm: ½ F_ij F^ij
    Ok((0.5 * crate::connection::norm2_2tensor(&wc.ginv, &defect)).max(0.0).sqrt())
}

/// `|w(f = ah+b) − (a(1 − ½ z u_z) + ½ b u_z)|` in the normalised chart.
pub fn special_monopole_identity(h: &HoloFn, a: f64, b: f64, p: &Point3) -> Result<f64> {
    let fam = TodaFamily::normalized(h.clone());
    let (w, _) = strachan_fields(&fam, &h.affine(a, b), p)?;
    let uz = fam.u(p)?.grad[2];
    let z = p[2];
    let rhs = a * (1.0 - 0.5 * z * uz) + 0.5 * b * uz;
    Ok((w.value - rhs).abs())
}
