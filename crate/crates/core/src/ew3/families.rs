use std::sync::Arc;

use num_complex::Complex64;

use super::{DomainFn3, MetricFn3, OneFormFn3, ScalarFn3, VectorFn3, WeylStructure3};
use crate::conventions::BERGER_TWIST_SIGN;
use crate::holo::{beta_potential, sphere_conformal_factor, zeta, HoloFn};
use crate::jet::{seed_point, CJet, Jet, Jet1, Jet3};
use crate::{GeomError, Point3, Result, DELTA_POS, EPS_CHART};

/// LeBrun-Ward gauge `g = e^u(dx²+dy²) + dz²`, `ω = −u_z dz`.
pub fn toda_lw(u: ScalarFn3) -> WeylStructure3 {
    let um = u.clone();
    let metric: MetricFn3 = Arc::new(move |p: &Point3| {
        let e = um(p)?.exp();
        let one = Jet::constant(1.0);
        let z = Jet::zero();
        Ok([[e, z, z], [z, e, z], [z, z, one]])
    });
    let omega: OneFormFn3 = Arc::new(move |p: &Point3| {
        let uz = u(p)?.partial(2);
        Ok([Jet1::default(), Jet1::default(), -uz])
    });
    let domain: DomainFn3 = Arc::new(|_| Ok(()));
    WeylStructure3::new("lebrun-ward", ["x", "y", "z"], metric, omega, domain)
}

/// `u_xx + u_yy + (e^u)_zz`, with `(e^u)_zz` read off the jet of `e^u`.
pub fn toda_residual(u: &dyn Fn(&Point3) -> Result<Jet3>, p: &Point3) -> Result<f64> {
    let uj = u(p)?;
    let e = uj.exp();
    Ok(uj.hess[0][0] + uj.hess[1][1] + e.hess[2][2])
}

/// `f_xx + f_yy + 2a e^f` for `e^f = 4|F'|²/(1+a|F|²)²`.
pub fn liouville_residual(big_f: &HoloFn, a: f64, p: &Point3) -> Result<f64> {
    let ef = liouville_density(big_f, &big_f.derivative(), a, p)?;
    let f = ef.try_ln().map_err(|_| GeomError::Domain {
        what: "critical point of F",
        value: ef.value,
    })?;
    Ok(f.hess[0][0] + f.hess[1][1] + 2.0 * a * ef.value)
}

fn liouville_density(
    big_f: &HoloFn,
    big_f_prime: &HoloFn,
    a: f64,
    p: &Point3,
) -> Result<Jet3> {
    let z = zeta(p);
    let fv = big_f.eval_jet(&z)?;
    let fp = big_f_prime.eval_jet(&z)?;
    let den = (fv.norm_sqr() * a + 1.0).powi(2);
    (fp.norm_sqr() * 4.0).try_div(&den)
}

/// The hyperCR Toda family of a holomorphic `h`, optionally in the general
/// `(a, F)` form of its Toda potential.
#[derive(Clone, Debug)]
pub struct TodaFamily {
    pub h: HoloFn,
    pub a: f64,
    pub big_f: HoloFn,
    big_f_prime: HoloFn,
}

pub fn hypercr_toda_family(h: HoloFn, a: f64, big_f: HoloFn) -> Result<TodaFamily> {
    if !(a > 0.0) {
        return Err(GeomError::InvalidParameter(format!(
            "a must be positive for the Toda family, got {a}"
        )));
    }
    let big_f_prime = big_f.derivative();
    if big_f_prime
        .numerator()
        .iter()
        .all(|c| *c == Complex64::new(0.0, 0.0))
    {
        return Err(GeomError::InvalidParameter("F must be nonconstant".into()));
    }
    Ok(TodaFamily {
        h,
        a,
        big_f,
        big_f_prime,
    })
}

impl TodaFamily {
    /// Normalised chart: `a = 1`, `F = ζ`.
    pub fn normalized(h: HoloFn) -> Self {
        hypercr_toda_family(h, 1.0, HoloFn::identity()).expect("normalised parameters are valid")
    }

    /// `z + h(ζ)` as a complex jet.
    pub fn z_plus_h(&self, p: &Point3) -> Result<CJet<3>> {
        let z = seed_point(p)[2];
        Ok(self.h.eval(p)? + z)
    }

    /// `(z+h)(z+h̄) > δ` on the sheet `Re(z+h) > δ`.
    pub fn admissible(&self, p: &Point3) -> Result<()> {
        let zh = self.z_plus_h(p)?;
        let q = zh.norm_sqr().value;
        if !(q > DELTA_POS) {
            return Err(GeomError::Inadmissible(format!(
                "(z+h)(z+h̄) = {q:e} is not positive"
            )));
        }
        if !(zh.re.value > DELTA_POS) {
            return Err(GeomError::Inadmissible(format!(
                "Re(z+h) = {:e} is not positive",
                zh.re.value
            )));
        }
        Ok(())
    }

    /// `g = (z+h)(z+h̄) g_{S²} + dz²`.
    pub fn metric(&self, p: &Point3) -> Result<[[Jet3; 3]; 3]> {
        let q = self.z_plus_h(p)?.norm_sqr();
        let gxx = q * sphere_conformal_factor(p);
        let z = Jet::zero();
        Ok([[gxx, z, z], [z, gxx, z], [z, z, Jet::constant(1.0)]])
    }

    /// `ω = −(2z+h+h̄)/((z+h)(z+h̄)) dz`.
    pub fn omega(&self, p: &Point3) -> Result<[Jet3; 3]> {
        let zh = self.z_plus_h(p)?;
        let wz = -(zh.re * 2.0).try_div(&zh.norm_sqr())?;
        Ok([Jet::zero(), Jet::zero(), wz])
    }

    pub fn weyl_structure(&self) -> WeylStructure3 {
        let fam = Arc::new(self.clone());
        let (f1, f2, f3) = (fam.clone(), fam.clone(), fam);
        let metric: MetricFn3 = Arc::new(move |p: &Point3| f1.metric(p));
        let omega: OneFormFn3 = Arc::new(move |p: &Point3| {
            let om = f2.omega(p)?;
            Ok(std::array::from_fn(|i| om[i].truncate()))
        });
        let domain: DomainFn3 = Arc::new(move |p: &Point3| f3.admissible(p));
        WeylStructure3::new(
            format!("hypercr-toda h={}", self.h),
            ["x", "y", "z"],
            metric,
            omega,
            domain,
        )
    }

    /// Toda potential in the normalised chart: `e^u = 4(z+h)(z+h̄)/(1+ζζ̄)²`.
    pub fn u(&self, p: &Point3) -> Result<Jet3> {
        self.admissible(p)?;
        let q = self.z_plus_h(p)?.norm_sqr();
        (q * sphere_conformal_factor(p)).try_ln()
    }

    /// General solution `e^u = 4a(z+h)(z+h̄)|F'|²/(1+a|F|²)²`.
    pub fn general_u(&self, p: &Point3) -> Result<Jet3> {
        self.admissible(p)?;
        let q = self.z_plus_h(p)?.norm_sqr();
        let ef = liouville_density(&self.big_f, &self.big_f_prime, self.a, p)?;
        (q * ef * self.a).try_ln()
    }

    pub fn u_fn(&self) -> ScalarFn3 {
        let fam = self.clone();
        Arc::new(move |p: &Point3| fam.u(p))
    }

    pub fn general_u_fn(&self) -> ScalarFn3 {
        let fam = self.clone();
        Arc::new(move |p: &Point3| fam.general_u(p))
    }

    /// LeBrun-Ward presentation of the same structure, built from `u`.
    pub fn lebrun_ward(&self) -> WeylStructure3 {
        toda_lw(self.u_fn())
    }

    /// The closed form `i(h−h̄)/(2(z+h)(z+h̄))`.
    pub fn kappa_closed_form(&self, p: &Point3) -> Result<Jet3> {
        let zh = self.z_plus_h(p)?;
        let h = self.h.eval(p)?;
        let num = (h - h.conj()).mul_i();
        num.re.try_div(&(zh.norm_sqr() * 2.0))
    }

    /// The hyperCR section `κ` for the `dx∧dy∧dz` orientation.
    ///
    /// This is the negative of [`TodaFamily::kappa_closed_form`], whose sign
    /// belongs to the opposite orientation; it coincides with the monopole
    /// obtained from `f = i`.
    pub fn kappa(&self, p: &Point3) -> Result<Jet3> {
        Ok(-self.kappa_closed_form(p)?)
    }

    pub fn kappa_fn(&self) -> ScalarFn3 {
        let fam = self.clone();
        Arc::new(move |p: &Point3| fam.kappa(p))
    }

    /// Unit field `∂_z` of the Toda congruence.
    pub fn chi(&self) -> VectorFn3 {
        Arc::new(|_: &Point3| Ok([Jet::zero(), Jet::zero(), Jet::constant(1.0)]))
    }
}

/// Einstein-Weyl spaces with geodesic symmetry, in coordinates `(x, y, t)`.
#[derive(Clone, Debug)]
pub struct GeodesicSymmetry {
    pub big_h: HoloFn,
    /// `f = 1/H`, the potential function of `β`.
    pub f: HoloFn,
}

pub fn geodesic_symmetry_family(big_h: HoloFn) -> Result<GeodesicSymmetry> {
    let f = big_h.recip()?;
    Ok(GeodesicSymmetry { big_h, f })
}

impl GeodesicSymmetry {
    pub fn admissible(&self, p: &Point3) -> Result<()> {
        let r = p[0].hypot(p[1]);
        if !(r > EPS_CHART) {
            return Err(GeomError::Inadmissible(format!(
                "|ζ| = {r:e} inside the excluded chart disc"
            )));
        }
        let hv = self.big_h.eval_value(Complex64::new(p[0], p[1]))?;
        if !(hv.norm() > DELTA_POS) {
            return Err(GeomError::Inadmissible(format!("H vanishes: |H| = {:e}", hv.norm())));
        }
        Ok(())
    }

    fn h_jet(&self, p: &Point3) -> Result<CJet<3>> {
        self.big_h.eval(p)
    }

    /// `g = |H|⁻² g_{S²} + β²`.
    pub fn metric(&self, p: &Point3) -> Result<[[Jet3; 3]; 3]> {
        let hh = self.h_jet(p)?.norm_sqr();
        let s = sphere_conformal_factor(p).try_div(&hh)?;
        let b = beta_potential(&self.f, p)?;
        let beta = [b.dx, b.dy, b.dt];
        Ok(std::array::from_fn(|i| {
            std::array::from_fn(|j| {
                let base = if i == j && i < 2 { s } else { Jet::zero() };
                base + beta[i] * beta[j]
            })
        }))
    }

    /// `ω = (i/2)(H−H̄) β = −Im(H) β`.
    pub fn omega(&self, p: &Point3) -> Result<[Jet3; 3]> {
        let im = self.h_jet(p)?.im;
        let b = beta_potential(&self.f, p)?;
        Ok([-(im * b.dx), -(im * b.dy), -(im * b.dt)])
    }

    pub fn beta(&self, p: &Point3) -> Result<[Jet3; 3]> {
        let b = beta_potential(&self.f, p)?;
        Ok([b.dx, b.dy, b.dt])
    }

    /// Divergence of `K/|K|` predicted in the gauge `g`: `(i/2)(H−H̄)`.
    pub fn tau_expected(&self, p: &Point3) -> Result<f64> {
        Ok(-self.h_jet(p)?.im.value)
    }

    /// Twist of `K/|K|` predicted in the gauge `g`: `¼(H+H̄)`.
    pub fn kappa(&self, p: &Point3) -> Result<Jet3> {
        Ok(self.h_jet(p)?.re * 0.5)
    }

    pub fn kappa_fn(&self) -> ScalarFn3 {
        let fam = self.clone();
        Arc::new(move |p: &Point3| fam.kappa(p))
    }

    /// `K/|K|` with `K = ∂_t` dual to `β`.
    pub fn chi(&self) -> VectorFn3 {
        Arc::new(|_: &Point3| Ok([Jet::zero(), Jet::zero(), Jet::constant(1.0)]))
    }

    pub fn weyl_structure(&self) -> WeylStructure3 {
        let fam = Arc::new(self.clone());
        let (f1, f2, f3) = (fam.clone(), fam.clone(), fam);
        let metric: MetricFn3 = Arc::new(move |p: &Point3| f1.metric(p));
        let omega: OneFormFn3 = Arc::new(move |p: &Point3| {
            let om = f2.omega(p)?;
            Ok(std::array::from_fn(|i| om[i].truncate()))
        });
        let domain: DomainFn3 = Arc::new(move |p: &Point3| f3.admissible(p));
        WeylStructure3::new(
            format!("geodesic-symmetry H={}", self.big_h),
            ["x", "y", "t"],
            metric,
            omega,
            domain,
        )
    }
}

/// Unit round `S³` in stereographic coordinates, `4|dx|²/(1+|x|²)²`, with `ω = 0`.
pub fn round_sphere3() -> WeylStructure3 {
    let metric: MetricFn3 = Arc::new(|p: &Point3| {
        let v = seed_point(p);
        let r2: Jet3 = v.iter().map(|c| c.square()).sum();
        let s = (1.0 + r2).powi(-2) * 4.0;
        Ok(std::array::from_fn(|i| {
            std::array::from_fn(|j| if i == j { s } else { Jet::zero() })
        }))
    });
    let omega: OneFormFn3 = Arc::new(|_: &Point3| Ok([Jet1::default(); 3]));
    let domain: DomainFn3 = Arc::new(|_: &Point3| Ok(()));
    WeylStructure3::new("round S3", ["x1", "x2", "x3"], metric, omega, domain)
}

/// `b` paired with `a` on the Berger sphere, `b² = a²(1−a²)`.
pub fn berger_twist(a: f64) -> f64 {
    BERGER_TWIST_SIGN * a * (1.0 - a * a).max(0.0).sqrt()
}

/// Berger sphere `dθ² + sin²θ dφ² + a²(dψ + cosθ dφ)²` with `ω = b(dψ + cosθ dφ)`,
/// in coordinates `(θ, φ, ψ)`.
pub fn berger_sphere(a: f64) -> Result<WeylStructure3> {
    if !(a > 0.0 && a <= 1.0) {
        return Err(GeomError::InvalidParameter(format!(
            "Berger parameter a must lie in (0, 1], got {a}"
        )));
    }
    let b = berger_twist(a);
    let a2 = a * a;
    let metric: MetricFn3 = Arc::new(move |p: &Point3| {
        let [th, _, _] = seed_point(p);
        let (s, c) = (th.sin(), th.cos());
        let one = Jet::constant(1.0);
        let zero = Jet::zero();
        let gpp = s * s + c * c * a2;
        let gps = c * a2;
        Ok([
            [one, zero, zero],
            [zero, gpp, gps],
            [zero, gps, Jet::constant(a2)],
        ])
    });
    let omega: OneFormFn3 = Arc::new(move |p: &Point3| {
        let th = seed_point(p)[0];
        Ok([
            Jet1::default(),
            th.cos().truncate().scale(b),
            Jet1::constant(b),
        ])
    });
    let domain: DomainFn3 = Arc::new(|p: &Point3| {
        if p[0].sin() > 1e-3 && p[0] > 0.0 && p[0] < std::f64::consts::PI {
            Ok(())
        } else {
            Err(GeomError::Inadmissible(format!(
                "θ = {} too close to a pole of the Euler chart",
                p[0]
            )))
        }
    });
    Ok(WeylStructure3::new(
        format!("berger a={a}"),
        ["theta", "phi", "psi"],
        metric,
        omega,
        domain,
    ))
}
