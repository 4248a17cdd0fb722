use std::sync::Arc;

use num_complex::Complex64;

use super::*;
use crate::conventions::{FLAT_CONNECTION_SIGN, HYPERCR_SCAL_CONSTANT};
use crate::holo::HoloFn;
use crate::jet::{seed_point, Jet};

fn h0() -> HoloFn {
    "poly:2.5,0.3+0.2i,0.1-0.1i".parse().unwrap()
}

const P: Point3 = [0.2, -0.3, 1.1];

fn flat() -> WeylStructure3 {
    let metric: MetricFn3 = Arc::new(|_: &Point3| {
        Ok(std::array::from_fn(|i| {
            std::array::from_fn(|j| Jet::constant(f64::from(u8::from(i == j))))
        }))
    });
    let omega: OneFormFn3 = Arc::new(|_: &Point3| Ok([Jet1::default(); 3]));
    WeylStructure3::new("flat", ["x", "y", "z"], metric, omega, Arc::new(|_| Ok(())))
}

fn zero_kappa(_: &Point3) -> Result<Jet3> {
    Ok(Jet::zero())
}

#[test]
fn flat_space_is_trivial() {
    let w = flat();
    let wc = weyl_connection(&w, &P).unwrap();
    assert!(wc.gamma.iter().flatten().flatten().all(|c| c.value == 0.0));
    let r = ricci_weyl(&w, &P).unwrap();
    assert_eq!(r.tracefree_norm, 0.0);
    assert_eq!(r.scal, 0.0);
    assert_eq!(faraday(&w, &P).unwrap(), [[0.0; 3]; 3]);
    let chi = |_: &Point3| Ok([Jet::zero(), Jet::zero(), Jet::constant(1.0)]);
    let c = congruence_invariants(&w, &chi, &P).unwrap();
    assert_eq!((c.tau, c.kappa_twist, c.shear_norm), (0.0, 0.0, 0.0));
    assert_eq!(flat_connection_residual(&w, &zero_kappa, 1.0, &P).unwrap(), 0.0);
}

#[test]
fn non_unit_congruence_is_rejected() {
    let chi = |_: &Point3| Ok([Jet::zero(), Jet::zero(), Jet::constant(2.0)]);
    assert!(matches!(
        congruence_invariants(&flat(), &chi, &P),
        Err(GeomError::InvalidParameter(_))
    ));
}

#[test]
fn toda_family_connection_contract() {
    let w = TodaFamily::normalized(h0()).weyl_structure();
    let wc = weyl_connection(&w, &P).unwrap();
    assert!(wc.torsion() < 1e-12);
    let (worst, scale) = wc.metricity_defect();
    assert!(worst < 1e-11 * scale.max(1.0));
}

#[test]
fn toda_family_is_einstein_weyl_and_hypercr() {
    let fam = TodaFamily::normalized(h0());
    let w = fam.weyl_structure();
    let r = ricci_weyl(&w, &P).unwrap();
    assert!(r.tracefree_norm < 1e-10);
    let k = fam.kappa(&P).unwrap().value;
    assert!((6.0 * k * k / r.scal - HYPERCR_SCAL_CONSTANT).abs() < 1e-10);
    let (r1, r2) = hypercr_residual(&w, &*fam.kappa_fn(), &P).unwrap();
    assert!(r1 < 1e-10 && r2 < 1e-10);
    assert!(flat_connection_residual(&w, &*fam.kappa_fn(), FLAT_CONNECTION_SIGN, &P).unwrap() < 1e-9);
    assert!(flat_connection_residual(&w, &*fam.kappa_fn(), -FLAT_CONNECTION_SIGN, &P).unwrap() > 1e-4);
}

#[test]
fn closed_form_kappa_belongs_to_reversed_orientation() {
    let fam = TodaFamily::normalized(h0());
    let f2 = fam.clone();
    let closed = move |q: &Point3| f2.kappa_closed_form(q);
    let pos = fam.weyl_structure();
    let neg = fam.weyl_structure().with_orientation(Orientation::Negative);
    assert!(hypercr_residual(&pos, &closed, &P).unwrap().1 > 1e-4);
    assert!(hypercr_residual(&neg, &closed, &P).unwrap().1 < 1e-10);
}

#[test]
fn closed_form_kappa_by_hand() {
    let fam = TodaFamily::normalized(HoloFn::constant(Complex64::new(0.0, 1.0)));
    let k = fam.kappa_closed_form(&[0.3, 0.4, 1.0]).unwrap().value;
    assert!((k + 0.5).abs() < 1e-15);
}

#[test]
fn real_constant_h_is_flat_in_disguise() {
    let fam = TodaFamily::normalized(HoloFn::real(1.5));
    let w = fam.weyl_structure();
    assert_eq!(fam.kappa(&P).unwrap().value, 0.0);
    assert!(ricci_weyl(&w, &P).unwrap().scal.abs() < 1e-10);
    let om = fam.omega(&P).unwrap();
    assert!((om[2].value + 2.0 / (P[2] + 1.5)).abs() < 1e-15);
}

#[test]
fn toda_chart_metric_by_hand() {
    let fam = TodaFamily::normalized(HoloFn::identity());
    // ζ = 0 is allowed here: no β is involved.
    let g = fam.metric(&[0.0, 0.0, 1.0]).unwrap();
    assert_eq!(g[0][0].value, 4.0);
    assert_eq!(g[1][1].value, 4.0);
    assert_eq!(g[2][2].value, 1.0);
}

#[test]
fn toda_congruence_is_twist_and_shear_free() {
    let fam = TodaFamily::normalized(h0());
    let c = congruence_invariants(&fam.weyl_structure(), &*fam.chi(), &P).unwrap();
    assert!(c.kappa_twist.abs() < 1e-10);
    assert!(c.shear_norm < 1e-10);
    assert!(c.geodesic_residual < 1e-10);
}

#[test]
fn toda_and_lebrun_ward_presentations_agree() {
    let fam = TodaFamily::normalized(h0());
    let a = fam.weyl_structure();
    let b = fam.lebrun_ward();
    let (ga, gb) = (a.metric(&P).unwrap(), b.metric(&P).unwrap());
    let (oa, ob) = (a.omega(&P).unwrap(), b.omega(&P).unwrap());
    for i in 0..3 {
        assert!((oa[i].value - ob[i].value).abs() < 1e-14);
        for j in 0..3 {
            let s = 16.0 * f64::EPSILON * ga[i][j].value.abs().max(1.0);
            assert!((ga[i][j].value - gb[i][j].value).abs() <= s);
        }
    }
}

#[test]
fn faraday_of_toda_family() {
    let fam = TodaFamily::normalized(h0());
    let f = faraday(&fam.weyl_structure(), &P).unwrap();
    let u = fam.u(&P).unwrap();
    assert!((f[0][2] + u.hess[2][0]).abs() < 1e-12);
    assert!((f[1][2] + u.hess[2][1]).abs() < 1e-12);
    assert!(f[0][1].abs() < 1e-15);
}

#[test]
fn toda_and_liouville_residuals() {
    let u0: ScalarFn3 = Arc::new(|p: &Point3| {
        let [x, y, z] = seed_point(p);
        ((z * z) * 4.0 * (1.0 + x * x + y * y).powi(-2)).try_ln()
    });
    assert!(toda_residual(&*u0, &P).unwrap().abs() < 1e-11);
    let c = |_: &Point3| Ok(Jet::constant(0.7));
    assert_eq!(toda_residual(&c, &P).unwrap(), 0.0);
    let fam = TodaFamily::normalized("poly:0.5,0,1".parse().unwrap());
    assert!(toda_residual(&*fam.u_fn(), &P).unwrap().abs() < 1e-10);
    assert!(liouville_residual(&HoloFn::identity(), 1.0, &P).unwrap().abs() < 1e-11);
    let sq: HoloFn = "poly:0,0,1".parse().unwrap();
    assert!(liouville_residual(&sq, 0.5, &[1.0, 1.0, 0.0]).unwrap().abs() < 1e-10);
    assert_eq!(liouville_residual(&HoloFn::identity(), 0.0, &P).unwrap(), 0.0);
    assert!(liouville_residual(&sq, 1.0, &[0.0, 0.0, 0.0]).is_err());
}

#[test]
fn general_family_solves_toda() {
    let f: HoloFn = "poly:0,1,0,1".parse().unwrap();
    let fam = hypercr_toda_family(h0(), 1.7, f).unwrap();
    assert!(toda_residual(&*fam.general_u_fn(), &P).unwrap().abs() < 1e-9);
    assert!(hypercr_toda_family(h0(), 0.0, HoloFn::identity()).is_err());
    assert!(hypercr_toda_family(h0(), 1.0, HoloFn::real(2.0)).is_err());
}

#[test]
fn geodesic_symmetry_family() {
    let q = [0.3, 0.2, 0.7];
    for hs in ["const:1", "ratio:poly:1/poly:2,1", "poly:1,0.3+0.2i"] {
        let gs = super::geodesic_symmetry_family(hs.parse().unwrap()).unwrap();
        let w = gs.weyl_structure();
        assert!(ricci_weyl(&w, &q).unwrap().tracefree_norm < 1e-9, "{hs}");
        let c = congruence_invariants(&w, &*gs.chi(), &q).unwrap();
        assert!((c.tau - gs.tau_expected(&q).unwrap()).abs() < 1e-9);
        assert!((c.kappa_twist - gs.kappa(&q).unwrap().value).abs() < 1e-9);
        let k = gs.kappa_fn();
        let (r1, r2) = hypercr_residual(&w, &*k, &q).unwrap();
        assert!(r1 < 1e-9 && r2 < 1e-9);
        assert!(flat_connection_residual(&w, &*k, FLAT_CONNECTION_SIGN, &q).unwrap() < 1e-9);
    }
    let round = super::geodesic_symmetry_family(HoloFn::real(1.0)).unwrap();
    assert!(round.omega(&q).unwrap().iter().all(|c| c.value == 0.0));
    assert!((ricci_weyl(&round.weyl_structure(), &q).unwrap().scal - 1.5).abs() < 1e-12);
    let hi = super::geodesic_symmetry_family(HoloFn::constant(Complex64::new(0.0, 1.0))).unwrap();
    let (om, b) = (hi.omega(&q).unwrap(), hi.beta(&q).unwrap());
    for i in 0..3 {
        assert!((om[i].value + b[i].value).abs() < 1e-15);
    }
    assert!(super::geodesic_symmetry_family(HoloFn::real(0.0)).is_err());
}

#[test]
fn berger_family() {
    assert_eq!(berger_twist(1.0), 0.0);
    assert!((berger_twist(0.6) - 0.48).abs() < 1e-15);
    for a in [0.3, 0.6, 0.9, 1.0] {
        let w = berger_sphere(a).unwrap();
        assert!(ricci_weyl(&w, &[1.0, 0.4, 0.3]).unwrap().tracefree_norm < 1e-10);
    }
    assert!(berger_sphere(0.0).is_err());
    assert!(berger_sphere(1.5).is_err());
    assert!(berger_sphere(0.5).unwrap().admissible(&[0.0, 0.0, 0.0]).is_err());
}

#[test]
fn monopoles() {
    let h = HoloFn::constant(Complex64::new(1.0, 1.0));
    let fam = TodaFamily::normalized(h.clone());
    let m = strachan_monopole(&fam, &h, &[0.3, 0.4, 1.0]).unwrap();
    assert!((m.w.value - 0.6).abs() < 1e-15);
    let i = HoloFn::constant(Complex64::new(0.0, 1.0));
    let fam_i = TodaFamily::normalized(i.clone());
    let q = [0.3, 0.4, 1.0];
    let m = strachan_monopole(&fam_i, &i, &q).unwrap();
    assert!((m.w.value - 0.5).abs() < 1e-15);
    assert!((m.v.value + 0.5).abs() < 1e-15);
    // f = i reproduces the oriented κ, i.e. minus the closed form.
    assert!((m.w.value - fam_i.kappa(&q).unwrap().value).abs() < 1e-15);

    let fam = TodaFamily::normalized(h0());
    let f: HoloFn = "poly:1,0.5-0.2i".parse().unwrap();
    let wf = {
        let (fam, f) = (fam.clone(), f.clone());
        move |p: &Point3| Ok(strachan_monopole(&fam, &f, p)?.w)
    };
    assert!(monopole_residual(&*fam.u_fn(), &wf, &P).unwrap().abs() < 1e-10);
    let m = strachan_monopole(&fam, &f, &P).unwrap();
    assert!(theta_consistency(&fam, &m, &P).unwrap() < 1e-9);
    for (a, b) in [(1.0, 0.0), (0.0, 1.0), (2.0, -1.0), (0.0, 0.0)] {
        assert!(special_monopole_identity(&h0(), a, b, &P).unwrap() < 1e-13);
    }
    let flat_u = |_: &Point3| Ok(Jet::zero());
    let one = |_: &Point3| Ok(Jet::constant(1.0));
    assert_eq!(monopole_residual(&flat_u, &one, &P).unwrap(), 0.0);
    assert!(strachan_monopole(&fam, &HoloFn::real(-1.0), &P).is_err());
}

#[test]
fn gauge_covariance() {
    let fam = TodaFamily::normalized(h0());
    let w = fam.weyl_structure();
    let phi: ScalarFn3 = Arc::new(|p: &Point3| Ok(seed_point(p)[2] * 0.3));
    let w2 = gauge_transform(&w, phi.clone());
    assert!(ricci_weyl(&w2, &P).unwrap().tracefree_norm < 1e-9);
    let k2 = regauge_weight_minus_one(fam.kappa_fn(), phi);
    let (r1, r2) = hypercr_residual(&w2, &*k2, &P).unwrap();
    assert!(r1 < 1e-10 && r2 < 1e-10);

    let zero: ScalarFn3 = Arc::new(|_: &Point3| Ok(Jet::zero()));
    let w0 = gauge_transform(&w, zero);
    assert_eq!(w0.metric(&P).unwrap()[0][0].value, w.metric(&P).unwrap()[0][0].value);

    let log_r: ScalarFn3 = Arc::new(|p: &Point3| {
        let [x, y, z] = seed_point(p);
        Ok((x * x + y * y + z * z).ln() * 0.5)
    });
    let wf = gauge_transform(&flat(), log_r);
    assert!(ricci_weyl(&wf, &P).unwrap().tracefree_norm < 1e-10);
}
