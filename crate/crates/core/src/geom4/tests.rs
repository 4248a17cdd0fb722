use std::sync::Arc;

use num_complex::Complex64;

use super::*;
use crate::conventions::{
    EINSTEIN_SCAL_RATIO, PEDERSEN_VANISHING_HALF, ROUND_S4_RICCI, SFK_VANISHING_HALF,
};
use crate::holo::HoloFn;
use crate::jet::{seed_point, Jet};

const P: Point4 = [0.2, -0.3, 1.1, 0.0];

fn h0() -> HoloFn {
    "poly:2.5,0.3+0.2i,0.1-0.1i".parse().unwrap()
}

fn max_diff(a: &SymJet<4>, b: &SymJet<4>) -> (f64, f64) {
    let mut d = 0.0_f64;
    let mut s = 0.0_f64;
    for i in 0..4 {
        for j in 0..4 {
            d = d.max((a[i][j].value - b[i][j].value).abs());
            s = s.max(a[i][j].value.abs());
        }
    }
    (d, s)
}

#[test]
fn flat_metric_has_no_curvature() {
    let c = curvature(&flat_metric(), &P).unwrap();
    assert!(c.riemann.iter().flatten().flatten().flatten().all(|v| v.abs() < 1e-12));
    assert_eq!(c.scal, 0.0);
    assert_eq!(c.weyl_norm2, 0.0);
}

#[test]
fn round_sphere_pins_the_sign_convention() {
    let c = curvature(&round_sphere4(), &[0.3, 0.1, -0.2, 0.5]).unwrap();
    for a in 0..4 {
        for b in 0..4 {
            assert!((c.ricci[a][b] - ROUND_S4_RICCI * c.g[a][b]).abs() < 1e-12);
        }
    }
    assert!((c.scal - 12.0).abs() < 1e-11);
    assert!(c.constant_curvature_residual().0 < 1e-11);
    assert!(c.weyl_norm2.abs() < 1e-20);
}

#[test]
fn sfk_example_by_hand() {
    let i = HoloFn::constant(Complex64::new(0.0, 1.0));
    let g = sfk_metric(i.clone(), i).components(&[1.0, 0.0, 1.0, 0.0]).unwrap();
    // w = 0.5, so the dt² coefficient is 1/w = 2.
    assert!((g[3][3].value - 2.0).abs() < 1e-15);
    assert!((g[2][2].value - 0.5 - 2.0 * 0.25).abs() < 1e-15);
}

#[test]
fn sfk_is_scalar_flat_and_half_flat() {
    for fs in ["poly:1,0.5-0.2i", "const:1", "poly:2.5,0.3+0.2i,0.1-0.1i"] {
        let m = sfk_metric(h0(), fs.parse().unwrap());
        let c = curvature(&m, &P).unwrap();
        assert!(c.scal.abs() < 1e-8, "{fs}");
        assert!(c.half_norm(SFK_VANISHING_HALF) < 1e-8, "{fs}");
        assert!(c.symmetry_defect() < 1e-10);
        assert!(c.weyl_trace_defect() < 1e-10);
        let (recon, cross) = c.split_defect();
        assert!(recon < 1e-10 && cross < 1e-10);
        assert_eq!(m.killing_defect(&P).unwrap(), 0.0);
    }
}

#[test]
fn f_equal_one_is_ricci_flat() {
    let c = curvature(&sfk_metric(h0(), HoloFn::real(1.0)), &P).unwrap();
    assert!(c.ricci_norm() < 1e-7);
    assert!(c.riemann_norm() > 1e-3);
}

#[test]
fn f_equal_i_is_scalar_flat_and_half_flat() {
    let h: HoloFn = "poly:1+1i,0.2".parse().unwrap();
    let c = curvature(&sfk_metric(h, HoloFn::constant(Complex64::new(0.0, 1.0))), &P).unwrap();
    assert!(c.scal.abs() < 1e-8);
    assert!(c.half_norm(SFK_VANISHING_HALF) < 1e-8);
}

#[test]
fn kahler_form_is_closed() {
    let p3 = [P[0], P[1], P[2]];
    let f: HoloFn = "poly:1,0.5-0.2i".parse().unwrap();
    assert!(kahler_form_closedness(&h0(), &f, &p3).unwrap() < 1e-9);
    let h = HoloFn::constant(Complex64::new(1.0, 1.0));
    assert!(kahler_form_closedness(&h, &h, &p3).unwrap() < 1e-9);
    let theta = [Jet::zero(), Jet::zero(), Jet::zero(), Jet::constant(1.0)];
    assert_eq!(kahler_form_defect(&Jet::constant(1.0), &theta), 0.0);
}

#[test]
fn reversed_kahler_candidate_is_not_closed() {
    // (dt+θ)∧dz = −dz∧(dt+θ) is closed only together with −w e^u dx∧dy.
    let s = super::families::sfk_parts(&h0(), &HoloFn::real(1.0), &P).unwrap();
    let neg = s.theta.map(|t| -t);
    assert!(kahler_form_defect(&(s.w * s.q * s.s), &neg) > 1e-3);
}

#[test]
fn einstein_metric_matches_rescaled_sfk() {
    for hs in ["const:1", "poly:1,0.2+0.1i", "const:1+1i"] {
        let h: HoloFn = hs.parse().unwrap();
        let q = [0.4, 0.3, 0.8, 0.0];
        let a = einstein_metric(h.clone()).components(&q).unwrap();
        let b = einstein_metric_scaled(h, 1.0).unwrap().components(&q).unwrap();
        let (d, s) = max_diff(&a, &b);
        assert!(d <= 16.0 * f64::EPSILON * s, "{hs}: {d:e}");
    }
}

#[test]
fn einstein_metric_is_einstein() {
    let h: HoloFn = "const:1+0.5i".parse().unwrap();
    let e = einstein_metric(h);
    let scals: Vec<f64> = [0.3, 1.0, 2.5]
        .iter()
        .map(|&z| {
            let c = curvature(&e, &[0.4, 0.3, z, 0.0]).unwrap();
            assert!(c.tracefree_ricci_norm() < 1e-7);
            assert!(c.half_norm(SFK_VANISHING_HALF) < 1e-8);
            c.scal
        })
        .collect();
    assert!(scals.iter().all(|s| *s < 0.0 && (s - scals[0]).abs() < 1e-7));
}

#[test]
fn constant_real_h_gives_hyperbolic_space() {
    let e = einstein_metric(HoloFn::real(1.0));
    for z in [0.5, 1.0, 3.0] {
        let c = curvature(&e, &[0.4, 0.3, z, 0.0]).unwrap();
        let (res, k) = c.constant_curvature_residual();
        assert!(res < 1e-7 && k < 0.0);
    }
}

#[test]
fn einstein_scalar_curvature_is_linear_in_a() {
    for a in [0.5, 1.0, 2.0] {
        let m = einstein_metric_scaled(h0(), a).unwrap();
        let c = curvature(&m, &P).unwrap();
        assert!((c.scal / (-3.0 * a) - EINSTEIN_SCAL_RATIO).abs() < 1e-6);
    }
    assert!(einstein_metric_scaled(h0(), 0.0).is_err());
}

#[test]
fn conformal_rescale_behaviour() {
    let m = sfk_metric(h0(), "poly:1,0.5-0.2i".parse().unwrap());
    let one: ScalarFn4 = Arc::new(|_: &Point4| Ok(Jet::constant(1.0)));
    let (d, _) = max_diff(
        &m.components(&P).unwrap(),
        &conformal_rescale(&m, one).components(&P).unwrap(),
    );
    assert_eq!(d, 0.0);
    let bump: ScalarFn4 = Arc::new(|p: &Point4| Ok(1.0 + seed_point(p)[2].square()));
    let c = curvature(&conformal_rescale(&m, bump), &P).unwrap();
    assert!(c.half_norm(SFK_VANISHING_HALF) < 1e-7);
    assert!(c.half_norm(SFK_VANISHING_HALF) < 1e-3 * c.weyl_norm2.sqrt());
    let neg: ScalarFn4 = Arc::new(|_: &Point4| Ok(Jet::constant(-1.0)));
    assert!(conformal_rescale(&m, neg).components(&P).is_err());
}

#[test]
fn pedersen_metrics_are_selfdual_einstein() {
    for m in [0.0, 0.5, 1.0, 2.0] {
        let c = curvature(&pedersen_metric(m), &[0.5, 1.0, 0.2, 0.3]).unwrap();
        assert!(c.tracefree_ricci_norm() < 1e-8);
        assert!(c.scal < 0.0);
        assert!(c.half_norm(PEDERSEN_VANISHING_HALF) < 1e-8);
        if m == 0.0 {
            assert!(c.constant_curvature_residual().0 < 1e-9);
        }
    }
    assert!(pedersen_metric(1.0).components(&[1.0, 1.0, 0.0, 0.0]).is_err());
    assert!(pedersen_metric(1.0).components(&[0.5, 0.0, 0.0, 0.0]).is_err());
}

#[test]
fn pedersen_correspondence_matches() {
    let (a, b) = pedersen_correspondence(0.0, 1.0).unwrap();
    assert!(a.abs() < 1e-20 && b.abs() < 1e-20);
    for z in [0.25, 4.0, 100.0] {
        let (a, b) = pedersen_correspondence(1.0, z).unwrap();
        assert!((a - b).abs() < 1e-6, "z = {z}: {a} vs {b}");
    }
    assert!(pedersen_correspondence(1.0, -1.0).is_err());
}

#[test]
fn quotient_is_z_independent_and_matches_geodesic_symmetry() {
    let h: HoloFn = "poly:2,1".parse().unwrap();
    let f: HoloFn = "poly:1,1".parse().unwrap();
    let q = quotient_check(&h, &f, [0.3, -0.2], &[0.5, 1.0, 2.0]).unwrap();
    assert!(q.max_z_variation < 1e-10);
    assert!(q.match_residual < 1e-10);
    let q = quotient_check(&h, &HoloFn::real(1.0), [0.3, -0.2], &[0.5, 1.0, 2.0]).unwrap();
    assert!(q.max_z_variation < 1e-10 && q.match_residual < 1e-10);
    assert!(quotient_check(&h, &f, [-1.0, 0.0], &[1.0]).is_err());
}
