//! Frozen sign and normalisation conventions.
//!
//! Every constant here was measured once against an independent oracle and
//! is asserted by a regression test; reports embed the whole ledger.

use serde::Serialize;

use crate::geom4::WeylHalf;

/// `R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_{[X,Y]} Z`, `Ric(Y,Z) = tr(X ↦ R(X,Y)Z)`.
pub const RIEMANN_CONVENTION: &str =
    "R(X,Y)Z = [nabla_X, nabla_Y]Z - nabla_[X,Y] Z; Ric(Y,Z) = tr(X -> R(X,Y)Z)";

/// `Ric / g` on the unit round `S³`.
pub const ROUND_S3_RICCI: f64 = 2.0;

/// `Ric / g` on the unit round `S⁴`.
pub const ROUND_S4_RICCI: f64 = 3.0;

/// Weyl gauge law, with `Dg = −2ω⊗g`.
pub const GAUGE_LAW: &str = "g -> exp(2 phi) g, omega -> omega - d phi, kappa -> exp(-phi) kappa";

/// `6κ²/scal^D` on hyperCR structures.
pub const HYPERCR_SCAL_CONSTANT: f64 = 1.0;

/// Sign `s` in the flat connection `D_X Y + s·κ·(X × Y)` on `L⁻¹⊗TB`.
pub const FLAT_CONNECTION_SIGN: f64 = -1.0;

/// Sign of `b/(a√(1−a²))` on the Berger sphere `ω = b(dψ + cosθ dφ)`.
pub const BERGER_TWIST_SIGN: f64 = 1.0;

/// Orientation of the hyperCR chart `(x, y, z)`; the closed form
/// `i(h−h̄)/(2(z+h)(z+h̄))` is `−κ` in it.
pub const KAPPA_ORIENTATION: &str = "dx^dy^dz; kappa = -i(h-conj h)/(2(z+h)(z+conj h))";

/// Sign `s` in `dt + θ = β + s·v dz`, with `v = −Im(f/(z+h))`.
pub const MONOPOLE_THETA_SIGN: f64 = -1.0;

/// The closed Kähler form of the LeBrun metric.
pub const KAHLER_FORM: &str = "w e^u dx^dy + dz^(dt+theta)";

/// Weyl half vanishing on the LeBrun metrics for `dx∧dy∧dz∧dt`.
pub const SFK_VANISHING_HALF: WeylHalf = WeylHalf::SelfDual;

/// Weyl half vanishing on the Pedersen metrics for `dρ∧dθ∧dφ∧dψ`.
pub const PEDERSEN_VANISHING_HALF: WeylHalf = WeylHalf::SelfDual;

/// `scal / (−3a)` for the Einstein metric of the monopole `a(1 − ½zu_z)`.
pub const EINSTEIN_SCAL_RATIO: f64 = 4.0;

/// Default sampler seed.
pub const DEFAULT_SEED: u64 = 0xE3;

#[derive(Clone, Debug, Serialize)]
pub struct Ledger {
    pub riemann_convention: &'static str,
    pub round_s3_ricci: f64,
    pub round_s4_ricci: f64,
    pub gauge_law: &'static str,
    pub hypercr_scal_constant: f64,
    pub flat_connection_sign: f64,
    pub berger_twist_sign: f64,
    pub kappa_orientation: &'static str,
    pub monopole_theta_sign: f64,
    pub kahler_form: &'static str,
    pub sfk_vanishing_half: WeylHalf,
    pub pedersen_vanishing_half: WeylHalf,
    pub einstein_scal_ratio: f64,
}

pub fn ledger() -> Ledger {
    Ledger {
        riemann_convention: RIEMANN_CONVENTION,
        round_s3_ricci: ROUND_S3_RICCI,
        round_s4_ricci: ROUND_S4_RICCI,
        gauge_law: GAUGE_LAW,
        hypercr_scal_constant: HYPERCR_SCAL_CONSTANT,
        flat_connection_sign: FLAT_CONNECTION_SIGN,
        berger_twist_sign: BERGER_TWIST_SIGN,
        kappa_orientation: KAPPA_ORIENTATION,
        monopole_theta_sign: MONOPOLE_THETA_SIGN,
        kahler_form: KAHLER_FORM,
        sfk_vanishing_half: SFK_VANISHING_HALF,
        pedersen_vanishing_half: PEDERSEN_VANISHING_HALF,
        einstein_scal_ratio: EINSTEIN_SCAL_RATIO,
    }
}
