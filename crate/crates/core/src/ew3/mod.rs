//! Gauged Weyl structures in dimension three.
//!
//! A [`WeylStructure3`] is a representative metric `g` together with the
//! 1-form `ω` of the induced connection on `L¹`, normalised so that the Weyl
//! connection satisfies `Dg = −2ω⊗g`. Weighted quantities (`κ`, `scal^D`,
//! `τ`) are plain functions in whichever gauge is active.

mod families;
mod monopole;

use std::sync::Arc;

use crate::connection::{self, Connection, Mat, SymJet};
use crate::jet::{Jet1, Jet3};
use crate::{GeomError, Point3, Result};

pub use families::{
    berger_sphere, berger_twist, geodesic_symmetry_family, hypercr_toda_family, liouville_residual,
    round_sphere3, toda_lw, toda_residual, GeodesicSymmetry, TodaFamily,
};
pub use monopole::{
    monopole_residual, special_monopole_identity, strachan_monopole, theta_consistency,
    MonopoleData,
};

pub type MetricFn3 = Arc<dyn Fn(&Point3) -> Result<SymJet<3>> + Send + Sync>;
pub type OneFormFn3 = Arc<dyn Fn(&Point3) -> Result<[Jet1<3>; 3]> + Send + Sync>;
pub type ScalarFn3 = Arc<dyn Fn(&Point3) -> Result<Jet3> + Send + Sync>;
pub type VectorFn3 = Arc<dyn Fn(&Point3) -> Result<[Jet3; 3]> + Send + Sync>;
pub type DomainFn3 = Arc<dyn Fn(&Point3) -> Result<()> + Send + Sync>;

/// Orientation of a chart: `+1` when the coordinate 3-form is positive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Orientation {
    Positive,
    Negative,
}

impl Orientation {
    pub fn sign(self) -> f64 {
        match self {
            Orientation::Positive => 1.0,
            Orientation::Negative => -1.0,
        }
    }

    pub fn reversed(self) -> Self {
        match self {
            Orientation::Positive => Orientation::Negative,
            Orientation::Negative => Orientation::Positive,
        }
    }
}

#[derive(Clone)]
pub struct WeylStructure3 {
    pub name: String,
    pub coords: [&'static str; 3],
    pub orientation: Orientation,
    metric: MetricFn3,
    omega: OneFormFn3,
    domain: DomainFn3,
}

impl std::fmt::Debug for WeylStructure3 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WeylStructure3")
            .field("name", &self.name)
            .field("coords", &self.coords)
            .field("orientation", &self.orientation)
            .finish_non_exhaustive()
    }
}

impl WeylStructure3 {
    pub fn new(
        name: impl Into<String>,
        coords: [&'static str; 3],
        metric: MetricFn3,
        omega: OneFormFn3,
        domain: DomainFn3,
    ) -> Self {
        Self {
            name: name.into(),
            coords,
            orientation: Orientation::Positive,
            metric,
            omega,
            domain,
        }
    }

    pub fn with_orientation(mut self, orientation: Orientation) -> Self {
        self.orientation = orientation;
        self
    }

    pub fn admissible(&self, p: &Point3) -> Result<()> {
        (self.domain)(p)
    }

    pub fn metric(&self, p: &Point3) -> Result<SymJet<3>> {
        self.admissible(p)?;
        (self.metric)(p)
    }

    pub fn omega(&self, p: &Point3) -> Result<[Jet1<3>; 3]> {
        self.admissible(p)?;
        (self.omega)(p)
    }

    pub(crate) fn parts(&self) -> (MetricFn3, OneFormFn3, DomainFn3) {
        (self.metric.clone(), self.omega.clone(), self.domain.clone())
    }
}

/// Pointwise data of the Weyl connection of a gauge.
#[derive(Clone, Debug)]
pub struct WeylConnection {
    pub g: SymJet<3>,
    pub omega: [Jet1<3>; 3],
    pub gamma: Connection<3>,
    pub g_val: Mat<3>,
    pub ginv: Mat<3>,
    /// Oriented volume density `±√det g`.
    pub vol: f64,
}

impl WeylConnection {
    /// Oriented volume form `ε_ijk`.
    pub fn epsilon(&self, i: usize, j: usize, k: usize) -> f64 {
        self.vol * connection::levi_civita_symbol(&[i, j, k])
    }

    pub fn raise(&self, v: &[f64; 3]) -> [f64; 3] {
        std::array::from_fn(|a| (0..3).map(|b| self.ginv[a][b] * v[b]).sum())
    }

    pub fn lower(&self, v: &[f64; 3]) -> [f64; 3] {
        std::array::from_fn(|a| (0..3).map(|b| self.g_val[a][b] * v[b]).sum())
    }

    /// `(*α)_ij = ε_ijk α^k` for a 1-form `α`.
    pub fn star_1form(&self, alpha: &[f64; 3]) -> Mat<3> {
        let up = self.raise(alpha);
        std::array::from_fn(|i| {
            std::array::from_fn(|j| (0..3).map(|k| self.epsilon(i, j, k) * up[k]).sum())
        })
    }

    /// `(*F)_k = ½ F^{ij} ε_ijk` for a 2-form `F`.
    pub fn star_2form(&self, f: &Mat<3>) -> [f64; 3] {
        std::array::from_fn(|k| {
            let mut s = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    let mut up = 0.0;
                    for a in 0..3 {
                        for b in 0..3 {
                            up += self.ginv[i][a] * self.ginv[j][b] * f[a][b];
                        }
                    }
                    s += 0.5 * up * self.epsilon(i, j, k);
                }
            }
            s
        })
    }

    pub fn norm_covector(&self, v: &[f64; 3]) -> f64 {
        connection::norm2_covector(&self.ginv, v).max(0.0).sqrt()
    }

    pub fn norm_vector(&self, v: &[f64; 3]) -> f64 {
        self.norm_covector(&self.lower(v))
    }

    pub fn norm_2tensor(&self, t: &Mat<3>) -> f64 {
        connection::norm2_2tensor(&self.ginv, t).max(0.0).sqrt()
    }

    /// Largest torsion component `|Γ^l_ik − Γ^l_ki|`.
    pub fn torsion(&self) -> f64 {
        let mut worst = 0.0_f64;
        for l in 0..3 {
            for i in 0..3 {
                for k in 0..3 {
                    worst = worst.max((self.gamma[l][i][k].value - self.gamma[l][k][i].value).abs());
                }
            }
        }
        worst
    }

    /// `max |D_k g_ij + 2ω_k g_ij|` and the scale it should be judged against.
    pub fn metricity_defect(&self) -> (f64, f64) {
        let mut worst = 0.0_f64;
        let mut scale = 0.0_f64;
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    let dg = self.g[i][j].grad[k];
                    let t1: f64 = (0..3).map(|m| self.gamma[m][k][i].value * self.g_val[m][j]).sum();
                    let t2: f64 = (0..3).map(|m| self.gamma[m][k][j].value * self.g_val[i][m]).sum();
                    let w = 2.0 * self.omega[k].value * self.g_val[i][j];
                    worst = worst.max((dg - t1 - t2 + w).abs());
                    scale = scale.max(dg.abs()).max(t1.abs()).max(t2.abs()).max(w.abs());
                }
            }
        }
        (worst, scale.max(1.0))
    }
}

/// Christoffel symbols of the Weyl connection of `W` at `p`.
pub fn weyl_connection(w: &WeylStructure3, p: &Point3) -> Result<WeylConnection> {
    let g = w.metric(p)?;
    let omega = w.omega(p)?;
    let gamma = connection::weyl(&g, &omega)?;
    let g_val = connection::values(&g);
    let (ginv, det) = connection::invert(&g_val)?;
    if !(det > 0.0) {
        return Err(GeomError::Degenerate { det });
    }
    Ok(WeylConnection {
        g,
        omega,
        gamma,
        g_val,
        ginv,
        vol: w.orientation.sign() * det.sqrt(),
    })
}

#[derive(Clone, Debug)]
pub struct RicciWeyl {
    pub sym_tracefree: Mat<3>,
    pub scal: f64,
    /// Gauge norm of `sym_tracefree`.
    pub tracefree_norm: f64,
    /// Skew part of the Ricci tensor, `Ric_[jk]`.
    pub skew: Mat<3>,
}

pub fn ricci_from_connection(wc: &WeylConnection) -> RicciWeyl {
    let ric = connection::ricci(&connection::curvature(&wc.gamma));
    let sym: Mat<3> = std::array::from_fn(|a| std::array::from_fn(|b| 0.5 * (ric[a][b] + ric[b][a])));
    let skew: Mat<3> = std::array::from_fn(|a| std::array::from_fn(|b| 0.5 * (ric[a][b] - ric[b][a])));
    let scal: f64 = (0..3)
        .flat_map(|a| (0..3).map(move |b| (a, b)))
        .map(|(a, b)| wc.ginv[a][b] * sym[a][b])
        .sum();
    let tf: Mat<3> =
        std::array::from_fn(|a| std::array::from_fn(|b| sym[a][b] - scal / 3.0 * wc.g_val[a][b]));
    RicciWeyl {
        tracefree_norm: wc.norm_2tensor(&tf),
        sym_tracefree: tf,
        scal,
        skew,
    }
}

/// Symmetric trace-free Ricci tensor and scalar curvature of the Weyl connection.
pub fn ricci_weyl(w: &WeylStructure3, p: &Point3) -> Result<RicciWeyl> {
    Ok(ricci_from_connection(&weyl_connection(w, p)?))
}

/// `F^D = dω`, as the antisymmetric matrix `F_ij = ∂_i ω_j − ∂_j ω_i`.
pub fn faraday(w: &WeylStructure3, p: &Point3) -> Result<Mat<3>> {
    let om = w.omega(p)?;
    Ok(exterior_derivative(&om))
}

pub fn exterior_derivative(om: &[Jet1<3>; 3]) -> Mat<3> {
    std::array::from_fn(|i| std::array::from_fn(|j| om[j].grad[i] - om[i].grad[j]))
}

#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct CongruenceData {
    pub tau: f64,
    pub kappa_twist: f64,
    pub shear_norm: f64,
    pub geodesic_residual: f64,
}

/// Decomposes `Dχ` for a weightless unit vector field `χ` into divergence,
/// twist, shear and the geodesic defect `D_χ χ`.
///
/// `χ` is given in the gauge trivialisation of `L⁻¹⊗TB`, so that
/// `(Dχ)^k_j = ∂_j χ^k + Γ^k_jm χ^m − ω_j χ^k`. The twist is the coefficient
/// of `Y ↦ χ × Y` in the transverse skew part.
pub fn congruence_invariants(
    w: &WeylStructure3,
    chi: &dyn Fn(&Point3) -> Result<[Jet3; 3]>,
    p: &Point3,
) -> Result<CongruenceData> {
    let wc = weyl_connection(w, p)?;
    let x = chi(p)?;
    let xv: [f64; 3] = std::array::from_fn(|i| x[i].value);
    let unit = wc.norm_vector(&xv).powi(2);
    if (unit - 1.0).abs() > 1e-10 {
        return Err(GeomError::InvalidParameter(format!(
            "congruence field is not unit: <χ,χ> = {unit}"
        )));
    }
    // a[k][j] = (D_j χ)^k
    let a: Mat<3> = std::array::from_fn(|k| {
        std::array::from_fn(|j| {
            x[k].grad[j] + (0..3).map(|m| wc.gamma[k][j][m].value * xv[m]).sum::<f64>()
                - wc.omega[j].value * xv[k]
        })
    });
    let dchi_chi: [f64; 3] = std::array::from_fn(|k| (0..3).map(|j| a[k][j] * xv[j]).sum());
    let geodesic_residual = wc.norm_vector(&dchi_chi);

    let xl = wc.lower(&xv);
    let proj: Mat<3> = std::array::from_fn(|i| {
        std::array::from_fn(|j| f64::from(i == j) - xv[i] * xl[j])
    });
    // transverse part P A P, then lowered: l[a][c] = g_ak (PAP)^k_c
    let mut pap = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let mut s = 0.0;
            for k in 0..3 {
                for m in 0..3 {
                    s += proj[i][k] * a[k][m] * proj[m][j];
                }
            }
            pap[i][j] = s;
        }
    }
    let low: Mat<3> = std::array::from_fn(|i| {
        std::array::from_fn(|j| (0..3).map(|k| wc.g_val[i][k] * pap[k][j]).sum())
    });
    let tau = 0.5 * (0..3).map(|i| pap[i][i]).sum::<f64>();

    // *χ = ι_χ vol acts as Y ↦ (*χ)(Y, ·)♯ = χ × Y, lowered: −ε_acd χ^d.
    let star_chi = wc.star_1form(&xl);
    let mut kappa = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let mut up = 0.0;
            for c in 0..3 {
                for d in 0..3 {
                    up += wc.ginv[i][c] * wc.ginv[j][d] * star_chi[c][d];
                }
            }
            kappa -= 0.5 * 0.5 * (low[i][j] - low[j][i]) * up;
        }
    }
    let shear: Mat<3> = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            0.5 * (low[i][j] + low[j][i]) - tau * (wc.g_val[i][j] - xl[i] * xl[j])
        })
    });
    Ok(CongruenceData {
        tau,
        kappa_twist: kappa,
        shear_norm: wc.norm_2tensor(&shear),
        geodesic_residual,
    })
}

/// Residuals of the hyperCR equations `κ² = scal^D/6` and `Dκ = −½ *F^D`,
/// with `Dκ = dκ − κω` in the gauge.
pub fn hypercr_residual(
    w: &WeylStructure3,
    kappa: &dyn Fn(&Point3) -> Result<Jet3>,
    p: &Point3,
) -> Result<(f64, f64)> {
    let wc = weyl_connection(w, p)?;
    let ric = ricci_from_connection(&wc);
    let k = kappa(p)?;
    let r1 = (k.value * k.value - ric.scal / 6.0).abs();
    let f = exterior_derivative(&wc.omega);
    let star_f = wc.star_2form(&f);
    let defect: [f64; 3] =
        std::array::from_fn(|i| k.grad[i] - k.value * wc.omega[i].value + 0.5 * star_f[i]);
    Ok((r1, wc.norm_covector(&defect)))
}

/// Curvature norm of `∇_X Y = D_X Y + sign·κ·(X × Y)` on `L⁻¹⊗TB`.
pub fn flat_connection_residual(
    w: &WeylStructure3,
    kappa: &dyn Fn(&Point3) -> Result<Jet3>,
    sign: f64,
    p: &Point3,
) -> Result<f64> {
    let wc = weyl_connection(w, p)?;
    let k = kappa(p)?.truncate();
    let ginv = connection::inverse_jet1(&wc.g)?;
    // ∂ √det g = ½ √det g · tr(g⁻¹ ∂g)
    let mut vol = Jet1::<3>::constant(wc.vol);
    for m in 0..3 {
        let tr: f64 = (0..3)
            .flat_map(|a| (0..3).map(move |b| (a, b)))
            .map(|(a, b)| wc.ginv[a][b] * wc.g[b][a].grad[m])
            .sum();
        vol.grad[m] = 0.5 * wc.vol * tr;
    }
    let mut c = wc.gamma;
    for l in 0..3 {
        for j in 0..3 {
            for m in 0..3 {
                let mut cross = Jet1::default();
                for a in 0..3 {
                    let e = connection::levi_civita_symbol(&[a, j, m]);
                    if e != 0.0 {
                        cross += ginv[l][a] * vol * e;
                    }
                }
                let mut t = c[l][j][m] + k * cross * sign;
                if l == m {
                    t -= wc.omega[j];
                }
                c[l][j][m] = t;
            }
        }
    }
    let r = connection::curvature(&c);
    let mut s = 0.0;
    for l in 0..3 {
        for l2 in 0..3 {
            for k1 in 0..3 {
                for k2 in 0..3 {
                    let gk = wc.g_val[l][l2] * wc.ginv[k1][k2];
                    if gk == 0.0 {
                        continue;
                    }
                    for i in 0..3 {
                        for i2 in 0..3 {
                            for j in 0..3 {
                                for j2 in 0..3 {
                                    s += gk * wc.ginv[i][i2] * wc.ginv[j][j2]
                                        * r[l][k1][i][j]
                                        * r[l2][k2][i2][j2];
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(s.max(0.0).sqrt())
}

/// `g → e^{2φ} g`, `ω → ω − dφ`: the same Weyl connection in a new gauge.
/// Weight `−1` quantities transform as `κ → e^{−φ} κ`.
pub fn gauge_transform(w: &WeylStructure3, phi: ScalarFn3) -> WeylStructure3 {
    let (metric, omega, domain) = w.parts();
    let phi_m = phi.clone();
    let new_metric: MetricFn3 = Arc::new(move |p: &Point3| {
        let g = metric(p)?;
        let f = (phi_m(p)? * 2.0).exp();
        Ok(std::array::from_fn(|i| std::array::from_fn(|j| g[i][j] * f)))
    });
    let new_omega: OneFormFn3 = Arc::new(move |p: &Point3| {
        let om = omega(p)?;
        let ph = phi(p)?;
        Ok(std::array::from_fn(|i| om[i] - ph.partial(i)))
    });
    WeylStructure3 {
        name: format!("{} (regauged)", w.name),
        coords: w.coords,
        orientation: w.orientation,
        metric: new_metric,
        omega: new_omega,
        domain,
    }
}

/// Transforms a weight `−1` quantity to the gauge produced by [`gauge_transform`].
pub fn regauge_weight_minus_one(kappa: ScalarFn3, phi: ScalarFn3) -> ScalarFn3 {
    Arc::new(move |p: &Point3| Ok(kappa(p)? * (-phi(p)?).exp()))
}

#[cfg(test)]
mod tests;
