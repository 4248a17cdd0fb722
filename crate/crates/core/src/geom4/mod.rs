//! Riemannian 4-metrics and their curvature.
//!
//! Curvature is stored fully covariant as
//! `riemann[a][b][c][d] = g(R(∂_a, ∂_b) ∂_c, ∂_d)`, so that the unit round
//! sphere has `R_abcd = g_bc g_ad − g_ac g_bd` and `Ric = (n−1) g`. The Weyl
//! tensor is split with the Hodge star of the chart orientation, acting on
//! the first index pair.

mod checks;
mod families;

use std::sync::Arc;

use crate::connection::{self, levi_civita_symbol, Mat, Riemann, SymJet};
use crate::jet::Jet4;
use crate::{GeomError, Point4, Result, DELTA_POS};

pub use checks::{
    kahler_form_closedness, kahler_form_defect, pedersen_correspondence, quotient_check,
    quotient_representative,
    QuotientCheck,
};
pub use families::{
    einstein_metric, einstein_metric_scaled, flat_metric, pedersen_metric, round_sphere4,
    sfk_metric,
};

pub type MetricFn4 = Arc<dyn Fn(&Point4) -> Result<SymJet<4>> + Send + Sync>;
pub type ScalarFn4 = Arc<dyn Fn(&Point4) -> Result<Jet4> + Send + Sync>;
pub type DomainFn4 = Arc<dyn Fn(&Point4) -> Result<()> + Send + Sync>;

/// Which half of the Weyl tensor, relative to the chart orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum WeylHalf {
    SelfDual,
    AntiSelfDual,
}

#[derive(Clone)]
pub struct Metric4 {
    pub name: String,
    pub coords: [&'static str; 4],
    /// Index of the Killing coordinate (`t` or `ψ`), if any.
    pub killing: Option<usize>,
    metric: MetricFn4,
    domain: DomainFn4,
}

impl std::fmt::Debug for Metric4 {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Metric4")
            .field("name", &self.name)
            .field("coords", &self.coords)
            .finish_non_exhaustive()
    }
}

impl Metric4 {
    pub fn new(
        name: impl Into<String>,
        coords: [&'static str; 4],
        killing: Option<usize>,
        metric: MetricFn4,
        domain: DomainFn4,
    ) -> Self {
        Self {
            name: name.into(),
            coords,
            killing,
            metric,
            domain,
        }
    }

    pub fn admissible(&self, p: &Point4) -> Result<()> {
        (self.domain)(p)
    }

    pub fn components(&self, p: &Point4) -> Result<SymJet<4>> {
        self.admissible(p)?;
        (self.metric)(p)
    }

    /// Largest derivative of any component along the Killing coordinate.
    pub fn killing_defect(&self, p: &Point4) -> Result<f64> {
        let Some(k) = self.killing else {
            return Ok(0.0);
        };
        let g = self.components(p)?;
        Ok(g.iter()
            .flatten()
            .flat_map(|c| std::iter::once(c.grad[k]).chain(c.hess[k].iter().copied()))
            .fold(0.0_f64, |m, v| m.max(v.abs())))
    }
}

/// Multiplies every component (and its derivatives) by a positive factor.
pub fn conformal_rescale(m: &Metric4, factor: ScalarFn4) -> Metric4 {
    let inner = m.metric.clone();
    let dom = m.domain.clone();
    let fm = factor.clone();
    let metric: MetricFn4 = Arc::new(move |p: &Point4| {
        let f = fm(p)?;
        let g = inner(p)?;
        Ok(std::array::from_fn(|i| std::array::from_fn(|j| g[i][j] * f)))
    });
    let domain: DomainFn4 = Arc::new(move |p: &Point4| {
        dom(p)?;
        let f = factor(p)?.value;
        if f > DELTA_POS {
            Ok(())
        } else {
            Err(GeomError::Inadmissible(format!(
                "conformal factor {f:e} is not positive"
            )))
        }
    });
    Metric4 {
        name: format!("{} (rescaled)", m.name),
        coords: m.coords,
        killing: m.killing,
        metric,
        domain,
    }
}

#[derive(Clone, Debug)]
pub struct Curvature4 {
    pub g: Mat<4>,
    pub ginv: Mat<4>,
    pub riemann: Riemann<4>,
    pub ricci: Mat<4>,
    pub scal: f64,
    pub weyl: Riemann<4>,
    pub weyl_sd: Riemann<4>,
    pub weyl_asd: Riemann<4>,
    pub weyl_sd_norm: f64,
    pub weyl_asd_norm: f64,
    pub weyl_norm2: f64,
}

fn raise_all(t: &Riemann<4>, ginv: &Mat<4>) -> Riemann<4> {
    let mut cur = *t;
    for slot in 0..4 {
        let mut next = [[[[0.0; 4]; 4]; 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let idx = [a, b, c, d];
                        let mut s = 0.0;
                        for m in 0..4 {
                            let mut j = idx;
                            j[slot] = m;
                            s += ginv[idx[slot]][m] * cur[j[0]][j[1]][j[2]][j[3]];
                        }
                        next[a][b][c][d] = s;
                    }
                }
            }
        }
        cur = next;
    }
    cur
}

fn inner4(a: &Riemann<4>, b_up: &Riemann<4>) -> f64 {
    a.iter()
        .flatten()
        .flatten()
        .flatten()
        .zip(b_up.iter().flatten().flatten().flatten())
        .map(|(x, y)| x * y)
        .sum()
}

impl Curvature4 {
    pub fn tracefree_ricci_norm(&self) -> f64 {
        let t: Mat<4> = std::array::from_fn(|a| {
            std::array::from_fn(|b| self.ricci[a][b] - 0.25 * self.scal * self.g[a][b])
        });
        connection::norm2_2tensor(&self.ginv, &t).max(0.0).sqrt()
    }

    pub fn ricci_norm(&self) -> f64 {
        connection::norm2_2tensor(&self.ginv, &self.ricci).max(0.0).sqrt()
    }

    pub fn riemann_norm(&self) -> f64 {
        inner4(&self.riemann, &raise_all(&self.riemann, &self.ginv)).max(0.0).sqrt()
    }

    /// Norm of `R − k(g⊙g)` with `k = scal/12`, and `k` itself.
    pub fn constant_curvature_residual(&self) -> (f64, f64) {
        let k = self.scal / 12.0;
        let g = &self.g;
        let mut d = [[[[0.0; 4]; 4]; 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for e in 0..4 {
                        d[a][b][c][e] =
                            self.riemann[a][b][c][e] - k * (g[b][c] * g[a][e] - g[a][c] * g[b][e]);
                    }
                }
            }
        }
        (inner4(&d, &raise_all(&d, &self.ginv)).max(0.0).sqrt(), k)
    }

    /// Largest violation of the Riemann symmetries and the first Bianchi
    /// identity, relative to the largest component.
    pub fn symmetry_defect(&self) -> f64 {
        let r = &self.riemann;
        let scale = r
            .iter()
            .flatten()
            .flatten()
            .flatten()
            .fold(0.0_f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0_f64;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let v = r[a][b][c][d];
                        worst = worst
                            .max((v + r[b][a][c][d]).abs())
                            .max((v + r[a][b][d][c]).abs())
                            .max((v - r[c][d][a][b]).abs())
                            .max((v + r[b][c][a][d] + r[c][a][b][d]).abs());
                    }
                }
            }
        }
        worst / scale
    }

    /// Largest trace `g^{ad} W_abcd`, relative to `|W|` (or absolute when `W ≈ 0`).
    pub fn weyl_trace_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for b in 0..4 {
            for c in 0..4 {
                let mut s = 0.0;
                for a in 0..4 {
                    for d in 0..4 {
                        s += self.ginv[a][d] * self.weyl[a][b][c][d];
                    }
                }
                worst = worst.max(s.abs());
            }
        }
        worst / self.weyl_norm2.sqrt().max(1.0)
    }

    /// `|W − W⁺ − W⁻|` and `|⟨W⁺, W⁻⟩|`, both relative to `|W|²` (or absolute when `W ≈ 0`).
    pub fn split_defect(&self) -> (f64, f64) {
        let mut recon = 0.0_f64;
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        recon = recon.max(
                            (self.weyl[a][b][c][d]
                                - self.weyl_sd[a][b][c][d]
                                - self.weyl_asd[a][b][c][d])
                                .abs(),
                        );
                    }
                }
            }
        }
        let cross = inner4(&self.weyl_sd, &raise_all(&self.weyl_asd, &self.ginv));
        let scale = self.weyl_norm2.max(1.0);
        (recon / scale.sqrt(), cross.abs() / scale)
    }

    pub fn half_norm(&self, half: WeylHalf) -> f64 {
        match half {
            WeylHalf::SelfDual => self.weyl_sd_norm,
            WeylHalf::AntiSelfDual => self.weyl_asd_norm,
        }
    }

    pub fn vanishing_half(&self) -> WeylHalf {
        if self.weyl_sd_norm <= self.weyl_asd_norm {
            WeylHalf::SelfDual
        } else {
            WeylHalf::AntiSelfDual
        }
    }
}

/// Levi-Civita curvature, Ricci, scalar and Weyl tensors of `m` at `p`.
pub fn curvature(m: &Metric4, p: &Point4) -> Result<Curvature4> {
    let gj = m.components(p)?;
    curvature_from_components(&gj)
}

///
/// The tensors are computed in the linear chart `y = Cᵀx`, `g(p) = CCᵀ`, in
/// which the metric is the identity at `p`, and pulled back. Near a
/// coordinate singularity the chart metric can have condition number `~1e4`;
/// working in `x` directly loses roughly its square to cancellation.
pub fn curvature_from_components(gj: &SymJet<4>) -> Result<Curvature4> {
    let g = connection::values(gj);
    let (ginv, det) = connection::invert(&g)?;
    if !(det > 0.0) {
        return Err(GeomError::Degenerate { det });
    }
    let c = cholesky(&g).ok_or(GeomError::Degenerate { det })?;
    let ct: Mat<4> = std::array::from_fn(|i| std::array::from_fn(|j| c[j][i]));
    let (j, _) = connection::invert(&ct)?;
    let y = curvature_in_chart(&linear_pullback(gj, &j))?;
    let lower4 = |t: &Riemann<4>| transform4(t, &ct);
    let ricci = transform2(&y.ricci, &ct);
    Ok(Curvature4 {
        g,
        ginv,
        riemann: lower4(&y.riemann),
        ricci: std::array::from_fn(|a| std::array::from_fn(|b| 0.5 * (ricci[a][b] + ricci[b][a]))),
        scal: y.scal,
        weyl: lower4(&y.weyl),
        weyl_sd: lower4(&y.weyl_sd),
        weyl_asd: lower4(&y.weyl_asd),
        weyl_sd_norm: y.weyl_sd_norm,
        weyl_asd_norm: y.weyl_asd_norm,
        weyl_norm2: y.weyl_norm2,
    })
}

/// Lower-triangular `C` with `g = CCᵀ`, or `None` if `g` is not positive
/// definite.
fn cholesky(g: &Mat<4>) -> Option<Mat<4>> {
    let mut c = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..=i {
            let s: f64 = g[i][j] - (0..j).map(|k| c[i][k] * c[j][k]).sum::<f64>();
            if i == j {
                if !(s > 0.0) {
                    return None;
                }
                c[i][i] = s.sqrt();
            } else {
                c[i][j] = s / c[j][j];
            }
        }
    }
    Some(c)
}

/// Components of `g` in the chart `y` with `x = J y`.
fn linear_pullback(gj: &SymJet<4>, j: &Mat<4>) -> SymJet<4> {
    std::array::from_fn(|i| {
        std::array::from_fn(|k| {
            let mut v = Jet4::zero();
            for a in 0..4 {
                for b in 0..4 {
                    v += gj[a][b] * (j[a][i] * j[b][k]);
                }
            }
            Jet4 {
                value: v.value,
                grad: std::array::from_fn(|p| (0..4).map(|q| v.grad[q] * j[q][p]).sum()),
                hess: std::array::from_fn(|p| {
                    std::array::from_fn(|r| {
                        (0..4)
                            .flat_map(|q| (0..4).map(move |t| (q, t)))
                            .map(|(q, t)| j[q][p] * v.hess[q][t] * j[t][r])
                            .sum()
                    })
                }),
            }
        })
    })
}

/// `T_ab = M^i_a M^j_b T'_ij`.
fn transform2(t: &Mat<4>, m: &Mat<4>) -> Mat<4> {
    std::array::from_fn(|a| {
        std::array::from_fn(|b| {
            (0..4)
                .flat_map(|i| (0..4).map(move |j| (i, j)))
                .map(|(i, j)| m[i][a] * m[j][b] * t[i][j])
                .sum()
        })
    })
}

/// `T_abcd = M^i_a M^j_b M^k_c M^l_d T'_ijkl`, one index at a time.
fn transform4(t: &Riemann<4>, m: &Mat<4>) -> Riemann<4> {
    let mut cur = *t;
    for slot in 0..4 {
        let mut next = [[[[0.0; 4]; 4]; 4]; 4];
        for a in 0..4 {
            for b in 0..4 {
                for c in 0..4 {
                    for d in 0..4 {
                        let idx = [a, b, c, d];
                        next[a][b][c][d] = (0..4)
                            .map(|i| {
                                let mut k = idx;
                                k[slot] = i;
                                m[i][idx[slot]] * cur[k[0]][k[1]][k[2]][k[3]]
                            })
                            .sum();
                    }
                }
            }
        }
        cur = next;
    }
    cur
}

fn curvature_in_chart(gj: &SymJet<4>) -> Result<Curvature4> {
    let g = connection::values(gj);
    let (ginv, det) = connection::invert(&g)?;
    if !(det > 0.0) {
        return Err(GeomError::Degenerate { det });
    }
    let lc = connection::levi_civita(gj)?;
    let r = connection::curvature(&lc);
    let mut riemann = [[[[0.0; 4]; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    riemann[a][b][c][d] = (0..4).map(|l| g[d][l] * r[l][c][a][b]).sum();
                }
            }
        }
    }
    let ricci = connection::ricci(&r);
    let ricci: Mat<4> =
        std::array::from_fn(|a| std::array::from_fn(|b| 0.5 * (ricci[a][b] + ricci[b][a])));
    let scal: f64 = (0..4)
        .flat_map(|a| (0..4).map(move |b| (a, b)))
        .map(|(a, b)| ginv[a][b] * ricci[a][b])
        .sum();
    // Schouten tensor P = ½(Ric − scal/6 g) in dimension four.
    let schouten: Mat<4> =
        std::array::from_fn(|a| std::array::from_fn(|b| 0.5 * (ricci[a][b] - scal / 6.0 * g[a][b])));
    let mut weyl = [[[[0.0; 4]; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let kn = schouten[b][c] * g[a][d] + schouten[a][d] * g[b][c]
                        - schouten[a][c] * g[b][d]
                        - schouten[b][d] * g[a][c];
                    weyl[a][b][c][d] = riemann[a][b][c][d] - kn;
                }
            }
        }
    }
    // ε_ab^{ef} = ε_abmn g^{me} g^{nf}
    let vol = det.sqrt();
    let mut eps_up = [[[[0.0; 4]; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            if a == b {
                continue;
            }
            for e in 0..4 {
                for f in 0..4 {
                    let mut s = 0.0;
                    for m in 0..4 {
                        for n in 0..4 {
                            let sym = levi_civita_symbol(&[a, b, m, n]);
                            if sym != 0.0 {
                                s += vol * sym * ginv[m][e] * ginv[n][f];
                            }
                        }
                    }
                    eps_up[a][b][e][f] = s;
                }
            }
        }
    }
    let mut star_w = [[[[0.0; 4]; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    let mut s = 0.0;
                    for e in 0..4 {
                        for f in 0..4 {
                            s += eps_up[a][b][e][f] * weyl[e][f][c][d];
                        }
                    }
                    star_w[a][b][c][d] = 0.5 * s;
                }
            }
        }
    }
    let mut weyl_sd = [[[[0.0; 4]; 4]; 4]; 4];
    let mut weyl_asd = [[[[0.0; 4]; 4]; 4]; 4];
    for a in 0..4 {
        for b in 0..4 {
            for c in 0..4 {
                for d in 0..4 {
                    weyl_sd[a][b][c][d] = 0.5 * (weyl[a][b][c][d] + star_w[a][b][c][d]);
                    weyl_asd[a][b][c][d] = 0.5 * (weyl[a][b][c][d] - star_w[a][b][c][d]);
                }
            }
        }
    }
    let weyl_norm2 = inner4(&weyl, &raise_all(&weyl, &ginv));
    let sd2 = inner4(&weyl_sd, &raise_all(&weyl_sd, &ginv));
    let asd2 = inner4(&weyl_asd, &raise_all(&weyl_asd, &ginv));
    Ok(Curvature4 {
        g,
        ginv,
        riemann,
        ricci,
        scal,
        weyl,
        weyl_sd,
        weyl_asd,
        weyl_sd_norm: sd2.max(0.0).sqrt(),
        weyl_asd_norm: asd2.max(0.0).sqrt(),
        weyl_norm2,
    })
}

#[cfg(test)]
mod tests;
