//! Affine connections in a coordinate chart, and their curvature.
//!
//! A connection is stored as `c[l][i][k]` with `∇_{∂_i} ∂_k = c[l][i][k] ∂_l`;
//! each coefficient is an order-one jet so that curvature can be assembled
//! from the coefficients and their first derivatives.
//!
//! Curvature follows `R(X,Y)Z = ∇_X ∇_Y Z − ∇_Y ∇_X Z − ∇_[X,Y] Z` and is
//! stored as `r[l][k][i][j]`, the `∂_l` component of `R(∂_i, ∂_j) ∂_k`.

use crate::jet::{Jet, Jet1};
use crate::{GeomError, Result};

pub type SymJet<const N: usize> = [[Jet<N>; N]; N];
pub type Mat<const N: usize> = [[f64; N]; N];
pub type Connection<const N: usize> = [[[Jet1<N>; N]; N]; N];
pub type Riemann<const N: usize> = [[[[f64; N]; N]; N]; N];

pub fn values<const N: usize>(g: &SymJet<N>) -> Mat<N> {
    std::array::from_fn(|i| std::array::from_fn(|j| g[i][j].value))
}

/// Inverse and determinant by Gauss-Jordan with partial pivoting.
pub fn invert<const N: usize>(m: &Mat<N>) -> Result<(Mat<N>, f64)> {
    let mut a = *m;
    let mut inv: Mat<N> = std::array::from_fn(|i| std::array::from_fn(|j| f64::from(i == j)));
    let mut det = 1.0;
    let scale = m.iter().flatten().fold(0.0_f64, |s, v| s.max(v.abs()));
    for col in 0..N {
        let piv = (col..N)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap_or(col);
        if !(a[piv][col].abs() > 1e-14 * scale) {
            return Err(GeomError::Degenerate { det: 0.0 });
        }
        if piv != col {
            a.swap(piv, col);
            inv.swap(piv, col);
            det = -det;
        }
        let p = a[col][col];
        det *= p;
        for j in 0..N {
            a[col][j] /= p;
            inv[col][j] /= p;
        }
        for r in 0..N {
            if r != col {
                let f = a[r][col];
                if f != 0.0 {
                    for j in 0..N {
                        a[r][j] -= f * a[col][j];
                        inv[r][j] -= f * inv[col][j];
                    }
                }
            }
        }
    }
    Ok((inv, det))
}

/// Inverse metric as order-one jets: `∂(g⁻¹) = −g⁻¹ (∂g) g⁻¹`.
pub fn inverse_jet1<const N: usize>(g: &SymJet<N>) -> Result<[[Jet1<N>; N]; N]> {
    let (ginv, _) = invert(&values(g))?;
    let mut out = [[Jet1::<N>::default(); N]; N];
    for a in 0..N {
        for b in 0..N {
            out[a][b].value = ginv[a][b];
            for m in 0..N {
                let mut s = 0.0;
                for c in 0..N {
                    for d in 0..N {
                        s += ginv[a][c] * g[c][d].grad[m] * ginv[d][b];
                    }
                }
                out[a][b].grad[m] = -s;
            }
        }
    }
    Ok(out)
}

/// Levi-Civita connection of a metric given by second order jets.
pub fn levi_civita<const N: usize>(g: &SymJet<N>) -> Result<Connection<N>> {
    let ginv = inverse_jet1(g)?;
    // Christoffel symbols of the first kind, [ik, m] = ½(∂_i g_mk + ∂_k g_mi − ∂_m g_ik).
    let mut first = [[[Jet1::<N>::default(); N]; N]; N];
    for i in 0..N {
        for k in i..N {
            for m in 0..N {
                let v = (g[m][k].partial(i) + g[m][i].partial(k) - g[i][k].partial(m)).scale(0.5);
                first[i][k][m] = v;
                first[k][i][m] = v;
            }
        }
    }
    let mut c = [[[Jet1::<N>::default(); N]; N]; N];
    for l in 0..N {
        for i in 0..N {
            for k in i..N {
                let mut s = Jet1::default();
                for m in 0..N {
                    s += ginv[l][m] * first[i][k][m];
                }
                c[l][i][k] = s;
                c[l][k][i] = s;
            }
        }
    }
    Ok(c)
}

/// Weyl connection of the gauge `(g, ω)` with `Dg = −2ω⊗g`:
/// `D_X Y = ∇_X Y + ω(X)Y + ω(Y)X − g(X,Y)ω♯`.
pub fn weyl<const N: usize>(g: &SymJet<N>, omega: &[Jet1<N>; N]) -> Result<Connection<N>> {
    let mut c = levi_civita(g)?;
    let ginv = inverse_jet1(g)?;
    let om = *omega;
    let sharp: [Jet1<N>; N] = std::array::from_fn(|l| {
        let mut s = Jet1::default();
        for m in 0..N {
            s += ginv[l][m] * om[m];
        }
        s
    });
    for l in 0..N {
        for i in 0..N {
            for k in 0..N {
                let mut t = c[l][i][k] - g[i][k].truncate() * sharp[l];
                if l == i {
                    t += om[k];
                }
                if l == k {
                    t += om[i];
                }
                c[l][i][k] = t;
            }
        }
    }
    Ok(c)
}

/// Curvature `r[l][k][i][j]` of an arbitrary connection.
pub fn curvature<const N: usize>(c: &Connection<N>) -> Riemann<N> {
    let mut r = [[[[0.0; N]; N]; N]; N];
    for l in 0..N {
        for k in 0..N {
            for i in 0..N {
                for j in 0..N {
                    if i == j {
                        continue;
                    }
                    let mut v = c[l][j][k].grad[i] - c[l][i][k].grad[j];
                    for m in 0..N {
                        v += c[l][i][m].value * c[m][j][k].value
                            - c[l][j][m].value * c[m][i][k].value;
                    }
                    r[l][k][i][j] = v;
                }
            }
        }
    }
    r
}

/// Ricci contraction `Ric(Y,Z) = tr(X ↦ R(X,Y)Z)`, i.e. `Ric_jk = r[i][k][i][j]`.
pub fn ricci<const N: usize>(r: &Riemann<N>) -> Mat<N> {
    std::array::from_fn(|j| std::array::from_fn(|k| (0..N).map(|i| r[i][k][i][j]).sum()))
}

/// Sign of the permutation `idx` of `0..n`, or zero on repeated entries.
pub fn levi_civita_symbol(idx: &[usize]) -> f64 {
    let n = idx.len();
    let mut sign = 1.0;
    for a in 0..n {
        for b in (a + 1)..n {
            if idx[a] == idx[b] {
                return 0.0;
            }
            if idx[a] > idx[b] {
                sign = -sign;
            }
        }
    }
    sign
}

/// `g^{ab} g^{cd} T_ac T_bd` for a 2-tensor.
pub fn norm2_2tensor<const N: usize>(ginv: &Mat<N>, t: &Mat<N>) -> f64 {
    let mut s = 0.0;
    for a in 0..N {
        for b in 0..N {
            for c in 0..N {
                for d in 0..N {
                    s += ginv[a][b] * ginv[c][d] * t[a][c] * t[b][d];
                }
            }
        }
    }
    s
}

pub fn norm2_covector<const N: usize>(ginv: &Mat<N>, v: &[f64; N]) -> f64 {
    let mut s = 0.0;
    for a in 0..N {
        for b in 0..N {
            s += ginv[a][b] * v[a] * v[b];
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::seed_point;

    fn round_sphere3(p: &[f64; 3]) -> SymJet<3> {
        let v = seed_point(p);
        let r2 = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
        let s = (1.0 + r2).powi(-2) * 4.0;
        std::array::from_fn(|i| std::array::from_fn(|j| if i == j { s } else { Jet::zero() }))
    }

    #[test]
    fn flat_metric_has_no_christoffels() {
        let g: SymJet<3> =
            std::array::from_fn(|i| std::array::from_fn(|j| Jet::constant(f64::from(i == j))));
        let c = levi_civita(&g).unwrap();
        assert!(c.iter().flatten().flatten().all(|x| x.value == 0.0));
        let r = curvature(&c);
        assert!(r.iter().flatten().flatten().flatten().all(|x| *x == 0.0));
    }

    #[test]
    fn unit_three_sphere_ricci_is_two_g() {
        let p = [0.3, -0.2, 0.5];
        let g = round_sphere3(&p);
        let ric = ricci(&curvature(&levi_civita(&g).unwrap()));
        let gv = values(&g);
        for a in 0..3 {
            for b in 0..3 {
                assert!((ric[a][b] - 2.0 * gv[a][b]).abs() < 1e-12, "{a}{b}");
            }
        }
    }

    #[test]
    fn inverse_matches() {
        let m = [[2.0, 0.5, 0.1], [0.5, 3.0, -0.2], [0.1, -0.2, 1.5]];
        let (inv, det) = invert(&m).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let s: f64 = (0..3).map(|k| m[i][k] * inv[k][j]).sum();
                assert!((s - f64::from(i == j)).abs() < 1e-14);
            }
        }
        let expect = 2.0 * (4.5 - 0.04) - 0.5 * (0.75 + 0.02) + 0.1 * (-0.1 - 0.3);
        assert!((det - expect).abs() < 1e-13);
        assert!(invert(&[[1.0, 2.0], [2.0, 4.0]]).is_err());
    }

    #[test]
    fn permutation_signs() {
        assert_eq!(levi_civita_symbol(&[0, 1, 2]), 1.0);
        assert_eq!(levi_civita_symbol(&[1, 0, 2]), -1.0);
        assert_eq!(levi_civita_symbol(&[1, 2, 0]), 1.0);
        assert_eq!(levi_civita_symbol(&[0, 0, 2]), 0.0);
        assert_eq!(levi_civita_symbol(&[3, 2, 1, 0]), 1.0);
    }
}
