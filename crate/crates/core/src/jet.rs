//! Truncated Taylor jets.
//!
//! [`Jet`] carries a value together with its exact gradient and Hessian in
//! `N` real coordinates. Every metric component, connection form and
//! residual in this crate is evaluated as a jet, so derivatives are exact up
//! to floating point rounding rather than finite-difference approximations.
//!
//! [`Jet1`] is the order-one truncation used for connection coefficients,
//! whose first derivatives are all that curvature assembly needs. [`CJet`]
//! is a complex jet built from a pair of real jets.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;

use crate::{GeomError, Result};

/// Second order jet in `N` coordinates. `hess` is kept exactly symmetric.
#[derive(Clone, Copy, PartialEq)]
pub struct Jet<const N: usize> {
    pub value: f64,
    pub grad: [f64; N],
    pub hess: [[f64; N]; N],
}

pub type Jet3 = Jet<3>;
pub type Jet4 = Jet<4>;

impl<const N: usize> fmt::Debug for Jet<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Jet")
            .field("value", &self.value)
            .field("grad", &self.grad)
            .field("hess", &self.hess)
            .finish()
    }
}

impl<const N: usize> Default for Jet<N> {
    fn default() -> Self {
        Self::constant(0.0)
    }
}

impl<const N: usize> From<f64> for Jet<N> {
    fn from(v: f64) -> Self {
        Self::constant(v)
    }
}

/// Seeds coordinate `i` at `x0`: value `x0`, gradient `e_i`, zero Hessian.
pub fn seed_coordinate<const N: usize>(i: usize, x0: f64) -> Result<Jet<N>> {
    if i >= N {
        return Err(GeomError::IndexOutOfRange { index: i, dim: N });
    }
    let mut j = Jet::constant(x0);
    j.grad[i] = 1.0;
    Ok(j)
}

/// All `N` coordinate jets seeded at `p`.
pub fn seed_point<const N: usize>(p: &[f64; N]) -> [Jet<N>; N] {
    std::array::from_fn(|i| {
        let mut j = Jet::constant(p[i]);
        j.grad[i] = 1.0;
        j
    })
}

impl<const N: usize> Jet<N> {
    pub const fn constant(value: f64) -> Self {
        Self {
            value,
            grad: [0.0; N],
            hess: [[0.0; N]; N],
        }
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite()
            && self.grad.iter().all(|g| g.is_finite())
            && self.hess.iter().flatten().all(|h| h.is_finite())
    }

    /// Composes a scalar function with derivatives `f0, f1, f2` at `self.value`.
    #[inline]
    pub fn chain(&self, f0: f64, f1: f64, f2: f64) -> Self {
        let mut out = Self::constant(f0);
        for i in 0..N {
            out.grad[i] = f1 * self.grad[i];
        }
        for i in 0..N {
            for j in i..N {
                let h = f1 * self.hess[i][j] + f2 * self.grad[i] * self.grad[j];
                out.hess[i][j] = h;
                out.hess[j][i] = h;
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        out.value *= s;
        out.grad.iter_mut().for_each(|g| *g *= s);
        out.hess.iter_mut().flatten().for_each(|h| *h *= s);
        out
    }

    pub fn exp(&self) -> Self {
        let e = self.value.exp();
        self.chain(e, e, e)
    }

    /// Natural log without a domain check; see [`Jet::try_ln`].
    pub fn ln(&self) -> Self {
        let v = self.value;
        self.chain(v.ln(), 1.0 / v, -1.0 / (v * v))
    }

    pub fn try_ln(&self) -> Result<Self> {
        if !(self.value > 0.0) {
            return Err(GeomError::Domain {
                what: "log of nonpositive value",
                value: self.value,
            });
        }
        Ok(self.ln())
    }

    pub fn sqrt(&self) -> Self {
        let s = self.value.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.value))
    }

    pub fn try_sqrt(&self) -> Result<Self> {
        if !(self.value > 0.0) {
            return Err(GeomError::Domain {
                what: "sqrt of nonpositive value",
                value: self.value,
            });
        }
        Ok(self.sqrt())
    }

    pub fn recip(&self) -> Self {
        let v = self.value;
        let r = 1.0 / v;
        self.chain(r, -r * r, 2.0 * r * r * r)
    }

    pub fn try_recip(&self) -> Result<Self> {
        if self.value == 0.0 || !self.value.is_finite() {
            return Err(GeomError::Domain {
                what: "division by zero",
                value: self.value,
            });
        }
        Ok(self.recip())
    }

    pub fn try_div(&self, rhs: &Self) -> Result<Self> {
        Ok(*self * rhs.try_recip()?)
    }

    pub fn powi(&self, n: i32) -> Self {
        match n {
            0 => Self::constant(1.0),
            1 => *self,
            _ => {
                let v = self.value;
                let nf = f64::from(n);
                self.chain(
                    v.powi(n),
                    nf * v.powi(n - 1),
                    nf * (nf - 1.0) * v.powi(n - 2),
                )
            }
        }
    }

    pub fn sin(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(&self) -> Self {
        let (s, c) = self.value.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn square(&self) -> Self {
        *self * *self
    }

    /// First partial `∂_k` as an order-one jet.
    pub fn partial(&self, k: usize) -> Jet1<N> {
        Jet1 {
            value: self.grad[k],
            grad: self.hess[k],
        }
    }

    pub fn truncate(&self) -> Jet1<N> {
        Jet1 {
            value: self.value,
            grad: self.grad,
        }
    }

    /// Embeds into `M ≥ N` coordinates, with no dependence on the extra ones.
    pub fn lift<const M: usize>(&self) -> Jet<M> {
        assert!(M >= N, "cannot lift a {N}-jet into {M} coordinates");
        let mut out = Jet::<M>::constant(self.value);
        out.grad[..N].copy_from_slice(&self.grad);
        for i in 0..N {
            out.hess[i][..N].copy_from_slice(&self.hess[i]);
        }
        out
    }

    /// Laplacian-style trace over a subset of coordinates.
    pub fn hess_trace(&self, idx: &[usize]) -> f64 {
        idx.iter().map(|&i| self.hess[i][i]).sum()
    }
}

impl<const N: usize> Add for Jet<N> {
    type Output = Self;
    #[inline]
    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl<const N: usize> AddAssign for Jet<N> {
    #[inline]
    fn add_assign(&mut self, rhs: Self) {
        self.value += rhs.value;
        for i in 0..N {
            self.grad[i] += rhs.grad[i];
            for j in 0..N {
                self.hess[i][j] += rhs.hess[i][j];
            }
        }
    }
}

impl<const N: usize> Sub for Jet<N> {
    type Output = Self;
    #[inline]
    fn sub(mut self, rhs: Self) -> Self {
        self -= rhs;
        self
    }
}

impl<const N: usize> SubAssign for Jet<N> {
    #[inline]
    fn sub_assign(&mut self, rhs: Self) {
        self.value -= rhs.value;
        for i in 0..N {
            self.grad[i] -= rhs.grad[i];
            for j in 0..N {
                self.hess[i][j] -= rhs.hess[i][j];
            }
        }
    }
}

impl<const N: usize> Mul for Jet<N> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        let (a, b) = (self.value, rhs.value);
        let mut out = Self::constant(a * b);
        for i in 0..N {
            out.grad[i] = self.grad[i] * b + a * rhs.grad[i];
        }
        for i in 0..N {
            for j in i..N {
                let h = self.hess[i][j] * b
                    + a * rhs.hess[i][j]
                    + self.grad[i] * rhs.grad[j]
                    + self.grad[j] * rhs.grad[i];
                out.hess[i][j] = h;
                out.hess[j][i] = h;
            }
        }
        out
    }
}

impl<const N: usize> MulAssign for Jet<N> {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl<const N: usize> Div for Jet<N> {
    type Output = Self;
    #[inline]
    fn div(self, rhs: Self) -> Self {
        self * rhs.recip()
    }
}

impl<const N: usize> Neg for Jet<N> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl<const N: usize> Add<f64> for Jet<N> {
    type Output = Self;
    fn add(mut self, rhs: f64) -> Self {
        self.value += rhs;
        self
    }
}

impl<const N: usize> Sub<f64> for Jet<N> {
    type Output = Self;
    fn sub(mut self, rhs: f64) -> Self {
        self.value -= rhs;
        self
    }
}

impl<const N: usize> Mul<f64> for Jet<N> {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self.scale(rhs)
    }
}

impl<const N: usize> Div<f64> for Jet<N> {
    type Output = Self;
    fn div(self, rhs: f64) -> Self {
        self.scale(1.0 / rhs)
    }
}

impl<const N: usize> Add<Jet<N>> for f64 {
    type Output = Jet<N>;
    fn add(self, rhs: Jet<N>) -> Jet<N> {
        rhs + self
    }
}

impl<const N: usize> Sub<Jet<N>> for f64 {
    type Output = Jet<N>;
    fn sub(self, rhs: Jet<N>) -> Jet<N> {
        -rhs + self
    }
}

impl<const N: usize> Mul<Jet<N>> for f64 {
    type Output = Jet<N>;
    fn mul(self, rhs: Jet<N>) -> Jet<N> {
        rhs.scale(self)
    }
}

impl<const N: usize> Div<Jet<N>> for f64 {
    type Output = Jet<N>;
    fn div(self, rhs: Jet<N>) -> Jet<N> {
        rhs.recip().scale(self)
    }
}

impl<const N: usize> std::iter::Sum for Jet<N> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |a, b| a + b)
    }
}

/// First order jet: value and gradient.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet1<const N: usize> {
    pub value: f64,
    pub grad: [f64; N],
}

impl<const N: usize> Default for Jet1<N> {
    fn default() -> Self {
        Self::constant(0.0)
    }
}

impl<const N: usize> Jet1<N> {
    pub const fn constant(value: f64) -> Self {
        Self {
            value,
            grad: [0.0; N],
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut out = *self;
        out.value *= s;
        out.grad.iter_mut().for_each(|g| *g *= s);
        out
    }

    pub fn recip(&self) -> Self {
        let r = 1.0 / self.value;
        let mut out = Self::constant(r);
        for i in 0..N {
            out.grad[i] = -r * r * self.grad[i];
        }
        out
    }
}

impl<const N: usize> Add for Jet1<N> {
    type Output = Self;
    #[inline]
    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl<const N: usize> AddAssign for Jet1<N> {
    #[inline]
    fn add_assign(&mut self, rhs: Self) {
        self.value += rhs.value;
        for i in 0..N {
            self.grad[i] += rhs.grad[i];
        }
    }
}

impl<const N: usize> Sub for Jet1<N> {
    type Output = Self;
    #[inline]
    fn sub(mut self, rhs: Self) -> Self {
        self -= rhs;
        self
    }
}

impl<const N: usize> SubAssign for Jet1<N> {
    #[inline]
    fn sub_assign(&mut self, rhs: Self) {
        self.value -= rhs.value;
        for i in 0..N {
            self.grad[i] -= rhs.grad[i];
        }
    }
}

impl<const N: usize> Mul for Jet1<N> {
    type Output = Self;
    #[inline]
    fn mul(self, rhs: Self) -> Self {
        let mut out = Self::constant(self.value * rhs.value);
        for i in 0..N {
            out.grad[i] = self.grad[i] * rhs.value + self.value * rhs.grad[i];
        }
        out
    }
}

impl<const N: usize> Mul<f64> for Jet1<N> {
    type Output = Self;
    fn mul(self, rhs: f64) -> Self {
        self.scale(rhs)
    }
}

impl<const N: usize> Neg for Jet1<N> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

/// Complex jet `re + i·im`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct CJet<const N: usize> {
    pub re: Jet<N>,
    pub im: Jet<N>,
}

impl<const N: usize> CJet<N> {
    pub fn new(re: Jet<N>, im: Jet<N>) -> Self {
        Self { re, im }
    }

    pub fn constant(c: Complex64) -> Self {
        Self {
            re: Jet::constant(c.re),
            im: Jet::constant(c.im),
        }
    }

    pub fn from_real(re: Jet<N>) -> Self {
        Self {
            re,
            im: Jet::zero(),
        }
    }

    /// `ζ = x + iy` seeded on coordinates `ix`, `iy` of the point `p`.
    pub fn holomorphic_coordinate(p: &[f64; N], ix: usize, iy: usize) -> Self {
        let vars = seed_point(p);
        Self {
            re: vars[ix],
            im: vars[iy],
        }
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value, self.im.value)
    }

    /// Complex conjugate. All conjugate quantities in the crate go through here.
    pub fn conj(&self) -> Self {
        Self {
            re: self.re,
            im: -self.im,
        }
    }

    pub fn norm_sqr(&self) -> Jet<N> {
        self.re * self.re + self.im * self.im
    }

    /// Multiplication by `i`.
    pub fn mul_i(&self) -> Self {
        Self {
            re: -self.im,
            im: self.re,
        }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            re: self.re.scale(s),
            im: self.im.scale(s),
        }
    }

    pub fn mul_real(&self, r: &Jet<N>) -> Self {
        Self {
            re: self.re * *r,
            im: self.im * *r,
        }
    }

    pub fn recip(&self) -> Self {
        let d = self.norm_sqr().recip();
        Self {
            re: self.re * d,
            im: -(self.im * d),
        }
    }

    pub fn try_recip(&self) -> Result<Self> {
        let n = self.norm_sqr();
        if n.value == 0.0 || !n.value.is_finite() {
            return Err(GeomError::Domain {
                what: "complex division by zero",
                value: n.value,
            });
        }
        Ok(self.recip())
    }

    pub fn try_div(&self, rhs: &Self) -> Result<Self> {
        Ok(*self * rhs.try_recip()?)
    }
}

impl<const N: usize> Add for CJet<N> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self {
            re: self.re + rhs.re,
            im: self.im + rhs.im,
        }
    }
}

impl<const N: usize> Sub for CJet<N> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self {
            re: self.re - rhs.re,
            im: self.im - rhs.im,
        }
    }
}

impl<const N: usize> Mul for CJet<N> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self {
            re: self.re * rhs.re - self.im * rhs.im,
            im: self.re * rhs.im + self.im * rhs.re,
        }
    }
}

impl<const N: usize> Div for CJet<N> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        self * rhs.recip()
    }
}

impl<const N: usize> Neg for CJet<N> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-1.0)
    }
}

impl<const N: usize> Add<Complex64> for CJet<N> {
    type Output = Self;
    fn add(mut self, rhs: Complex64) -> Self {
        self.re.value += rhs.re;
        self.im.value += rhs.im;
        self
    }
}

impl<const N: usize> Add<Jet<N>> for CJet<N> {
    type Output = Self;
    fn add(mut self, rhs: Jet<N>) -> Self {
        self.re += rhs;
        self
    }
}

/// Compares jet derivatives of `expr` at `p` against central finite
/// differences with the given step.
///
/// First partials are differenced from values, second partials from the
/// jet gradient at the stencil points, which keeps the roundoff floor near
/// `ε/step` instead of `ε/step²`. Returns `max |jet - fd| / (1 + |jet|)`.
/// Evaluation errors anywhere in the stencil propagate.
pub fn fd_crosscheck<const N: usize, F>(expr: F, p: &[f64; N], step: f64) -> Result<f64>
where
    F: Fn(&[f64; N]) -> Result<Jet<N>>,
{
    let jet = expr(p)?;
    let at = |i: usize, d: f64| -> Result<Jet<N>> {
        let mut q = *p;
        q[i] += d;
        expr(&q)
    };
    let rel = |exact: f64, approx: f64| (exact - approx).abs() / (1.0 + exact.abs());

    let mut worst = 0.0_f64;
    for i in 0..N {
        let fp = at(i, step)?;
        let fm = at(i, -step)?;
        worst = worst.max(rel(jet.grad[i], (fp.value - fm.value) / (2.0 * step)));
        for j in 0..N {
            let fd = (fp.grad[j] - fm.grad[j]) / (2.0 * step);
            worst = worst.max(rel(jet.hess[i][j], fd));
        }
    }
    Ok(worst)
}
