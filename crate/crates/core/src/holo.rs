//! Rational holomorphic functions of the stereographic coordinate `ζ = x + iy`
//! and the round geometry of `S²` in that chart.
//!
//! Every chart in the crate places `x` and `y` in coordinate slots 0 and 1,
//! so the helpers here are generic over the jet dimension.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::jet::{seed_point, CJet, Jet};
use crate::{GeomError, Result, EPS_CHART};

/// `numerator(ζ) / denominator(ζ)`, coefficients in ascending powers.
#[derive(Clone, Debug, PartialEq)]
pub struct HoloFn {
    numerator: Vec<Complex64>,
    denominator: Vec<Complex64>,
}

fn trim(mut c: Vec<Complex64>) -> Vec<Complex64> {
    while c.len() > 1 && c.last().is_some_and(|z| *z == Complex64::new(0.0, 0.0)) {
        c.pop();
    }
    if c.is_empty() {
        c.push(Complex64::new(0.0, 0.0));
    }
    c
}

fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_deriv(a: &[Complex64]) -> Vec<Complex64> {
    if a.len() <= 1 {
        return vec![Complex64::new(0.0, 0.0)];
    }
    a.iter()
        .enumerate()
        .skip(1)
        .map(|(k, c)| c * k as f64)
        .collect()
}

fn poly_sub(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|k| {
            a.get(k).copied().unwrap_or_default() - b.get(k).copied().unwrap_or_default()
        })
        .collect()
}

fn horner_value(c: &[Complex64], z: Complex64) -> Complex64 {
    c.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, a| acc * z + a)
}

fn horner_jet<const N: usize>(c: &[Complex64], z: &CJet<N>) -> CJet<N> {
    let mut acc = CJet::constant(*c.last().expect("nonempty polynomial"));
    for a in c.iter().rev().skip(1) {
        acc = acc * *z + *a;
    }
    acc
}

impl HoloFn {
    pub fn new(numerator: Vec<Complex64>, denominator: Vec<Complex64>) -> Result<Self> {
        let numerator = trim(numerator);
        let denominator = trim(denominator);
        if denominator.iter().all(|c| *c == Complex64::new(0.0, 0.0)) {
            return Err(GeomError::InvalidParameter(
                "denominator is the zero polynomial".into(),
            ));
        }
        if numerator
            .iter()
            .chain(denominator.iter())
            .any(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(GeomError::InvalidParameter("non-finite coefficient".into()));
        }
        Ok(Self {
            numerator,
            denominator,
        })
    }

    pub fn constant(c: Complex64) -> Self {
        Self::polynomial(vec![c])
    }

    pub fn real(c: f64) -> Self {
        Self::constant(Complex64::new(c, 0.0))
    }

    /// `ζ` itself.
    pub fn identity() -> Self {
        Self::polynomial(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)])
    }

    pub fn polynomial(coeffs: Vec<Complex64>) -> Self {
        Self::new(coeffs, vec![Complex64::new(1.0, 0.0)]).expect("unit denominator")
    }

    pub fn numerator(&self) -> &[Complex64] {
        &self.numerator
    }

    pub fn denominator(&self) -> &[Complex64] {
        &self.denominator
    }

    pub fn is_polynomial(&self) -> bool {
        self.denominator.len() == 1
    }

    pub fn is_constant(&self) -> bool {
        self.numerator.len() == 1 && self.denominator.len() == 1
    }

    /// `a·self + b`.
    pub fn affine(&self, a: f64, b: f64) -> Self {
        let scaled: Vec<_> = self.numerator.iter().map(|c| c * a).collect();
        let shifted: Vec<_> = self.denominator.iter().map(|c| c * b).collect();
        let n = scaled.len().max(shifted.len());
        let num = (0..n)
            .map(|k| {
                scaled.get(k).copied().unwrap_or_default()
                    + shifted.get(k).copied().unwrap_or_default()
            })
            .collect();
        Self::new(num, self.denominator.clone()).expect("denominator unchanged")
    }

    /// `1 / self`.
    pub fn recip(&self) -> Result<Self> {
        Self::new(self.denominator.clone(), self.numerator.clone())
    }

    /// Quotient-rule derivative `d/dζ`.
    pub fn derivative(&self) -> Self {
        if self.denominator.len() == 1 {
            let d0 = self.denominator[0];
            let num = poly_deriv(&self.numerator).into_iter().map(|c| c / d0).collect();
            return Self::polynomial(num);
        }
        let num = poly_sub(
            &poly_mul(&poly_deriv(&self.numerator), &self.denominator),
            &poly_mul(&self.numerator, &poly_deriv(&self.denominator)),
        );
        let den = poly_mul(&self.denominator, &self.denominator);
        Self::new(num, den).expect("square of a nonzero polynomial")
    }

    fn check_pole(&self, z: Complex64, den: Complex64) -> Result<()> {
        let scale: f64 = self
            .denominator
            .iter()
            .enumerate()
            .map(|(k, c)| c.norm() * z.norm().powi(k as i32))
            .sum::<f64>()
            .max(1.0);
        if den.norm() <= 1e-13 * scale {
            return Err(GeomError::Domain {
                what: "pole of holomorphic function",
                value: z.norm(),
            });
        }
        Ok(())
    }

    pub fn eval_value(&self, z: Complex64) -> Result<Complex64> {
        let den = horner_value(&self.denominator, z);
        self.check_pole(z, den)?;
        Ok(horner_value(&self.numerator, z) / den)
    }

    /// Evaluates at the complex jet `z`.
    pub fn eval_jet<const N: usize>(&self, z: &CJet<N>) -> Result<CJet<N>> {
        let den = horner_jet(&self.denominator, z);
        self.check_pole(z.value(), den.value())?;
        let num = horner_jet(&self.numerator, z);
        if self.denominator.len() == 1 {
            let inv = 1.0 / self.denominator[0];
            return Ok(num * CJet::constant(inv));
        }
        num.try_div(&den)
    }

    /// Evaluates at `ζ = p[0] + i p[1]` with derivatives in every coordinate.
    pub fn eval<const N: usize>(&self, p: &[f64; N]) -> Result<CJet<N>> {
        self.eval_jet(&zeta(p))
    }
}

/// Stereographic coordinate `ζ = x + iy` as a complex jet.
pub fn zeta<const N: usize>(p: &[f64; N]) -> CJet<N> {
    CJet::holomorphic_coordinate(p, 0, 1)
}

/// `hf(ζ(p))` together with derivatives in all chart coordinates.
pub fn holo_eval<const N: usize>(hf: &HoloFn, p: &[f64; N]) -> Result<CJet<N>> {
    hf.eval(p)
}

pub fn holo_derivative(hf: &HoloFn) -> HoloFn {
    hf.derivative()
}

/// Conformal factor `4/(1+|ζ|²)²` of the unit round metric of `S²`.
pub fn sphere_conformal_factor<const N: usize>(p: &[f64; N]) -> Jet<N> {
    let v = seed_point(p);
    let r2 = v[0] * v[0] + v[1] * v[1];
    (1.0 + r2).powi(-2) * 4.0
}

/// Components `g_{S²}` on `(dx, dy)`.
pub fn sphere_metric<const N: usize>(p: &[f64; N]) -> [[Jet<N>; 2]; 2] {
    let s = sphere_conformal_factor(p);
    [[s, Jet::zero()], [Jet::zero(), s]]
}

/// Density of `vol_{S²} = 2i dζ∧dζ̄/(1+ζζ̄)²` against `dx∧dy`.
pub fn sphere_volume<const N: usize>(p: &[f64; N]) -> Jet<N> {
    let v = seed_point(p);
    let r2 = v[0] * v[0] + v[1] * v[1];
    (1.0 + r2).powi(2).recip() * 4.0
}

/// The 1-form `β = dt + i/(1+ζζ̄)(f dζ/ζ − f̄ dζ̄/ζ̄)`.
#[derive(Clone, Copy, Debug)]
pub struct BetaForm<const N: usize> {
    pub dx: Jet<N>,
    pub dy: Jet<N>,
    pub dt: Jet<N>,
}

/// Evaluates the explicit potential `β` for `f` at `p`.
///
/// With `A = i f / (ζ (1+ζζ̄))` the form is `dt + 2 Re A dx − 2 Im A dy`,
/// which satisfies `dβ = ½(f+f̄) vol_{S²}`.
pub fn beta_potential<const N: usize>(f: &HoloFn, p: &[f64; N]) -> Result<BetaForm<N>> {
    let z = zeta(p);
    let r2 = p[0] * p[0] + p[1] * p[1];
    if r2.sqrt() < EPS_CHART {
        return Err(GeomError::Domain {
            what: "beta potential is singular at the chart center",
            value: r2.sqrt(),
        });
    }
    let fv = f.eval_jet(&z)?;
    let denom = z.mul_real(&(z.norm_sqr() + 1.0));
    let a = fv.mul_i().try_div(&denom)?;
    Ok(BetaForm {
        dx: a.re.scale(2.0),
        dy: a.im.scale(-2.0),
        dt: Jet::constant(1.0),
    })
}

fn parse_real(s: &str, offset: usize) -> Result<f64> {
    let t = s.trim();
    t.parse::<f64>().map_err(|_| GeomError::Parse {
        pos: offset,
        msg: format!("invalid real number `{t}`"),
    })
}

/// Parses a complex literal `RE`, `RE+IMi` or `RE-IMi`.
pub fn parse_complex(s: &str, offset: usize) -> Result<Complex64> {
    let t = s.trim();
    if t.is_empty() {
        return Err(GeomError::Parse {
            pos: offset,
            msg: "empty coefficient".into(),
        });
    }
    let lead = s.len() - s.trim_start().len();
    let Some(body) = t.strip_suffix('i') else {
        return Ok(Complex64::new(parse_real(t, offset + lead)?, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| {
            (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E')
        })
        .ok_or_else(|| GeomError::Parse {
            pos: offset + lead,
            msg: format!("complex literal `{t}` must have the form RE+IMi or RE-IMi"),
        })?;
    let re = parse_real(&body[..split], offset + lead)?;
    let im_str = &body[split..];
    let im = match im_str {
        "+" => 1.0,
        "-" => -1.0,
        _ => parse_real(im_str, offset + lead + split)?,
    };
    Ok(Complex64::new(re, im))
}

fn parse_coeff_list(s: &str, offset: usize) -> Result<Vec<Complex64>> {
    let mut out = Vec::new();
    let mut pos = offset;
    for part in s.split(',') {
        out.push(parse_complex(part, pos)?);
        pos += part.len() + 1;
    }
    Ok(out)
}

fn parse_poly(s: &str, offset: usize) -> Result<Vec<Complex64>> {
    let body = s.strip_prefix("poly:").ok_or_else(|| GeomError::Parse {
        pos: offset,
        msg: "expected `poly:`".into(),
    })?;
    parse_coeff_list(body, offset + 5)
}

impl FromStr for HoloFn {
    type Err = GeomError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(body) = s.strip_prefix("const:") {
            return Ok(Self::constant(parse_complex(body, 6)?));
        }
        if s.starts_with("poly:") {
            return Ok(Self::polynomial(parse_poly(s, 0)?));
        }
        if let Some(body) = s.strip_prefix("ratio:") {
            let slash = body.find('/').ok_or_else(|| GeomError::Parse {
                pos: 6,
                msg: "ratio needs `/` between numerator and denominator".into(),
            })?;
            let num = parse_poly(&body[..slash], 6)?;
            let den = parse_poly(&body[slash + 1..], 6 + slash + 1)?;
            return Self::new(num, den).map_err(|e| GeomError::Parse {
                pos: 6 + slash + 1,
                msg: e.to_string(),
            });
        }
        Err(GeomError::Parse {
            pos: 0,
            msg: format!("`{s}` must start with const:, poly: or ratio:"),
        })
    }
}

/// Formats a complex literal so that parsing it back is bit-exact.
pub fn format_complex(c: Complex64) -> String {
    if c.im == 0.0 && c.im.is_sign_positive() {
        format!("{:?}", c.re)
    } else if c.im.is_sign_negative() {
        format!("{:?}-{:?}i", c.re, -c.im)
    } else {
        format!("{:?}+{:?}i", c.re, c.im)
    }
}

fn format_list(c: &[Complex64]) -> String {
    c.iter().map(|z| format_complex(*z)).collect::<Vec<_>>().join(",")
}

impl fmt::Display for HoloFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let unit_den = self.denominator == [Complex64::new(1.0, 0.0)];
        if unit_den && self.numerator.len() == 1 {
            write!(f, "const:{}", format_complex(self.numerator[0]))
        } else if unit_den {
            write!(f, "poly:{}", format_list(&self.numerator))
        } else {
            write!(
                f,
                "ratio:poly:{}/poly:{}",
                format_list(&self.numerator),
                format_list(&self.denominator)
            )
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constant_has_no_derivatives() {
        let hf = HoloFn::constant(c(1.0, 2.0));
        let v = hf.eval(&[0.3, 0.4, 1.0]).unwrap();
        assert_eq!(v.value(), c(1.0, 2.0));
        assert!(v.re.grad.iter().chain(v.im.grad.iter()).all(|g| *g == 0.0));
    }

    #[test]
    fn identity_derivatives() {
        let v = HoloFn::identity().eval(&[0.3, 0.4, 1.0]).unwrap();
        assert_eq!(v.value(), c(0.3, 0.4));
        // ∂x ζ = 1, ∂y ζ = i
        assert_eq!((v.re.grad[0], v.im.grad[0]), (1.0, 0.0));
        assert_eq!((v.re.grad[1], v.im.grad[1]), (0.0, 1.0));
    }

    #[test]
    fn reciprocal_of_zeta_at_one() {
        let hf: HoloFn = "ratio:poly:1/poly:0,1".parse().unwrap();
        let v = hf.eval(&[1.0, 0.0, 0.0]).unwrap();
        assert!((v.value() - c(1.0, 0.0)).norm() < 1e-15);
        assert!((v.re.grad[0] + 1.0).abs() < 1e-15);
    }

    #[test]
    fn pole_is_a_domain_error() {
        let hf: HoloFn = "ratio:poly:1/poly:0,1".parse().unwrap();
        assert!(matches!(
            hf.eval(&[0.0, 0.0, 1.0]),
            Err(GeomError::Domain { .. })
        ));
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(HoloFn::new(vec![c(1.0, 0.0)], vec![c(0.0, 0.0)]).is_err());
        assert!("ratio:poly:1/poly:0,0".parse::<HoloFn>().is_err());
    }

    #[test]
    fn derivative_closed_forms() {
        let sq = HoloFn::polynomial(vec![c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(sq.derivative(), HoloFn::polynomial(vec![c(0.0, 0.0), c(2.0, 0.0)]));

        let inv: HoloFn = "ratio:poly:1/poly:1,1".parse().unwrap();
        let d = inv.derivative();
        for z in [c(0.3, 0.1), c(-0.4, 0.9), c(2.0, -1.0)] {
            let expect = -1.0 / ((1.0 + z) * (1.0 + z));
            assert!((d.eval_value(z).unwrap() - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn grammar_examples() {
        assert_eq!(parse_complex("1", 0).unwrap(), c(1.0, 0.0));
        assert_eq!(parse_complex("1+2i", 0).unwrap(), c(1.0, 2.0));
        assert_eq!(parse_complex("0-0.5i", 0).unwrap(), c(0.0, -0.5));
        assert_eq!(parse_complex("1e-3+2e+1i", 0).unwrap(), c(1e-3, 20.0));
        let h: HoloFn = "poly:1,0+1i".parse().unwrap();
        assert_eq!(h.numerator(), &[c(1.0, 0.0), c(0.0, 1.0)]);
        let k: HoloFn = "const:1+2i".parse().unwrap();
        assert!(k.is_constant());
    }

    #[test]
    fn parse_errors_report_column() {
        match "poly:1,abc".parse::<HoloFn>() {
            Err(GeomError::Parse { pos, .. }) => assert_eq!(pos, 7),
            other => panic!("{other:?}"),
        }
        match "ratio:poly:1,2/poly:x".parse::<HoloFn>() {
            Err(GeomError::Parse { pos, .. }) => assert_eq!(pos, 20),
            other => panic!("{other:?}"),
        }
        assert!(matches!("sin:1".parse::<HoloFn>(), Err(GeomError::Parse { pos: 0, .. })));
        assert!("poly:1+2j".parse::<HoloFn>().is_err());
    }

    #[test]
    fn sphere_metric_values() {
        let g = sphere_metric(&[0.0, 0.0, 1.0]);
        assert_eq!(g[0][0].value, 4.0);
        assert_eq!(g[1][1].value, 4.0);
        assert_eq!(g[0][1].value, 0.0);
        let g = sphere_metric(&[0.6, 0.8, 1.0]);
        assert!((g[0][0].value - 1.0).abs() < 1e-15);
        let p = [0.31, -1.7, 0.0];
        assert!((sphere_volume(&p).value - sphere_conformal_factor(&p).value).abs() < 1e-15);
    }

    #[test]
    fn sphere_area_by_quadrature() {
        // r = tan s maps [0, π/2) onto the whole chart; composite Simpson in s.
        let n = 2000;
        let h = std::f64::consts::FRAC_PI_2 / n as f64;
        let integrand = |s: f64| {
            let r = s.tan();
            let sec2 = 1.0 + r * r;
            if !sec2.is_finite() {
                return 0.0;
            }
            let dens = sphere_volume(&[r, 0.0, 0.0]).value;
            2.0 * std::f64::consts::PI * dens * r * sec2
        };
        let mut sum = integrand(0.0) + integrand(std::f64::consts::FRAC_PI_2);
        for k in 1..n {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            sum += w * integrand(k as f64 * h);
        }
        let area = sum * h / 3.0;
        assert!((area - 4.0 * std::f64::consts::PI).abs() < 1e-6, "{area}");
    }

    #[test]
    fn beta_for_unit_f_at_one() {
        let b = beta_potential(&HoloFn::real(1.0), &[1.0, 0.0, 0.0]).unwrap();
        assert!(b.dx.value.abs() < 1e-15);
        assert!((b.dy.value + 1.0).abs() < 1e-15);
        assert_eq!(b.dt.value, 1.0);
    }

    #[test]
    fn beta_imaginary_f_is_closed() {
        let b = beta_potential(&HoloFn::constant(c(0.0, 1.0)), &[0.4, -0.3, 0.0]).unwrap();
        assert!((b.dy.grad[0] - b.dx.grad[1]).abs() < 1e-12);
    }

    #[test]
    fn beta_chart_center_excluded() {
        assert!(beta_potential(&HoloFn::real(1.0), &[1e-4, 0.0, 0.0]).is_err());
    }
}
