//! Per-family verification suites over seeded admissible samples.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::connection::SymJet;
use crate::conventions::{
    DEFAULT_SEED, EINSTEIN_SCAL_RATIO, FLAT_CONNECTION_SIGN, HYPERCR_SCAL_CONSTANT,
    PEDERSEN_VANISHING_HALF, SFK_VANISHING_HALF,
};
use crate::ew3::{
    self, congruence_invariants, flat_connection_residual, hypercr_residual, liouville_residual,
    monopole_residual, ricci_weyl, special_monopole_identity, strachan_monopole,
    theta_consistency, toda_residual, weyl_connection, TodaFamily, WeylStructure3,
};
use crate::geom4::{self, Metric4, WeylHalf};
use crate::holo::HoloFn;
use crate::jet::{fd_crosscheck, Jet};
use crate::report::{PointRecord, Report, FD_RESIDUAL};
use crate::sampling::{map_points, Region, Sampler};
use crate::{GeomError, Point3, Point4, Result, DELTA_POS};

pub const DEFAULT_TOL: f64 = 1e-8;
pub const DEFAULT_SAMPLES: usize = 20;
pub const DEFAULT_Z_RANGE: (f64, f64) = (0.2, 3.0);
pub const DEFAULT_ZETA_RANGE: (f64, f64) = (0.1, 0.5);
pub const FD_STEP: f64 = 1e-5;

/// Heights used for the Pedersen correspondence.
pub const CORRESPONDENCE_HEIGHTS: [f64; 3] = [0.25, 4.0, 100.0];

/// Scales used for the linearity of the Einstein scalar curvature in `a`.
pub const EINSTEIN_SCALES: [f64; 3] = [0.5, 1.0, 2.0];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    HypercrToda,
    GeodesicSymmetry,
    Berger,
    LebrunWardCustom,
    Sfk,
    Einstein,
    Pedersen,
}

impl Family {
    pub const ALL: [Family; 7] = [
        Family::HypercrToda,
        Family::GeodesicSymmetry,
        Family::Berger,
        Family::LebrunWardCustom,
        Family::Sfk,
        Family::Einstein,
        Family::Pedersen,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::HypercrToda => "hypercr-toda",
            Family::GeodesicSymmetry => "geodesic-symmetry",
            Family::Berger => "berger",
            Family::LebrunWardCustom => "lebrun-ward-custom",
            Family::Sfk => "sfk",
            Family::Einstein => "einstein",
            Family::Pedersen => "pedersen",
        }
    }

    pub fn dim(self) -> usize {
        match self {
            Family::Sfk | Family::Einstein | Family::Pedersen => 4,
            _ => 3,
        }
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = GeomError;

    fn from_str(s: &str) -> Result<Self> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s.trim())
            .ok_or_else(|| {
                let names: Vec<_> = Family::ALL.iter().map(|f| f.name()).collect();
                GeomError::InvalidParameter(format!(
                    "unknown family `{s}` (expected one of {})",
                    names.join(", ")
                ))
            })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub family: Family,
    pub h: Option<HoloFn>,
    pub f: Option<HoloFn>,
    pub big_f: Option<HoloFn>,
    pub big_h: Option<HoloFn>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub m: Option<f64>,
    pub samples: usize,
    pub seed: u64,
    pub tol: f64,
    pub z_range: (f64, f64),
    pub zeta_range: (f64, f64),
}

pub fn parse_seed(s: &str) -> Result<u64> {
    let t = s.trim();
    let parsed = match t.strip_prefix("0x").or_else(|| t.strip_prefix("0X")) {
        Some(hex) => u64::from_str_radix(hex, 16),
        None => t.parse(),
    };
    parsed.map_err(|_| GeomError::InvalidParameter(format!("invalid seed `{t}`")))
}

fn parse_real(key: &str, s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| GeomError::InvalidParameter(format!("{key}: invalid number `{s}`")))?;
    if !v.is_finite() {
        return Err(GeomError::InvalidParameter(format!("{key}: `{s}` is not finite")));
    }
    Ok(v)
}

fn parse_holo(key: &str, s: &str) -> Result<HoloFn> {
    s.parse().map_err(|e| match e {
        GeomError::Parse { pos, msg } => GeomError::Parse {
            pos,
            msg: format!("{key}: {msg} in `{s}`"),
        },
        other => other,
    })
}

impl RunConfig {
    pub fn new(family: Family) -> Self {
        Self {
            family,
            h: None,
            f: None,
            big_f: None,
            big_h: None,
            a: None,
            b: None,
            m: None,
            samples: DEFAULT_SAMPLES,
            seed: DEFAULT_SEED,
            tol: DEFAULT_TOL,
            z_range: DEFAULT_Z_RANGE,
            zeta_range: DEFAULT_ZETA_RANGE,
        }
    }

    /// Sets one parameter by its flag name (without dashes).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "family" => self.family = value.parse()?,
            "h" => self.h = Some(parse_holo(key, value)?),
            "f" => self.f = Some(parse_holo(key, value)?),
            "F" => self.big_f = Some(parse_holo(key, value)?),
            "H" => self.big_h = Some(parse_holo(key, value)?),
            "a" => self.a = Some(parse_real(key, value)?),
            "b" => self.b = Some(parse_real(key, value)?),
            "m" => self.m = Some(parse_real(key, value)?),
            "samples" => {
                self.samples = value.trim().parse().map_err(|_| {
                    GeomError::InvalidParameter(format!("samples: invalid count `{value}`"))
                })?
            }
            "seed" => self.seed = parse_seed(value)?,
            "tol" => self.tol = parse_real(key, value)?,
            "z-min" => self.z_range.0 = parse_real(key, value)?,
            "z-max" => self.z_range.1 = parse_real(key, value)?,
            "zeta-min" => self.zeta_range.0 = parse_real(key, value)?,
            "zeta-max" => self.zeta_range.1 = parse_real(key, value)?,
            _ => {
                return Err(GeomError::InvalidParameter(format!("unknown key `{key}`")));
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(GeomError::InvalidParameter("samples must be positive".into()));
        }
        if !(self.tol > 0.0) {
            return Err(GeomError::InvalidParameter("tol must be positive".into()));
        }
        let (z0, z1) = self.z_range;
        if !(z0 <= z1) {
            return Err(GeomError::InvalidParameter(format!("empty z range [{z0}, {z1}]")));
        }
        let (r0, r1) = self.zeta_range;
        if !(r0 >= 0.0 && r0 <= r1) {
            return Err(GeomError::InvalidParameter(format!("bad ζ annulus [{r0}, {r1}]")));
        }
        Ok(())
    }

    fn need_holo(&self, v: &Option<HoloFn>, key: &str) -> Result<HoloFn> {
        v.clone().ok_or_else(|| {
            GeomError::InvalidParameter(format!("family {} needs --{key}", self.family))
        })
    }

    fn need_real(&self, v: Option<f64>, key: &str) -> Result<f64> {
        v.ok_or_else(|| GeomError::InvalidParameter(format!("family {} needs --{key}", self.family)))
    }

    /// Every parameter, defaults included, as printed into reports.
    pub fn params(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_owned(), v);
        };
        for (k, v) in [("h", &self.h), ("f", &self.f), ("F", &self.big_f), ("H", &self.big_h)] {
            if let Some(v) = v {
                put(k, v.to_string());
            }
        }
        for (k, v) in [("a", self.a), ("b", self.b), ("m", self.m)] {
            if let Some(v) = v {
                put(k, format!("{v:?}"));
            }
        }
        put("family", self.family.to_string());
        put("samples", self.samples.to_string());
        put("seed", format!("{:#x}", self.seed));
        put("tol", format!("{:e}", self.tol));
        put("z-min", format!("{:?}", self.z_range.0));
        put("z-max", format!("{:?}", self.z_range.1));
        put("zeta-min", format!("{:?}", self.zeta_range.0));
        put("zeta-max", format!("{:?}", self.zeta_range.1));
        m
    }
}

type Accept = Arc<dyn Fn(&Point4) -> Result<()> + Send + Sync>;
type Eval = Arc<dyn Fn(&Point4) -> Result<PointRecord> + Send + Sync>;
type Globals = Arc<dyn Fn(&[PointRecord]) -> Result<GlobalRecord> + Send + Sync>;
type Components = Arc<dyn Fn(&Point4) -> Result<Vec<(String, f64)>> + Send + Sync>;

#[derive(Default)]
pub struct GlobalRecord {
    pub residuals: BTreeMap<String, f64>,
    pub summary: BTreeMap<String, f64>,
}

/// A prepared family: where to sample, what is admissible, and what to
/// evaluate at each point.
#[derive(Clone)]
pub struct Suite {
    pub family: Family,
    pub region: Region<4>,
    /// Names of the sampled coordinates; unused trailing entries are empty.
    pub coords: [&'static str; 4],
    accept: Accept,
    components: Components,
    eval: Eval,
    globals: Globals,
}

fn p3(p: &Point4) -> Point3 {
    [p[0], p[1], p[2]]
}

/// Domain check at `p` and at `p ± 2·FD_STEP` along every axis.
fn with_stencil(dim: usize, domain: Accept) -> Accept {
    Arc::new(move |p: &Point4| {
        domain(p)?;
        for i in 0..dim {
            for s in [-2.0, 2.0] {
                let mut q = *p;
                q[i] += s * FD_STEP;
                domain(&q)?;
            }
        }
        Ok(())
    })
}

fn fd_metric3(metric: &dyn Fn(&Point3) -> Result<SymJet<3>>, p: &Point3) -> Result<f64> {
    let mut worst = 0.0_f64;
    for i in 0..3 {
        for j in i..3 {
            worst = worst.max(fd_crosscheck(|q| Ok(metric(q)?[i][j]), p, FD_STEP)?);
        }
    }
    Ok(worst)
}

fn fd_metric4(m: &Metric4, p: &Point4) -> Result<f64> {
    let mut worst = 0.0_f64;
    for i in 0..4 {
        for j in i..4 {
            worst = worst.max(fd_crosscheck(|q| Ok(m.components(q)?[i][j]), p, FD_STEP)?);
        }
    }
    Ok(worst)
}

/// Connection contract, Einstein-Weyl residual and metric fd check.
fn weyl_point(w: &WeylStructure3, p: &Point3, rec: &mut PointRecord) -> Result<f64> {
    let wc = weyl_connection(w, p)?;
    let (worst, scale) = wc.metricity_defect();
    let ric = ew3::ricci_from_connection(&wc);
    rec.residual("torsion", wc.torsion())
        .residual("metricity", worst / scale.max(1.0))
        .residual("einstein_weyl", ric.tracefree_norm)
        .residual(FD_RESIDUAL, fd_metric3(&|q| w.metric(q), p)?)
        .value("scal", ric.scal);
    Ok(ric.scal)
}

fn hypercr_point(
    w: &WeylStructure3,
    kappa: &ew3::ScalarFn3,
    scal: f64,
    p: &Point3,
    rec: &mut PointRecord,
) -> Result<()> {
    let k = kappa(p)?.value;
    let (_, r2) = hypercr_residual(w, &**kappa, p)?;
    rec.residual("hypercr_r1", k * k - HYPERCR_SCAL_CONSTANT * scal / 6.0)
        .residual("hypercr_r2", r2)
        .residual(
            "flat_connection",
            flat_connection_residual(w, &**kappa, FLAT_CONNECTION_SIGN, p)?,
        )
        .value("kappa", k);
    Ok(())
}

fn curvature_point(m: &Metric4, p: &Point4, half: WeylHalf, rec: &mut PointRecord) -> Result<geom4::Curvature4> {
    let c = geom4::curvature(m, p)?;
    let (recon, cross) = c.split_defect();
    rec.residual("riemann_symmetries", c.symmetry_defect())
        .residual("weyl_trace", c.weyl_trace_defect())
        .residual("weyl_split_reconstruction", recon)
        .residual("weyl_split_orthogonality", cross)
        .residual("weyl_half", c.half_norm(half))
        .residual("killing", m.killing_defect(p)?)
        .residual(FD_RESIDUAL, fd_metric4(m, p)?)
        .value("scal", c.scal)
        .value("weyl_sd_norm", c.weyl_sd_norm)
        .value("weyl_asd_norm", c.weyl_asd_norm)
        .value("weyl_norm2", c.weyl_norm2);
    Ok(c)
}

fn components3(w: &WeylStructure3) -> Components {
    let w = w.clone();
    Arc::new(move |p: &Point4| {
        let g = w.metric(&p3(p))?;
        Ok(upper_triangle(3, |i, j| g[i][j].value))
    })
}

fn components4(m: &Metric4) -> Components {
    let m = m.clone();
    Arc::new(move |p: &Point4| {
        let g = m.components(p)?;
        Ok(upper_triangle(4, |i, j| g[i][j].value))
    })
}

fn upper_triangle(n: usize, g: impl Fn(usize, usize) -> f64) -> Vec<(String, f64)> {
    let mut out = Vec::new();
    for i in 0..n {
        for j in i..n {
            out.push((format!("g{i}{j}"), g(i, j)));
        }
    }
    out
}

fn real_constant(h: &HoloFn) -> bool {
    h.is_constant()
        && h.eval_value(Complex64::new(0.0, 0.0))
            .map(|v| v.im == 0.0)
            .unwrap_or(false)
}

fn scal_globals(points: &[PointRecord], out: &mut GlobalRecord) {
    let s: Vec<f64> = points.iter().filter_map(|p| p.values.get("scal").copied()).collect();
    if s.is_empty() {
        return;
    }
    let n = s.len() as f64;
    let mean = s.iter().sum::<f64>() / n;
    let var = s.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    out.residuals.insert("scal_stddev".into(), var.sqrt());
    let max = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    out.residuals
        .insert("scal_not_negative".into(), if max < 0.0 { 0.0 } else { 1.0 });
    out.summary.insert("scal_mean".into(), mean);
}

fn no_globals() -> Globals {
    Arc::new(|_| Ok(GlobalRecord::default()))
}

fn chart4(cfg: &RunConfig, t: (f64, f64)) -> Region<4> {
    let (r0, r1) = cfg.zeta_range;
    Region::boxed([(-r1, r1), (-r1, r1), cfg.z_range, t]).with_annulus(r0, r1)
}

impl Suite {
    pub fn build(cfg: &RunConfig) -> Result<Self> {
        cfg.validate()?;
        match cfg.family {
            Family::HypercrToda => Self::toda(cfg),
            Family::GeodesicSymmetry => Self::geodesic(cfg),
            Family::Berger => Self::berger(cfg),
            Family::LebrunWardCustom => Self::lebrun_ward(cfg),
            Family::Sfk => Self::sfk(cfg),
            Family::Einstein => Self::einstein(cfg),
            Family::Pedersen => Self::pedersen(cfg),
        }
    }

    fn toda(cfg: &RunConfig) -> Result<Self> {
        let h = cfg.need_holo(&cfg.h, "h")?;
        let fam = TodaFamily::normalized(h.clone());
        let w = fam.weyl_structure();
        let (components, coords) = (components3(&w), ["x", "y", "z", ""]);
        let general = if cfg.a.is_some() || cfg.big_f.is_some() {
            let a = cfg.a.unwrap_or(1.0);
            let big_f = cfg.big_f.clone().unwrap_or_else(HoloFn::identity);
            Some(ew3::hypercr_toda_family(h.clone(), a, big_f)?)
        } else {
            None
        };
        let f = cfg.f.clone();
        let flat_check = real_constant(&h);
        let fam_d = fam.clone();
        let accept = with_stencil(3, Arc::new(move |p: &Point4| fam_d.admissible(&p3(p))));
        let eval: Eval = Arc::new(move |p4: &Point4| {
            let p = p3(p4);
            let mut rec = PointRecord::new(&p);
            let scal = weyl_point(&w, &p, &mut rec)?;
            let u = fam.u_fn();
            rec.residual("toda", toda_residual(&*u, &p)?)
                .value("u", u(&p)?.value);
            hypercr_point(&w, &fam.kappa_fn(), scal, &p, &mut rec)?;
            let c = congruence_invariants(&w, &*fam.chi(), &p)?;
            rec.residual("twist", c.kappa_twist)
                .residual("shear", c.shear_norm)
                .residual("geodesic", c.geodesic_residual)
                .value("tau", c.tau);
            if flat_check {
                let r = ricci_weyl(&w, &p)?;
                let skew = r.skew.iter().flatten().fold(0.0_f64, |m, v| m.max(v.abs()));
                rec.residual("kappa_vanishing", fam.kappa(&p)?.value)
                    .residual("weyl_flatness", r.scal.abs().max(r.tracefree_norm).max(skew));
            }
            if let Some(g) = &general {
                rec.residual("general_toda", toda_residual(&*g.general_u_fn(), &p)?)
                    .residual("liouville", liouville_residual(&g.big_f, g.a, &p)?);
            }
            if let Some(f) = &f {
                let (fam2, f2) = (fam.clone(), f.clone());
                let wf = move |q: &Point3| Ok(strachan_monopole(&fam2, &f2, q)?.w);
                rec.residual("monopole", monopole_residual(&*fam.u_fn(), &wf, &p)?)
                    .value("w", wf(&p)?.value);
            }
            Ok(rec)
        });
        Ok(Self {
            family: cfg.family,
            region: chart4(cfg, (0.0, 0.0)),
            coords,
            accept,
            components,
            eval,
            globals: no_globals(),
        })
    }

    fn geodesic(cfg: &RunConfig) -> Result<Self> {
        let gs = ew3::geodesic_symmetry_family(cfg.need_holo(&cfg.big_h, "H")?)?;
        let w = gs.weyl_structure();
        let (components, coords) = (components3(&w), ["x", "y", "t", ""]);
        let gs_d = gs.clone();
        let accept = with_stencil(3, Arc::new(move |p: &Point4| gs_d.admissible(&p3(p))));
        let eval: Eval = Arc::new(move |p4: &Point4| {
            let p = p3(p4);
            let mut rec = PointRecord::new(&p);
            let scal = weyl_point(&w, &p, &mut rec)?;
            let kappa = gs.kappa_fn();
            hypercr_point(&w, &kappa, scal, &p, &mut rec)?;
            let c = congruence_invariants(&w, &*gs.chi(), &p)?;
            rec.residual("tau", c.tau - gs.tau_expected(&p)?)
                .residual("twist", c.kappa_twist - kappa(&p)?.value)
                .residual("shear", c.shear_norm)
                .residual("geodesic", c.geodesic_residual)
                .value("tau", c.tau)
                .value("twist", c.kappa_twist);
            Ok(rec)
        });
        let (r0, r1) = cfg.zeta_range;
        Ok(Self {
            family: cfg.family,
            region: Region::boxed([(-r1, r1), (-r1, r1), (0.0, 1.0), (0.0, 0.0)])
                .with_annulus(r0, r1),
            coords,
            accept,
            components,
            eval,
            globals: no_globals(),
        })
    }

    fn berger(cfg: &RunConfig) -> Result<Self> {
        let a = cfg.need_real(cfg.a, "a")?;
        let w = ew3::berger_sphere(a)?;
        // a supplied b is checked against the Einstein-Weyl pairing
        let b_given = cfg.b;
        let (components, coords) = (components3(&w), ["theta", "phi", "psi", ""]);
        let w_d = w.clone();
        let accept = with_stencil(3, Arc::new(move |p: &Point4| w_d.admissible(&p3(p))));
        let eval: Eval = Arc::new(move |p4: &Point4| {
            let p = p3(p4);
            let mut rec = PointRecord::new(&p);
            weyl_point(&w, &p, &mut rec)?;
            let b = ew3::berger_twist(a);
            rec.value("b", b);
            if let Some(bg) = b_given {
                rec.residual("berger_pair", bg * bg - a * a * (1.0 - a * a));
            }
            Ok(rec)
        });
        let pi = std::f64::consts::PI;
        Ok(Self {
            family: cfg.family,
            region: Region::boxed([(0.3, pi - 0.3), (0.0, 2.0 * pi), (0.0, 4.0 * pi), (0.0, 0.0)]),
            coords,
            accept,
            components,
            eval,
            globals: no_globals(),
        })
    }

    fn lebrun_ward(cfg: &RunConfig) -> Result<Self> {
        let h = cfg.need_holo(&cfg.h, "h")?;
        let a = cfg.a.unwrap_or(1.0);
        let big_f = cfg.big_f.clone().unwrap_or_else(HoloFn::identity);
        let fam = ew3::hypercr_toda_family(h, a, big_f.clone())?;
        let u = fam.general_u_fn();
        let w = ew3::toda_lw(u.clone());
        let (components, coords) = (components3(&w), ["x", "y", "z", ""]);
        let (fam_d, u_d) = (fam.clone(), u.clone());
        let accept = with_stencil(
            3,
            Arc::new(move |p: &Point4| {
                fam_d.admissible(&p3(p))?;
                u_d(&p3(p)).map(|_| ())
            }),
        );
        let eval: Eval = Arc::new(move |p4: &Point4| {
            let p = p3(p4);
            let mut rec = PointRecord::new(&p);
            weyl_point(&w, &p, &mut rec)?;
            rec.residual("toda", toda_residual(&*u, &p)?)
                .residual("liouville", liouville_residual(&big_f, a, &p)?)
                .value("u", u(&p)?.value);
            let chi = |_: &Point3| Ok([Jet::zero(), Jet::zero(), Jet::constant(1.0)]);
            let c = congruence_invariants(&w, &chi, &p)?;
            rec.residual("twist", c.kappa_twist)
                .residual("shear", c.shear_norm)
                .residual("geodesic", c.geodesic_residual);
            Ok(rec)
        });
        Ok(Self {
            family: cfg.family,
            region: chart4(cfg, (0.0, 0.0)),
            coords,
            accept,
            components,
            eval,
            globals: no_globals(),
        })
    }

    fn sfk(cfg: &RunConfig) -> Result<Self> {
        let h = cfg.need_holo(&cfg.h, "h")?;
        let f = cfg.need_holo(&cfg.f, "f")?;
        let m = geom4::sfk_metric(h.clone(), f.clone());
        let (components, coords) = (components4(&m), m.coords);
        let fam = TodaFamily::normalized(h.clone());
        let ricci_flat = real_constant(&f);
        let (m_d, f_d) = (m.clone(), f.clone());
        let accept = with_stencil(
            4,
            Arc::new(move |p: &Point4| {
                m_d.admissible(p)?;
                let v = f_d.eval_value(Complex64::new(p[0], p[1]))?;
                if v.norm() > DELTA_POS {
                    Ok(())
                } else {
                    Err(GeomError::Inadmissible("f vanishes".into()))
                }
            }),
        );
        let (z0, z1) = cfg.z_range;
        let eval: Eval = Arc::new(move |p: &Point4| {
            let mut rec = PointRecord::new(p);
            let c = curvature_point(&m, p, SFK_VANISHING_HALF, &mut rec)?;
            rec.residual("scal", c.scal);
            if ricci_flat {
                rec.residual("ricci", c.ricci_norm());
            }
            rec.value("ricci_norm", c.ricci_norm());
            let q = p3(p);
            let mono = strachan_monopole(&fam, &f, &q)?;
            let (fam2, f2) = (fam.clone(), f.clone());
            let wf = move |x: &Point3| Ok(strachan_monopole(&fam2, &f2, x)?.w);
            rec.residual("monopole", monopole_residual(&*fam.u_fn(), &wf, &q)?)
                .residual("theta_consistency", theta_consistency(&fam, &mono, &q)?)
                .residual("kahler_closedness", geom4::kahler_form_closedness(&h, &f, &q)?)
                .value("w", mono.w.value)
                .value("v", mono.v.value);
            let special = [(1.0, 0.0), (0.0, 1.0), (2.0, -1.0)]
                .iter()
                .map(|&(a, b)| special_monopole_identity(&h, a, b, &q))
                .collect::<Result<Vec<_>>>()?;
            rec.residual("special_monopole", special.into_iter().fold(0.0, f64::max));
            let zs: Vec<f64> = [z0, 0.5 * (z0 + z1), z1, p[2]]
                .into_iter()
                .filter(|&z| m.admissible(&[p[0], p[1], z, 0.0]).is_ok())
                .collect();
            let qc = geom4::quotient_check(&h, &f, [p[0], p[1]], &zs)?;
            let base = ew3::geodesic_symmetry_family(f.recip()?)?.weyl_structure();
            rec.residual("quotient_z_variation", qc.max_z_variation)
                .residual("quotient_match", qc.match_residual)
                .residual(
                    "quotient_einstein_weyl",
                    ricci_weyl(&base, &[p[0], p[1], p[3]])?.tracefree_norm,
                );
            Ok(rec)
        });
        Ok(Self {
            family: cfg.family,
            region: chart4(cfg, (0.0, 1.0)),
            coords,
            accept,
            components,
            eval,
            globals: no_globals(),
        })
    }

    fn einstein(cfg: &RunConfig) -> Result<Self> {
        let h = cfg.need_holo(&cfg.h, "h")?;
        let a = cfg.a.unwrap_or(1.0);
        let m = if a == 1.0 {
            geom4::einstein_metric(h.clone())
        } else {
            geom4::einstein_metric_scaled(h.clone(), a)?
        };
        let reference = geom4::einstein_metric_scaled(h.clone(), a)?;
        let (components, coords) = (components4(&m), m.coords);
        let hyperbolic = real_constant(&h);
        let m_d = m.clone();
        let accept = with_stencil(4, Arc::new(move |p: &Point4| m_d.admissible(p)));
        let eval: Eval = Arc::new(move |p: &Point4| {
            let mut rec = PointRecord::new(p);
            let c = curvature_point(&m, p, SFK_VANISHING_HALF, &mut rec)?;
            rec.residual("tracefree_ricci", c.tracefree_ricci_norm());
            if hyperbolic {
                rec.residual("constant_curvature", c.constant_curvature_residual().0);
            }
            let (g1, g2) = (m.components(p)?, reference.components(p)?);
            let mut diff = 0.0_f64;
            let mut scale = 0.0_f64;
            for i in 0..4 {
                for j in 0..4 {
                    diff = diff.max((g1[i][j].value - g2[i][j].value).abs());
                    scale = scale.max(g1[i][j].value.abs());
                }
            }
            rec.residual("rescale_match", diff / scale);
            Ok(rec)
        });
        let globals: Globals = Arc::new(move |points: &[PointRecord]| {
            let mut out = GlobalRecord::default();
            scal_globals(points, &mut out);
            if let Some(mean) = out.summary.get("scal_mean").copied() {
                let ratio = mean / (-3.0 * a);
                out.summary.insert("scal_ratio".into(), ratio);
                out.residuals
                    .insert("scal_ratio_ledger".into(), (ratio - EINSTEIN_SCAL_RATIO).abs());
            }
            if let Some(first) = points.first() {
                let p: Point4 = std::array::from_fn(|i| first.coords[i]);
                let mut per_a = Vec::new();
                for s in EINSTEIN_SCALES {
                    let c = geom4::curvature(&geom4::einstein_metric_scaled(h.clone(), s)?, &p)?;
                    out.summary.insert(format!("scal_at_a={s}"), c.scal);
                    per_a.push(c.scal / s);
                }
                let spread = per_a.iter().map(|v| (v - per_a[0]).abs()).fold(0.0, f64::max);
                out.residuals
                    .insert("scal_linearity".into(), spread / per_a[0].abs().max(1.0));
            }
            Ok(out)
        });
        Ok(Self {
            family: cfg.family,
            region: chart4(cfg, (0.0, 1.0)),
            coords,
            accept,
            components,
            eval,
            globals,
        })
    }

    fn pedersen(cfg: &RunConfig) -> Result<Self> {
        let mm = cfg.need_real(cfg.m, "m")?;
        let m = geom4::pedersen_metric(mm);
        let (components, coords) = (components4(&m), m.coords);
        let m_d = m.clone();
        let accept = with_stencil(4, Arc::new(move |p: &Point4| m_d.admissible(p)));
        let eval: Eval = Arc::new(move |p: &Point4| {
            let mut rec = PointRecord::new(p);
            let c = curvature_point(&m, p, PEDERSEN_VANISHING_HALF, &mut rec)?;
            rec.residual("tracefree_ricci", c.tracefree_ricci_norm());
            if mm == 0.0 {
                rec.residual("constant_curvature", c.constant_curvature_residual().0)
                    .residual("weyl_norm2", c.weyl_norm2);
            }
            Ok(rec)
        });
        let globals: Globals = Arc::new(move |points: &[PointRecord]| {
            let mut out = GlobalRecord::default();
            scal_globals(points, &mut out);
            let mut worst = 0.0_f64;
            for z in CORRESPONDENCE_HEIGHTS {
                let (ours, theirs) = geom4::pedersen_correspondence(mm, z)?;
                out.summary.insert(format!("w2_ours_z={z}"), ours);
                out.summary.insert(format!("w2_pedersen_z={z}"), theirs);
                worst = worst.max((ours - theirs).abs());
            }
            out.residuals.insert("pedersen_correspondence".into(), worst);
            Ok(out)
        });
        let pi = std::f64::consts::PI;
        Ok(Self {
            family: cfg.family,
            region: Region::boxed([(0.1, 0.9), (0.3, pi - 0.3), (0.0, 2.0 * pi), (0.0, 4.0 * pi)]),
            coords,
            accept,
            components,
            eval,
            globals,
        })
    }

    pub fn dim(&self) -> usize {
        self.family.dim()
    }

    pub fn admissible(&self, p: &Point4) -> Result<()> {
        (self.accept)(p)
    }

    /// Metric components `g_ij`, `i ≤ j`, at `p`.
    pub fn components(&self, p: &Point4) -> Result<Vec<(String, f64)>> {
        (self.components)(p)
    }

    pub fn evaluate(&self, p: &Point4) -> Result<PointRecord> {
        (self.eval)(p)
    }

    pub fn globals(&self, points: &[PointRecord]) -> Result<GlobalRecord> {
        (self.globals)(points)
    }
}

/// Runs the suite of `cfg` and returns its report.
///
/// Configuration errors are returned as `Err`; sampling and evaluation
/// failures are recorded in the report, which then does not pass.
pub fn run(cfg: &RunConfig) -> Result<Report> {
    let suite = Suite::build(cfg)?;
    let mut report = Report::new(cfg.family.name(), cfg.params());
    let accept = |p: &Point4| suite.admissible(p);
    let points = match Sampler::new(cfg.seed).admissible_points(cfg.samples, &suite.region, &accept) {
        Ok(p) => p,
        Err(e) => {
            report.fail_with(e);
            report.finish(cfg.tol);
            return Ok(report);
        }
    };
    let records = map_points(&points, |p| suite.evaluate(p));
    for r in records {
        match r {
            Ok(rec) => report.points.push(rec),
            Err(e) => {
                report.fail_with(e);
                break;
            }
        }
    }
    if report.error.is_none() {
        match suite.globals(&report.points) {
            Ok(g) => {
                report.global = g.residuals;
                report.summary = g.summary;
            }
            Err(e) => report.fail_with(e),
        }
    }
    report.finish(cfg.tol);
    Ok(report)
}

/// Whether a report error came from sampling coverage or from evaluation.
pub fn is_coverage_error(report: &Report) -> bool {
    report
        .error
        .as_deref()
        .is_some_and(|e| e.starts_with("domain coverage"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(family: Family, kv: &[(&str, &str)]) -> RunConfig {
        let mut c = RunConfig::new(family);
        for (k, v) in kv {
            c.set(k, v).unwrap();
        }
        c.samples = 4;
        c
    }

    #[test]
    fn family_names_round_trip() {
        for f in Family::ALL {
            assert_eq!(f.name().parse::<Family>().unwrap(), f);
        }
        assert!("toda".parse::<Family>().is_err());
    }

    #[test]
    fn seeds_accept_hex_and_decimal() {
        assert_eq!(parse_seed("0xE3").unwrap(), 227);
        assert_eq!(parse_seed("7").unwrap(), 7);
        assert!(parse_seed("0xEW3").is_err());
    }

    #[test]
    fn unknown_keys_and_bad_values_are_rejected() {
        let mut c = RunConfig::new(Family::Berger);
        assert!(c.set("colour", "red").is_err());
        assert!(c.set("a", "nan").is_err());
        assert!(matches!(c.set("h", "poly:1,x"), Err(GeomError::Parse { .. })));
    }

    #[test]
    fn berger_pairing_is_checked_when_b_is_given() {
        let ok = run(&cfg(Family::Berger, &[("a", "0.6"), ("b", "-0.48")])).unwrap();
        assert!(ok.pass && ok.maxima["berger_pair"] < 1e-15);
        let bad = run(&cfg(Family::Berger, &[("a", "0.6"), ("b", "0.3")])).unwrap();
        assert_eq!(bad.failing, vec!["berger_pair".to_string()]);
    }

    #[test]
    fn missing_parameter_is_a_config_error() {
        assert!(run(&RunConfig::new(Family::Sfk)).is_err());
    }

    #[test]
    fn every_family_passes_at_default_tolerance() {
        let runs = [
            cfg(Family::HypercrToda, &[("h", "poly:0.5,1"), ("f", "const:1")]),
            cfg(Family::GeodesicSymmetry, &[("H", "ratio:poly:1/poly:2,1")]),
            cfg(Family::Berger, &[("a", "0.6")]),
            cfg(Family::LebrunWardCustom, &[("h", "poly:2,1"), ("a", "0.5"), ("F", "poly:0,0,1")]),
            cfg(Family::Sfk, &[("h", "poly:2,1"), ("f", "poly:1,1")]),
            cfg(Family::Einstein, &[("h", "const:1+0.5i")]),
            cfg(Family::Pedersen, &[("m", "1")]),
        ];
        for c in runs {
            let r = run(&c).unwrap();
            assert!(r.pass, "{}: {:?} {:?} {:?}", c.family, r.failing, r.error, r.maxima);
        }
    }

    #[test]
    fn infeasible_domain_is_a_coverage_error() {
        let mut c = cfg(Family::HypercrToda, &[("h", "poly:-5")]);
        c.z_range = (0.1, 1.0);
        let r = run(&c).unwrap();
        assert!(!r.pass && is_coverage_error(&r), "{:?}", r.error);
        let c = cfg(Family::Sfk, &[("h", "poly:2"), ("f", "const:-1")]);
        let r = run(&c).unwrap();
        assert!(!r.pass && is_coverage_error(&r));
    }

    #[test]
    fn reports_are_deterministic() {
        let c = cfg(Family::Sfk, &[("h", "poly:2,1"), ("f", "poly:1,1")]);
        let a = run(&c).unwrap();
        let b = run(&c).unwrap();
        assert_eq!(a.points, b.points);
        assert_eq!(a.maxima, b.maxima);
    }
}
