//! Machine-readable verification records.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::conventions::{ledger, Ledger};

/// Residuals that measure finite-difference truncation rather than an
/// identity; they are held to their own fixed tolerance.
pub const FD_RESIDUAL: &str = "fd_crosscheck";
pub const FD_TOLERANCE: f64 = 1e-5;

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct PointRecord {
    pub coords: Vec<f64>,
    pub residuals: BTreeMap<String, f64>,
    pub values: BTreeMap<String, f64>,
}

impl PointRecord {
    pub fn new(coords: &[f64]) -> Self {
        Self {
            coords: coords.to_vec(),
            ..Self::default()
        }
    }

    pub fn residual(&mut self, name: &str, v: f64) -> &mut Self {
        self.residuals.insert(name.to_owned(), v.abs());
        self
    }

    pub fn value(&mut self, name: &str, v: f64) -> &mut Self {
        self.values.insert(name.to_owned(), v);
        self
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub family: String,
    pub params: BTreeMap<String, String>,
    pub ledger: Ledger,
    pub points: Vec<PointRecord>,
    /// Residuals computed once per run rather than per point.
    pub global: BTreeMap<String, f64>,
    /// Scalars recorded once per run.
    pub summary: BTreeMap<String, f64>,
    pub maxima: BTreeMap<String, f64>,
    pub tolerances: BTreeMap<String, f64>,
    pub failing: Vec<String>,
    pub error: Option<String>,
    pub pass: bool,
}

pub fn tolerance_for(name: &str, tol: f64) -> f64 {
    if name == FD_RESIDUAL {
        FD_TOLERANCE
    } else {
        tol
    }
}

impl Report {
    pub fn new(family: impl Into<String>, params: BTreeMap<String, String>) -> Self {
        Self {
            family: family.into(),
            params,
            ledger: ledger(),
            points: Vec::new(),
            global: BTreeMap::new(),
            summary: BTreeMap::new(),
            maxima: BTreeMap::new(),
            tolerances: BTreeMap::new(),
            failing: Vec::new(),
            error: None,
            pass: false,
        }
    }

    /// Fills `maxima`, `tolerances`, `failing` and `pass`.
    ///
    /// A NaN residual counts as a failure.
    pub fn finish(&mut self, tol: f64) {
        let mut maxima: BTreeMap<String, f64> = BTreeMap::new();
        let all = self
            .points
            .iter()
            .flat_map(|p| p.residuals.iter())
            .chain(self.global.iter());
        for (k, &v) in all {
            let e = maxima.entry(k.clone()).or_insert(0.0);
            *e = if v.is_nan() || e.is_nan() { f64::NAN } else { e.max(v) };
        }
        self.tolerances = maxima
            .keys()
            .map(|k| (k.clone(), tolerance_for(k, tol)))
            .collect();
        self.failing = maxima
            .iter()
            .filter(|(k, v)| !(**v <= self.tolerances[*k]))
            .map(|(k, _)| k.clone())
            .collect();
        self.maxima = maxima;
        self.pass = self.error.is_none() && self.failing.is_empty() && !self.maxima.is_empty();
    }

    pub fn fail_with(&mut self, err: impl ToString) {
        self.error = Some(err.to_string());
        self.pass = false;
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AggregateReport {
    pub suites: BTreeMap<String, Report>,
    pub pass: bool,
}

impl AggregateReport {
    pub fn new(suites: BTreeMap<String, Report>) -> Self {
        let pass = !suites.is_empty() && suites.values().all(|r| r.pass);
        Self { suites, pass }
    }

    pub fn has_error(&self) -> bool {
        self.suites.values().any(|r| r.error.is_some())
    }
}
