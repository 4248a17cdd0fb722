//! Plain-text suite configuration.
//!
//! ```text
//! # comment
//! [sfk]
//! h = poly:2,1
//! f = poly:1,1
//! samples = 20
//! ```
//!
//! Each `[family]` header starts a run; keys are the verify flag names.
//! Lines before the first header set defaults for every later run.

use crate::suite::{Family, RunConfig};
use crate::{GeomError, Result};

fn at_line(line: usize, e: GeomError) -> GeomError {
    let msg = match e {
        GeomError::Parse { pos, msg } => format!("column {pos}: {msg}"),
        other => other.to_string(),
    };
    GeomError::Parse {
        pos: line,
        msg: format!("line {line}: {msg}"),
    }
}

/// Parses a configuration into one [`RunConfig`] per section, in order.
pub fn parse(text: &str) -> Result<Vec<RunConfig>> {
    let mut defaults: Vec<(usize, String, String)> = Vec::new();
    let mut runs: Vec<RunConfig> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let n = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| at_line(n, GeomError::InvalidParameter("unclosed section".into())))?;
            let family: Family = name.parse().map_err(|e| at_line(n, e))?;
            let mut cfg = RunConfig::new(family);
            for (dn, k, v) in &defaults {
                cfg.set(k, v).map_err(|e| at_line(*dn, e))?;
            }
            runs.push(cfg);
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| at_line(n, GeomError::InvalidParameter(format!("expected key = value, got `{line}`"))))?;
        let (k, v) = (k.trim(), v.trim());
        if k == "family" {
            return Err(at_line(n, GeomError::InvalidParameter("family is set by the section header".into())));
        }
        match runs.last_mut() {
            Some(cfg) => cfg.set(k, v).map_err(|e| at_line(n, e))?,
            None => {
                // validate eagerly so a bad default is reported at its own line
                RunConfig::new(Family::Berger).set(k, v).map_err(|e| at_line(n, e))?;
                defaults.push((n, k.to_owned(), v.to_owned()));
            }
        }
    }
    if runs.is_empty() {
        return Err(GeomError::InvalidParameter("configuration has no sections".into()));
    }
    Ok(runs)
}
