use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use ewgeom::report::{AggregateReport, Report};
use ewgeom::sampling::map_points;
use ewgeom::suite::{self, Family, RunConfig};
use ewgeom::{config, GeomError, Point4};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "ewgeom", version, about = "Verify explicit Einstein-Weyl and 4-metric families")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one family's residual suite at seeded random points.
    Verify {
        #[command(flatten)]
        run: RunArgs,
        /// Write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate metric components, values and residuals on a grid.
    Sample {
        #[command(flatten)]
        run: RunArgs,
        /// Nodes per axis, e.g. 10x10x10.
        #[arg(long)]
        grid: String,
        /// Output file; `.csv` or `.json`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every section of a configuration file.
    ReportAll {
        config: PathBuf,
        /// Write the aggregate JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    family: String,
    #[arg(long)]
    h: Option<String>,
    #[arg(long)]
    f: Option<String>,
    #[arg(long = "F")]
    big_f: Option<String>,
    #[arg(long = "H")]
    big_h: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    a: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    b: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    m: Option<String>,
    #[arg(long)]
    samples: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    z_min: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    z_max: Option<String>,
    #[arg(long)]
    zeta_min: Option<String>,
    #[arg(long)]
    zeta_max: Option<String>,
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig, GeomError> {
        let mut cfg = RunConfig::new(self.family.parse()?);
        let pairs = [
            ("h", &self.h),
            ("f", &self.f),
            ("F", &self.big_f),
            ("H", &self.big_h),
            ("a", &self.a),
            ("b", &self.b),
            ("m", &self.m),
            ("samples", &self.samples),
            ("seed", &self.seed),
            ("tol", &self.tol),
            ("z-min", &self.z_min),
            ("z-max", &self.z_max),
            ("zeta-min", &self.zeta_min),
            ("zeta-max", &self.zeta_max),
        ];
        for (k, v) in pairs {
            if let Some(v) = v {
                cfg.set(k, v)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Failures that map to exit status 2.
#[derive(Debug)]
struct Usage(anyhow::Error);

type CmdResult = Result<ExitCode, Usage>;

fn usage<E: Into<anyhow::Error>>(e: E) -> Usage {
    Usage(e.into())
}

fn status(report: &Report) -> u8 {
    if report.error.is_some() {
        2
    } else if report.pass {
        0
    } else {
        1
    }
}

fn print_summary(name: &str, r: &Report) {
    let verdict = match status(r) {
        0 => "PASS",
        1 => "FAIL",
        _ => "ERROR",
    };
    println!("{name}: {verdict} ({} points)", r.points.len());
    if let Some(e) = &r.error {
        println!("  error: {e}");
    }
    for (k, v) in &r.maxima {
        let tol = r.tolerances[k];
        let mark = if *v <= tol { "ok" } else { "FAIL" };
        println!("  {k:<28} {v:.3e}  (tol {tol:.0e}) {mark}");
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("cannot write {}", path.display()))
}

fn verify(run: &RunArgs, out: Option<&Path>) -> CmdResult {
    let cfg = run.config().map_err(usage)?;
    let report = suite::run(&cfg).map_err(usage)?;
    print_summary(cfg.family.name(), &report);
    if let Some(path) = out {
        write_json(path, &report).map_err(usage)?;
    }
    Ok(ExitCode::from(status(&report)))
}

fn report_all(path: &Path, out: Option<&Path>) -> CmdResult {
    let text = fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(usage)?;
    let runs = config::parse(&text)
        .with_context(|| format!("in {}", path.display()))
        .map_err(usage)?;
    let mut counts: BTreeMap<Family, usize> = BTreeMap::new();
    let mut suites = BTreeMap::new();
    for cfg in &runs {
        let n = counts.entry(cfg.family).or_default();
        *n += 1;
        let name = format!("{}#{n}", cfg.family);
        let report = suite::run(cfg)
            .with_context(|| name.clone())
            .map_err(usage)?;
        print_summary(&name, &report);
        suites.insert(name, report);
    }
    let agg = AggregateReport::new(suites);
    if let Some(path) = out {
        write_json(path, &agg).map_err(usage)?;
    }
    let code = if agg.has_error() {
        2
    } else if agg.pass {
        0
    } else {
        1
    };
    println!("aggregate: {}", if agg.pass { "PASS" } else { "FAIL" });
    Ok(ExitCode::from(code))
}

fn parse_grid(spec: &str, dim: usize) -> anyhow::Result<Vec<usize>> {
    let n: Vec<usize> = spec
        .split(['x', 'X', '×'])
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .with_context(|| format!("invalid grid `{spec}`"))?;
    if n.len() < dim.min(3) || n.len() > dim || n.contains(&0) {
        bail!("grid `{spec}` needs {} positive counts", if dim == 3 { "3" } else { "3 or 4" });
    }
    Ok(n)
}

fn linspace(lo: f64, hi: f64, n: usize, k: usize) -> f64 {
    if n == 1 {
        0.5 * (lo + hi)
    } else {
        lo + (hi - lo) * k as f64 / (n - 1) as f64
    }
}

#[derive(Serialize)]
struct Skipped {
    coords: Vec<f64>,
    reason: String,
}

#[derive(Serialize)]
struct SampleTable {
    family: String,
    params: BTreeMap<String, String>,
    columns: Vec<String>,
    rows: Vec<Vec<f64>>,
    skipped: Vec<Skipped>,
}

fn sample(run: &RunArgs, grid: &str, out: &Path) -> CmdResult {
    let cfg = run.config().map_err(usage)?;
    let s = suite::Suite::build(&cfg).map_err(usage)?;
    let dim = s.dim();
    let counts = parse_grid(grid, dim).map_err(usage)?;
    let mut nodes: Vec<Point4> = vec![[0.0; 4]];
    for (axis, &n) in counts.iter().enumerate() {
        let (lo, hi) = s.region.ranges[axis];
        nodes = nodes
            .into_iter()
            .flat_map(|p| {
                (0..n).map(move |k| {
                    let mut q = p;
                    q[axis] = linspace(lo, hi, n, k);
                    q
                })
            })
            .collect();
    }
    for p in nodes.iter_mut() {
        for axis in counts.len()..4 {
            p[axis] = s.region.ranges[axis].0;
        }
    }

    let evaluated = map_points(&nodes, |p| -> ewgeom::Result<Vec<(String, f64)>> {
        s.admissible(p)?;
        let mut row = s.components(p)?;
        let rec = s.evaluate(p)?;
        row.extend(rec.values);
        row.extend(rec.residuals);
        Ok(row)
    });

    let mut columns: Option<Vec<String>> = None;
    let mut rows = Vec::new();
    let mut skipped = Vec::new();
    for (p, r) in nodes.iter().zip(evaluated) {
        let coords = p[..dim].to_vec();
        match r {
            Ok(named) => {
                let names: Vec<String> = s.coords[..dim]
                    .iter()
                    .map(|c| c.to_string())
                    .chain(named.iter().map(|(k, _)| k.clone()))
                    .collect();
                match &columns {
                    None => columns = Some(names),
                    Some(c) if *c != names => {
                        return Err(usage(anyhow::anyhow!("inconsistent columns across grid nodes")))
                    }
                    Some(_) => {}
                }
                rows.push(coords.into_iter().chain(named.into_iter().map(|(_, v)| v)).collect());
            }
            Err(e) => skipped.push(Skipped {
                coords,
                reason: e.to_string(),
            }),
        }
    }
    let Some(columns) = columns else {
        return Err(usage(anyhow::anyhow!(
            "no admissible grid node ({} skipped)",
            skipped.len()
        )));
    };
    let table = SampleTable {
        family: cfg.family.to_string(),
        params: cfg.params(),
        columns,
        rows,
        skipped,
    };
    let ext = out.extension().and_then(|e| e.to_str()).unwrap_or("");
    match ext {
        "json" => write_json(out, &table).map_err(usage)?,
        "csv" => write_csv(out, &table).map_err(usage)?,
        _ => return Err(usage(anyhow::anyhow!("output must end in .csv or .json"))),
    }
    println!(
        "{}: {} admissible nodes, {} skipped",
        table.family,
        table.rows.len(),
        table.skipped.len()
    );
    Ok(ExitCode::SUCCESS)
}

fn write_csv(path: &Path, t: &SampleTable) -> anyhow::Result<()> {
    let mut text = t.columns.join(",");
    text.push('\n');
    for row in &t.rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:.16e}")).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
    if !t.skipped.is_empty() {
        let side = path.with_extension("skipped.csv");
        let mut s = String::from("node,reason\n");
        for k in &t.skipped {
            let c: Vec<String> = k.coords.iter().map(|v| format!("{v:.16e}")).collect();
            s.push_str(&format!("{},\"{}\"\n", c.join(" "), k.reason.replace('"', "'")));
        }
        fs::write(&side, s).with_context(|| format!("cannot write {}", side.display()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match &cli.cmd {
        Cmd::Verify { run, out } => verify(run, out.as_deref()),
        Cmd::Sample { run, grid, out } => sample(run, grid, out),
        Cmd::ReportAll { config, out } => report_all(config, out.as_deref()),
    };
    match r {
        Ok(code) => code,
        Err(Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
