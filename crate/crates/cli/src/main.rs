//! Command-line front end: certificate checks, bound reports, point scans,
//! covering plans, intersection-bound audits and combined reports.
//!
//! Exit codes: 0 success, 2 invariant violation, 3 input error.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde::{Deserialize, Serialize};

use slowcount::bigfloat::{parse_decimal, Bf};
use slowcount::catalog::{self, CurveSpec};
use slowcount::points::{PointStatus, RationalPoint};
use slowcount::{Error as CoreError, Result as CoreResult};

#[derive(Parser)]
#[command(
    name = "slowcount",
    about = "Counting bounds and empirical rational-point searches for slowly parametrized plane curves",
    version
)]
struct Cli {
    /// Working precision in bits.
    #[arg(long, global = true, default_value_t = 128)]
    precision: u32,
    /// Seed for randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads (0 = library default).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// JSON configuration file; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Verify a curve's derivative certificate by sampling.
    Certify {
        /// Catalog name or path to a curve-spec JSON file.
        spec: String,
        #[arg(long, default_value_t = 12)]
        p_max: u64,
        #[arg(long, default_value_t = 20)]
        grid: usize,
    },
    /// Compute the explicit counting bound at a height threshold.
    Bound {
        spec: String,
        #[arg(long)]
        t: String,
    },
    /// Scan for rational points of bounded height.
    Scan {
        spec: String,
        #[arg(long)]
        t: u64,
        /// Override the scan window as `lo,hi`.
        #[arg(long)]
        window: Option<String>,
        #[arg(long, default_value_t = 2000)]
        resolution: usize,
        /// Write the point list to this CSV file.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Build the covering plan (covering sequence + per-interval polynomials).
    Cover {
        spec: String,
        #[arg(long)]
        t: u64,
        #[arg(long, default_value_t = 2_000_000)]
        max_steps: usize,
        /// Merge scanned candidates into the plan's point set.
        #[arg(long, default_value_t = false)]
        with_scan: bool,
    },
    /// Audit the family intersection bound against empirical zero counts.
    BezoutCheck {
        spec: String,
        #[arg(long, default_value_t = 200)]
        trials: usize,
    },
    /// Combined report over a grid of height thresholds.
    Report {
        spec: String,
        /// Comma-separated height thresholds.
        #[arg(long, default_value = "10,100,1000")]
        t_grid: String,
        /// Write plot-ready rows (T, certified, candidates, bound) here.
        #[arg(long)]
        tsv: Option<PathBuf>,
        #[arg(long, default_value_t = 2000)]
        resolution: usize,
    },
    /// List catalog curves, or export their spec files.
    Catalog {
        /// Write one JSON spec per catalog curve into this directory.
        #[arg(long)]
        export: Option<PathBuf>,
    },
}

#[derive(Deserialize, Default)]
struct FileConfig {
    precision: Option<u32>,
    seed: Option<u64>,
    threads: Option<usize>,
}

#[derive(Serialize)]
struct ConfigEcho {
    schema_version: u32,
    precision: u32,
    seed: u64,
    threads: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                CoreError::Invariant(_) => ExitCode::from(2),
                _ => ExitCode::from(3),
            }
        }
    }
}

fn load_spec(spec: &str) -> CoreResult<CurveSpec> {
    let path = PathBuf::from(spec);
    if path.exists() || spec.ends_with(".json") {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| CoreError::Input(format!("cannot read `{spec}`: {e}")))?;
        serde_json::from_str(&text)
            .map_err(|e| CoreError::Input(format!("cannot parse `{spec}`: {e}")))
    } else {
        catalog::by_name(spec)
    }
}

fn emit(out: &Option<PathBuf>, payload: &str) -> CoreResult<()> {
    match out {
        Some(p) => std::fs::write(p, payload)
            .map_err(|e| CoreError::Input(format!("cannot write `{}`: {e}", p.display()))),
        None => {
            println!("{payload}");
            Ok(())
        }
    }
}

fn write_points_csv(path: &PathBuf, pts: &[RationalPoint]) -> CoreResult<()> {
    let mut w = csv::Writer::from_path(path)
        .map_err(|e| CoreError::Input(format!("cannot open csv `{}`: {e}", path.display())))?;
    w.write_record(["x_num", "x_den", "y_num", "y_den", "height", "parameter", "status"])
        .map_err(|e| CoreError::Input(e.to_string()))?;
    for p in pts {
        let param = p
            .parameter
            .as_ref()
            .map(|b| b.to_dec_string(30))
            .unwrap_or_default();
        let status = match p.status {
            PointStatus::Certified => "certified",
            PointStatus::Candidate => "candidate",
        };
        w.write_record([
            p.x.0.numer().to_string(),
            p.x.0.denom().to_string(),
            p.y.0.numer().to_string(),
            p.y.0.denom().to_string(),
            p.height.to_string(),
            param,
            status.to_string(),
        ])
        .map_err(|e| CoreError::Input(e.to_string()))?;
    }
    w.flush().map_err(|e| CoreError::Input(e.to_string()))
}

fn run(cli: Cli) -> CoreResult<ExitCode> {
    let mut precision = cli.precision;
    let mut seed = cli.seed;
    let mut threads = cli.threads;
    if let Some(cfg_path) = &cli.config {
        let text = std::fs::read_to_string(cfg_path)
            .map_err(|e| CoreError::Input(format!("cannot read config: {e}")))?;
        let cfg: FileConfig = serde_json::from_str(&text)
            .map_err(|e| CoreError::Input(format!("cannot parse config: {e}")))?;
        // file values apply only where the flag was left at its default
        if cli.precision == 128 {
            precision = cfg.precision.unwrap_or(precision);
        }
        if cli.seed == 0 {
            seed = cfg.seed.unwrap_or(seed);
        }
        if cli.threads == 0 {
            threads = cfg.threads.unwrap_or(threads);
        }
    }
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CoreError::Input(format!("thread pool: {e}")))?;
    }
    let echo = ConfigEcho { schema_version: 1, precision, seed, threads };
    let started = Instant::now();

    let code = match cli.command {
        Cmd::Certify { spec, p_max, grid } => {
            let curve = load_spec(&spec)?;
            if curve.cert.is_none() {
                let payload = serde_json::to_string_pretty(&serde_json::json!({
                    "config": echo,
                    "curve": curve.name,
                    "status": "not_applicable",
                    "detail": "compact-mode curve carries no certificate",
                }))
                .unwrap();
                emit(&cli.out, &payload)?;
                return Ok(ExitCode::SUCCESS);
            }
            let report = catalog::verify_curve(&curve, p_max, grid, precision)?;
            let payload = serde_json::to_string_pretty(&serde_json::json!({
                "config": echo,
                "curve": curve.name,
                "status": if report.passed { "pass" } else { "fail" },
                "report": report,
            }))
            .unwrap();
            emit(&cli.out, &payload)?;
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Cmd::Bound { spec, t } => {
            let curve = load_spec(&spec)?;
            let t_bf = parse_decimal(&t, precision)?;
            let report = catalog::global_bound(&curve, &t_bf, precision)?;
            let payload = serde_json::to_string_pretty(&serde_json::json!({
                "config": echo,
                "report": report,
            }))
            .unwrap();
            emit(&cli.out, &payload)?;
            ExitCode::SUCCESS
        }
        Cmd::Scan { spec, t, window, resolution, csv } => {
            let curve = load_spec(&spec)?;
            let window = match window {
                Some(w) => {
                    let (lo, hi) = w
                        .split_once(',')
                        .ok_or_else(|| CoreError::Input("window must be `lo,hi`".into()))?;
                    Some((parse_decimal(lo, precision)?, parse_decimal(hi, precision)?))
                }
                None => None,
            };
            let (pts, meta) = catalog::scan_curve(&curve, t, window, resolution, precision)?;
            // companion branch, if any, scanned over its own default window
            let mut all = pts;
            if let Some(companion) = &curve.companion {
                let (mut cpts, _) = catalog::scan_curve(companion, t, None, resolution, precision)?;
                all.append(&mut cpts);
                all.sort_by(|a, b| (&a.x.0, &a.y.0).cmp(&(&b.x.0, &b.y.0)));
                all.dedup_by(|a, b| a.x == b.x && a.y == b.y);
            }
            if let Some(csv_path) = &csv {
                write_points_csv(csv_path, &all)?;
            }
            let payload = serde_json::to_string_pretty(&serde_json::json!({
                "config": echo,
                "curve": curve.name,
                "t": t,
                "meta": meta,
                "certified": all.iter().filter(|p| p.status == PointStatus::Certified).count(),
                "candidates": all.iter().filter(|p| p.status == PointStatus::Candidate).count(),
                "points": all,
            }))
            .unwrap();
            emit(&cli.out, &payload)?;
            ExitCode::SUCCESS
        }
        Cmd::Cover { spec, t, max_steps, with_scan } => {
            let curve = load_spec(&spec)?;
            let pts = if with_scan {
                let (pts, _) = catalog::scan_curve(&curve, t, None, 2000, precision)?;
                Some(pts)
            } else {
                None
            };
            let plan = catalog::covering_plan(&curve, t, pts, precision, max_steps)?;
            let verified = plan.verified;
            let payload = serde_json::to_string_pretty(&serde_json::json!({
                "config": echo,
                "plan": plan,
            }))
            .unwrap();
            emit(&cli.out, &payload)?;
            if verified {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Cmd::BezoutCheck { spec, trials } => {
            let curve = load_spec(&spec)?;
            let audit = catalog::bezout_audit(&curve, trials, seed, precision)?;
            let ok = audit.violations == 0;
            let payload = serde_json::to_string_pretty(&serde_json::json!({
                "config": echo,
                "curve": curve.name,
                "audit": audit,
            }))
            .unwrap();
            emit(&cli.out, &payload)?;
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Cmd::Report { spec, t_grid, tsv, resolution } => {
            let curve = load_spec(&spec)?;
            let mut rows = Vec::new();
            let mut tsv_lines = vec!["t\tcertified\tcandidates\tbound_total".to_string()];
            let mut consistent = true;
            for t_str in t_grid.split(',') {
                let t: u64 = t_str
                    .trim()
                    .parse()
                    .map_err(|_| CoreError::Input(format!("bad threshold `{t_str}`")))?;
                let (pts, meta) = catalog::scan_curve(&curve, t, None, resolution, precision)?;
                let certified = pts.iter().filter(|p| p.status == PointStatus::Certified).count();
                let candidates = pts.len() - certified;
                let bound = catalog::global_bound(&curve, &Bf::from_u64(t), precision).ok();
                let total_str = bound
                    .as_ref()
                    .map(|b| b.total.to_dec_string(8))
                    .unwrap_or_else(|| "n/a".into());
                if let Some(b) = &bound {
                    let cert_bf = Bf::from_u64(certified as u64);
                    if cert_bf > b.total {
                        consistent = false;
                    }
                }
                tsv_lines.push(format!("{t}\t{certified}\t{candidates}\t{total_str}"));
                rows.push(serde_json::json!({
                    "t": t,
                    "certified": certified,
                    "candidates": candidates,
                    "empirical_is_lower_bound": meta.undercount_possible,
                    "bound": bound,
                }));
            }
            if let Some(tsv_path) = &tsv {
                std::fs::write(tsv_path, tsv_lines.join("\n") + "\n")
                    .map_err(|e| CoreError::Input(format!("cannot write tsv: {e}")))?;
            }
            let payload = serde_json::to_string_pretty(&serde_json::json!({
                "config": echo,
                "curve": curve.name,
                "rows": rows,
                "certified_within_bound": consistent,
            }))
            .unwrap();
            emit(&cli.out, &payload)?;
            if consistent {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(2)
            }
        }
        Cmd::Catalog { export } => {
            let curves = catalog::catalog()?;
            if let Some(dir) = export {
                std::fs::create_dir_all(&dir)
                    .map_err(|e| CoreError::Input(format!("cannot create dir: {e}")))?;
                for c in &curves {
                    let path = dir.join(format!("{}.json", c.name));
                    let text = serde_json::to_string_pretty(c).unwrap();
                    std::fs::write(&path, text)
                        .map_err(|e| CoreError::Input(format!("cannot write spec: {e}")))?;
                }
            }
            let names: Vec<&str> = curves.iter().map(|c| c.name.as_str()).collect();
            let payload = serde_json::to_string_pretty(&serde_json::json!({
                "config": echo,
                "curves": names,
            }))
            .unwrap();
            emit(&cli.out, &payload)?;
            ExitCode::SUCCESS
        }
    };
    // timings stay off the deterministic report body
    let _ = writeln!(
        std::io::stderr(),
        "elapsed: {} ms",
        started.elapsed().as_millis()
    );
    Ok(code)
}
