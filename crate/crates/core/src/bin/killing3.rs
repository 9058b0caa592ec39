use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use killing3::cli::{parse_metric_spec_in, run, Command, Format, RunConfig};
use killing3::sampling::{GridSpec, DEFAULT_SEED};
use killing3::Error;

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Cmd {
    Analyze,
    Verify,
    Flatness,
    Geodesic,
    Family,
    Lorentz,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Fmt {
    Text,
    Jsonl,
}

/// Curvature, spin-coefficient and conformal-flatness checks for 3-metrics with a unit Killing field.
#[derive(Parser, Debug)]
#[command(name = "killing3", version)]
struct Args {
    command: Cmd,
    /// Metric-spec file (`key = value` lines).
    #[arg(long)]
    spec: PathBuf,
    /// `rmin:rmax:nr,tmin:tmax:nt`
    #[arg(long)]
    grid: Option<String>,
    /// Tolerance override, repeatable.
    #[arg(long = "tol", value_name = "NAME=VAL")]
    tol: Vec<String>,
    #[arg(long, value_enum, default_value = "text")]
    format: Fmt,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Expected main verdict, e.g. `flat`, `not-flat`, `pass`.
    #[arg(long)]
    expect: Option<String>,
    /// Affine length for `geodesic`.
    #[arg(long, default_value_t = 20.0)]
    length: f64,
    /// Also write geodesic trajectories as CSV with this path prefix.
    #[arg(long)]
    trajectories: Option<PathBuf>,
}

fn config(args: &Args) -> killing3::Result<RunConfig> {
    let text = std::fs::read_to_string(&args.spec)?;
    let spec = parse_metric_spec_in(&text, args.spec.parent())?;
    let command = match args.command {
        Cmd::Analyze => Command::Analyze,
        Cmd::Verify => Command::Verify,
        Cmd::Flatness => Command::Flatness,
        Cmd::Geodesic => Command::Geodesic,
        Cmd::Family => Command::Family,
        Cmd::Lorentz => Command::Lorentz,
    };
    let mut cfg = RunConfig::new(command, spec);
    cfg.grid = args.grid.as_deref().map(GridSpec::parse).transpose()?;
    let mut tolerances = BTreeMap::new();
    for t in &args.tol {
        let bad = || Error::Parse { line: 0, msg: format!("--tol expects NAME=VAL, got `{t}`") };
        let (k, v) = t.split_once('=').ok_or_else(bad)?;
        let v: f64 = v.trim().parse().map_err(|_| bad())?;
        if !(v > 0.0) {
            return Err(bad());
        }
        tolerances.insert(k.trim().to_string(), v);
    }
    cfg.tolerances = tolerances;
    cfg.format = match args.format {
        Fmt::Text => Format::Text,
        Fmt::Jsonl => Format::JsonLines,
    };
    cfg.seed = args.seed;
    cfg.out = args.out.clone();
    cfg.expect = args.expect.clone();
    cfg.length = args.length;
    Ok(cfg)
}

fn init_threads() {
    if let Some(n) = std::env::var("KILLING3_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    init_threads();
    let result = config(&args).and_then(|cfg| {
        let report = run(&cfg)?;
        report.emit(cfg.format, cfg.out.as_deref())?;
        if let Some(prefix) = &args.trajectories {
            killing3::cli::write_trajectories(&cfg, prefix)?;
        }
        Ok(report.exit_code())
    });
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("killing3: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
