//! Command-line plumbing: metric-spec files, run configuration, sweeps and reports.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::completeness::{integrate_geodesic, GeodesicState, VERDICT_SCOPE};
use crate::cotton::{cotton_york_of, flatness_verdict_with, FLAT_TOL_ANALYTIC, FLAT_TOL_GRID};
use crate::curvature::{curvature_packet_of, gauss_residual};
use crate::error::{Error, Result};
use crate::family::{build_cf_metric, solve_omega_ode_on, FamilyParams};
use crate::field::Provenance;
use crate::lorentz::{lorentz_completeness, lorentz_relations_check, to_lorentz};
use crate::metric::{catalog, MetricSpec};
use crate::np::{conformal_rescale_check_of, kinematics_of, rotate_frame_of, structure_residuals_of};
use crate::sampling::{quasi_random, seeded_field, uniform, GridSpec, DEFAULT_SEED};
use crate::tensor::Signature;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Analyze,
    Verify,
    Flatness,
    Geodesic,
    Family,
    Lorentz,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Analyze => "analyze",
            Command::Verify => "verify",
            Command::Flatness => "flatness",
            Command::Geodesic => "geodesic",
            Command::Family => "family",
            Command::Lorentz => "lorentz",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Format {
    Text,
    JsonLines,
}

fn known_params(name: &str) -> &'static [&'static str] {
    match name {
        "hopf" => &["R"],
        "nil" => &["omega0"],
        "cf_family" => &["B", "C", "omega0", "sign", "h_amp", "r_min", "r_max"],
        _ => &[],
    }
}

/// Parse a metric-spec file. Relative `grid_file` paths resolve against `base`.
pub fn parse_metric_spec_in(text: &str, base: Option<&Path>) -> Result<MetricSpec> {
    let mut cat: Option<(usize, String)> = None;
    let mut grid_file: Option<(usize, String)> = None;
    let mut signature = Signature::Riemannian;
    let mut resample: Option<(usize, usize)> = None;
    let mut nums: Vec<(usize, String, f64)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((k, v)) = content.split_once('=') else {
            return Err(Error::Parse { line, msg: format!("expected `key = value`, got `{content}`") });
        };
        let (k, v) = (k.trim(), v.trim());
        match k {
            "catalog" => cat = Some((line, v.to_string())),
            "grid_file" => grid_file = Some((line, v.to_string())),
            "signature" => {
                signature = match v {
                    "riemannian" => Signature::Riemannian,
                    "lorentzian" => Signature::Lorentzian,
                    _ => return Err(Error::Parse { line, msg: format!("unknown signature `{v}`") }),
                }
            }
            "resample" => {
                let parse = || -> Option<(usize, usize)> {
                    let (a, b) = v.split_once(',')?;
                    Some((a.trim().parse().ok()?, b.trim().parse().ok()?))
                };
                resample = Some(parse().ok_or(Error::Parse { line, msg: "resample expects `nr, nt`".into() })?);
            }
            _ => {
                let x: f64 = v
                    .parse()
                    .map_err(|_| Error::Parse { line, msg: format!("`{k}` expects a number, got `{v}`") })?;
                nums.push((line, k.to_string(), x));
            }
        }
    }
    let mut spec = match (cat, grid_file) {
        (Some(_), Some((line, _))) => {
            return Err(Error::Parse { line, msg: "`catalog` and `grid_file` are exclusive".into() })
        }
        (None, None) => return Err(Error::Parse { line: 0, msg: "missing `catalog` or `grid_file`".into() }),
        (Some((_, name)), None) => {
            let allowed = known_params(&name);
            let mut params = BTreeMap::new();
            for (line, k, x) in nums {
                if !allowed.contains(&k.as_str()) {
                    return Err(Error::Parse { line, msg: format!("unknown key `{k}` for catalog `{name}`") });
                }
                params.insert(k, x);
            }
            catalog(&name, &params)?
        }
        (None, Some((_, path))) => {
            if let Some((line, k, _)) = nums.first() {
                return Err(Error::Parse { line: *line, msg: format!("unknown key `{k}` for a grid file") });
            }
            let p = match base {
                Some(b) if Path::new(&path).is_relative() => b.join(&path),
                _ => PathBuf::from(&path),
            };
            MetricSpec::from_csv(&std::fs::read_to_string(&p)?)?
        }
    };
    if let Some((nr, nt)) = resample {
        spec = spec.resampled(nr, nt)?;
    }
    Ok(spec.with_signature(signature))
}

pub fn parse_metric_spec(text: &str) -> Result<MetricSpec> {
    parse_metric_spec_in(text, None)
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub command: Command,
    pub spec: MetricSpec,
    pub grid: Option<GridSpec>,
    pub tolerances: BTreeMap<String, f64>,
    pub format: Format,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub expect: Option<String>,
    /// Affine length for `geodesic`.
    pub length: f64,
}

impl RunConfig {
    pub fn new(command: Command, spec: MetricSpec) -> Self {
        RunConfig {
            command,
            spec,
            grid: None,
            tolerances: BTreeMap::new(),
            format: Format::Text,
            seed: DEFAULT_SEED,
            out: None,
            expect: None,
            length: 20.0,
        }
    }

    fn grid_points(&self) -> Result<Vec<(f64, f64)>> {
        let g = match self.grid {
            Some(g) => g,
            None => {
                let d = self.spec.domain;
                GridSpec::new((d.r_min, d.r_max), 8, (d.theta_min, d.theta_max), 8)?
            }
        };
        self.spec.phi_at(g.r_min, g.theta_min)?;
        Ok(g.points())
    }

    pub fn tol(&self, name: &str) -> f64 {
        if let Some(v) = self.tolerances.get(name) {
            return *v;
        }
        let grid = self.spec.provenance() == Provenance::GridSampled;
        match name {
            "flat" if grid => FLAT_TOL_GRID,
            "flat" => FLAT_TOL_ANALYTIC,
            "structure" | "killing" | "gauss" | "lorentz" | "spectrum" | "cotton" | "gauge" if grid => 1e-4,
            "spectrum" | "cotton" | "gauge" => 1e-9,
            "projection" => 1e-6,
            _ => 1e-8,
        }
    }
}

/// Tolerance group a residual name is checked against.
pub fn tolerance_group(residual: &str) -> &'static str {
    match residual {
        "s1" | "s2" | "s3" | "s4" | "s5" | "lb1" | "lb2" | "bid1" | "bid2" => "structure",
        "t_omega" | "ric_tt" | "ric_mm" | "ric0" | "ric2" | "div_t" | "shear" | "geodesic" => "killing",
        "gauss" => "gauss",
        "spectrum" | "operator" => "spectrum",
        "cy_asymmetry" | "cy_trace" => "cotton",
        "rotation" | "conformal" => "gauge",
        "lorentz_ric_tt" | "lorentz_scalar" | "lorentz_profile" | "lorentz_gauss" | "lorentz_metric" => "lorentz",
        "c_drift" | "speed_drift" => "drift",
        "projection" => "projection",
        _ => "other",
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub point: (f64, f64),
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub values: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<[f64; 3]>,
    #[serde(default)]
    pub residuals: BTreeMap<String, f64>,
}

impl Record {
    fn at(point: (f64, f64)) -> Self {
        Record {
            point,
            values: BTreeMap::new(),
            spectrum: None,
            residuals: BTreeMap::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub command: Command,
    pub spec: String,
    pub signature: String,
    pub points: usize,
    /// Max over records of each residual.
    pub max_residuals: BTreeMap<String, f64>,
    /// Run-level quantities that are not per point.
    pub values: BTreeMap<String, f64>,
    pub verdicts: BTreeMap<String, String>,
    pub failures: Vec<String>,
    pub pass: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub records: Vec<Record>,
    pub summary: Summary,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum Line {
    Record(Record),
    Summary(Summary),
}

pub fn max_residuals(records: &[Record]) -> BTreeMap<String, f64> {
    let mut out = BTreeMap::new();
    for r in records {
        for (k, v) in &r.residuals {
            let e = out.entry(k.clone()).or_insert(0.0_f64);
            // NaN residuals dominate so they are never hidden
            if v.is_nan() || *v > *e {
                *e = *v;
            }
        }
    }
    out
}

impl Report {
    fn assemble(
        cfg: &RunConfig,
        records: Vec<Record>,
        values: BTreeMap<String, f64>,
        verdicts: BTreeMap<String, String>,
        mut failures: Vec<String>,
    ) -> Report {
        let max = max_residuals(&records);
        for (k, v) in &max {
            let group = tolerance_group(k);
            if group == "other" {
                continue;
            }
            let tol = cfg.tol(group);
            if !(v.abs() < tol) {
                failures.push(format!("{k} = {v:e} exceeds {group} tolerance {tol:e}"));
            }
        }
        if let Some(want) = &cfg.expect {
            let main = verdicts.get("main").cloned().unwrap_or_else(|| "pass".into());
            let got = if main == "pass" && !failures.is_empty() { "fail".to_string() } else { main };
            if &got != want {
                failures.push(format!("expected verdict `{want}`, got `{got}`"));
            }
        }
        let summary = Summary {
            command: cfg.command,
            spec: cfg.spec.name.clone(),
            signature: cfg.spec.signature.name().to_string(),
            points: records.len(),
            max_residuals: max,
            values,
            verdicts,
            pass: failures.is_empty(),
            failures,
        };
        Report { records, summary }
    }

    pub fn exit_code(&self) -> i32 {
        if self.summary.pass {
            0
        } else {
            1
        }
    }

    pub fn to_jsonl(&self) -> Result<String> {
        let mut s = String::new();
        let ser = |l: &Line| serde_json::to_string(l).map_err(|e| Error::Io(e.to_string()));
        for r in &self.records {
            s.push_str(&ser(&Line::Record(r.clone()))?);
            s.push('\n');
        }
        s.push_str(&ser(&Line::Summary(self.summary.clone()))?);
        s.push('\n');
        Ok(s)
    }

    pub fn from_jsonl(text: &str) -> Result<Report> {
        let mut records = Vec::new();
        let mut summary = None;
        for (i, l) in text.lines().enumerate() {
            if l.trim().is_empty() {
                continue;
            }
            let parsed: Line = serde_json::from_str(l).map_err(|e| Error::Parse { line: i + 1, msg: e.to_string() })?;
            match parsed {
                Line::Record(r) => records.push(r),
                Line::Summary(s) => summary = Some(s),
            }
        }
        let summary = summary.ok_or(Error::Parse { line: 0, msg: "missing summary line".into() })?;
        Ok(Report { records, summary })
    }

    /// The summary's residual maxima recomputed from the records.
    pub fn resummarize(&self) -> BTreeMap<String, f64> {
        max_residuals(&self.records)
    }

    pub fn to_text(&self) -> String {
        let s = &self.summary;
        let mut out = String::new();
        let _ = writeln!(out, "killing3 {} on {} ({})", s.command.name(), s.spec, s.signature);
        let _ = writeln!(out, "points: {}", s.points);
        if !s.values.is_empty() {
            let _ = writeln!(out, "values:");
            for (k, v) in &s.values {
                let _ = writeln!(out, "  {k:<24} {v:.12e}");
            }
        }
        if !s.max_residuals.is_empty() {
            let _ = writeln!(out, "max residuals:");
            for (k, v) in &s.max_residuals {
                let _ = writeln!(out, "  {k:<24} {v:.3e}");
            }
        }
        for (k, v) in &s.verdicts {
            let _ = writeln!(out, "verdict {k}: {v}");
        }
        for f in &s.failures {
            let _ = writeln!(out, "FAIL {f}");
        }
        let _ = writeln!(out, "{}", if s.pass { "PASS" } else { "FAIL" });
        out
    }

    pub fn render(&self, format: Format) -> Result<String> {
        match format {
            Format::Text => Ok(self.to_text()),
            Format::JsonLines => self.to_jsonl(),
        }
    }

    /// Write the rendered report, atomically when a path is given.
    pub fn emit(&self, format: Format, out: Option<&Path>) -> Result<()> {
        let text = self.render(format)?;
        match out {
            Some(path) => write_atomic(path, text.as_bytes()),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(text.as_bytes())?;
                Ok(())
            }
        }
    }
}

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut f = tempfile::NamedTempFile::new_in(dir)?;
    f.write_all(bytes)?;
    f.persist(path).map_err(|e| Error::Io(e.error.to_string()))?;
    Ok(())
}

fn sweep<F>(points: &[(f64, f64)], f: F) -> Result<Vec<Record>>
where
    F: Fn((f64, f64)) -> Result<Record> + Sync,
{
    points.par_iter().map(|&p| f(p)).collect()
}

pub fn run(cfg: &RunConfig) -> Result<Report> {
    match cfg.command {
        Command::Analyze => analyze(cfg),
        Command::Verify => verify(cfg),
        Command::Flatness => flatness(cfg),
        Command::Geodesic => geodesic(cfg),
        Command::Family => family(cfg),
        Command::Lorentz => lorentz(cfg),
    }
}

fn analyze(cfg: &RunConfig) -> Result<Report> {
    let spec = &cfg.spec;
    let records = sweep(&cfg.grid_points()?, |p| {
        let fd = spec.frame_data(p.0, p.1)?;
        let k = kinematics_of(&fd)?;
        let mut rec = Record::at(p);
        rec.values.insert("S".into(), fd.scalar.value());
        rec.values.insert("ric_tt".into(), fd.ricci_frame[0][0].value());
        rec.values.insert("omega".into(), k.omega);
        rec.residuals.insert("div_t".into(), k.div_t.abs());
        rec.residuals.insert("shear".into(), k.shear_abs());
        rec.residuals.insert("geodesic".into(), k.geodesic);
        if spec.signature == Signature::Riemannian {
            let pk = curvature_packet_of(&fd)?;
            rec.spectrum = Some(pk.spectrum);
            rec.residuals.insert("spectrum".into(), pk.spectrum_residual);
            rec.residuals.insert("operator".into(), pk.operator_residual);
        }
        Ok(rec)
    })?;
    Ok(Report::assemble(cfg, records, BTreeMap::new(), BTreeMap::new(), Vec::new()))
}

fn verify(cfg: &RunConfig) -> Result<Report> {
    let spec = &cfg.spec;
    let riemannian = spec.signature == Signature::Riemannian;
    let angle = seeded_field(cfg.seed, 1.0);
    let conf = seeded_field(cfg.seed.wrapping_add(1), 0.3);
    let pair = if riemannian { Some(to_lorentz(spec.clone())?) } else { None };
    let records = sweep(&cfg.grid_points()?, |p| {
        let fd = spec.frame_data(p.0, p.1)?;
        let mut rec = Record::at(p);
        rec.residuals.insert("gauss".into(), gauss_residual(spec, p)?);
        if riemannian {
            let s = structure_residuals_of(&fd)?;
            let lb1 = s.lb1.iter().map(|z| z.norm()).fold(0.0, f64::max);
            let lb2 = s.lb2.iter().map(|z| z.norm()).fold(0.0, f64::max);
            for (k, v) in [
                ("s1", s.s1.norm()),
                ("s2", s.s2.norm()),
                ("s3", s.s3.norm()),
                ("s4", s.s4.norm()),
                ("s5", s.s5.norm()),
                ("lb1", lb1),
                ("lb2", lb2),
                ("bid1", s.bid1.norm()),
                ("bid2", s.bid2.norm()),
                ("t_omega", s.t_omega),
                ("ric_tt", s.ric_tt),
                ("ric_mm", s.ric_mm),
                ("ric0", s.ric0.norm()),
                ("ric2", s.ric2),
            ] {
                rec.residuals.insert(k.into(), v);
            }
            let pk = curvature_packet_of(&fd)?;
            rec.spectrum = Some(pk.spectrum);
            rec.residuals.insert("spectrum".into(), pk.spectrum_residual);
            let rot = rotate_frame_of(&fd, &angle.eval(p.0, p.1, 3)?)?;
            rec.residuals.insert("rotation".into(), rot.max_residual());
            let cc = conformal_rescale_check_of(&fd.geom, &fd.frame, &conf.eval(p.0, p.1, 3)?)?;
            rec.residuals.insert("conformal".into(), cc.sigma_residual.max(cc.omega_residual));
            if let Some(pair) = &pair {
                let l = lorentz_relations_check(pair, p)?;
                rec.residuals.insert("lorentz_ric_tt".into(), l.res_ric_tt);
                rec.residuals.insert("lorentz_scalar".into(), l.res_scalar);
                rec.residuals.insert("lorentz_profile".into(), l.res_profile);
            }
        }
        Ok(rec)
    })?;
    Ok(Report::assemble(cfg, records, BTreeMap::new(), BTreeMap::new(), Vec::new()))
}

fn flatness_records(spec: &MetricSpec, points: &[(f64, f64)]) -> Result<Vec<Record>> {
    sweep(points, |p| {
        let fd = spec.frame_data(p.0, p.1)?;
        let cy = cotton_york_of(&fd)?;
        let mut rec = Record::at(p);
        rec.values.insert("cy_norm".into(), cy.norm());
        rec.values.insert("S".into(), fd.scalar.value());
        rec.values.insert("ric_tt".into(), fd.ricci_frame[0][0].value());
        rec.residuals.insert("cy_asymmetry".into(), cy.asymmetry());
        rec.residuals.insert("cy_trace".into(), cy.trace().abs());
        Ok(rec)
    })
}

fn flatness_summary(
    cfg: &RunConfig,
    spec: &MetricSpec,
    points: &[(f64, f64)],
    values: &mut BTreeMap<String, f64>,
    verdicts: &mut BTreeMap<String, String>,
) -> Result<()> {
    let fit = flatness_verdict_with(spec, points, cfg.tol("flat"))?;
    values.insert("B".into(), fit.b);
    values.insert("C".into(), fit.c);
    values.insert("fit_residual".into(), fit.residual_max);
    values.insert("cy_max".into(), fit.cy_max);
    if let Some(d) = fit.constant_twist {
        values.insert("constant_twist_gap".into(), d);
    }
    if fit.non_unique {
        verdicts.insert("fit".into(), "non-unique (B = 0 chosen)".into());
    }
    verdicts.insert("main".into(), fit.verdict.name().into());
    Ok(())
}

fn flatness(cfg: &RunConfig) -> Result<Report> {
    let spec = &cfg.spec;
    if spec.signature != Signature::Riemannian {
        return Err(Error::SignatureMismatch { expected: "riemannian" });
    }
    let points = cfg.grid_points()?;
    let records = flatness_records(spec, &points)?;
    let mut values = BTreeMap::new();
    let mut verdicts = BTreeMap::new();
    flatness_summary(cfg, spec, &points, &mut values, &mut verdicts)?;
    let mut failures = Vec::new();
    if cfg.expect.is_none() && verdicts["main"] == "inconclusive" {
        failures.push("flatness verdict is inconclusive".into());
    }
    Ok(Report::assemble(cfg, records, values, verdicts, failures))
}

/// Seeded unit initial states for `geodesic`.
pub fn geodesic_inits(cfg: &RunConfig) -> Result<Vec<GeodesicState>> {
    let spec = &cfg.spec;
    let pts = cfg.grid_points()?;
    let (r0, r1) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.0), b.max(p.0)));
    let (t0, t1) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), p| (a.min(p.1), b.max(p.1)));
    let n = pts.len().min(8);
    let starts = quasi_random(n, (r0, r1), (t0, t1.max(t0 + 1e-9)), cfg.seed);
    let dirs = uniform(3 * n, -1.0, 1.0, cfg.seed.wrapping_add(7));
    starts
        .iter()
        .enumerate()
        .map(|(i, p)| GeodesicState::new(spec, p.0, p.1, [dirs[3 * i], dirs[3 * i + 1], dirs[3 * i + 2]]))
        .collect()
}

/// Write each `geodesic` trajectory to `<prefix>_<i>.csv`.
pub fn write_trajectories(cfg: &RunConfig, prefix: &Path) -> Result<()> {
    if cfg.command != Command::Geodesic {
        return Ok(());
    }
    for (i, init) in geodesic_inits(cfg)?.iter().enumerate() {
        let rep = integrate_geodesic(&cfg.spec, init, cfg.length, 1e-10)?;
        let mut name = prefix.as_os_str().to_owned();
        name.push(format!("_{i}.csv"));
        rep.write_csv(Path::new(&name))?;
    }
    Ok(())
}

fn geodesic(cfg: &RunConfig) -> Result<Report> {
    let spec = &cfg.spec;
    let inits = geodesic_inits(cfg)?;
    let records = inits
        .par_iter()
        .map(|init| {
            let p = (init.r, init.theta);
            let rep = integrate_geodesic(spec, init, cfg.length, 1e-10)?;
            let mut rec = Record::at(p);
            rec.values.insert("c".into(), init.conserved_c);
            let last = rep.trajectory.last().map(|t| t.state).unwrap_or(*init);
            rec.values.insert("r_end".into(), last.r);
            rec.values.insert("theta_end".into(), last.theta);
            rec.residuals.insert("c_drift".into(), rep.c_drift);
            rec.residuals.insert("speed_drift".into(), rep.speed_drift);
            if let Some(pr) = rep.projection_residual {
                rec.residuals.insert("projection".into(), pr);
            }
            Ok(rec)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut values = BTreeMap::new();
    values.insert("length".into(), cfg.length);
    Ok(Report::assemble(cfg, records, values, BTreeMap::new(), Vec::new()))
}

fn family(cfg: &RunConfig) -> Result<Report> {
    let spec = &cfg.spec;
    if !spec.name.starts_with("cf_family") {
        return Err(Error::BadParams("`family` needs a cf_family spec".into()));
    }
    let params = FamilyParams::from_map(&spec.params)?;
    let mut values = BTreeMap::new();
    let mut verdicts = BTreeMap::new();
    let mut failures = Vec::new();
    let probe = solve_omega_ode_on(&params, -12.0, 12.0)?;
    let periods = 10.0;
    let sol = match probe.period {
        Some(p) => solve_omega_ode_on(&params, -0.5 * periods * p, 0.5 * periods * p)?,
        None => probe,
    };
    if let Some(p) = sol.period {
        values.insert("period".into(), p);
    }
    values.insert("energy_drift".into(), sol.energy_drift);
    values.insert("gradient_identity".into(), sol.gradient_identity_residual());
    if !(sol.energy_drift < cfg.tol("energy")) {
        failures.push(format!("energy drift {:e} exceeds {:e}", sol.energy_drift, cfg.tol("energy")));
    }
    let built = build_cf_metric(&params)?;
    let d = built.domain;
    let points = match cfg.grid {
        Some(g) => g.points(),
        None => GridSpec::new((d.r_min, d.r_max), 12, (d.theta_min, d.theta_max), 6)?.points(),
    };
    values.insert("r_min".into(), d.r_min);
    values.insert("r_max".into(), d.r_max);
    let records = flatness_records(&built, &points)?;
    flatness_summary(cfg, &built, &points, &mut values, &mut verdicts)?;
    if cfg.expect.is_none() && verdicts["main"] != "flat" {
        failures.push(format!("built metric is `{}`, not flat", verdicts["main"]));
    }
    Ok(Report::assemble(cfg, records, values, verdicts, failures))
}

fn lorentz(cfg: &RunConfig) -> Result<Report> {
    let pair = to_lorentz(cfg.spec.clone())?;
    let points = cfg.grid_points()?;
    let records = sweep(&points, |p| {
        let l = lorentz_relations_check(&pair, p)?;
        let (metric, tt) = pair.invariant_residuals(p)?;
        let mut rec = Record::at(p);
        rec.values.insert("S_R".into(), l.s_r);
        rec.values.insert("S_L".into(), l.s_l);
        rec.values.insert("ric_tt".into(), l.ric_tt_r);
        rec.residuals.insert("lorentz_ric_tt".into(), l.res_ric_tt);
        rec.residuals.insert("lorentz_scalar".into(), l.res_scalar);
        rec.residuals.insert("lorentz_profile".into(), l.res_profile);
        rec.residuals.insert("lorentz_gauss".into(), l.res_gauss);
        rec.residuals.insert("lorentz_metric".into(), metric.max(tt));
        Ok(rec)
    })?;
    let r_max = points.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    let c = lorentz_completeness(&pair, r_max, 16, 4)?;
    let mut values = BTreeMap::new();
    values.insert("tail_lorentzian".into(), c.lorentzian.tail_estimate);
    values.insert("tail_riemannian".into(), c.riemannian.tail_estimate);
    values.insert("profile_gap".into(), c.profile_gap);
    let mut verdicts = BTreeMap::new();
    verdicts.insert("completeness".into(), format!("{} ({VERDICT_SCOPE})", c.verdict.name()));
    let mut failures = Vec::new();
    if !c.agree {
        failures.push(format!("Riemannian and Lorentzian profiles differ by {:e}", c.profile_gap));
    }
    Ok(Report::assemble(cfg, records, values, verdicts, failures))
}
