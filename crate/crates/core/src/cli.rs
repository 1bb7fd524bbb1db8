// SPDX-License-Identifier: Apache-2.0

//! Command-line front end.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::config::{parse_value_list, ExperimentConfig, ExperimentKind, GridSpec, DEFAULT_TAU_GRID};
use crate::dynamics::{IntegratorParams, POSITIVITY_TOLERANCE};
use crate::error::{QuenchError, Result};
use crate::experiments::{noise_scan, noiseless_tau0, sweep_points, RampEnds};
use crate::model::{build_grid, NoiseKind, QuenchProtocol};
use crate::oracle::{ramp_comparison, static_comparison, OracleRow};
use crate::output::{manifest_hash, read_csv, Cell, Table};
use crate::pipeline::{quench_snapshots, static_snapshot, ChainSnapshot};
use crate::scaling::{
    estimate_tau_opt, fit_linear, fit_log_scaling, fit_power_law, FitResult, FitWindow,
    SweepSeries, SweepVariable,
};

/// Tolerance of the static and dynamic oracle checks.
pub const ORACLE_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Parser)]
#[command(name = "quenchlab", version, about = "Noisy linear quenches of the transverse-field Ising chain")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ground-state observables over a range of fields.
    Static(RunArgs),
    /// One ramp; final observables, or a field scan with --hf-scan.
    Quench(RunArgs),
    /// Final observables over a τ grid, for each noise strength.
    SweepTau(RunArgs),
    /// Entangled window, τ_c and maximum concurrence per noise strength.
    SweepXi(RunArgs),
    /// Defect density over a τ grid and the optimal annealing time.
    Defects(RunArgs),
    /// Least-squares fit of two columns of a CSV written by this tool.
    Fit(FitArgs),
    /// Compare the free-fermion pipeline with exact diagonalization.
    OracleCheck(RunArgs),
    /// Print the effective configuration as TOML.
    PrintConfig(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NoiseArg {
    White,
    Ou,
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// TOML file with configuration values; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long = "hi", allow_hyphen_values = true)]
    pub h_i: Option<f64>,
    #[arg(long = "hf", allow_hyphen_values = true)]
    pub h_f: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    /// Geometric τ grid `lo:hi:points-per-decade`.
    #[arg(long)]
    pub tau_grid: Option<GridSpec>,
    #[arg(long)]
    pub xi: Option<f64>,
    /// Noise strengths, `a,b,c` or `lo:hi:count`.
    #[arg(long)]
    pub xi_grid: Option<String>,
    #[arg(long, value_enum)]
    pub noise: Option<NoiseArg>,
    #[arg(long)]
    pub tau_n: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, env = "QUENCHLAB_THREADS")]
    pub threads: Option<usize>,
    /// Record observables along the ramp.
    #[arg(long)]
    pub hf_scan: bool,
    #[arg(long)]
    pub scan_points: Option<usize>,
    #[arg(long)]
    pub dt_max: Option<f64>,
    #[arg(long)]
    pub safety: Option<f64>,
    #[arg(long)]
    pub max_phase: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitModel {
    Power,
    Log,
    Linear,
}

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    /// CSV file produced by another subcommand.
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long, default_value = "tau")]
    pub x: String,
    #[arg(long, default_value = "C_nnn")]
    pub y: String,
    #[arg(long, value_enum, default_value = "power")]
    pub model: FitModel,
    /// Fit window `lo:hi`.
    #[arg(long, allow_hyphen_values = true)]
    pub window: Option<String>,
    /// Keep only rows whose `xi` column equals this value.
    #[arg(long = "where-xi")]
    pub where_xi: Option<f64>,
    /// Output JSON file; printed to stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl RunArgs {
    /// Configuration file (if any) with the flags applied on top.
    pub fn resolve(&self) -> Result<ExperimentConfig> {
        let mut c = match &self.config {
            Some(p) => ExperimentConfig::from_file(p)?,
            None => ExperimentConfig::default(),
        };
        if let Some(v) = self.n {
            c.n = v;
        }
        if let Some(v) = self.h_i {
            c.h_i = v;
        }
        if self.h_f.is_some() {
            c.h_f = self.h_f;
        }
        if let Some(v) = self.tau {
            c.tau = v;
        }
        if self.tau_grid.is_some() {
            c.tau_grid = self.tau_grid;
        }
        if let Some(v) = self.xi {
            c.xi = v;
        }
        if let Some(s) = &self.xi_grid {
            c.xi_grid = Some(parse_value_list(s)?);
        }
        if let Some(v) = self.noise {
            c.noise = match v {
                NoiseArg::White => NoiseKind::White,
                NoiseArg::Ou => NoiseKind::OrnsteinUhlenbeck,
            };
        }
        if let Some(v) = self.tau_n {
            c.tau_n = v;
        }
        if let Some(v) = self.seed {
            c.seed = v;
        }
        if let Some(v) = &self.out {
            c.out = v.clone();
        }
        if self.threads.is_some() {
            c.threads = self.threads;
        }
        c.hf_scan |= self.hf_scan;
        if let Some(v) = self.scan_points {
            c.scan_points = v;
        }
        if let Some(v) = self.dt_max {
            c.integrator.dt_max = v;
        }
        if let Some(v) = self.safety {
            c.integrator.safety = v;
        }
        if let Some(v) = self.max_phase {
            c.integrator.max_phase = v;
        }
        Ok(c)
    }
}

/// Parses arguments, runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match run_command(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn run_command(command: &Command) -> Result<()> {
    let (kind, args) = match command {
        Command::Static(a) => (ExperimentKind::Static, a),
        Command::Quench(a) => (ExperimentKind::Quench, a),
        Command::SweepTau(a) => (ExperimentKind::SweepTau, a),
        Command::SweepXi(a) => (ExperimentKind::SweepXi, a),
        Command::Defects(a) => (ExperimentKind::Defects, a),
        Command::OracleCheck(a) => (ExperimentKind::OracleCheck, a),
        Command::Fit(f) => return run_fit(f),
        Command::PrintConfig(a) => {
            print!("{}", a.resolve()?.to_toml());
            return Ok(());
        }
    };
    let config = args.resolve()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = config.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| QuenchError::config(format!("thread pool: {e}")))?;
    pool.install(|| run(kind, &config))
}

/// Results of one experiment before they are written out.
#[derive(Debug, Clone, Default)]
pub struct RunOutput {
    pub tables: Vec<Table>,
    pub fits: Vec<(String, FitResult)>,
    pub clamp_count: usize,
    /// Experiment-specific summary recorded in the manifest.
    pub summary: Value,
    /// Set when a check inside the run failed (oracle deviations).
    pub failure: Option<String>,
}

/// Fields that determine the numbers; thread count and output path are excluded.
fn identity(kind: ExperimentKind, config: &ExperimentConfig) -> Value {
    let mut cfg = json!(config);
    if let Some(m) = cfg.as_object_mut() {
        m.remove("threads");
        m.remove("out");
    }
    json!({
        "experiment": kind.name(),
        "config": cfg,
        "h_f": config.h_f_for(kind),
        "tau_grid": config.tau_grid.unwrap_or(DEFAULT_TAU_GRID),
        "code_version": env!("CARGO_PKG_VERSION"),
        "grid": { "n_sites": config.n, "modes": config.n / 2 },
        "seed": config.seed,
    })
}

/// Executes `kind` and writes CSV files and `manifest.json` into `config.out`.
pub fn run(kind: ExperimentKind, config: &ExperimentConfig) -> Result<()> {
    let start = Instant::now();
    let ident = identity(kind, config);
    let hash = manifest_hash(&ident);
    fs::create_dir_all(&config.out)?;
    let result = config.validate(kind).and_then(|()| compute(kind, config));
    let mut manifest = ident;
    manifest["config"] = json!(config);
    manifest["manifest_sha256"] = json!(hash);
    manifest["threads"] = json!(rayon::current_num_threads());
    manifest["integrator"] = json!({
        "params": config.integrator,
        "positivity_tolerance": POSITIVITY_TOLERANCE,
    });
    let outcome = match result {
        Ok(out) => {
            let mut files = Vec::new();
            for t in &out.tables {
                files.push(t.write(&config.out, &hash, kind.name())?);
            }
            if !out.fits.is_empty() {
                let fits: serde_json::Map<String, Value> =
                    out.fits.iter().map(|(k, f)| (k.clone(), f.to_json())).collect();
                fs::write(config.out.join("fits.json"), serde_json::to_string_pretty(&fits)?)?;
                files.push("fits.json".into());
            }
            manifest["outputs"] = json!(files);
            manifest["clamp_count"] = json!(out.clamp_count);
            manifest["summary"] = out.summary.clone();
            match &out.failure {
                Some(msg) => {
                    manifest["status"] = json!("check-failed");
                    Err(QuenchError::Search(msg.clone()))
                }
                None => {
                    manifest["status"] = json!("ok");
                    Ok(())
                }
            }
        }
        Err(e) => {
            manifest["status"] = json!("error");
            manifest["error"] = error_record(&e);
            Err(e)
        }
    };
    manifest["wall_time_s"] = json!(start.elapsed().as_secs_f64());
    fs::write(config.out.join("manifest.json"), serde_json::to_string_pretty(&manifest)?)?;
    outcome
}

fn error_record(e: &QuenchError) -> Value {
    let mut rec = json!({ "message": e.to_string(), "exit_code": e.exit_code() });
    let mut cur = e;
    loop {
        match cur {
            QuenchError::Mode { k, source } => {
                rec["k"] = json!(k);
                cur = source;
            }
            QuenchError::Positivity { k, t, detail } => {
                if k.is_finite() {
                    rec["k"] = json!(k);
                }
                if t.is_finite() {
                    rec["t"] = json!(t);
                }
                rec["detail"] = json!(detail);
                break;
            }
            _ => break,
        }
    }
    rec
}

/// Runs the numerical part of an experiment.
pub fn compute(kind: ExperimentKind, config: &ExperimentConfig) -> Result<RunOutput> {
    match kind {
        ExperimentKind::Static => run_static(config),
        ExperimentKind::Quench => run_quench(config),
        ExperimentKind::SweepTau => run_sweep_tau(config),
        ExperimentKind::SweepXi => run_sweep_xi(config),
        ExperimentKind::Defects => run_defects(config),
        ExperimentKind::OracleCheck => run_oracle(config),
        ExperimentKind::Fit => Err(QuenchError::config("fit reads its input from --in")),
    }
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| if i + 1 == n { b } else { a + (b - a) * i as f64 / (n - 1) as f64 })
        .collect()
}

fn snapshot_cells(s: &ChainSnapshot) -> Vec<Cell> {
    vec![
        s.c_nn.into(),
        s.c_nnn.into(),
        s.sz.into(),
        s.defect_density.into(),
        s.mean_purity.into(),
    ]
}

const SNAPSHOT_COLUMNS: [&str; 5] = ["C_nn", "C_nnn", "sz", "defect_density", "mean_purity"];

fn columns(lead: &[&str], tail: &[&str]) -> Vec<String> {
    lead.iter().chain(tail).map(|s| s.to_string()).collect()
}

fn table(name: &str, lead: &[&str], tail: &[&str]) -> Table {
    let cols = columns(lead, tail);
    let refs: Vec<&str> = cols.iter().map(String::as_str).collect();
    Table::new(name, &refs)
}

fn run_static(c: &ExperimentConfig) -> Result<RunOutput> {
    let grid = build_grid(c.n)?;
    let fields = linspace(c.h_i, c.h_f_for(ExperimentKind::Static), c.scan_points);
    let mut t = Table::new("static", &["h0", "C_nn", "C_nnn", "sz", "xx_1", "yy_1", "zz_1", "xx_2", "yy_2", "zz_2"]);
    for &h in &fields {
        let s = static_snapshot(&grid, h, 2)?;
        let (a, b) = (&s.spin[0], &s.spin[1]);
        t.push(vec![
            h.into(),
            s.c_nn.into(),
            s.c_nnn.into(),
            s.sz.into(),
            a.xx.re.into(),
            a.yy.re.into(),
            a.zz.re.into(),
            b.xx.re.into(),
            b.yy.re.into(),
            b.zz.re.into(),
        ]);
    }
    Ok(RunOutput {
        tables: vec![t],
        summary: json!({ "fields": fields.len() }),
        ..Default::default()
    })
}

fn run_quench(c: &ExperimentConfig) -> Result<RunOutput> {
    let grid = build_grid(c.n)?;
    let h_f = c.h_f_for(ExperimentKind::Quench);
    let protocol = QuenchProtocol::new(c.h_i, h_f, c.tau)?;
    let fields = if c.hf_scan {
        linspace(c.h_i, h_f, c.scan_points)
    } else {
        vec![h_f]
    };
    let snaps = quench_snapshots(&grid, &protocol, &c.noise_spec(c.xi), &fields, &c.integrator, 2)?;
    let mut t = table("quench", &["t", "h0"], &SNAPSHOT_COLUMNS);
    let mut clamps = 0;
    for s in &snaps {
        let mut row = vec![s.t.into(), s.h0.into()];
        row.extend(snapshot_cells(s));
        t.push(row);
        clamps += s.clamp_count;
    }
    let last = snaps.last().expect("at least one readout");
    Ok(RunOutput {
        tables: vec![t],
        clamp_count: clamps,
        summary: json!({ "final": last.record(), "C_nn": last.c_nn, "C_nnn": last.c_nnn }),
        ..Default::default()
    })
}

fn ends(c: &ExperimentConfig, kind: ExperimentKind) -> RampEnds {
    RampEnds {
        h_i: c.h_i,
        h_f: c.h_f_for(kind),
    }
}

fn run_sweep_tau(c: &ExperimentConfig) -> Result<RunOutput> {
    let grid = build_grid(c.n)?;
    let taus = c.tau_points()?;
    let xis = c.xi_values();
    let jobs: Vec<(f64, f64)> = xis.iter().flat_map(|&x| taus.iter().map(move |&t| (x, t))).collect();
    let snaps = sweep_points(&grid, ends(c, ExperimentKind::SweepTau), &jobs, &c.integrator)?;
    let mut t = table("sweep_tau", &["xi", "tau"], &SNAPSHOT_COLUMNS);
    let mut clamps = 0;
    for (&(xi, tau), s) in jobs.iter().zip(&snaps) {
        let mut row = vec![xi.into(), tau.into()];
        row.extend(snapshot_cells(s));
        t.push(row);
        clamps += s.clamp_count;
    }
    Ok(RunOutput {
        tables: vec![t],
        clamp_count: clamps,
        summary: json!({ "points": jobs.len() }),
        ..Default::default()
    })
}

fn run_sweep_xi(c: &ExperimentConfig) -> Result<RunOutput> {
    let grid = build_grid(c.n)?;
    let taus = c.tau_points()?;
    let ramp = ends(c, ExperimentKind::SweepXi);
    let tau0 = noiseless_tau0(&grid, ramp, &c.integrator)?;
    let mut summary = Table::new(
        "sweep_xi",
        &["xi", "tau_c", "C_max", "tau_at_max", "log_slope", "log_r_squared", "log_zero_crossing"],
    );
    let mut scan_table = Table::new("sweep_xi_scan", &["xi", "tau", "C_nnn"]);
    let (mut xs2, mut tcs, mut maxes) = (Vec::new(), Vec::new(), Vec::new());
    let mut fits = Vec::new();
    for &xi in &c.xi_values() {
        let scan = noise_scan(&grid, ramp, xi, &taus, &c.integrator, tau0, Some(2))?;
        for (t, v) in scan.taus.iter().zip(&scan.c_nnn) {
            scan_table.push(vec![xi.into(), (*t).into(), (*v).into()]);
        }
        let (slope, r2, zero) = scan
            .log_fit
            .as_ref()
            .map_or((f64::NAN, f64::NAN, f64::NAN), |f| (f.slope, f.r_squared, f.zero_crossing()));
        summary.push(vec![
            xi.into(),
            scan.tau_c.unwrap_or(f64::NAN).into(),
            scan.c_max.into(),
            scan.tau_at_max.into(),
            slope.into(),
            r2.into(),
            zero.into(),
        ]);
        if let Some(f) = scan.log_fit {
            fits.push((format!("log_scaling_xi_{xi}"), f));
        }
        if let Some(tc) = scan.tau_c {
            xs2.push(xi * xi);
            tcs.push(tc);
            maxes.push(scan.c_max);
        }
    }
    if xs2.len() >= 3 {
        let s = SweepSeries::new(SweepVariable::Xi, xs2.clone(), tcs)?;
        fits.push(("tau_c_vs_xi2".into(), fit_power_law(&s, FitWindow::all())?));
        let m = SweepSeries::new(SweepVariable::Xi, xs2, maxes)?;
        fits.push(("max_c_vs_xi2".into(), fit_linear(&m, FitWindow::all())?));
    }
    Ok(RunOutput {
        tables: vec![summary, scan_table],
        fits,
        summary: json!({ "tau0": tau0 }),
        ..Default::default()
    })
}

fn run_defects(c: &ExperimentConfig) -> Result<RunOutput> {
    let grid = build_grid(c.n)?;
    let taus = c.tau_points()?;
    let xis = c.xi_values();
    let jobs: Vec<(f64, f64)> = xis.iter().flat_map(|&x| taus.iter().map(move |&t| (x, t))).collect();
    let snaps = sweep_points(&grid, ends(c, ExperimentKind::Defects), &jobs, &c.integrator)?;
    let mut t = Table::new("defects", &["xi", "tau", "defect_density", "mean_purity"]);
    for (&(xi, tau), s) in jobs.iter().zip(&snaps) {
        t.push(vec![xi.into(), tau.into(), s.defect_density.into(), s.mean_purity.into()]);
    }
    let mut fits = Vec::new();
    let mut opt = Table::new("tau_opt", &["xi", "tau_opt"]);
    let (mut xs2, mut topts) = (Vec::new(), Vec::new());
    for (i, &xi) in xis.iter().enumerate() {
        let n: Vec<f64> = snaps[i * taus.len()..(i + 1) * taus.len()]
            .iter()
            .map(|s| s.defect_density)
            .collect();
        let series = SweepSeries::new(SweepVariable::Tau, taus.clone(), n)?.with_fixed("xi", xi);
        if xi == 0.0 {
            if let Ok(f) = fit_power_law(&series, FitWindow::all()) {
                fits.push(("kzm_defects".into(), f));
            }
            continue;
        }
        match estimate_tau_opt(&series) {
            Ok(to) => {
                opt.push(vec![xi.into(), to.into()]);
                xs2.push(xi * xi);
                topts.push(to);
            }
            Err(QuenchError::Fit(_)) => opt.push(vec![xi.into(), f64::NAN.into()]),
            Err(e) => return Err(e),
        }
    }
    if xs2.len() >= 3 {
        let s = SweepSeries::new(SweepVariable::Xi, xs2, topts)?;
        fits.push(("tau_opt_vs_xi2".into(), fit_power_law(&s, FitWindow::all())?));
    }
    Ok(RunOutput {
        tables: vec![t, opt],
        fits,
        clamp_count: snaps.iter().map(|s| s.clamp_count).sum(),
        summary: json!({ "points": jobs.len() }),
        ..Default::default()
    })
}

/// Static and ramp comparisons used by `oracle-check`.
pub fn oracle_rows(n: usize, params: &IntegratorParams) -> Result<Vec<OracleRow>> {
    let mut rows = Vec::new();
    for h0 in [0.2, 0.5, 1.0, 1.5, 3.0] {
        rows.extend(static_comparison(n, h0)?);
    }
    let fields = linspace(-5.0, 5.0, 11);
    for tau in [0.5, 5.0] {
        let protocol = QuenchProtocol::new(-5.0, 5.0, tau)?;
        rows.extend(ramp_comparison(n, &protocol, &fields, params, 2e-3)?);
    }
    Ok(rows)
}

fn run_oracle(c: &ExperimentConfig) -> Result<RunOutput> {
    let rows = oracle_rows(c.n, &c.integrator)?;
    let mut t = Table::new("oracle", &["n", "h0", "tau", "quantity", "pipeline", "oracle", "deviation"]);
    for r in &rows {
        t.push(vec![
            r.n.into(),
            r.h0.into(),
            r.tau.unwrap_or(f64::NAN).into(),
            r.quantity.as_str().into(),
            r.pipeline.into(),
            r.oracle.into(),
            r.deviation.into(),
        ]);
    }
    // Worst deviation per quantity family and regime.
    let mut groups: Vec<(String, f64)> = Vec::new();
    for r in &rows {
        let family = r.quantity.split('(').next().unwrap_or(&r.quantity);
        let label = match r.tau {
            None => format!("static {family}"),
            Some(tau) => format!("ramp tau={tau} {family}"),
        };
        match groups.iter_mut().find(|(l, _)| *l == label) {
            Some((_, w)) => *w = w.max(r.deviation),
            None => groups.push((label, r.deviation)),
        }
    }
    println!("{:<28} {:>12}  result", "check", "max |dev|");
    let mut failed = Vec::new();
    for (label, worst) in &groups {
        let ok = *worst <= ORACLE_TOLERANCE;
        println!("{label:<28} {worst:>12.3e}  {}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            failed.push(label.clone());
        }
    }
    let worst = rows.iter().map(|r| r.deviation).fold(0.0, f64::max);
    Ok(RunOutput {
        tables: vec![t],
        summary: json!({ "rows": rows.len(), "max_deviation": worst, "tolerance": ORACLE_TOLERANCE }),
        failure: (!failed.is_empty()).then(|| format!("oracle deviations above tolerance: {}", failed.join("; "))),
        ..Default::default()
    })
}

fn parse_window(s: &str) -> Result<FitWindow> {
    let bad = || QuenchError::config(format!("window `{s}` is not lo:hi"));
    let (a, b) = s.split_once(':').ok_or_else(bad)?;
    Ok(FitWindow::new(a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?))
}

fn run_fit(args: &FitArgs) -> Result<()> {
    let csv = read_csv(&args.input)?;
    let mut x = csv.numbers(&args.x)?;
    let mut y = csv.numbers(&args.y)?;
    if let Some(xi) = args.where_xi {
        let keep = csv.numbers("xi")?;
        let (fx, fy) = x
            .iter()
            .zip(&y)
            .zip(&keep)
            .filter(|(_, k)| **k == xi)
            .map(|((a, b), _)| (*a, *b))
            .unzip();
        x = fx;
        y = fy;
    }
    let variable = match args.x.as_str() {
        "tau" => SweepVariable::Tau,
        "h0" | "hf" => SweepVariable::Hf,
        _ => SweepVariable::Xi,
    };
    let series = SweepSeries::new(variable, x, y)?;
    let window = match &args.window {
        Some(w) => parse_window(w)?,
        None => FitWindow::all(),
    };
    let fit = match args.model {
        FitModel::Power => fit_power_law(&series, window)?,
        FitModel::Log => fit_log_scaling(&series, window)?,
        FitModel::Linear => fit_linear(&series, window)?,
    };
    let mut record = fit.to_json();
    record["source"] = json!({
        "file": args.input.display().to_string(),
        "manifest_sha256": csv.header.get("manifest_sha256").cloned().unwrap_or(Value::Null),
        "x": args.x,
        "y": args.y,
    });
    let text = serde_json::to_string_pretty(&record)?;
    match &args.out {
        Some(p) => write_file(p, &text),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(path, text)?;
    Ok(())
}
