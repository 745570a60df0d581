//! Command-line front end.
//!
//! Exit codes: 0 success, 1 configuration or I/O error, 2 flow blowup,
//! 3 monitor failure.

use std::ffi::OsString;
use std::fs::{self, File};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;

use crate::comparison::{comparison_xi_grid, l1_deviation, monitor, solve_t0, ComparisonReport, MonitorOptions};
use crate::config::ScenarioConfig;
use crate::error::{Error, Result};
use crate::flow::{evolve, Trajectory};
use crate::metric::AxisymMetric;
use crate::profile::{build_profile, IsoperimetricProfile};
use crate::rosenau::{curvature_bound, profile_at, RosenauState};
use crate::verify;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_BLOWUP: i32 = 2;
pub const EXIT_MONITOR: i32 = 3;

pub const SERIES_COLUMNS: [&str; 10] = [
    "t",
    "max_K",
    "min_K",
    "bound",
    "bound_margin",
    "area",
    "l1_dev",
    "l1_bound",
    "min_profile_margin",
    "sup_dK",
];

pub const MARGIN_COLUMNS: [&str; 6] = ["t", "xi", "h_or_phi_u", "phi_model", "margin", "certified"];

pub const ROSENAU_COLUMNS: [&str; 6] = ["t", "xi", "profile", "K_pole", "K_equator", "bound"];

#[derive(Debug, Parser)]
#[command(
    name = "sphere-ricci",
    version,
    about = "Normalized Ricci flow on axisymmetric spheres"
)]
pub struct Cli {
    /// Scenario file (`key = value` lines).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Output directory, overrides `output.dir`.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Grid intervals, overrides `grid.n`.
    #[arg(long, global = true, value_name = "INT")]
    pub n: Option<usize>,

    /// Only print errors.
    #[arg(long, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate the flow; writes series.csv and snapshots/.
    Simulate,
    /// Fit the Rosenau offset t0 and run the monitors; writes report.json and margins.csv.
    Compare,
    /// Tabulate the Rosenau closed forms; writes rosenau.csv.
    Rosenau {
        /// Flow times, comma separated; `inf` is allowed.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = vec![0.0, 0.5, 1.0, 2.0, f64::INFINITY])]
        t: Vec<f64>,
        /// Area fractions in (0, 1), comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = vec![0.1, 0.25, 0.5, 0.75, 0.9])]
        xi: Vec<f64>,
    },
    /// Run the invariant suite; writes verify.csv.
    Verify,
}

/// Parses `args` (program name first) and runs the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_CONFIG
            } else {
                EXIT_OK
            }
        }
    }
}

pub fn run(cli: &Cli) -> i32 {
    let result = match &cli.command {
        Command::Simulate => simulate(cli),
        Command::Compare => compare(cli),
        Command::Rosenau { t, xi } => rosenau_table(cli, t, xi),
        Command::Verify => verify_cmd(cli),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Exit status for a failed command.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Blowup { .. } => EXIT_BLOWUP,
        _ => EXIT_CONFIG,
    }
}

macro_rules! say {
    ($cli:expr, $($arg:tt)*) => {
        if !$cli.quiet {
            println!($($arg)*);
        }
    };
}

/// Scenario from `--config` (or defaults) with the command-line overrides.
pub fn resolve_config(cli: &Cli) -> Result<ScenarioConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::default(),
    };
    if let Some(n) = cli.n {
        cfg.grid_n = n;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Seventeen significant digits; `inf`, `-inf` and `nan` spelled out.
pub fn fmt17(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:.16e}")
    }
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

struct Table {
    path: PathBuf,
    writer: csv::Writer<File>,
}

impl Table {
    fn create(path: PathBuf, header: &[&str]) -> Result<Self> {
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut writer = csv::Writer::from_writer(file);
        writer.write_record(header)?;
        Ok(Self { path, writer })
    }

    fn row<I, S>(&mut self, fields: I) -> Result<()>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        Ok(self.writer.write_record(fields)?)
    }

    fn finish(mut self) -> Result<()> {
        self.writer.flush().map_err(|e| Error::io(&self.path, e))
    }
}

fn integrate(cli: &Cli, cfg: &ScenarioConfig) -> Result<(AxisymMetric, Trajectory)> {
    let m0 = cfg.initial_metric(cfg.grid_n)?;
    say!(
        cli,
        "initial {} on n = {}, t_end = {}",
        cfg.initial,
        cfg.grid_n,
        cfg.t_end
    );
    match evolve(&m0, &cfg.flow_params()) {
        Ok(traj) => Ok((m0, traj)),
        Err(Error::Blowup {
            time,
            reason,
            last_good,
        }) => {
            if let Some(m) = &last_good {
                let dir = cfg.output_dir.join("snapshots");
                if create_dir(&dir).is_ok() {
                    let _ = write_metric(&dir.join("last_good_metric.csv"), m);
                }
            }
            Err(Error::Blowup {
                time,
                reason,
                last_good,
            })
        }
        Err(e) => Err(e),
    }
}

fn offset(m0: &AxisymMetric) -> Result<f64> {
    Ok(solve_t0(&build_profile(m0, &comparison_xi_grid())?))
}

fn simulate(cli: &Cli) -> Result<i32> {
    let cfg = resolve_config(cli)?;
    let (m0, traj) = integrate(cli, &cfg)?;
    let dir = &cfg.output_dir;
    let snap_dir = dir.join("snapshots");
    create_dir(&snap_dir)?;

    let report = if cfg.comparison_enabled {
        let t0 = offset(&m0)?;
        Some(monitor(&traj, t0, &MonitorOptions::default())?)
    } else {
        None
    };
    write_series(&dir.join("series.csv"), &traj, report.as_ref())?;

    let xi = cfg.profile_xi();
    let profiles: Vec<IsoperimetricProfile> = traj
        .snapshots
        .par_iter()
        .map(|m| build_profile(m, &xi))
        .collect::<Result<_>>()?;
    let mut index = Table::create(
        snap_dir.join("index.csv"),
        &["index", "t", "metric", "profile", "certified"],
    )?;
    for (i, (m, p)) in traj.snapshots.iter().zip(&profiles).enumerate() {
        let metric_name = format!("metric_{i:03}.csv");
        let profile_name = format!("profile_{i:03}.csv");
        write_metric(&snap_dir.join(&metric_name), m)?;
        write_profile(&snap_dir.join(&profile_name), p)?;
        index.row([
            i.to_string(),
            fmt17(m.time()),
            metric_name,
            profile_name,
            p.is_certified().to_string(),
        ])?;
    }
    index.finish()?;
    say!(cli, "{} snapshots written to {}", traj.snapshots.len(), dir.display());
    Ok(EXIT_OK)
}

fn write_series(path: &Path, traj: &Trajectory, report: Option<&ComparisonReport>) -> Result<()> {
    let mut table = Table::create(path.to_path_buf(), &SERIES_COLUMNS)?;
    for (i, m) in traj.snapshots.iter().enumerate() {
        let row = match report {
            Some(r) => {
                let r = &r.records[i];
                [
                    r.t,
                    r.max_k,
                    r.min_k,
                    r.bound,
                    r.bound_margin,
                    r.area,
                    r.l1_dev,
                    r.l1_bound,
                    r.min_profile_margin,
                    r.sup_dk,
                ]
            }
            None => {
                let k = m.gauss_curvature()?;
                let nan = f64::NAN;
                [
                    m.time(),
                    k.max(),
                    k.min(),
                    nan,
                    nan,
                    m.total_area(),
                    l1_deviation(m)?,
                    nan,
                    nan,
                    k.sup_abs_derivative(),
                ]
            }
        };
        table.row(row.iter().map(|&x| fmt17(x)))?;
    }
    table.finish()
}

fn write_metric(path: &Path, m: &AxisymMetric) -> Result<()> {
    let k = m.gauss_curvature()?;
    let mut table = Table::create(path.to_path_buf(), &["psi", "u", "K"])?;
    for ((psi, u), k) in m.grid().nodes().iter().zip(m.u()).zip(k.values()) {
        table.row([fmt17(*psi), fmt17(*u), fmt17(*k)])?;
    }
    table.finish()
}

fn write_profile(path: &Path, p: &IsoperimetricProfile) -> Result<()> {
    let mut table = Table::create(path.to_path_buf(), &["xi", "phi", "dphi", "d2phi", "psi"])?;
    let psi = p.psi().unwrap_or(&[]);
    for i in 0..p.len() {
        let angle = psi.get(i).copied().unwrap_or(f64::NAN);
        table.row([p.xi()[i], p.values()[i], p.d1()[i], p.d2()[i], angle].map(fmt17))?;
    }
    table.finish()
}

#[derive(Serialize)]
struct ReportFile<'a> {
    version: &'static str,
    config: &'a ScenarioConfig,
    #[serde(flatten)]
    report: &'a ComparisonReport,
}

fn compare(cli: &Cli) -> Result<i32> {
    let cfg = resolve_config(cli)?;
    let (m0, traj) = integrate(cli, &cfg)?;
    let t0 = offset(&m0)?;
    let report = monitor(&traj, t0, &MonitorOptions::default())?;
    let dir = &cfg.output_dir;
    create_dir(dir)?;

    let json_path = dir.join("report.json");
    let file = File::create(&json_path).map_err(|e| Error::io(&json_path, e))?;
    serde_json::to_writer_pretty(
        std::io::BufWriter::new(file),
        &ReportFile {
            version: crate::VERSION,
            config: &cfg,
            report: &report,
        },
    )?;

    let mut margins = Table::create(dir.join("margins.csv"), &MARGIN_COLUMNS)?;
    for r in &report.records {
        for ((xi, phi), model) in report.xi.iter().zip(&r.profile).zip(&r.model) {
            margins.row([
                fmt17(r.t),
                fmt17(*xi),
                fmt17(*phi),
                fmt17(*model),
                fmt17(phi - model),
                r.certified.to_string(),
            ])?;
        }
    }
    margins.finish()?;

    say!(cli, "t0 = {}", fmt17(t0));
    for (name, verdict) in report.summary.iter() {
        say!(cli, "  {name:<16} {verdict:?}");
    }
    match &report.first_failure {
        None => Ok(EXIT_OK),
        Some(f) => {
            eprintln!(
                "monitor `{}` failed first at snapshot {} (t = {})",
                f.monitor, f.index, f.t
            );
            Ok(EXIT_MONITOR)
        }
    }
}

fn rosenau_table(cli: &Cli, times: &[f64], xis: &[f64]) -> Result<i32> {
    if let Some(t) = times.iter().find(|t| t.is_nan() || **t == f64::NEG_INFINITY) {
        return Err(Error::config("--t", format!("{t} is not a finite time or inf")));
    }
    if let Some(x) = xis.iter().find(|x| !(**x > 0.0 && **x < 1.0)) {
        return Err(Error::config("--xi", format!("{x} outside (0, 1)")));
    }
    let dir = cli.out.clone().unwrap_or_else(|| ScenarioConfig::default().output_dir);
    create_dir(&dir)?;
    let path = dir.join("rosenau.csv");
    let mut table = Table::create(path.clone(), &ROSENAU_COLUMNS)?;
    for &t in times {
        let state = RosenauState::at_time(t);
        for &xi in xis {
            table.row(
                [
                    t,
                    xi,
                    profile_at(xi, t),
                    state.sup_curvature(),
                    state.min_curvature(),
                    curvature_bound(t, 0.0),
                ]
                .map(fmt17),
            )?;
        }
    }
    table.finish()?;
    say!(cli, "{} rows written to {}", times.len() * xis.len(), path.display());
    Ok(EXIT_OK)
}

fn verify_cmd(cli: &Cli) -> Result<i32> {
    let dir = match &cli.config {
        Some(_) => resolve_config(cli)?.output_dir,
        None => cli.out.clone().unwrap_or_else(|| ScenarioConfig::default().output_dir),
    };
    create_dir(&dir)?;
    // Open the output before the run so an unwritable directory fails fast.
    let mut table = Table::create(
        dir.join("verify.csv"),
        &["check", "n", "value", "limit", "passed", "note"],
    )?;
    let sizes = cli.n.map_or(verify::SIZES.to_vec(), |n| vec![n, 2 * n]);
    let report = verify::run_suite(crate::flow::rhs, &sizes);
    for c in &report.checks {
        table.row([
            c.name.to_string(),
            c.n.map_or_else(String::new, |n| n.to_string()),
            fmt17(c.value),
            fmt17(c.limit),
            c.passed.to_string(),
            c.note.clone(),
        ])?;
    }
    table.finish()?;
    if !cli.quiet {
        print!("{}", report.table());
    }
    let failed = report.failures().count();
    if failed == 0 {
        say!(cli, "all {} checks passed", report.checks.len());
        Ok(EXIT_OK)
    } else {
        eprintln!("{failed} of {} checks failed", report.checks.len());
        Ok(EXIT_MONITOR)
    }
}
