//! Command layer behind the `turbulink` binary.
//!
//! Every subcommand turns a [`RunConfig`] into one or more CSV tables plus a
//! short stdout summary. Tables are deterministic for a given configuration
//! regardless of the worker count.

mod config;
mod validate;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

pub use config::{
    parse_config, parse_config_str, Axis, ChannelConfig, CouplingConfig, EntangleConfig,
    FidelityName, LinkConfig, OutputConfig, RunConfig, SchemeName, SolverSection, SourceConfig,
    SweepConfig, TurbulenceConfig, WaistRuleName, MAX_SWEEP_POINTS,
};
pub use validate::{run_checks, Check};

use crate::channel::{channel_kernel, mode_trace, transmission_matrix, write_traces_csv};
use crate::entanglement::{robustness_scan, write_scan_csv};
use crate::error::{Error, Result};
use crate::ipe::analytic_decay;
use crate::lg::{CouplingTensor, Frequencies, ModeBasis};
use crate::schmidt::{schmidt_eigenvalue, schmidt_number, truncated_source};
use crate::turbulence::{integrated_l, DecayMode};

#[derive(Debug, Parser)]
#[command(
    name = "turbulink",
    version,
    about = "Photon and photon-pair propagation through turbulent links"
)]
pub struct Cli {
    /// Configuration file (TOML).
    #[arg(long, short, env = "TURBULINK_CONFIG", global = true)]
    pub config: Option<PathBuf>,

    /// Override a configuration key, e.g. `--set link.waist_m=0.2`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    pub overrides: Vec<String>,

    /// Output directory (overrides `output.dir`).
    #[arg(long, global = true)]
    pub out_dir: Option<PathBuf>,

    /// Worker threads for parallel sections.
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Print column documentation for the written files.
    #[arg(long, global = true)]
    pub gnuplot_hints: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Schmidt eigenvalues and the truncated source.
    Schmidt,
    /// Fundamental-mode probability at the link end.
    Beam,
    /// Dump the turbulence coupling tensor.
    Coupling,
    /// Two-frequency decay kernel.
    Kernel,
    /// Temporal-mode transmission matrix and mode traces.
    Tmatrix,
    /// Entanglement robustness scan.
    Entangle,
    /// Closed-form versus oracle cross-checks.
    Validate,
    /// Evaluate a subcommand over the Cartesian product of `sweep.axes`.
    Sweep {
        #[arg(value_enum)]
        target: Target,
    },
}

/// Subcommands that can be swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    Schmidt,
    Beam,
    Coupling,
    Kernel,
    Tmatrix,
    Entangle,
    Validate,
}

impl Command {
    fn target(self) -> Option<Target> {
        Some(match self {
            Command::Schmidt => Target::Schmidt,
            Command::Beam => Target::Beam,
            Command::Coupling => Target::Coupling,
            Command::Kernel => Target::Kernel,
            Command::Tmatrix => Target::Tmatrix,
            Command::Entangle => Target::Entangle,
            Command::Validate => Target::Validate,
            Command::Sweep { .. } => return None,
        })
    }
}

/// A CSV table destined for `name` in the output directory.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(name: &str, header: &[&str]) -> Self {
        Self {
            name: name.into(),
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    /// Parses CSV text written by one of the library's writers.
    fn from_csv(name: &str, text: &str) -> Self {
        let mut lines = text.lines();
        let header = lines
            .next()
            .unwrap_or("")
            .split(',')
            .map(String::from)
            .collect();
        let rows = lines
            .map(|l| l.split(',').map(String::from).collect())
            .collect();
        Self {
            name: name.into(),
            header,
            rows,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }
}

/// Shortest round-trip formatting, in exponent form outside `[1e-4, 1e7)`.
pub fn fmt_num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-4..1e7).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// What a subcommand produced.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub tables: Vec<Table>,
    pub summary: Vec<String>,
    /// A check or criterion failed; maps to exit code 2.
    pub failed: bool,
}

/// Exit code for an error: 1 for configuration problems, 2 for numerical
/// failures.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NonConvergence { .. }
        | Error::Quadrature { .. }
        | Error::Eigen
        | Error::Domain { .. }
        | Error::SeriesIndex { .. }
        | Error::InvalidDensity(_) => 2,
        _ => 1,
    }
}

fn csv_of<F>(name: &str, write: F) -> Result<Table>
where
    F: FnOnce(&mut Vec<u8>) -> std::io::Result<()>,
{
    let mut buf = Vec::new();
    write(&mut buf)?;
    Ok(Table::from_csv(name, &String::from_utf8_lossy(&buf)))
}

/// Runs one subcommand on a validated configuration.
pub fn run_target(target: Target, cfg: &RunConfig) -> Result<Report> {
    match target {
        Target::Schmidt => schmidt_report(cfg),
        Target::Beam => beam_report(cfg),
        Target::Coupling => coupling_report(cfg),
        Target::Kernel => kernel_report(cfg),
        Target::Tmatrix => tmatrix_report(cfg),
        Target::Entangle => entangle_report(cfg),
        Target::Validate => validate_report(cfg),
    }
}

fn schmidt_report(cfg: &RunConfig) -> Result<Report> {
    let spec = cfg.biphoton()?;
    let src = truncated_source(&spec, cfg.source.max_mode)?;
    let mut t = Table::new("schmidt.csv", &["n", "lambda", "truncated_weight"]);
    let mut summary = vec![format!("Schmidt number K = {:.4}", schmidt_number(&spec))];
    for (n, w) in src.weights().iter().enumerate() {
        let l = schmidt_eigenvalue(&spec, n)?;
        t.rows.push(vec![n.to_string(), fmt_num(l), fmt_num(*w)]);
        summary.push(format!("lambda_{n} = {l:.3}"));
    }
    summary.push(format!(
        "discarded beyond n = {}: {:.1}%",
        cfg.source.max_mode,
        100.0 * src.discarded_mass()
    ));
    Ok(Report {
        tables: vec![t],
        summary,
        failed: false,
    })
}

fn beam_report(cfg: &RunConfig) -> Result<Report> {
    let geom = cfg.geometry()?;
    let profile = cfg.profile()?;
    let lambda = cfg.wavelength();
    let li = integrated_l(&profile, &geom, DecayMode::Single(lambda))?;
    let p = analytic_decay(&profile, &geom, DecayMode::Single(lambda))?;
    let mut t = Table::new(
        "beam.csv",
        &["z_m", "waist_m", "cn2_m-2/3", "l_integral_m-2/3", "P"],
    );
    t.rows.push(vec![
        fmt_num(geom.path_length()),
        fmt_num(geom.waist()),
        fmt_num(profile.max_cn2()),
        fmt_num(li),
        fmt_num(p),
    ]);
    Ok(Report {
        tables: vec![t],
        summary: vec![format!(
            "P(z = {} m, w0 = {:.4} m) = {p:.6}",
            geom.path_length(),
            geom.waist()
        )],
        failed: false,
    })
}

fn coupling_report(cfg: &RunConfig) -> Result<Report> {
    let geom = cfg.geometry()?;
    let z = cfg.coupling.z_m.unwrap_or(geom.path_length());
    let basis = ModeBasis::new(cfg.solver.cutoff)?;
    let cn2 = crate::turbulence::cn2_at(&cfg.profile()?, &geom, z)?;
    let tensor = CouplingTensor::assemble(
        &basis,
        z,
        cn2,
        geom.waist(),
        Frequencies::Single(cfg.wavelength()),
        None,
    )?;
    let t = csv_of("coupling.csv", |w| tensor.write_csv(w))?;
    Ok(Report {
        summary: vec![format!(
            "{} coupling entries at z = {z} m, cutoff {}",
            tensor.entries().len(),
            cfg.solver.cutoff
        )],
        tables: vec![t],
        failed: false,
    })
}

fn kernel_report(cfg: &RunConfig) -> Result<Report> {
    let kernel = channel_kernel(
        &cfg.biphoton()?,
        &cfg.profile()?,
        &cfg.geometry()?,
        &cfg.kernel_options(),
    )?;
    let t = csv_of("kernel.csv", |w| kernel.write_csv(w))?;
    let c = kernel.order() / 2;
    Ok(Report {
        tables: vec![t],
        summary: vec![format!("P at the grid centre = {:.6}", kernel.p(c, c))],
        failed: false,
    })
}

fn tmatrix_report(cfg: &RunConfig) -> Result<Report> {
    let kernel = channel_kernel(
        &cfg.biphoton()?,
        &cfg.profile()?,
        &cfg.geometry()?,
        &cfg.kernel_options(),
    )?;
    let s = transmission_matrix(&kernel, cfg.channel.matrix_max_mode)?;
    let traces = (0..=cfg.channel.trace_max_mode)
        .map(|n| mode_trace(&kernel, n))
        .collect::<Result<Vec<_>>>()?;
    let mut summary = Vec::new();
    for n in 0..s.size() {
        summary.push(
            s.row(n)
                .iter()
                .map(|x| format!("{x:.4}"))
                .collect::<Vec<_>>()
                .join(" "),
        );
    }
    Ok(Report {
        tables: vec![
            csv_of("tmatrix.csv", |w| s.write_csv(w))?,
            csv_of("traces.csv", |w| write_traces_csv(&traces, w))?,
        ],
        summary,
        failed: false,
    })
}

fn entangle_report(cfg: &RunConfig) -> Result<Report> {
    let kernel = channel_kernel(
        &cfg.biphoton()?,
        &cfg.profile()?,
        &cfg.geometry()?,
        &cfg.kernel_options(),
    )?;
    let e = &cfg.entangle;
    let rows = robustness_scan(&kernel, e.fixed_mode, e.max_mode, e.modes, e.single_sided)?;
    let summary = rows
        .iter()
        .map(|r| {
            format!(
                "n = {:2}: E_N {:.4} -> {:.4}, fidelity {:.4}",
                r.n, r.en_initial, r.en_final, r.fidelity
            )
        })
        .collect();
    Ok(Report {
        tables: vec![csv_of("entangle.csv", |w| write_scan_csv(&rows, w))?],
        summary,
        failed: false,
    })
}

fn validate_report(cfg: &RunConfig) -> Result<Report> {
    let checks = run_checks(cfg)?;
    let mut t = Table::new(
        "validate.csv",
        &["check", "value", "reference", "tolerance", "pass"],
    );
    let mut summary = Vec::new();
    let mut failed = false;
    for c in &checks {
        failed |= !c.pass;
        t.rows.push(vec![
            c.name.to_string(),
            fmt_num(c.value),
            fmt_num(c.reference),
            fmt_num(c.tolerance),
            (c.pass as u8).to_string(),
        ]);
        summary.push(format!(
            "{} {}: {} (reference {}, tolerance {})",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            fmt_num(c.value),
            fmt_num(c.reference),
            fmt_num(c.tolerance)
        ));
    }
    Ok(Report {
        tables: vec![t],
        summary,
        failed,
    })
}

/// Evaluates `target` at every point of the configured axes. The result has
/// one leading column per axis followed by the target's first table, with
/// rows in ascending axis order.
pub fn run_sweep(cfg: &RunConfig, target: Target) -> Result<Table> {
    let axes = &cfg.sweep.axes;
    if axes.is_empty() {
        return Err(Error::Range {
            key: "sweep.axes".into(),
            reason: "a sweep needs at least one axis".into(),
        });
    }
    let values = axes.iter().map(Axis::points).collect::<Result<Vec<_>>>()?;
    let total = values
        .iter()
        .try_fold(1usize, |acc, v| acc.checked_mul(v.len()));
    let total = match total {
        Some(n) if n <= MAX_SWEEP_POINTS => n,
        _ => {
            return Err(Error::Range {
                key: "sweep.axes".into(),
                reason: format!("more than {MAX_SWEEP_POINTS} points"),
            })
        }
    };
    let points: Vec<Vec<f64>> = (0..total)
        .map(|mut k| {
            let mut p = vec![0.0; values.len()];
            for (i, v) in values.iter().enumerate().rev() {
                p[i] = v[k % v.len()];
                k /= v.len();
            }
            p
        })
        .collect();
    let results = points
        .par_iter()
        .map(|p| {
            let mut c = cfg.clone();
            for (a, &x) in axes.iter().zip(p) {
                c = c.with_value(&a.key, x)?;
            }
            c.sweep.axes.clear();
            c.validate()?;
            let report = run_target(target, &c)?;
            Ok(report
                .tables
                .into_iter()
                .next()
                .expect("every target writes a table"))
        })
        .collect::<Result<Vec<Table>>>()?;
    let mut header: Vec<String> = axes.iter().map(|a| a.key.clone()).collect();
    header.extend(results[0].header.iter().cloned());
    let mut rows = Vec::new();
    for (p, t) in points.iter().zip(results) {
        let lead: Vec<String> = p.iter().map(|&x| fmt_num(x)).collect();
        for r in t.rows {
            let mut row = lead.clone();
            row.extend(r);
            rows.push(row);
        }
    }
    Ok(Table {
        name: "sweep.csv".into(),
        header,
        rows,
    })
}

fn hints(name: &str) -> &'static str {
    match name {
        "schmidt.csv" => "1 n: Schmidt mode; 2 lambda: eigenvalue; 3 truncated_weight: renormalized weight",
        "beam.csv" => "1 z_m; 2 waist_m; 3 cn2 (m^-2/3); 4 integrated l (m^-2/3); 5 P: fundamental-mode probability",
        "coupling.csv" => "1-8 (l, r) of m, n, u, v; 9-10 Re, Im of L in 1/m",
        "kernel.csv" => "1 omega1 (10^12 rad/s); 2 omega2; 3 P. splot 'kernel.csv' using 1:2:3",
        "tmatrix.csv" => "1 n: sent mode; 2 m: received mode; 3 S",
        "traces.csv" => "1 n: Schmidt mode; 2 T: total trace. plot 'traces.csv' using 1:2",
        "entangle.csv" => "1 n; 2 E_N initial; 3 E_N final; 4 fidelity; 5 degenerate (1 = product input)",
        "validate.csv" => "1 check; 2 value; 3 reference; 4 tolerance; 5 pass (1/0)",
        "sweep.csv" => "leading columns are the swept keys, then the target's columns",
        _ => "",
    }
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let base = match &cli.config {
        Some(p) => parse_config(p)?,
        None => RunConfig::default(),
    };
    let mut cfg = base.with_overrides(&cli.overrides)?;
    if let Some(dir) = &cli.out_dir {
        cfg.output.dir = dir.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<bool> {
    let cfg = load_config(cli)?;
    let report = match cli.command.target() {
        Some(t) => run_target(t, &cfg)?,
        None => {
            let Command::Sweep { target } = cli.command else {
                unreachable!()
            };
            let t = run_sweep(&cfg, target)?;
            Report {
                summary: vec![format!("{} rows", t.rows.len())],
                tables: vec![t],
                failed: false,
            }
        }
    };
    std::fs::create_dir_all(&cfg.output.dir)?;
    for t in &report.tables {
        let path = cfg.output.dir.join(&t.name);
        std::fs::write(&path, t.to_csv())?;
        writeln!(out, "wrote {}", path.display())?;
        if cli.gnuplot_hints {
            writeln!(out, "# {}: {}", t.name, hints(&t.name))?;
        }
    }
    for line in &report.summary {
        writeln!(out, "{line}")?;
    }
    Ok(!report.failed)
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if code == 0 {
                write!(out, "{e}")
            } else {
                write!(err, "{e}")
            };
            return code;
        }
    };
    let mut buf = Vec::new();
    let mut run = || execute(&cli, &mut buf);
    let result = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(run),
            Err(e) => Err(Error::Config(format!("thread pool: {e}"))),
        },
        None => run(),
    };
    let _ = out.write_all(&buf);
    match result {
        Ok(true) => 0,
        Ok(false) => 2,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}
