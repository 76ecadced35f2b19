//! `sandwich`: design analysis of a mirror levitated between two vertical
//! Fabry-Pérot cavities.
//!
//! Exit status: 0 success, 1 domain failure (violations, instability,
//! infeasibility, failed comparison rows), 2 usage, I/O or computation error.

mod manifest;
mod reproduce;
mod units;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use sandwich_core::config::{
    parse_config, to_config_string, validate, ConfigError, SystemConfig, TABLE1,
};
use sandwich_core::noise::{total_budget, write_asd_csv, FrequencyGrid, NoiseSource};
use sandwich_core::optics::derive_pair;
use sandwich_core::search::{
    feasibility, optimize, parse_search_space, prepare, write_trace_csv, Objective,
};
use sandwich_core::stability::{
    default_band, force_balance, stability_report, trapping_ranges, DofCheck, StiffnessMatrix,
};
use sandwich_core::{AnalysisOptions, CoatingFormula, RocConvention};

use manifest::RunManifest;
use units::eng;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Config { path: String, source: ConfigError },
    #[error(transparent)]
    Compute(#[from] sandwich_core::Error),
}

impl From<sandwich_core::noise::NoiseError> for CliError {
    fn from(e: sandwich_core::noise::NoiseError) -> Self {
        CliError::Compute(e.into())
    }
}

impl From<sandwich_core::optics::OpticsError> for CliError {
    fn from(e: sandwich_core::optics::OpticsError) -> Self {
        CliError::Compute(e.into())
    }
}

impl From<sandwich_core::stability::StabilityError> for CliError {
    fn from(e: sandwich_core::stability::StabilityError) -> Self {
        CliError::Compute(e.into())
    }
}

impl From<sandwich_core::search::SearchError> for CliError {
    fn from(e: sandwich_core::search::SearchError) -> Self {
        CliError::Compute(e.into())
    }
}

#[derive(Debug, Parser)]
#[command(name = "sandwich", version, about = "Levitated-mirror design analysis")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Configuration file; `table1` selects the bundled design when no such file exists.
    #[arg(long, global = true, default_value = "table1")]
    config: String,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Optimizer seed, overriding the search-space file.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Rescale the lower input power so the force balance is exact.
    #[arg(long, global = true)]
    solve_balance: bool,
    #[arg(long, global = true, value_enum, default_value_t = RocArg::Signed)]
    roc_convention: RocArg,
    /// Gate stability and feasibility on the horizontal damping sign.
    #[arg(long, global = true)]
    strict_horizontal_damping: bool,
    #[arg(long, global = true, value_enum, default_value_t = CoatingArg::Squared)]
    coating_formula: CoatingArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RocArg {
    Signed,
    PaperLiteral,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CoatingArg {
    Squared,
    AsPrinted,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ObjectiveArg {
    #[value(name = "max_classical_margin")]
    MaxClassicalMargin,
    #[value(name = "max_coa_ratio")]
    MaxCoaRatio,
    #[value(name = "min_fsql")]
    MinFsql,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check the configuration against every invariant.
    Validate,
    /// Compute the noise budget and export the spectra.
    Budget {
        #[arg(long, default_value_t = 10.0)]
        f_min: f64,
        #[arg(long, default_value_t = 1e6)]
        f_max: f64,
        #[arg(long, default_value_t = 1000)]
        points: usize,
    },
    /// Stiffness matrix, stability flags, trapping ranges and force balance.
    Stability,
    /// Evaluate every design constraint as a margin.
    Feasibility,
    /// Search a parameter space for a feasible, margin-optimal design.
    Optimize {
        /// Search-space file.
        #[arg(long)]
        space: PathBuf,
        #[arg(long, value_enum, default_value_t = ObjectiveArg::MaxClassicalMargin)]
        objective: ObjectiveArg,
    },
    /// Compare the bundled design with its published figures.
    Reproduce,
}

impl Global {
    fn options(&self) -> AnalysisOptions {
        AnalysisOptions {
            roc_convention: match self.roc_convention {
                RocArg::Signed => RocConvention::Signed,
                RocArg::PaperLiteral => RocConvention::PaperLiteral,
            },
            strict_horizontal_damping: self.strict_horizontal_damping,
            coating_formula: match self.coating_formula {
                CoatingArg::Squared => CoatingFormula::Squared,
                CoatingArg::AsPrinted => CoatingFormula::AsPrinted,
            },
            solve_balance: self.solve_balance,
            ..AnalysisOptions::default()
        }
    }
}

/// Raw bytes and origin of the configuration in use.
struct Source {
    name: String,
    bytes: Vec<u8>,
}

fn read_source(spec: &str) -> Result<Source, CliError> {
    let path = Path::new(spec);
    if spec == "table1" && !path.exists() {
        return Ok(Source {
            name: "table1 (bundled)".into(),
            bytes: TABLE1.as_bytes().to_vec(),
        });
    }
    let bytes = fs::read(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(Source {
        name: spec.to_string(),
        bytes,
    })
}

fn parse_source(src: &Source) -> Result<SystemConfig, ConfigError> {
    let text = String::from_utf8_lossy(&src.bytes);
    parse_config(&text)
}

fn load(src: &Source, options: &AnalysisOptions) -> Result<SystemConfig, CliError> {
    let cfg = parse_source(src).map_err(|source| CliError::Config {
        path: src.name.clone(),
        source,
    })?;
    Ok(prepare(&cfg, options))
}

pub(crate) fn write_output(dir: &Path, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
    let io = |source| CliError::Io {
        path: dir.to_path_buf(),
        source,
    };
    fs::create_dir_all(dir).map_err(io)?;
    let path = dir.join(name);
    fs::write(&path, bytes).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

fn finish(command: &str, dir: &Path, config_bytes: &[u8], outputs: &[PathBuf]) -> Result<(), CliError> {
    let path = RunManifest::new(command, config_bytes, outputs).write(dir)?;
    for p in outputs.iter().chain(std::iter::once(&path)) {
        eprintln!("wrote {}", p.display());
    }
    Ok(())
}

fn cmd_validate(global: &Global) -> Result<u8, CliError> {
    let src = read_source(&global.config)?;
    let violations = match parse_source(&src) {
        Ok(cfg) => validate(&cfg),
        Err(ConfigError::Invalid(v)) => v,
        Err(source) => {
            return Err(CliError::Config {
                path: src.name,
                source,
            })
        }
    };
    let mut text = String::new();
    for v in &violations {
        let _ = writeln!(text, "{v}");
    }
    if violations.is_empty() {
        let _ = writeln!(text, "{}: no violations", src.name);
    }
    print!("{text}");
    if let Some(dir) = &global.out {
        let report = write_output(dir, "validate.txt", text.as_bytes())?;
        finish("validate", dir, &src.bytes, &[report])?;
    }
    Ok(u8::from(!violations.is_empty()))
}

fn cmd_budget(global: &Global, f_min: f64, f_max: f64, points: usize) -> Result<u8, CliError> {
    if points < 2 {
        return Err(CliError::Usage(format!("--points must be at least 2, got {points}")));
    }
    if !(f_min > 0.0 && f_min < f_max) {
        return Err(CliError::Usage(format!(
            "need 0 < --f-min < --f-max, got {f_min} and {f_max}"
        )));
    }
    let options = global.options();
    let src = read_source(&global.config)?;
    let cfg = load(&src, &options)?;
    let grid = FrequencyGrid::logarithmic(f_min, f_max, points)?;
    let b = total_budget(&cfg, &grid, &options)?;

    let mut s = String::new();
    let _ = writeln!(s, "configuration: {}", src.name);
    let _ = writeln!(s, "f_sql (shot = radiation pressure): {}", eng(b.f_sql_full, "Hz"));
    let _ = writeln!(s, "f_sql closed form:                 {}", eng(b.f_sql_approx, "Hz"));
    let _ = writeln!(s, "SQL ASD at f_sql:                  {}", eng(b.sql_asd_at_fsql, "m/√Hz"));
    let _ = writeln!(s, "ASD at f_sql:");
    for src_kind in NoiseSource::ALL {
        let _ = writeln!(
            s,
            "  {:<20} {}",
            src_kind.as_str(),
            eng(b.asd_at_fsql[src_kind.index()], "m/√Hz")
        );
    }
    let _ = writeln!(s, "margin G_SQL/G_classical at f_sql: {}", eng(b.margin_at_fsql, ""));
    let _ = writeln!(s, "coa_ratio G_SQL/G_coating at f_sql: {}", eng(b.coa_ratio, ""));
    match b.brownian_sql_crossing {
        Some(f) => {
            let _ = writeln!(s, "Brownian noise reaches the SQL at:  {}", eng(f, "Hz"));
        }
        None => {
            let _ = writeln!(s, "Brownian noise stays below the SQL up to 1 GHz");
        }
    }
    let _ = writeln!(s, "gas damping rate:                  {}", eng(b.gas_damping_rate, "Hz"));
    let _ = writeln!(s, "shot-noise-equivalent RIN:         {}", eng(b.required_rin, "1/√Hz"));
    for w in &b.warnings {
        let _ = writeln!(s, "warning: {w}");
    }
    print!("{s}");

    let dir = global.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let mut csv = Vec::new();
    write_asd_csv(&mut csv, &b.spectra).expect("writing to memory");
    let spectra = write_output(&dir, "spectra.csv", &csv)?;
    let summary = write_output(&dir, "budget_summary.txt", s.as_bytes())?;
    finish("budget", &dir, &src.bytes, &[spectra, summary])?;
    Ok(0)
}

fn matrix_lines(s: &mut String, k: &StiffnessMatrix) {
    let _ = writeln!(
        s,
        "  horizontal  {} + i {}",
        eng(k.horizontal.real_part, "N/m"),
        eng(k.horizontal.imag_part, "N/m")
    );
    let _ = writeln!(
        s,
        "  vertical    {} + i {}",
        eng(k.vertical.real_part, "N/m"),
        eng(k.vertical.imag_part, "N/m")
    );
    let _ = writeln!(s, "  rotational  {}", eng(k.rotational.real_part, "N·m/rad"));
}

fn flag(ok: bool) -> &'static str {
    if ok {
        "pass"
    } else {
        "FAIL"
    }
}

fn dof_line(s: &mut String, name: &str, d: &DofCheck, damping_note: &str) {
    let damping = match d.damping_ok {
        Some(ok) => format!("damping {}{damping_note}", flag(ok)),
        None => "lossless".to_string(),
    };
    let _ = writeln!(s, "  {name:<11} spring {}, {damping}", flag(d.spring_ok));
}

fn cmd_stability(global: &Global) -> Result<u8, CliError> {
    let options = global.options();
    let src = read_source(&global.config)?;
    let cfg = load(&src, &options)?;
    let d = derive_pair(&cfg)?;
    let r = stability_report(&cfg, &d, &default_band(), &options)?;
    let t = trapping_ranges(&cfg, &d);
    let fb = force_balance(&cfg, &d, options.force_balance_tolerance);

    let mut s = String::new();
    let _ = writeln!(s, "configuration: {}", src.name);
    let _ = writeln!(s, "stiffness matrix diagonal at DC:");
    matrix_lines(&mut s, &r.at_dc);
    match (&r.at_resonance, r.resonance_freq) {
        (Some(k), Some(f)) => {
            let _ = writeln!(s, "at the vertical spring resonance {}:", eng(f, "Hz"));
            matrix_lines(&mut s, k);
        }
        _ => {
            let _ = writeln!(s, "no vertical spring resonance between 1 Hz and 100 kHz");
        }
    }
    let _ = writeln!(s, "per degree of freedom:");
    let note = if r.horizontal_damping_gated { "" } else { " (reported, not gated)" };
    dof_line(&mut s, "horizontal", &r.horizontal, note);
    dof_line(&mut s, "vertical", &r.vertical, "");
    dof_line(&mut s, "rotational", &r.rotational, "");
    if r.beyond_adiabatic {
        let _ = writeln!(s, "warning: band extends beyond a tenth of the cavity linewidth");
    }
    let _ = writeln!(s, "trapping ranges:");
    let _ = writeln!(s, "  vertical    {}", eng(t.dz_bound, "m"));
    let _ = writeln!(
        s,
        "  horizontal  {} (binding: {:?}; detuning {}, geometric {}, mode match {})",
        eng(t.dx_bound, "m"),
        t.binding,
        eng(t.dx_bound_detuning, "m"),
        eng(t.dx_bound_geometric, "m"),
        eng(t.dx_bound_modematch, "m"),
    );
    let _ = writeln!(
        s,
        "force balance (F_L - F_U - mg)/mg: {} (tolerance {}) {}",
        eng(fb.residual, ""),
        eng(options.force_balance_tolerance, ""),
        flag(fb.pass)
    );
    let _ = writeln!(s, "overall: {}", if r.overall { "stable" } else { "UNSTABLE" });
    print!("{s}");

    if let Some(dir) = &global.out {
        let report = write_output(dir, "stability.txt", s.as_bytes())?;
        finish("stability", dir, &src.bytes, &[report])?;
    }
    Ok(u8::from(!r.overall))
}

fn cmd_feasibility(global: &Global) -> Result<u8, CliError> {
    let options = global.options();
    let src = read_source(&global.config)?;
    let cfg = load(&src, &options)?;
    let r = feasibility(&cfg, &options)?;

    let mut s = String::new();
    let mut csv = String::from("id,margin,pass,gating,description\n");
    let _ = writeln!(s, "configuration: {}", src.name);
    let _ = writeln!(s, "{:<20} {:>12}  {:<6} description", "constraint", "margin", "status");
    for c in &r.constraints {
        let status = match (c.pass, c.gating) {
            (true, _) => "pass",
            (false, true) => "FAIL",
            (false, false) => "info",
        };
        let _ = writeln!(s, "{:<20} {:>12}  {:<6} {}", c.id, eng(c.value, ""), status, c.description);
        let _ = writeln!(
            csv,
            "{},{:.8e},{},{},\"{}\"",
            c.id, c.value, c.pass, c.gating, c.description
        );
    }
    if let (Some(f), Some(a)) = (r.f_sql, r.sql_asd) {
        let _ = writeln!(s, "f_sql {}, SQL ASD {}", eng(f, "Hz"), eng(a, "m/√Hz"));
    }
    let _ = writeln!(s, "overall: {}", if r.overall { "feasible" } else { "INFEASIBLE" });
    print!("{s}");

    if let Some(dir) = &global.out {
        let out = write_output(dir, "feasibility.csv", csv.as_bytes())?;
        finish("feasibility", dir, &src.bytes, &[out])?;
    }
    Ok(u8::from(!r.overall))
}

fn cmd_optimize(global: &Global, space_path: &Path, objective: ObjectiveArg) -> Result<u8, CliError> {
    let options = global.options();
    let src = read_source(&global.config)?;
    let base = parse_source(&src).map_err(|source| CliError::Config {
        path: src.name.clone(),
        source,
    })?;
    let text = fs::read_to_string(space_path).map_err(|source| CliError::Io {
        path: space_path.to_path_buf(),
        source,
    })?;
    let mut space = parse_search_space(&text, &base).map_err(|e| CliError::Usage(format!(
        "{}: {e}",
        space_path.display()
    )))?;
    if let Some(seed) = global.seed {
        space.seed = seed;
    }
    let objective = match objective {
        ObjectiveArg::MaxClassicalMargin => Objective::MaxClassicalMargin,
        ObjectiveArg::MaxCoaRatio => Objective::MaxCoaRatio,
        ObjectiveArg::MinFsql => Objective::MinFsql,
    };
    let result = optimize(&space, objective, &options)?;

    let mut s = String::new();
    let _ = writeln!(
        s,
        "evaluations: {} (seed {}, {} free parameters)",
        result.trace.len(),
        space.seed,
        space.parameters.iter().filter(|p| p.width() > 0.0).count()
    );
    for p in &space.parameters {
        let _ = writeln!(
            s,
            "  {:<32} {}",
            p.field.path(),
            eng(p.field.get(&result.best).unwrap_or(f64::NAN), "")
        );
    }
    match result.objective {
        Some(v) => {
            let _ = writeln!(s, "{}: {}", objective.as_str(), eng(v, ""));
        }
        None => {
            let _ = writeln!(s, "{}: not evaluable", objective.as_str());
        }
    }
    let _ = writeln!(
        s,
        "best design: {}",
        if result.feasible { "feasible" } else { "INFEASIBLE (least violating point)" }
    );
    print!("{s}");

    let dir = global.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let best = write_output(&dir, "best_config.conf", to_config_string(&result.best).as_bytes())?;
    let mut trace = Vec::new();
    write_trace_csv(&mut trace, &space, &result.trace).expect("writing to memory");
    let trace = write_output(&dir, "trace.csv", &trace)?;
    let mut digest_input = src.bytes.clone();
    digest_input.extend_from_slice(text.as_bytes());
    finish("optimize", &dir, &digest_input, &[best, trace])?;
    Ok(u8::from(!result.feasible))
}

fn cmd_reproduce(global: &Global) -> Result<u8, CliError> {
    let options = global.options();
    let (rows, budget) = reproduce::evaluate(&options)?;
    let table = reproduce::to_table(&rows);
    print!("{table}");
    let failed = rows
        .iter()
        .filter(|r| r.status == reproduce::Status::Fail)
        .count();
    println!(
        "{} of {} checked rows pass",
        rows.iter().filter(|r| r.status == reproduce::Status::Pass).count(),
        rows.iter().filter(|r| r.status != reproduce::Status::Info).count()
    );

    let dir = global.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let cmp = write_output(&dir, "reproduce.csv", reproduce::to_csv(&rows).as_bytes())?;
    let spectra = write_output(&dir, "spectra.csv", &reproduce::spectra_csv(&budget))?;
    finish("reproduce", &dir, TABLE1.as_bytes(), &[cmp, spectra])?;
    Ok(u8::from(failed > 0))
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    match &cli.command {
        Command::Validate => cmd_validate(&cli.global),
        Command::Budget {
            f_min,
            f_max,
            points,
        } => cmd_budget(&cli.global, *f_min, *f_max, *points),
        Command::Stability => cmd_stability(&cli.global),
        Command::Feasibility => cmd_feasibility(&cli.global),
        Command::Optimize { space, objective } => cmd_optimize(&cli.global, space, *objective),
        Command::Reproduce => cmd_reproduce(&cli.global),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn bundled_source_when_no_file() {
        let src = read_source("table1").unwrap();
        assert_eq!(src.bytes, TABLE1.as_bytes());
        assert_eq!(parse_source(&src).unwrap(), SystemConfig::table1());
    }
}
