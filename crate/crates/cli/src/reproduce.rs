//! Headline numbers of the bundled design compared with their published
//! values.

use std::f64::consts::PI;
use std::fmt::Write as _;

use sandwich_core::config::{rescaled, SystemConfig};
use sandwich_core::constants::G_ACC;
use sandwich_core::noise::{
    f_sql_free_mass, seismic_asd_at, total_budget, write_asd_csv, BudgetResult, FrequencyGrid,
    FsqlSummary, NoiseModel, NoiseSource, QuantumModel,
};
use sandwich_core::optics::{derive_pair, thermal_load};
use sandwich_core::search::{optimize, parse_search_space, write_trace_csv, Objective};
use sandwich_core::stability::{
    default_band, stability_report, trapping_ranges, HorizontalBound, VerticalDynamics,
};
use sandwich_core::stack::{layers_reflectivity, rouard_reflectivity};
use sandwich_core::{AnalysisOptions, Error};

/// Search space used by the determinism check.
pub const DEMO_SPACE: &str = include_str!("../data/table1_space.conf");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    /// Reported only; does not enter the verdict.
    Info,
}

impl Status {
    fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Info => "info",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub criterion: u8,
    pub check: String,
    pub computed: String,
    pub expected: String,
    pub tolerance: String,
    pub status: Status,
}

fn num(v: f64) -> String {
    format!("{v:.6e}")
}

struct Rows(Vec<Row>);

impl Rows {
    fn push(&mut self, criterion: u8, check: &str, computed: String, expected: String, tolerance: String, status: Status) {
        self.0.push(Row {
            criterion,
            check: check.to_string(),
            computed,
            expected,
            tolerance,
            status,
        });
    }

    /// |computed/expected − 1| ≤ tol.
    fn rel(&mut self, criterion: u8, check: &str, computed: f64, expected: f64, tol: f64) {
        let ok = ((computed / expected) - 1.0).abs() <= tol;
        self.push(
            criterion,
            check,
            num(computed),
            num(expected),
            format!("±{}%", tol * 100.0),
            Status::from_bool(ok),
        );
    }

    /// computed < bound (strict).
    fn below(&mut self, criterion: u8, check: &str, computed: f64, bound: f64) {
        self.push(
            criterion,
            check,
            num(computed),
            format!("< {}", num(bound)),
            "strict".into(),
            Status::from_bool(computed < bound),
        );
    }

    /// computed ≤ bound.
    fn at_most(&mut self, criterion: u8, check: &str, computed: f64, bound: f64) {
        self.push(
            criterion,
            check,
            num(computed),
            format!("<= {}", num(bound)),
            "bound".into(),
            Status::from_bool(computed <= bound),
        );
    }

    fn within(&mut self, criterion: u8, check: &str, computed: f64, lo: f64, hi: f64) {
        self.push(
            criterion,
            check,
            num(computed),
            format!("[{}, {}]", num(lo), num(hi)),
            "range".into(),
            Status::from_bool(computed >= lo && computed <= hi),
        );
    }
}

/// Bytes of the spectra CSV for `config` on the standard 10 Hz–1 MHz grid.
pub fn spectra_csv(budget: &BudgetResult) -> Vec<u8> {
    let mut buf = Vec::new();
    write_asd_csv(&mut buf, &budget.spectra).expect("writing to memory");
    buf
}

pub fn standard_grid() -> FrequencyGrid {
    FrequencyGrid::logarithmic(10.0, 1e6, 1000).expect("valid grid")
}

fn demo_trace(options: &AnalysisOptions) -> Result<Vec<u8>, Error> {
    let base = SystemConfig::table1();
    let space = parse_search_space(DEMO_SPACE, &base)?;
    let result = optimize(&space, Objective::MaxClassicalMargin, options)?;
    let mut buf = Vec::new();
    write_trace_csv(&mut buf, &space, &result.trace).expect("writing to memory");
    Ok(buf)
}

fn coa_ratio(config: &SystemConfig, options: &AnalysisOptions) -> Result<f64, Error> {
    let d = derive_pair(config)?;
    Ok(FsqlSummary::evaluate(&NoiseModel::new(config, &d, options))?.coa_ratio)
}

/// Evaluates every comparison row for the bundled design. Also returns the
/// budget so callers can export its spectra.
pub fn evaluate(options: &AnalysisOptions) -> Result<(Vec<Row>, BudgetResult), Error> {
    let cfg = SystemConfig::table1();
    let d = derive_pair(&cfg)?;
    let m = cfg.mass();
    let weight = m * G_ACC;
    let budget = total_budget(&cfg, &standard_grid(), options)?;
    let model = NoiseModel::new(&cfg, &d, options);
    let mut r = Rows(Vec::new());

    // 1. parameter round trip
    r.rel(1, "mirror mass (kg)", m, 0.2e-6, 0.02);
    r.rel(1, "lower circulating power (W)", d.lower.circulating_power, 420.0, 0.03);
    r.rel(1, "upper circulating power (W)", d.upper.circulating_power, 130.0, 0.03);
    r.rel(
        1,
        "(F_L - F_U)/mg",
        (d.lower.radiation_force - d.upper.radiation_force) / weight,
        1.0,
        0.05,
    );

    // 2. SQL-reaching frequency
    r.rel(2, "f_sql closed form (Hz)", budget.f_sql_approx, 19.3e3, 0.01);
    r.rel(2, "f_sql shot/radiation-pressure crossing (Hz)", budget.f_sql_full, 23e3, 0.10);
    r.rel(2, "SQL ASD at f_sql (m/rtHz)", budget.sql_asd_at_fsql, 2.2e-19, 0.05);

    // 3. SQL touching
    let f_sql = budget.f_sql_full;
    let shot = model.quantum.shot_at(f_sql);
    let rp = model.quantum.radiation_pressure_at(f_sql)?;
    let sql = budget.sql_asd_at_fsql.powi(2);
    r.at_most(3, "|shot/radiation pressure - 1| at f_sql", (shot / rp - 1.0).abs(), 1e-9);
    r.at_most(3, "|(shot + radiation pressure)/SQL - 1| at f_sql", ((shot + rp) / sql - 1.0).abs(), 0.01);

    // 4. Brownian noise
    let brown_23k = model.brownian.total_at(23e3).sqrt();
    let sql_23k = sandwich_core::noise::sql_psd_at(m, 23e3).sqrt();
    r.rel(4, "Brownian total ASD at 23 kHz (m/rtHz)", brown_23k, 1.2e-19, 0.10);
    r.below(4, "Brownian / SQL ASD at 23 kHz", brown_23k / sql_23k, 1.0);
    r.within(
        4,
        "Brownian-SQL crossing (Hz)",
        budget.brownian_sql_crossing.unwrap_or(f64::NAN),
        90e3,
        110e3,
    );

    // 5. double optical spring
    let report = stability_report(&cfg, &d, &default_band(), options)?;
    let k_z = report.at_dc.vertical.real_part;
    r.push(5, "net vertical spring (N/m)", num(k_z), "> 0".into(), "sign".into(), Status::from_bool(k_z > 0.0));
    r.within(
        5,
        "vertical spring resonance (Hz)",
        report.resonance_freq.unwrap_or(f64::NAN),
        170.0,
        680.0,
    );

    // 6. horizontal statics
    let k_x = report.at_dc.horizontal.real_part;
    r.rel(6, "net horizontal spring (N/m)", k_x, 1.1e-4, 0.10);
    r.push(6, "net horizontal spring sign", num(k_x), "> 0".into(), "sign".into(), Status::from_bool(k_x > 0.0));
    let c_x = report.horizontal.damping_min.unwrap_or(f64::NAN);
    r.push(
        6,
        "net horizontal damping (N s/m)",
        num(c_x),
        "> 0".into(),
        if options.strict_horizontal_damping { "sign (gated)" } else { "sign (reported)" }.into(),
        if options.strict_horizontal_damping {
            Status::from_bool(c_x > 0.0)
        } else {
            Status::Info
        },
    );

    // 7. trapping ranges
    let t = trapping_ranges(&cfg, &d);
    r.rel(7, "vertical trapping range (m)", t.dz_bound, 50e-12, 0.20);
    r.rel(7, "horizontal trapping range (m)", t.dx_bound, 0.6e-6, 0.25);
    r.push(
        7,
        "binding horizontal condition",
        format!("{:?}", t.binding).to_lowercase(),
        "detuning".into(),
        "exact".into(),
        Status::from_bool(t.binding == HorizontalBound::Detuning),
    );

    // 8. discussion quantities
    let at = |s: NoiseSource, f: f64| -> Result<f64, Error> { Ok(model.evaluate(f)?[s.index()].sqrt()) };
    r.rel(8, "gas damping rate (Hz)", model.gas_damping, 7e-8, 0.30);
    r.below(8, "gas thermal ASD at 23 kHz (m/rtHz)", at(NoiseSource::GasThermal, 23e3)?, 1e-21);
    r.below(
        8,
        "frequency-noise / Brownian ASD at 23 kHz",
        at(NoiseSource::LaserFrequency, 23e3)? / brown_23k,
        1.0,
    );
    r.below(8, "seismic ASD at 23 kHz (m/rtHz)", seismic_asd_at(&cfg.environment, 23e3), 1e-23);
    r.rel(8, "lower peak intensity (W/m^2)", d.lower.peak_intensity(), 14e9, 0.10);
    r.rel(8, "upper peak intensity (W/m^2)", d.upper.peak_intensity(), 2.3e9, 0.10);
    r.below(
        8,
        "max peak intensity / damage threshold",
        d.lower.peak_intensity().max(d.upper.peak_intensity()) / cfg.mirror.damage_threshold,
        1.0,
    );
    let thermal = thermal_load(&cfg, &d);
    r.at_most(8, "absorbed power (W)", thermal.absorbed_power, 0.15e-3);
    r.at_most(8, "temperature rise (K)", thermal.temperature_rise, 20.0);

    // 9. scaling law
    let coa0 = coa_ratio(&cfg, options)?;
    for (s, tf) in [(0.5, 0.5), (0.5, 2.0), (2.0, 0.5), (2.0, 2.0)] {
        let ratio = coa_ratio(&rescaled(&cfg, s, tf), options)? / coa0;
        let expected = 1.0 / (s * tf.sqrt());
        r.rel(9, &format!("coa_ratio scaling at s = {s}, t = {tf}"), ratio, expected, 0.05);
    }

    // 10. oracle equivalences
    let stack = &cfg.mirror.coating;
    let layers: Vec<(f64, f64)> = stack
        .layers
        .iter()
        .filter_map(|l| stack.layer_props(l).map(|p| (p.refractive_index, l.thickness)))
        .collect();
    let n_sub = stack.substrate.refractive_index;
    let lambda = cfg.laser.wavelength;
    let refl = layers_reflectivity(&layers, n_sub, lambda, 1.0).power_reflectivity;
    let oracle = rouard_reflectivity(&layers, n_sub, lambda, 1.0);
    r.at_most(10, "|stack reflectivity - interface recursion|", (refl - oracle).abs(), 1e-12);
    let free = QuantumModel {
        linewidth: f64::INFINITY,
        dynamics: VerticalDynamics::free_mass(m),
        ..model.quantum
    };
    let closed = f_sql_free_mass(free.force_psd, m);
    let crossing = free.crossing(standard_grid().points())?;
    r.at_most(10, "|f_sql free mass / closed form - 1|", (crossing / closed - 1.0).abs(), 1e-6);
    let dynamics = *model.dynamics();
    let f_res = dynamics.resonance_freq().unwrap_or(f64::NAN);
    let w = 2.0 * PI * 100.0 * f_res;
    let chi = dynamics.susceptibility(w)?;
    r.at_most(10, "| |chi| m w^2 - 1 | at 100 f_res", (chi.norm() * m * w * w - 1.0).abs(), 0.01);

    // 11. determinism
    let again = total_budget(&cfg, &standard_grid(), options)?;
    let same_spectra = spectra_csv(&budget) == spectra_csv(&again);
    let same_trace = demo_trace(options)? == demo_trace(options)?;
    r.push(
        11,
        "spectra and optimizer trace identical across runs",
        (same_spectra && same_trace).to_string(),
        "true".into(),
        "exact".into(),
        Status::from_bool(same_spectra && same_trace),
    );

    Ok((r.0, budget))
}

pub fn to_csv(rows: &[Row]) -> String {
    let mut out = String::from("criterion,check,computed,expected,tolerance,status\n");
    for row in rows {
        let _ = writeln!(
            out,
            "{},\"{}\",{},\"{}\",\"{}\",{}",
            row.criterion,
            row.check,
            row.computed,
            row.expected,
            row.tolerance,
            row.status.as_str()
        );
    }
    out
}

pub fn to_table(rows: &[Row]) -> String {
    let width = rows.iter().map(|r| r.check.chars().count()).max().unwrap_or(0);
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>2}  {:<width$}  {:>13}  {:>30}  {:>16}  status",
        "#", "check", "computed", "expected", "tolerance"
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{:>2}  {:<width$}  {:>13}  {:>30}  {:>16}  {}",
            r.criterion,
            r.check,
            r.computed,
            r.expected,
            r.tolerance,
            r.status.as_str()
        );
    }
    out
}
