//! Every design condition expressed as a margin where ≥ 1 means satisfied.

use super::SearchError;
use crate::config::{validate, Side, SystemConfig, ViolationKind};
use crate::noise::{FsqlSummary, NoiseModel, NoiseSource};
use crate::optics::{self, clipping_loss, derive_pair, thermal_load, DerivedPair};
use crate::options::AnalysisOptions;
use crate::stability::{
    force_balance, horizontal_g_factor, horizontal_spring, trapping_ranges,
    vertical_optical_spring,
};

/// Margins are clamped to this value so they stay finite.
pub const MARGIN_CAP: f64 = 1e9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConstraintCategory {
    /// Depends only on lengths, curvatures, finesse and detuning.
    Geometric,
    /// Optical springs and damping.
    Dynamic,
    Balance,
    Noise,
    Thermal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub id: String,
    pub description: String,
    pub category: ConstraintCategory,
    /// ≥ 1 means satisfied.
    pub value: f64,
    pub pass: bool,
    /// Whether the constraint takes part in the overall verdict.
    pub gating: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub constraints: Vec<Constraint>,
    /// Conjunction of the pass flags of all gating constraints.
    pub overall: bool,
    pub f_sql: Option<f64>,
    pub sql_asd: Option<f64>,
    /// G_SQL / G_classical_total at f_sql.
    pub classical_margin: Option<f64>,
    /// G_SQL / G_coating at f_sql.
    pub coa_ratio: Option<f64>,
}

impl FeasibilityReport {
    pub fn get(&self, id: &str) -> Option<&Constraint> {
        self.constraints.iter().find(|c| c.id == id)
    }

    /// Σ max(0, 1 − margin) over gating constraints.
    pub fn total_violation(&self) -> f64 {
        self.constraints
            .iter()
            .filter(|c| c.gating)
            .map(|c| (1.0 - c.value).max(0.0))
            .sum()
    }
}

fn clamp_margin(v: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(-MARGIN_CAP, MARGIN_CAP)
    }
}

/// 1 + x/scale, so that the sign of x decides the verdict. With no scale
/// the margin is 2 for positive x and 0 otherwise.
fn signed_margin(x: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        1.0 + x / scale
    } else if x > 0.0 {
        2.0
    } else {
        0.0
    }
}

/// Ratio margin `allowed / actual`, capped when `actual` vanishes.
fn ratio_margin(allowed: f64, actual: f64) -> f64 {
    if actual > 0.0 {
        allowed / actual
    } else {
        MARGIN_CAP
    }
}

struct Builder {
    out: Vec<Constraint>,
}

impl Builder {
    fn push(
        &mut self,
        id: impl Into<String>,
        description: impl Into<String>,
        category: ConstraintCategory,
        value: Option<f64>,
        gating: bool,
    ) {
        let description = description.into();
        let (value, description) = match value {
            Some(v) => (clamp_margin(v), description),
            None => (0.0, format!("{description} (not evaluable)")),
        };
        self.out.push(Constraint {
            id: id.into(),
            description,
            category,
            value,
            pass: value >= 1.0,
            gating,
        });
    }
}

/// Vertical and horizontal spring and damping sums with their scales.
struct Dynamics {
    k_z: (f64, f64),
    gamma_z: (f64, f64),
    k_x: (f64, f64),
    c_x: (f64, f64),
}

fn dynamics(
    config: &SystemConfig,
    derived: &DerivedPair,
    options: &AnalysisOptions,
) -> Option<Dynamics> {
    let mut d = Dynamics {
        k_z: (0.0, 0.0),
        gamma_z: (0.0, 0.0),
        k_x: (0.0, 0.0),
        c_x: (0.0, 0.0),
    };
    let acc = |p: &mut (f64, f64), v: f64| {
        p.0 += v;
        p.1 += v.abs();
    };
    for side in Side::BOTH {
        let cav = config.cavity(side);
        let der = derived.get(side);
        let v = vertical_optical_spring(cav, der, config.laser.wavelength, config.mass(), 0.0);
        acc(&mut d.k_z, v.stiffness.real_part);
        acc(&mut d.gamma_z, v.damping_rate);
        let g = horizontal_g_factor(config, der, options.roc_convention);
        let h = horizontal_spring(cav, der, g, 1.0).ok()?;
        acc(&mut d.k_x, h.real_part);
        acc(&mut d.c_x, h.imag_part);
    }
    Some(d)
}

/// Evaluates all constraints. The list and its order do not depend on the
/// configuration; conditions that cannot be computed (for instance an
/// unstable resonator) get margin 0.
pub fn feasibility(
    config: &SystemConfig,
    options: &AnalysisOptions,
) -> Result<FeasibilityReport, SearchError> {
    let physical: Vec<_> = validate(config)
        .into_iter()
        .filter(|v| v.kind == ViolationKind::Physical)
        .collect();
    if !physical.is_empty() {
        return Err(SearchError::InvalidConfig(physical));
    }

    use ConstraintCategory::*;
    let derived = derive_pair(config).ok();
    let dynm = derived.as_ref().and_then(|d| dynamics(config, d, options));
    let summary = derived
        .as_ref()
        .and_then(|d| FsqlSummary::evaluate(&NoiseModel::new(config, d, options)).ok());
    let f_sql = summary.as_ref().map(|s| s.f_sql);
    let mut b = Builder { out: Vec::new() };

    b.push(
        "vertical_spring",
        "net vertical optical spring > 0",
        Dynamic,
        dynm.as_ref().map(|d| signed_margin(d.k_z.0, d.k_z.1)),
        true,
    );
    b.push(
        "vertical_damping",
        "net vertical optical damping > 0",
        Dynamic,
        dynm.as_ref().map(|d| signed_margin(d.gamma_z.0, d.gamma_z.1)),
        true,
    );
    b.push(
        "horizontal_spring",
        "net horizontal spring > 0",
        Dynamic,
        dynm.as_ref().map(|d| signed_margin(d.k_x.0, d.k_x.1)),
        true,
    );
    b.push(
        "horizontal_damping",
        "net horizontal damping > 0",
        Dynamic,
        dynm.as_ref().map(|d| signed_margin(d.c_x.0, d.c_x.1)),
        options.strict_horizontal_damping,
    );
    b.push(
        "rotational_spring",
        "mirror convex downward (R > 0)",
        Geometric,
        Some(1.0 + config.mirror.roc / config.mirror.radius),
        true,
    );
    b.push(
        "force_balance",
        format!(
            "|F_L - F_U - mg|/mg <= {}",
            options.force_balance_tolerance
        ),
        Balance,
        derived.as_ref().map(|d| {
            let fb = force_balance(config, d, options.force_balance_tolerance);
            2.0 - fb.residual.abs() / options.force_balance_tolerance
        }),
        true,
    );
    for side in Side::BOTH {
        b.push(
            format!("clipping_{side}"),
            format!("{side} clipping loss <= 2pi/finesse"),
            Geometric,
            derived.as_ref().map(|d| {
                let c = clipping_loss(
                    config.mirror.radius,
                    d.get(side).spot_radius,
                    config.cavity(side).finesse,
                );
                ratio_margin(c.bound, c.loss)
            }),
            true,
        );
    }
    for side in Side::BOTH {
        let g = optics::effective_roc(&config.mirror, side)
            .and_then(|r| optics::resonator_g(config.cavity(side), r))
            .ok();
        b.push(
            format!("g_product_{side}"),
            format!("{side} resonator g-product in (0, 1)"),
            Geometric,
            g.map(|g| {
                let p = g.product();
                1.0 + p.min(1.0 - p)
            }),
            true,
        );
    }
    b.push(
        "classical_below_sql",
        "total classical noise < SQL at f_sql",
        Noise,
        summary.as_ref().map(|s| s.margin),
        true,
    );
    b.push(
        "coating_below_sql",
        "coating Brownian noise < SQL at f_sql",
        Noise,
        summary.as_ref().map(|s| s.coa_ratio),
        true,
    );
    for side in Side::BOTH {
        b.push(
            format!("damage_{side}"),
            format!("{side} peak intensity <= damage threshold"),
            Thermal,
            derived
                .as_ref()
                .map(|d| ratio_margin(config.mirror.damage_threshold, d.get(side).peak_intensity())),
            true,
        );
    }
    b.push(
        "temperature_rise",
        format!("mirror temperature rise <= {} K", options.temperature_rise_limit),
        Thermal,
        derived.as_ref().map(|d| {
            ratio_margin(
                options.temperature_rise_limit,
                thermal_load(config, d).temperature_rise,
            )
        }),
        true,
    );
    b.push(
        "internal_mode",
        "f_sql <= internal mode / 10",
        Noise,
        f_sql.map(|f| config.mirror.internal_mode_freq / 10.0 / f),
        true,
    );
    for side in Side::BOTH {
        b.push(
            format!("cavity_pole_{side}"),
            format!("f_sql <= {side} cavity pole / 10"),
            Noise,
            derived
                .as_ref()
                .zip(f_sql)
                .map(|(d, f)| d.get(side).pole_freq / 10.0 / f),
            true,
        );
    }
    b.push(
        "trapping_range",
        format!("vertical trapping range >= {:e} m", options.dz_floor),
        Geometric,
        derived
            .as_ref()
            .map(|d| trapping_ranges(config, d).dz_bound / options.dz_floor),
        true,
    );

    let overall = b.out.iter().filter(|c| c.gating).all(|c| c.pass);
    Ok(FeasibilityReport {
        overall,
        f_sql,
        sql_asd: summary.as_ref().map(|s| s.asd_of(NoiseSource::Sql)),
        classical_margin: summary.as_ref().map(|s| s.margin),
        coa_ratio: summary.as_ref().map(|s| s.coa_ratio),
        constraints: b.out,
    })
}

/// Identifiers of the constraints in report order.
pub fn constraint_ids() -> Vec<String> {
    feasibility(&SystemConfig::table1(), &AnalysisOptions::default())
        .expect("bundled configuration is admissible")
        .constraints
        .into_iter()
        .map(|c| c.id)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table1_is_feasible_without_horizontal_damping() {
        let r = feasibility(&SystemConfig::table1(), &AnalysisOptions::default()).unwrap();
        assert!(r.overall, "{:#?}", r.constraints.iter().filter(|c| !c.pass).collect::<Vec<_>>());
        assert_eq!(r.constraints.len(), 19);
        let hd = r.get("horizontal_damping").unwrap();
        assert!(!hd.pass && !hd.gating);
        assert!(r.get("classical_below_sql").unwrap().value > 1.0);
        assert!(r.get("coating_below_sql").unwrap().value > 1.0);
        assert!(r.constraints.iter().all(|c| c.value.is_finite()));
        assert!(r.constraints.iter().all(|c| c.pass == (c.value >= 1.0)));

        let strict = AnalysisOptions {
            strict_horizontal_damping: true,
            ..AnalysisOptions::default()
        };
        assert!(!feasibility(&SystemConfig::table1(), &strict).unwrap().overall);
    }

    #[test]
    fn high_finesse_shrinks_coating_margin() {
        let base = feasibility(&SystemConfig::table1(), &AnalysisOptions::default()).unwrap();
        let mut cfg = SystemConfig::table1();
        cfg.lower.finesse = 400.0;
        cfg.lower.input_power /= 4.0;
        let r = feasibility(&cfg, &AnalysisOptions::default()).unwrap();
        let ratio = r.coa_ratio.unwrap() / base.coa_ratio.unwrap();
        assert!((ratio - 0.5).abs() < 0.01, "ratio {ratio}");

        cfg.lower.finesse = 10_000.0;
        cfg.lower.input_power = SystemConfig::table1().lower.input_power / 100.0;
        let r = feasibility(&cfg, &AnalysisOptions::default()).unwrap();
        // above the cavity pole the shot-noise rolloff caps f_sql, so the
        // design fails on the pole condition first
        assert!(r.coa_ratio.unwrap() < base.coa_ratio.unwrap() / 5.0);
        assert!(!r.get("cavity_pole_lower").unwrap().pass);
        assert!(!r.overall);
    }

    #[test]
    fn high_pressure_fails_noise_margin() {
        let mut cfg = SystemConfig::table1();
        cfg.environment.pressure = 1.0;
        let r = feasibility(&cfg, &AnalysisOptions::default()).unwrap();
        assert!(!r.get("classical_below_sql").unwrap().pass);
        assert!(!r.overall);
    }

    #[test]
    fn unstable_resonator_is_not_evaluable() {
        let mut cfg = SystemConfig::table1();
        cfg.lower.length = 0.5;
        let r = feasibility(&cfg, &AnalysisOptions::default()).unwrap();
        assert!(!r.overall);
        assert_eq!(r.constraints.len(), 19);
        let v = r.get("vertical_spring").unwrap();
        assert_eq!(v.value, 0.0);
        assert!(v.description.contains("not evaluable"));
        assert!(!r.get("g_product_lower").unwrap().pass);
        assert!(r.get("rotational_spring").unwrap().pass);
    }

    #[test]
    fn physical_violation_is_an_error() {
        let mut cfg = SystemConfig::table1();
        cfg.environment.temperature = -1.0;
        assert!(matches!(
            feasibility(&cfg, &AnalysisOptions::default()),
            Err(SearchError::InvalidConfig(_))
        ));
    }

    #[test]
    fn ids_are_stable() {
        let ids = constraint_ids();
        assert_eq!(ids[0], "vertical_spring");
        assert_eq!(ids.last().unwrap(), "trapping_range");
    }
}
