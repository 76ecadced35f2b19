//! Assembly of the full displacement-noise budget.

use rayon::prelude::*;

use super::sources::{
    brownian_sql_crossing, f_sql_approx, gas_damping_rate, gas_thermal_at, laser_frequency_asd,
    laser_intensity_at, required_rin, seismic_asd_at, sql_psd_at, BrownianCoefficients,
    QuantumModel,
};
use super::spectrum::{FrequencyGrid, NoiseSource, NoiseSpectrum};
use super::NoiseError;
use crate::config::SystemConfig;
use crate::optics::{derive_pair, DerivedPair};
use crate::options::AnalysisOptions;
use crate::stability::{default_band, stability_report, VerticalDynamics};

/// Every source of the budget evaluated in closed form at a single frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseModel {
    pub mass: f64,
    pub quantum: QuantumModel,
    pub brownian: BrownianCoefficients,
    /// Gas damping rate γ (Hz).
    pub gas_damping: f64,
    pub temperature: f64,
    pub frequency_asd: f64,
    pub rin: f64,
    pub circulating_power_lower: f64,
    pub required_rin: f64,
    pub environment: crate::config::Environment,
    /// Above this frequency the rigid-body Brownian model is flagged.
    pub brownian_validity_limit: f64,
}

impl NoiseModel {
    pub fn new(config: &SystemConfig, derived: &DerivedPair, options: &AnalysisOptions) -> Self {
        let dynamics = VerticalDynamics::from_config(config, derived);
        let mass = config.mass();
        let lambda = config.laser.wavelength;
        NoiseModel {
            mass,
            quantum: QuantumModel::new(&config.lower, &derived.lower, lambda, dynamics),
            brownian: BrownianCoefficients::new(
                &config.mirror,
                derived.lower.spot_radius,
                config.environment.temperature,
                options.coating_formula,
            ),
            gas_damping: gas_damping_rate(&config.environment, &config.mirror, mass),
            temperature: config.environment.temperature,
            frequency_asd: laser_frequency_asd(
                config.lower.length,
                config.laser.freq_noise_asd,
                lambda,
            ),
            rin: config.laser.rin_asd.unwrap_or(0.0),
            circulating_power_lower: derived.lower.circulating_power,
            required_rin: required_rin(config.lower.input_power, lambda),
            environment: config.environment,
            brownian_validity_limit: config.mirror.internal_mode_freq / 3.0,
        }
    }

    pub fn dynamics(&self) -> &VerticalDynamics {
        &self.quantum.dynamics
    }

    /// PSDs of all sources at `f`, indexed by [`NoiseSource::index`].
    pub fn evaluate(&self, f: f64) -> Result<[f64; 13], NoiseError> {
        use NoiseSource as S;
        let mut v = [0.0; 13];
        v[S::Sql.index()] = sql_psd_at(self.mass, f);
        v[S::Shot.index()] = self.quantum.shot_at(f);
        v[S::RadiationPressure.index()] = self.quantum.radiation_pressure_at(f)?;
        v[S::QuantumTotal.index()] = v[S::Shot.index()] + v[S::RadiationPressure.index()];
        v[S::BrownianSubstrate.index()] = self.brownian.substrate_at(f);
        v[S::BrownianCoating.index()] = self.brownian.coating_at(f);
        v[S::BrownianTotal.index()] = self.brownian.total_at(f);
        v[S::GasThermal.index()] =
            gas_thermal_at(self.gas_damping, self.temperature, self.dynamics(), f)?;
        v[S::LaserFrequency.index()] = self.frequency_asd * self.frequency_asd;
        v[S::LaserIntensity.index()] =
            laser_intensity_at(self.rin, self.circulating_power_lower, self.dynamics(), f)?;
        v[S::Seismic.index()] = seismic_asd_at(&self.environment, f).powi(2);
        v[S::ClassicalTotal.index()] = S::CLASSICAL.iter().map(|s| v[s.index()]).sum();
        v[S::GrandTotal.index()] = v[S::ClassicalTotal.index()] + v[S::QuantumTotal.index()];
        Ok(v)
    }

    /// Shot/radiation-pressure crossing searched over a log grid spanning
    /// 1 Hz to 1 GHz.
    pub fn f_sql(&self) -> Result<f64, NoiseError> {
        let bracket = FrequencyGrid::logarithmic(1.0, 1e9, 901)?;
        self.quantum.crossing(bracket.points())
    }
}

/// Values of the budget at the SQL-reaching frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct FsqlSummary {
    pub f_sql: f64,
    /// ASD of every source at f_sql, indexed by [`NoiseSource::index`].
    pub asd: [f64; 13],
    /// G_SQL / G_classical_total.
    pub margin: f64,
    /// G_SQL / G_coating.
    pub coa_ratio: f64,
}

impl FsqlSummary {
    pub fn evaluate(model: &NoiseModel) -> Result<Self, NoiseError> {
        let f_sql = model.f_sql()?;
        let psd = model.evaluate(f_sql)?;
        let sql = psd[NoiseSource::Sql.index()];
        Ok(FsqlSummary {
            f_sql,
            asd: psd.map(f64::sqrt),
            margin: sql / psd[NoiseSource::ClassicalTotal.index()],
            coa_ratio: sql / psd[NoiseSource::BrownianCoating.index()],
        })
    }

    pub fn asd_of(&self, source: NoiseSource) -> f64 {
        self.asd[source.index()]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BudgetResult {
    pub grid: FrequencyGrid,
    /// One spectrum per source, in enum order.
    pub spectra: Vec<NoiseSpectrum>,
    pub f_sql_full: f64,
    pub f_sql_approx: f64,
    pub sql_asd_at_fsql: f64,
    pub margin_at_fsql: f64,
    pub coa_ratio: f64,
    /// ASD of every source at f_sql, indexed by [`NoiseSource::index`].
    pub asd_at_fsql: [f64; 13],
    /// Where the total Brownian noise rises above the SQL, if inside 1 Hz–1 GHz.
    pub brownian_sql_crossing: Option<f64>,
    pub gas_damping_rate: f64,
    pub required_rin: f64,
    pub warnings: Vec<String>,
}

impl BudgetResult {
    pub fn spectrum(&self, source: NoiseSource) -> &NoiseSpectrum {
        &self.spectra[source.index()]
    }
}

/// Full budget of `config` on `grid`.
pub fn total_budget(
    config: &SystemConfig,
    grid: &FrequencyGrid,
    options: &AnalysisOptions,
) -> Result<BudgetResult, NoiseError> {
    let derived = derive_pair(config)?;
    let model = NoiseModel::new(config, &derived, options);

    let rows = grid
        .points()
        .par_iter()
        .map(|&f| model.evaluate(f))
        .collect::<Result<Vec<_>, _>>()?;
    let spectra = NoiseSource::ALL
        .iter()
        .map(|&s| {
            let psd = rows.iter().map(|r| r[s.index()]).collect();
            NoiseSpectrum::new(s, grid.clone(), psd)
        })
        .collect::<Result<Vec<_>, _>>()?;

    let at = FsqlSummary::evaluate(&model)?;
    let mut warnings = Vec::new();
    let stability = stability_report(config, &derived, &default_band(), options)?;
    if !stability.overall {
        warnings.push("configuration is not stable; spectra assume a linear trap".to_string());
    }
    if grid.last() > model.brownian_validity_limit {
        warnings.push(format!(
            "Brownian model extrapolated above {:.3e} Hz (a third of the first internal mode)",
            model.brownian_validity_limit
        ));
    }
    let max_omega = 2.0 * std::f64::consts::PI * grid.last();
    if max_omega > model.quantum.linewidth / 10.0 {
        warnings.push("grid extends beyond the adiabatic optical-spring regime".to_string());
    }

    Ok(BudgetResult {
        grid: grid.clone(),
        spectra,
        f_sql_full: at.f_sql,
        f_sql_approx: f_sql_approx(config.lower.finesse, config.laser.wavelength),
        sql_asd_at_fsql: at.asd_of(NoiseSource::Sql),
        margin_at_fsql: at.margin,
        coa_ratio: at.coa_ratio,
        asd_at_fsql: at.asd,
        brownian_sql_crossing: brownian_sql_crossing(&model.brownian, model.mass, 1.0, 1e9).ok(),
        gas_damping_rate: model.gas_damping,
        required_rin: model.required_rin,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn budget(cfg: &SystemConfig) -> BudgetResult {
        let grid = FrequencyGrid::logarithmic(10.0, 1e6, 200).unwrap();
        total_budget(cfg, &grid, &AnalysisOptions::default()).unwrap()
    }

    #[test]
    fn table1_landmarks() {
        let b = budget(&SystemConfig::table1());
        assert_relative_eq!(b.f_sql_full, 23_070.0, max_relative = 2e-3);
        assert_relative_eq!(b.f_sql_approx, 19_327.0, max_relative = 1e-3);
        assert_relative_eq!(b.sql_asd_at_fsql, 2.25e-19, max_relative = 5e-3);
        assert!(b.margin_at_fsql > 1.0);
        assert!(b.coa_ratio > b.margin_at_fsql);
        let cross = b.brownian_sql_crossing.unwrap();
        assert!(cross > 90e3 && cross < 110e3);
        assert!(b.warnings.is_empty(), "{:?}", b.warnings);
    }

    #[test]
    fn coating_is_largest_classical_source_at_fsql() {
        let b = budget(&SystemConfig::table1());
        let coat = b.asd_at_fsql[NoiseSource::BrownianCoating.index()];
        for s in NoiseSource::CLASSICAL {
            if s != NoiseSource::BrownianCoating {
                assert!(b.asd_at_fsql[s.index()] < coat, "{s} exceeds coating");
            }
        }
    }

    #[test]
    fn totals_are_sums() {
        let b = budget(&SystemConfig::table1());
        for i in 0..b.grid.len() {
            let classical: f64 = NoiseSource::CLASSICAL
                .iter()
                .map(|s| b.spectrum(*s).psd[i])
                .sum();
            assert_relative_eq!(
                b.spectrum(NoiseSource::ClassicalTotal).psd[i],
                classical,
                max_relative = 1e-14
            );
            let grand = b.spectrum(NoiseSource::GrandTotal).psd[i];
            for s in NoiseSource::ALL {
                if s != NoiseSource::Sql {
                    assert!(grand >= b.spectrum(s).psd[i]);
                }
            }
        }
    }

    #[test]
    fn silent_classical_sources_leave_quantum_total() {
        let mut cfg = SystemConfig::table1();
        cfg.mirror.coating.substrate.loss_angle = 0.0;
        for m in cfg.mirror.coating.materials.values_mut() {
            m.loss_angle = 0.0;
        }
        cfg.environment.pressure = 0.0;
        cfg.environment.seismic_coefficient = 0.0;
        cfg.laser.freq_noise_asd = 0.0;
        let b = budget(&cfg);
        assert_eq!(
            b.spectrum(NoiseSource::GrandTotal).psd,
            b.spectrum(NoiseSource::QuantumTotal).psd
        );
    }

    #[test]
    fn high_pressure_breaks_margin() {
        let mut cfg = SystemConfig::table1();
        cfg.environment.pressure = 1.0;
        assert!(budget(&cfg).margin_at_fsql < 1.0);
    }

    #[test]
    fn grid_beyond_internal_mode_warns() {
        let grid = FrequencyGrid::logarithmic(10.0, 1e7, 50).unwrap();
        let b = total_budget(&SystemConfig::table1(), &grid, &AnalysisOptions::default()).unwrap();
        assert_eq!(b.warnings.len(), 2);
    }
}
