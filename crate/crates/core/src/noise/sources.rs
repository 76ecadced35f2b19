//! Closed-form displacement-noise PSDs (m²/Hz) of the individual sources.
//!
//! Every point evaluator takes a frequency in Hz; the grid-level operations
//! map them over a [`FrequencyGrid`].

use std::f64::consts::PI;

use num_complex::Complex64;

use super::spectrum::{FrequencyGrid, NoiseSource, NoiseSpectrum};
use super::NoiseError;
use crate::config::{CavitySpec, Environment, MaterialProps, MirrorSpec, SystemConfig};
use crate::constants::{C, G_ACC, HBAR, K_B};
use crate::optics::CavityDerived;
use crate::options::CoatingFormula;
use crate::stability::VerticalDynamics;

fn omega(f: f64) -> f64 {
    2.0 * PI * f
}

/// Angular laser frequency 2πc/λ.
pub fn laser_angular_frequency(wavelength: f64) -> f64 {
    2.0 * PI * C / wavelength
}

/// G_SQL = 2ħ/(mω²).
pub fn sql_psd_at(mass: f64, f: f64) -> f64 {
    let w = omega(f);
    2.0 * HBAR / (mass * w * w)
}

pub fn sql_psd(mass: f64, grid: &FrequencyGrid) -> Result<NoiseSpectrum, NoiseError> {
    NoiseSpectrum::from_fn(NoiseSource::Sql, grid, |f| sql_psd_at(mass, f))
}

/// SQL-reaching frequency of a single balanced beam,
/// (1/2π)·√(16gℱ/λ), independent of the mass.
pub fn f_sql_approx(finesse: f64, wavelength: f64) -> f64 {
    (16.0 * G_ACC * finesse / wavelength).sqrt() / (2.0 * PI)
}

/// Shot/radiation-pressure crossing of a free mass, (1/2π)·√(S_F/(mħ)).
pub fn f_sql_free_mass(force_psd: f64, mass: f64) -> f64 {
    (force_psd / (mass * HBAR)).sqrt() / (2.0 * PI)
}

/// Quantum noise of the readout through the lower cavity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantumModel {
    /// Back-action force PSD S_F = 16ħω_l·P_circ·ℱ/(πc²) (N²/Hz).
    pub force_psd: f64,
    /// Full linewidth κ of the readout cavity (rad/s).
    pub linewidth: f64,
    pub dynamics: VerticalDynamics,
}

impl QuantumModel {
    pub fn new(
        cavity: &CavitySpec,
        derived: &CavityDerived,
        wavelength: f64,
        dynamics: VerticalDynamics,
    ) -> Self {
        let force_psd = 16.0 * HBAR * laser_angular_frequency(wavelength) * derived.circulating_power
            * cavity.finesse
            / (PI * C * C);
        QuantumModel {
            force_psd,
            linewidth: derived.linewidth_fwhm,
            dynamics,
        }
    }

    /// (ħ²/S_F)·(1 + (2Ω/κ)²).
    pub fn shot_at(&self, f: f64) -> f64 {
        let x = 2.0 * omega(f) / self.linewidth;
        HBAR * HBAR / self.force_psd * (1.0 + x * x)
    }

    /// S_F·|χ(Ω)|².
    pub fn radiation_pressure_at(&self, f: f64) -> Result<f64, NoiseError> {
        let chi = self.dynamics.susceptibility(omega(f))?;
        Ok(self.force_psd * chi.norm_sqr())
    }

    /// Radiation-pressure minus shot PSD; +∞ exactly on the mechanical pole.
    fn excess(&self, f: f64) -> f64 {
        self.radiation_pressure_at(f).unwrap_or(f64::INFINITY) - self.shot_at(f)
    }

    /// Highest frequency in `points` where radiation pressure stops
    /// dominating shot noise, refined by bisection in log-frequency to a
    /// relative tolerance of 1e-12.
    pub fn crossing(&self, points: &[f64]) -> Result<f64, NoiseError> {
        let no_cross = || NoiseError::NoIntersection {
            f_min: points.first().copied().unwrap_or(f64::NAN),
            f_max: points.last().copied().unwrap_or(f64::NAN),
        };
        let bracket = points
            .windows(2)
            .rev()
            .find(|w| self.excess(w[0]) > 0.0 && self.excess(w[1]) <= 0.0)
            .ok_or_else(no_cross)?;
        Ok(bisect(|f| self.excess(f) > 0.0, bracket[0], bracket[1], 1e-12))
    }
}

/// Bisection on a bracket [lo, hi] with `above(lo)` true and `above(hi)`
/// false, halving in log-frequency until hi/lo − 1 ≤ rel_tol.
pub fn bisect(above: impl Fn(f64) -> bool, mut lo: f64, mut hi: f64, rel_tol: f64) -> f64 {
    while hi / lo - 1.0 > rel_tol {
        let mid = (lo * hi).sqrt();
        if mid <= lo || mid >= hi {
            break;
        }
        if above(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo * hi).sqrt()
}

/// Shot, radiation-pressure and summed quantum spectra.
pub fn quantum_noise(
    model: &QuantumModel,
    grid: &FrequencyGrid,
) -> Result<[NoiseSpectrum; 3], NoiseError> {
    let shot = NoiseSpectrum::from_fn(NoiseSource::Shot, grid, |f| model.shot_at(f))?;
    let rp_psd = grid
        .points()
        .iter()
        .map(|&f| model.radiation_pressure_at(f))
        .collect::<Result<Vec<_>, _>>()?;
    let rp = NoiseSpectrum::new(NoiseSource::RadiationPressure, grid.clone(), rp_psd)?;
    let total = shot.psd.iter().zip(&rp.psd).map(|(a, b)| a + b).collect();
    let total = NoiseSpectrum::new(NoiseSource::QuantumTotal, grid.clone(), total)?;
    Ok([shot, rp, total])
}

/// Substrate and coating Brownian PSD coefficients: PSD = coefficient/ω.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrownianCoefficients {
    pub substrate: f64,
    pub coating: f64,
}

impl BrownianCoefficients {
    pub fn new(mirror: &MirrorSpec, spot_radius: f64, temperature: f64, formula: CoatingFormula) -> Self {
        let s = &mirror.coating.substrate;
        let kt4 = 4.0 * K_B * temperature;
        let substrate = kt4 * s.loss_angle * (1.0 - s.poisson_ratio * s.poisson_ratio)
            / (PI.sqrt() * spot_radius * s.young_modulus);
        let coating = mirror
            .coating
            .groups()
            .iter()
            .map(|g| {
                kt4 * g.total_thickness * g.props.loss_angle / (PI * spot_radius * spot_radius)
                    * coating_bracket(s, g.props, formula)
            })
            .sum();
        BrownianCoefficients { substrate, coating }
    }

    pub fn substrate_at(&self, f: f64) -> f64 {
        self.substrate / omega(f)
    }

    pub fn coating_at(&self, f: f64) -> f64 {
        self.coating / omega(f)
    }

    pub fn total_at(&self, f: f64) -> f64 {
        (self.substrate + self.coating) / omega(f)
    }
}

fn coating_bracket(s: &MaterialProps, c: &MaterialProps, formula: CoatingFormula) -> f64 {
    let (ys, yc, ns, nc) = (s.young_modulus, c.young_modulus, s.poisson_ratio, c.poisson_ratio);
    let exponent = match formula {
        CoatingFormula::Squared => 2,
        CoatingFormula::AsPrinted => 1,
    };
    let first = yc * yc * (1.0 + ns).powi(2) * (1.0 - 2.0 * ns).powi(2);
    let second = ys * ys * (1.0 + nc).powi(2) * (1.0 - 2.0 * nc).powi(exponent);
    (first + second) / (ys * ys * yc * (1.0 - nc * nc))
}

/// Brownian spectra plus the frequency above which the rigid-body
/// treatment is flagged (a third of the first internal mode).
#[derive(Debug, Clone, PartialEq)]
pub struct BrownianSpectra {
    pub substrate: NoiseSpectrum,
    pub coating: NoiseSpectrum,
    pub total: NoiseSpectrum,
    pub validity_limit: f64,
}

impl BrownianSpectra {
    /// Grid points lying above the validity limit.
    pub fn flagged_points(&self) -> usize {
        self.total
            .grid
            .points()
            .iter()
            .filter(|&&f| f > self.validity_limit)
            .count()
    }
}

pub fn brownian_noise(
    mirror: &MirrorSpec,
    spot_radius: f64,
    temperature: f64,
    grid: &FrequencyGrid,
    formula: CoatingFormula,
) -> Result<BrownianSpectra, NoiseError> {
    let b = BrownianCoefficients::new(mirror, spot_radius, temperature, formula);
    Ok(BrownianSpectra {
        substrate: NoiseSpectrum::from_fn(NoiseSource::BrownianSubstrate, grid, |f| b.substrate_at(f))?,
        coating: NoiseSpectrum::from_fn(NoiseSource::BrownianCoating, grid, |f| b.coating_at(f))?,
        total: NoiseSpectrum::from_fn(NoiseSource::BrownianTotal, grid, |f| b.total_at(f))?,
        validity_limit: mirror.internal_mode_freq / 3.0,
    })
}

/// Frequency at which the total Brownian PSD meets the SQL, located by
/// bisection between `f_lo` and `f_hi`.
pub fn brownian_sql_crossing(
    coefficients: &BrownianCoefficients,
    mass: f64,
    f_lo: f64,
    f_hi: f64,
) -> Result<f64, NoiseError> {
    let below = |f: f64| coefficients.total_at(f) < sql_psd_at(mass, f);
    if !(below(f_lo) && !below(f_hi)) {
        return Err(NoiseError::NoIntersection {
            f_min: f_lo,
            f_max: f_hi,
        });
    }
    Ok(bisect(below, f_lo, f_hi, 1e-12))
}

/// γ_gas = S·P/(C·m)·√(m_mol/(k_B·T)) with S = πr², quoted in Hz.
pub fn gas_damping_rate(env: &Environment, mirror: &MirrorSpec, mass: f64) -> f64 {
    let area = mirror.face_area();
    area * env.pressure / (env.gas_shape_constant * mass)
        * (env.gas_molecule_mass / (K_B * env.temperature)).sqrt()
}

/// 4k_B·T·m·(2πγ)·|χ|² with γ in Hz.
pub fn gas_thermal_at(
    gamma_hz: f64,
    temperature: f64,
    dynamics: &VerticalDynamics,
    f: f64,
) -> Result<f64, NoiseError> {
    let chi: Complex64 = dynamics.susceptibility(omega(f))?;
    Ok(4.0 * K_B * temperature * dynamics.mass * 2.0 * PI * gamma_hz * chi.norm_sqr())
}

pub fn gas_thermal_noise(
    gamma_hz: f64,
    temperature: f64,
    dynamics: &VerticalDynamics,
    grid: &FrequencyGrid,
) -> Result<NoiseSpectrum, NoiseError> {
    let psd = grid
        .points()
        .iter()
        .map(|&f| gas_thermal_at(gamma_hz, temperature, dynamics, f))
        .collect::<Result<Vec<_>, _>>()?;
    NoiseSpectrum::new(NoiseSource::GasThermal, grid.clone(), psd)
}

/// Flat ASD l·δf/(c/λ).
pub fn laser_frequency_asd(length: f64, freq_noise_asd: f64, wavelength: f64) -> f64 {
    length * freq_noise_asd * wavelength / C
}

pub fn laser_frequency_noise(
    length: f64,
    freq_noise_asd: f64,
    wavelength: f64,
    grid: &FrequencyGrid,
) -> Result<NoiseSpectrum, NoiseError> {
    let asd = laser_frequency_asd(length, freq_noise_asd, wavelength);
    NoiseSpectrum::from_fn(NoiseSource::LaserFrequency, grid, |_| asd * asd)
}

/// RIN equal to the shot noise of the lower input beam, √(2ħω_l/P_in).
pub fn required_rin(input_power: f64, wavelength: f64) -> f64 {
    (2.0 * HBAR * laser_angular_frequency(wavelength) / input_power).sqrt()
}

/// Force ASD rin·2P_circ/c driving the mirror through χ.
pub fn laser_intensity_at(
    rin: f64,
    circulating_power: f64,
    dynamics: &VerticalDynamics,
    f: f64,
) -> Result<f64, NoiseError> {
    if rin == 0.0 {
        return Ok(0.0);
    }
    let force = rin * 2.0 * circulating_power / C;
    Ok(force * force * dynamics.susceptibility(omega(f))?.norm_sqr())
}

/// Intensity-noise spectrum (zero when no RIN is configured) and the RIN
/// that would match the shot noise of the lower beam.
pub fn laser_intensity_noise(
    config: &SystemConfig,
    derived_lower: &CavityDerived,
    dynamics: &VerticalDynamics,
    grid: &FrequencyGrid,
) -> Result<(NoiseSpectrum, f64), NoiseError> {
    let rin = config.laser.rin_asd.unwrap_or(0.0);
    let psd = grid
        .points()
        .iter()
        .map(|&f| laser_intensity_at(rin, derived_lower.circulating_power, dynamics, f))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((
        NoiseSpectrum::new(NoiseSource::LaserIntensity, grid.clone(), psd)?,
        required_rin(config.lower.input_power, config.laser.wavelength),
    ))
}

/// Ground motion coefficient/f² filtered by (f₀/f)² above the suspension
/// resonance f₀.
pub fn seismic_asd_at(env: &Environment, f: f64) -> f64 {
    let ground = env.seismic_coefficient / (f * f);
    let f0 = env.suspension_resonance;
    if f > f0 {
        ground * (f0 / f) * (f0 / f)
    } else {
        ground
    }
}

pub fn seismic_noise(env: &Environment, grid: &FrequencyGrid) -> Result<NoiseSpectrum, NoiseError> {
    NoiseSpectrum::from_fn(NoiseSource::Seismic, grid, |f| seismic_asd_at(env, f).powi(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::derive_pair;
    use approx::assert_relative_eq;

    fn table1() -> (SystemConfig, crate::optics::DerivedPair, VerticalDynamics) {
        let cfg = SystemConfig::table1();
        let d = derive_pair(&cfg).unwrap();
        let dynm = VerticalDynamics::from_config(&cfg, &d);
        (cfg, d, dynm)
    }

    #[test]
    fn sql_at_23khz() {
        let m = 1.975_538e-7;
        assert_relative_eq!(sql_psd_at(m, 23e3).sqrt(), 2.25e-19, max_relative = 5e-3);
        assert_relative_eq!(sql_psd_at(m, 46e3), sql_psd_at(m, 23e3) / 4.0, max_relative = 1e-14);
        assert_relative_eq!(sql_psd_at(2.0 * m, 23e3), sql_psd_at(m, 23e3) / 2.0, max_relative = 1e-14);
    }

    #[test]
    fn approximate_fsql() {
        assert_relative_eq!(f_sql_approx(100.0, 1.064e-6), 19_327.0, max_relative = 1e-3);
        assert_relative_eq!(
            f_sql_approx(400.0, 1.064e-6),
            2.0 * f_sql_approx(100.0, 1.064e-6),
            max_relative = 1e-14
        );
        assert_relative_eq!(
            f_sql_approx(100.0, 4.0 * 1.064e-6),
            f_sql_approx(100.0, 1.064e-6) / 2.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn quantum_crossing_table1() {
        let (cfg, d, dynm) = table1();
        let q = QuantumModel::new(&cfg.lower, &d.lower, cfg.laser.wavelength, dynm);
        assert_relative_eq!(q.force_psd, 4.377e-31, max_relative = 2e-3);
        let grid = FrequencyGrid::logarithmic(10.0, 1e6, 1000).unwrap();
        let f = q.crossing(grid.points()).unwrap();
        assert_relative_eq!(f, 23_070.0, max_relative = 2e-3);
        let shot = q.shot_at(f);
        let rp = q.radiation_pressure_at(f).unwrap();
        assert!((shot / rp - 1.0).abs() < 1e-9);
        assert!(((shot + rp) / sql_psd_at(cfg.mass(), f) - 1.0).abs() < 0.01);
        assert!((shot.sqrt() - 1.58e-19).abs() < 0.02e-19);
    }

    #[test]
    fn quantum_product_is_hbar_squared_below_pole() {
        let (cfg, d, dynm) = table1();
        let q = QuantumModel::new(&cfg.lower, &d.lower, cfg.laser.wavelength, dynm);
        for f in [10.0, 1e3, 1e5] {
            assert_relative_eq!(q.shot_at(f) * q.force_psd, HBAR * HBAR, max_relative = 1e-3);
        }
    }

    #[test]
    fn no_crossing_in_narrow_band() {
        let (cfg, d, dynm) = table1();
        let q = QuantumModel::new(&cfg.lower, &d.lower, cfg.laser.wavelength, dynm);
        assert!(matches!(
            q.crossing(&[1e3, 2e3, 5e3]),
            Err(NoiseError::NoIntersection { .. })
        ));
    }

    #[test]
    fn brownian_table1_values() {
        let (cfg, d, _) = table1();
        let w = d.lower.spot_radius;
        let b = BrownianCoefficients::new(&cfg.mirror, w, 300.0, CoatingFormula::AsPrinted);
        assert_relative_eq!(b.substrate_at(23e3).sqrt(), 7.8e-20, max_relative = 0.02);
        assert_relative_eq!(b.coating_at(23e3).sqrt(), 9.0e-20, max_relative = 0.02);
        let sq = BrownianCoefficients::new(&cfg.mirror, w, 300.0, CoatingFormula::Squared);
        assert_eq!(sq.substrate, b.substrate);
        assert!(sq.coating < b.coating);
        assert_relative_eq!(sq.total_at(23e3).sqrt(), 1.135e-19, max_relative = 0.02);
        assert_relative_eq!(sq.total_at(10e3) / sq.total_at(40e3), 4.0, max_relative = 1e-14);
    }

    #[test]
    fn brownian_lossless_is_zero() {
        let (mut cfg, d, _) = table1();
        cfg.mirror.coating.substrate.loss_angle = 0.0;
        for m in cfg.mirror.coating.materials.values_mut() {
            m.loss_angle = 0.0;
        }
        let b = BrownianCoefficients::new(&cfg.mirror, d.lower.spot_radius, 300.0, CoatingFormula::Squared);
        assert_eq!(b.total_at(1e3), 0.0);
    }

    #[test]
    fn brownian_crossing_matches_closed_form() {
        let (cfg, d, _) = table1();
        let m = cfg.mass();
        for formula in [CoatingFormula::Squared, CoatingFormula::AsPrinted] {
            let b = BrownianCoefficients::new(&cfg.mirror, d.lower.spot_radius, 300.0, formula);
            let f = brownian_sql_crossing(&b, m, 1.0, 1e8).unwrap();
            let closed = HBAR / (PI * m * (b.substrate + b.coating));
            assert_relative_eq!(f, closed, max_relative = 1e-10);
        }
        let b = BrownianCoefficients::new(&cfg.mirror, d.lower.spot_radius, 300.0, CoatingFormula::Squared);
        let f = brownian_sql_crossing(&b, m, 1.0, 1e8).unwrap();
        assert!(f > 90e3 && f < 110e3, "crossing at {f}");
        assert!(brownian_sql_crossing(&b, m, 1.0, 10.0).is_err());
    }

    #[test]
    fn gas_damping_table1() {
        let (cfg, _, dynm) = table1();
        let g = gas_damping_rate(&cfg.environment, &cfg.mirror, cfg.mass());
        assert_relative_eq!(g, 6.64e-8, max_relative = 0.01);
        let mut env = cfg.environment;
        env.pressure *= 10.0;
        assert_relative_eq!(gas_damping_rate(&env, &cfg.mirror, cfg.mass()), 10.0 * g, max_relative = 1e-14);
        env.pressure = 0.0;
        assert_eq!(gas_damping_rate(&env, &cfg.mirror, cfg.mass()), 0.0);

        let a = gas_thermal_at(g, 300.0, &dynm, 23e3).unwrap();
        let b = gas_thermal_at(4.0 * g, 300.0, &dynm, 23e3).unwrap();
        assert_relative_eq!(b.sqrt(), 2.0 * a.sqrt(), max_relative = 1e-14);
        assert_eq!(gas_thermal_at(g, 0.0, &dynm, 23e3).unwrap(), 0.0);
    }

    #[test]
    fn laser_frequency_asd_table1() {
        assert_relative_eq!(laser_frequency_asd(0.095, 1e-4, 1.064e-6), 3.37e-20, max_relative = 2e-3);
        assert_eq!(laser_frequency_asd(0.095, 0.0, 1.064e-6), 0.0);
    }

    #[test]
    fn intensity_noise_matches_quantum_back_action() {
        let (mut cfg, d, dynm) = table1();
        let rin = required_rin(cfg.lower.input_power, cfg.laser.wavelength);
        assert_relative_eq!(rin, 1.695e-10, max_relative = 2e-3);
        cfg.laser.rin_asd = Some(rin);
        let q = QuantumModel::new(&cfg.lower, &d.lower, cfg.laser.wavelength, dynm);
        let grid = FrequencyGrid::logarithmic(1e3, 1e5, 5).unwrap();
        let (spec, _) = laser_intensity_noise(&cfg, &d.lower, &dynm, &grid).unwrap();
        for (i, &f) in grid.points().iter().enumerate() {
            let ratio = spec.psd[i] / q.radiation_pressure_at(f).unwrap();
            assert!(ratio > 0.5 * (1.0 - 1e-3) && ratio < 2.0, "ratio {ratio}");
            assert_relative_eq!(ratio, 0.5 / (1.0 + 0.005f64 * 0.005), max_relative = 1e-3);
        }
        cfg.laser.rin_asd = None;
        let (spec, _) = laser_intensity_noise(&cfg, &d.lower, &dynm, &grid).unwrap();
        assert!(spec.psd.iter().all(|&p| p == 0.0));
    }

    #[test]
    fn seismic_branches() {
        let cfg = SystemConfig::table1();
        let env = cfg.environment;
        assert_relative_eq!(seismic_asd_at(&env, 23e3), 3.57e-25, max_relative = 0.01);
        let f0 = env.suspension_resonance;
        assert_relative_eq!(
            seismic_asd_at(&env, f0 * (1.0 + 1e-12)),
            seismic_asd_at(&env, f0),
            max_relative = 1e-9
        );
        assert_eq!(seismic_asd_at(&env, 0.5), env.seismic_coefficient / 0.25);
        let quiet = Environment {
            seismic_coefficient: 0.0,
            ..env
        };
        assert_eq!(seismic_asd_at(&quiet, 100.0), 0.0);
    }
}
