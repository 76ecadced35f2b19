//! Per-cavity optics: resonator g-factors, Gaussian mode geometry, power
//! build-up, radiation force, clipping, intensity and heating.
//!
//! Sign convention for ROCs inside a resonator: positive when the mirror is
//! concave towards the cavity. The levitated mirror is convex downward with
//! its HR coating on the lower face, so the lower beam sees a convex mirror
//! (−R) while the upper beam, entering through the substrate, sees a
//! concave one with effective ROC +R/n_s.

use std::f64::consts::PI;

use thiserror::Error;

use crate::config::{CavitySpec, MirrorSpec, Side, SystemConfig};
use crate::constants::{C, SIGMA_SB};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OpticsError {
    #[error("only an HR coating on the lower face of the levitated mirror is supported")]
    UnsupportedHrSide,
    #[error("{0} cavity: mirror radius of curvature is zero")]
    ZeroRoc(Side),
    #[error("{side} cavity is not a stable resonator: g1·g2 = {product:.6} is outside (0, 1)")]
    UnstableResonator { side: Side, product: f64 },
}

/// Signed effective ROC of the levitated mirror seen from `side`.
pub fn effective_roc(mirror: &MirrorSpec, side: Side) -> Result<f64, OpticsError> {
    if mirror.hr_side != Side::Lower {
        return Err(OpticsError::UnsupportedHrSide);
    }
    Ok(match side {
        Side::Lower => -mirror.roc,
        Side::Upper => mirror.roc / mirror.coating.substrate.refractive_index,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GPair {
    pub fixed: f64,
    pub levitated: f64,
}

impl GPair {
    pub fn product(&self) -> f64 {
        self.fixed * self.levitated
    }

    pub fn is_stable(&self) -> bool {
        let p = self.product();
        p > 0.0 && p < 1.0
    }
}

/// g = 1 − l/R for the fixed and the levitated mirror.
pub fn resonator_g(cavity: &CavitySpec, roc_levitated_eff: f64) -> Result<GPair, OpticsError> {
    if cavity.fixed_mirror_roc == 0.0 || roc_levitated_eff == 0.0 {
        return Err(OpticsError::ZeroRoc(cavity.label));
    }
    Ok(GPair {
        fixed: 1.0 - cavity.length / cavity.fixed_mirror_roc,
        levitated: 1.0 - cavity.length / roc_levitated_eff,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeGeometry {
    /// Waist radius w₀ of the TEM00 mode.
    pub waist_radius: f64,
    /// Spot radius on the levitated mirror.
    pub spot_radius_levitated: f64,
    /// Spot radius on the fixed mirror.
    pub spot_radius_fixed: f64,
    /// Signed distance from the levitated mirror to the waist, towards the
    /// fixed mirror.
    pub waist_offset: f64,
}

/// Two-mirror stable-resonator mode.
pub fn mode_geometry(
    cavity: &CavitySpec,
    g: GPair,
    wavelength: f64,
) -> Result<ModeGeometry, OpticsError> {
    let p = g.product();
    if !g.is_stable() {
        return Err(OpticsError::UnstableResonator {
            side: cavity.label,
            product: p,
        });
    }
    let l = cavity.length;
    let scale = wavelength * l / PI;
    let spot = |g_self: f64, g_other: f64| (scale * (g_other / (g_self * (1.0 - p))).sqrt()).sqrt();
    let denom = g.fixed + g.levitated - 2.0 * p;
    let waist_radius = (scale * (p * (1.0 - p)).sqrt() / denom.abs()).sqrt();
    Ok(ModeGeometry {
        waist_radius,
        spot_radius_levitated: spot(g.levitated, g.fixed),
        spot_radius_fixed: spot(g.fixed, g.levitated),
        waist_offset: l * g.fixed * (1.0 - g.levitated) / denom,
    })
}

/// Intracavity power P_in·(ℱ/π)/(1 + δ²), impedance-matched build-up with a
/// Lorentzian detuning factor.
pub fn circulating_power(cavity: &CavitySpec) -> f64 {
    let d = cavity.detuning_norm;
    cavity.input_power * (cavity.finesse / PI) / (1.0 + d * d)
}

/// Radiation-pressure force 2P/c of a beam reflected at normal incidence.
pub fn radiation_force(p_circ: f64) -> f64 {
    2.0 * p_circ / C
}

/// Full linewidth κ = πc/(lℱ) in rad/s.
pub fn cavity_linewidth(cavity: &CavitySpec) -> f64 {
    PI * C / (cavity.length * cavity.finesse)
}

/// Cavity pole κ/(4π) in Hz.
pub fn pole_frequency(cavity: &CavitySpec) -> f64 {
    cavity_linewidth(cavity) / (4.0 * PI)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClippingCheck {
    /// Fraction of a Gaussian beam's power outside the mirror aperture.
    pub loss: f64,
    /// Total cavity transmittance 2π/ℱ that the loss must stay below.
    pub bound: f64,
    pub pass: bool,
}

pub fn clipping_loss(mirror_radius: f64, spot_radius: f64, finesse: f64) -> ClippingCheck {
    let loss = (-2.0 * mirror_radius * mirror_radius / (spot_radius * spot_radius)).exp();
    let bound = 2.0 * PI / finesse;
    ClippingCheck {
        loss,
        bound,
        pass: loss <= bound,
    }
}

/// Peak intensity 2P/(πw²) of a Gaussian beam (W/m²).
pub fn peak_intensity(p_circ: f64, spot_radius: f64) -> f64 {
    2.0 * p_circ / (PI * spot_radius * spot_radius)
}

/// Derived optical state of one cavity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityDerived {
    pub label: Side,
    pub g_fixed: f64,
    pub g_levitated: f64,
    pub waist_radius: f64,
    /// Spot radius on the levitated mirror from the resonator geometry.
    pub spot_radius_levitated: f64,
    pub spot_radius_fixed: f64,
    /// Spot radius used downstream: the configured override if any,
    /// otherwise `spot_radius_levitated`.
    pub spot_radius: f64,
    /// Full linewidth κ (rad/s).
    pub linewidth_fwhm: f64,
    /// κ/4π (Hz).
    pub pole_freq: f64,
    pub circulating_power: f64,
    pub radiation_force: f64,
    pub effective_levitated_roc: f64,
}

impl CavityDerived {
    pub fn g_pair(&self) -> GPair {
        GPair {
            fixed: self.g_fixed,
            levitated: self.g_levitated,
        }
    }

    pub fn peak_intensity(&self) -> f64 {
        peak_intensity(self.circulating_power, self.spot_radius)
    }
}

pub fn derive_cavity(config: &SystemConfig, side: Side) -> Result<CavityDerived, OpticsError> {
    let cavity = config.cavity(side);
    let roc_eff = effective_roc(&config.mirror, side)?;
    let g = resonator_g(cavity, roc_eff)?;
    let mode = mode_geometry(cavity, g, config.laser.wavelength)?;
    let p_circ = circulating_power(cavity);
    Ok(CavityDerived {
        label: side,
        g_fixed: g.fixed,
        g_levitated: g.levitated,
        waist_radius: mode.waist_radius,
        spot_radius_levitated: mode.spot_radius_levitated,
        spot_radius_fixed: mode.spot_radius_fixed,
        spot_radius: cavity
            .spot_radius_override
            .unwrap_or(mode.spot_radius_levitated),
        linewidth_fwhm: cavity_linewidth(cavity),
        pole_freq: pole_frequency(cavity),
        circulating_power: p_circ,
        radiation_force: radiation_force(p_circ),
        effective_levitated_roc: roc_eff,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedPair {
    pub lower: CavityDerived,
    pub upper: CavityDerived,
}

impl DerivedPair {
    pub fn get(&self, side: Side) -> &CavityDerived {
        match side {
            Side::Lower => &self.lower,
            Side::Upper => &self.upper,
        }
    }
}

pub fn derive_pair(config: &SystemConfig) -> Result<DerivedPair, OpticsError> {
    Ok(DerivedPair {
        lower: derive_cavity(config, Side::Lower)?,
        upper: derive_cavity(config, Side::Upper)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalLoad {
    /// Power absorbed by the HR coating (W).
    pub absorbed_power: f64,
    /// Steady-state temperature rise above the environment (K).
    pub temperature_rise: f64,
}

/// Absorbed power in the HR coating (lower beam only; substrate absorption
/// of the upper beam is neglected) and the temperature rise from the
/// linearized radiative balance ΔT = P/(4σT³Aε).
pub fn thermal_load(config: &SystemConfig, derived: &DerivedPair) -> ThermalLoad {
    let absorbed_power = config.mirror.absorption * derived.lower.circulating_power;
    let t = config.environment.temperature;
    let conductance =
        4.0 * SIGMA_SB * t.powi(3) * config.mirror.total_surface_area() * config.mirror.emissivity;
    ThermalLoad {
        absorbed_power,
        temperature_rise: absorbed_power / conductance,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn table1() -> SystemConfig {
        SystemConfig::table1()
    }

    #[test]
    fn effective_roc_signs() {
        let cfg = table1();
        assert_relative_eq!(
            effective_roc(&cfg.mirror, Side::Upper).unwrap(),
            0.030 / 1.45,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            effective_roc(&cfg.mirror, Side::Upper).unwrap(),
            20.69e-3,
            max_relative = 1e-3
        );
        assert_eq!(effective_roc(&cfg.mirror, Side::Lower).unwrap(), -0.030);
        let mut m = cfg.mirror.clone();
        m.coating.substrate.refractive_index = 1.0;
        assert_eq!(effective_roc(&m, Side::Upper).unwrap(), 0.030);
        m.hr_side = Side::Upper;
        assert_eq!(
            effective_roc(&m, Side::Lower),
            Err(OpticsError::UnsupportedHrSide)
        );
    }

    #[test]
    fn g_factors_table1() {
        let cfg = table1();
        let g = resonator_g(&cfg.lower, -0.030).unwrap();
        assert_relative_eq!(g.fixed, 0.208_333, max_relative = 1e-5);
        assert_relative_eq!(g.levitated, 4.166_667, max_relative = 1e-6);
        assert_relative_eq!(g.product(), 0.868_056, max_relative = 1e-5);
        let g = resonator_g(&cfg.upper, 0.030 / 1.45).unwrap();
        assert_relative_eq!(g.fixed, -0.666_667, max_relative = 1e-5);
        assert_relative_eq!(g.levitated, -1.416_667, max_relative = 1e-5);
        assert_relative_eq!(g.product(), 0.944_444, max_relative = 1e-5);
        let mut c = cfg.lower;
        c.length = 0.0;
        let g = resonator_g(&c, -0.03).unwrap();
        assert_eq!((g.fixed, g.levitated), (1.0, 1.0));
        assert_eq!(
            resonator_g(&cfg.lower, 0.0),
            Err(OpticsError::ZeroRoc(Side::Lower))
        );
    }

    #[test]
    fn spot_radii_table1() {
        let cfg = table1();
        let d = derive_pair(&cfg).unwrap();
        // 0.14 mm tabulated
        assert_relative_eq!(d.lower.spot_radius_levitated, 0.1407e-3, max_relative = 2e-3);
        assert!((d.lower.spot_radius_levitated - 0.14e-3).abs() / 0.14e-3 < 0.01);
        assert_relative_eq!(d.upper.spot_radius_levitated, 0.222e-3, max_relative = 3e-3);
        assert!((d.upper.spot_radius_levitated - 0.19e-3).abs() / 0.19e-3 < 0.2);
        assert_eq!(d.lower.spot_radius, d.lower.spot_radius_levitated);
        assert_eq!(d.upper.spot_radius, 0.19e-3);
    }

    #[test]
    fn confocal_boundary_rejected() {
        let cfg = table1();
        let g = GPair {
            fixed: 0.0,
            levitated: 0.0,
        };
        assert!(matches!(
            mode_geometry(&cfg.lower, g, 1.064e-6),
            Err(OpticsError::UnstableResonator { product, .. }) if product == 0.0
        ));
    }

    #[test]
    fn circulating_power_table1() {
        let cfg = table1();
        let pl = circulating_power(&cfg.lower);
        let pu = circulating_power(&cfg.upper);
        assert_relative_eq!(pl, 13.0 * 100.0 / PI / (1.0 + 0.005 * 0.005), max_relative = 1e-14);
        assert_relative_eq!(pl, 413.79, max_relative = 1e-4);
        assert_relative_eq!(pu, 127.28, max_relative = 1e-4);
        assert!((pl - 420.0).abs() / 420.0 < 0.02);
        assert!((pu - 130.0).abs() / 130.0 < 0.03);
        let mut far = cfg.lower;
        far.detuning_norm = 1e12;
        assert!(circulating_power(&far) < 1e-18);
    }

    #[test]
    fn radiation_force_values() {
        assert_relative_eq!(radiation_force(420.0), 2.80e-6, max_relative = 1e-3);
        assert_relative_eq!(radiation_force(130.0), 0.867e-6, max_relative = 1e-3);
        assert_eq!(radiation_force(0.0), 0.0);
    }

    #[test]
    fn linewidth_values() {
        let cfg = table1();
        assert_relative_eq!(cavity_linewidth(&cfg.lower), 9.914e7, max_relative = 1e-3);
        assert_relative_eq!(pole_frequency(&cfg.lower), 7.89e6, max_relative = 1e-3);
        assert_relative_eq!(cavity_linewidth(&cfg.upper), 1.8837e8, max_relative = 1e-3);
        let mut c = cfg.lower;
        c.finesse *= 2.0;
        assert_relative_eq!(
            cavity_linewidth(&c),
            cavity_linewidth(&cfg.lower) / 2.0,
            max_relative = 1e-15
        );
    }

    #[test]
    fn clipping_values() {
        let c = clipping_loss(0.35e-3, 0.14e-3, 100.0);
        assert_relative_eq!(c.loss, (-12.5f64).exp(), max_relative = 1e-12);
        assert_relative_eq!(c.loss, 3.73e-6, max_relative = 1e-2);
        assert_relative_eq!(c.bound, 0.0628, max_relative = 1e-3);
        assert!(c.pass);
        assert_relative_eq!(clipping_loss(1.0, 1.0, 100.0).loss, 0.135_335, max_relative = 1e-5);
        assert_eq!(clipping_loss(1.0, 1e-6, 100.0).loss, 0.0);
    }

    #[test]
    fn peak_intensity_values() {
        // kW/mm² = 1e9 W/m²
        assert_relative_eq!(peak_intensity(420.0, 0.14e-3) / 1e9, 13.64, max_relative = 1e-3);
        assert_relative_eq!(peak_intensity(130.0, 0.19e-3) / 1e9, 2.293, max_relative = 1e-3);
        assert_eq!(peak_intensity(0.0, 1e-4), 0.0);
    }

    #[test]
    fn thermal_load_table1() {
        let cfg = table1();
        let d = derive_pair(&cfg).unwrap();
        let t = thermal_load(&cfg, &d);
        assert_relative_eq!(t.absorbed_power, 0.34e-6 * d.lower.circulating_power, max_relative = 1e-15);
        assert!(t.absorbed_power < 0.143e-3);
        // 1.407e-4 W / (4σ·300³ · 1.2828e-6 m²)
        assert_relative_eq!(t.temperature_rise, 17.9, max_relative = 5e-3);
        let mut cold = cfg.clone();
        cold.mirror.absorption = 0.0;
        let t = thermal_load(&cold, &d);
        assert_eq!((t.absorbed_power, t.temperature_rise), (0.0, 0.0));
    }
}
