//! Linearized mechanics of the levitated mirror.
//!
//! Small displacements (δx, δz, δβ) couple to restoring forces through a
//! diagonal complex stiffness matrix: horizontal springs from the tilt of
//! the radiation force about the centres of curvature, the vertical double
//! optical spring, and the gravity torque mgR on the curved mirror. A
//! degree of freedom is stable when both the real (spring) and imaginary
//! (damping) parts of its entry are positive.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::config::{CavitySpec, Side, SystemConfig};
use crate::constants::{C, G_ACC};
use crate::optics::{self, CavityDerived, DerivedPair, OpticsError};
use crate::options::{AnalysisOptions, RocConvention};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StabilityError {
    #[error("{0} cavity: G = 1 makes the horizontal damping term singular")]
    DegenerateGeometry(Side),
    #[error("susceptibility pole at the spring resonance {f_res:.6e} Hz")]
    Pole { f_res: f64 },
    #[error(transparent)]
    Optics(#[from] OpticsError),
}

/// Frequency-dependent spring constant K(ω) = k + i·(damping term).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexStiffness {
    pub real_part: f64,
    pub imag_part: f64,
    /// Angular evaluation frequency (rad/s).
    pub eval_freq: f64,
}

impl ComplexStiffness {
    pub fn new(real_part: f64, imag_part: f64, eval_freq: f64) -> Self {
        ComplexStiffness {
            real_part,
            imag_part,
            eval_freq,
        }
    }

    pub fn value(&self) -> Complex64 {
        Complex64::new(self.real_part, self.imag_part)
    }

    /// Sum of two stiffnesses evaluated at the same frequency.
    pub fn add(&self, other: &ComplexStiffness) -> ComplexStiffness {
        debug_assert_eq!(self.eval_freq, other.eval_freq);
        ComplexStiffness::new(
            self.real_part + other.real_part,
            self.imag_part + other.imag_part,
            self.eval_freq,
        )
    }

    /// Imaginary part divided by ω (N·s/m); `None` at ω = 0.
    pub fn damping_coefficient(&self) -> Option<f64> {
        (self.eval_freq > 0.0).then(|| self.imag_part / self.eval_freq)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerticalSpring {
    pub stiffness: ComplexStiffness,
    /// Optical damping rate γ (1/s); the imaginary part is m·ω·γ.
    pub damping_rate: f64,
    /// ω above κ/10, where the single-pole model is no longer reliable.
    pub beyond_adiabatic: bool,
}

/// Optical spring of a detuned cavity in the below-pole regime:
/// k = 16ℱδP/(λc(1+δ²)), γ = −(k/m)·4/(κ(1+δ²)). Positive δ gives a
/// restoring spring together with anti-damping.
pub fn vertical_optical_spring(
    cavity: &CavitySpec,
    derived: &CavityDerived,
    wavelength: f64,
    mass: f64,
    omega: f64,
) -> VerticalSpring {
    let d = cavity.detuning_norm;
    let lorentz = 1.0 + d * d;
    let k = 16.0 * cavity.finesse * d * derived.circulating_power / (wavelength * C * lorentz);
    let kappa = derived.linewidth_fwhm;
    let gamma = -(k / mass) * 4.0 / (kappa * lorentz);
    VerticalSpring {
        stiffness: ComplexStiffness::new(k, mass * omega * gamma, omega),
        damping_rate: gamma,
        beyond_adiabatic: omega > kappa / 10.0,
    }
}

/// Resonator factor G entering the horizontal damping term.
pub fn horizontal_g_factor(
    config: &SystemConfig,
    derived: &CavityDerived,
    convention: RocConvention,
) -> f64 {
    match convention {
        RocConvention::Signed => derived.g_pair().product(),
        RocConvention::PaperLiteral => {
            let c = config.cavity(derived.label);
            (1.0 - c.length / c.fixed_mirror_roc) * (1.0 - c.length / config.mirror.roc)
        }
    }
}

/// K = ±(F/a)·[1 − iω·πl/(ℱc(1−G))], negative for the lower cavity and
/// positive for the upper one.
pub fn horizontal_spring(
    cavity: &CavitySpec,
    derived: &CavityDerived,
    g_factor: f64,
    omega: f64,
) -> Result<ComplexStiffness, StabilityError> {
    let one_minus_g = 1.0 - g_factor;
    if one_minus_g == 0.0 {
        return Err(StabilityError::DegenerateGeometry(cavity.label));
    }
    let sign = match cavity.label {
        Side::Lower => -1.0,
        Side::Upper => 1.0,
    };
    let base = sign * derived.radiation_force / cavity.coc_distance;
    let delay = PI * cavity.length / (cavity.finesse * C * one_minus_g);
    Ok(ComplexStiffness::new(base, -base * omega * delay, omega))
}

/// Gravity torque stiffness mgR (N·m/rad), lossless.
pub fn gravity_rotational_stiffness(mass: f64, roc: f64) -> ComplexStiffness {
    ComplexStiffness::new(mass * G_ACC * roc, 0.0, 0.0)
}

/// Diagonal entries of the 3×3 stiffness matrix for (δx, δz, δβ).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StiffnessMatrix {
    pub horizontal: ComplexStiffness,
    pub vertical: ComplexStiffness,
    pub rotational: ComplexStiffness,
    pub eval_freq: f64,
}

impl StiffnessMatrix {
    /// Full 3×3 matrix; off-diagonal entries are zero.
    pub fn to_matrix(&self) -> [[Complex64; 3]; 3] {
        let z = Complex64::new(0.0, 0.0);
        [
            [self.horizontal.value(), z, z],
            [z, self.vertical.value(), z],
            [z, z, self.rotational.value()],
        ]
    }
}

pub fn stiffness_matrix(
    config: &SystemConfig,
    derived: &DerivedPair,
    omega: f64,
    convention: RocConvention,
) -> Result<StiffnessMatrix, StabilityError> {
    let mass = config.mass();
    let lambda = config.laser.wavelength;
    let mut horizontal = ComplexStiffness::new(0.0, 0.0, omega);
    let mut vertical = ComplexStiffness::new(0.0, 0.0, omega);
    for side in Side::BOTH {
        let cav = config.cavity(side);
        let d = derived.get(side);
        let g = horizontal_g_factor(config, d, convention);
        horizontal = horizontal.add(&horizontal_spring(cav, d, g, omega)?);
        vertical = vertical.add(&vertical_optical_spring(cav, d, lambda, mass, omega).stiffness);
    }
    let mut rotational = gravity_rotational_stiffness(mass, config.mirror.roc);
    rotational.eval_freq = omega;
    Ok(StiffnessMatrix {
        horizontal,
        vertical,
        rotational,
        eval_freq: omega,
    })
}

/// Vertical equation of motion of the mirror, −mΩ²x + K_z(Ω)x = F.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerticalDynamics {
    pub mass: f64,
    /// Net optical spring constant (N/m).
    pub spring: f64,
    /// Net optical damping rate (1/s).
    pub damping_rate: f64,
}

impl VerticalDynamics {
    pub fn from_config(config: &SystemConfig, derived: &DerivedPair) -> Self {
        let mass = config.mass();
        let (spring, damping_rate) = Side::BOTH.iter().fold((0.0, 0.0), |(k, g), &side| {
            let s = vertical_optical_spring(
                config.cavity(side),
                derived.get(side),
                config.laser.wavelength,
                mass,
                0.0,
            );
            (k + s.stiffness.real_part, g + s.damping_rate)
        });
        VerticalDynamics {
            mass,
            spring,
            damping_rate,
        }
    }

    /// A mass with no optical spring.
    pub fn free_mass(mass: f64) -> Self {
        VerticalDynamics {
            mass,
            spring: 0.0,
            damping_rate: 0.0,
        }
    }

    pub fn stiffness(&self, omega: f64) -> ComplexStiffness {
        ComplexStiffness::new(self.spring, self.mass * omega * self.damping_rate, omega)
    }

    /// Frequency (Hz) where Re(−mΩ² + K_z) vanishes.
    pub fn resonance_freq(&self) -> Option<f64> {
        (self.spring > 0.0).then(|| (self.spring / self.mass).sqrt() / (2.0 * PI))
    }

    pub fn susceptibility(&self, omega: f64) -> Result<Complex64, StabilityError> {
        susceptibility(self.mass, &self.stiffness(omega), omega)
    }
}

/// χ(Ω) = 1/(−mΩ² + K_z(Ω)).
pub fn susceptibility(
    mass: f64,
    k_z: &ComplexStiffness,
    omega: f64,
) -> Result<Complex64, StabilityError> {
    let denom = Complex64::new(-mass * omega * omega, 0.0) + k_z.value();
    if denom.re == 0.0 && denom.im == 0.0 {
        let f_res = (k_z.real_part.max(0.0) / mass).sqrt() / (2.0 * PI);
        return Err(StabilityError::Pole { f_res });
    }
    Ok(denom.inv())
}

/// Extremes of one diagonal entry over a frequency band.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DofCheck {
    /// Smallest real part over the band.
    pub spring_min: f64,
    /// Smallest imag/ω over the band (ω > 0); `None` for lossless entries.
    pub damping_min: Option<f64>,
    pub spring_ok: bool,
    pub damping_ok: Option<bool>,
}

impl DofCheck {
    fn from_entries(entries: impl Iterator<Item = ComplexStiffness>, lossless: bool) -> Self {
        let mut spring_min = f64::INFINITY;
        let mut damping_min = f64::INFINITY;
        for e in entries {
            spring_min = spring_min.min(e.real_part);
            if let Some(d) = e.damping_coefficient() {
                damping_min = damping_min.min(d);
            }
        }
        let damping_min = (!lossless && damping_min.is_finite()).then_some(damping_min);
        DofCheck {
            spring_min,
            damping_min,
            spring_ok: spring_min > 0.0,
            damping_ok: damping_min.map(|d| d > 0.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    pub horizontal: DofCheck,
    pub vertical: DofCheck,
    pub rotational: DofCheck,
    /// Whether the horizontal damping sign takes part in `overall`.
    pub horizontal_damping_gated: bool,
    /// Vertical spring resonance (Hz), if the net spring is restoring and
    /// the resonance lies inside the band.
    pub resonance_freq: Option<f64>,
    /// Band reaches above κ/10 of either cavity.
    pub beyond_adiabatic: bool,
    pub at_dc: StiffnessMatrix,
    pub at_resonance: Option<StiffnessMatrix>,
    pub overall: bool,
}

/// Log-spaced angular frequencies from 1 Hz to 100 kHz.
pub fn default_band() -> Vec<f64> {
    let n = 401;
    let (lo, hi) = (1.0f64.ln(), 1.0e5f64.ln());
    (0..n)
        .map(|i| 2.0 * PI * (lo + (hi - lo) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Root of Re(−mΩ² + K_z(Ω)) inside the band by bracketing and bisection.
fn find_resonance(
    config: &SystemConfig,
    derived: &DerivedPair,
    band: &[f64],
    convention: RocConvention,
) -> Result<Option<f64>, StabilityError> {
    let mass = config.mass();
    let f = |w: f64| -> Result<f64, StabilityError> {
        Ok(-mass * w * w + stiffness_matrix(config, derived, w, convention)?.vertical.real_part)
    };
    for pair in band.windows(2) {
        let (mut lo, mut hi) = (pair[0], pair[1]);
        let (flo, fhi) = (f(lo)?, f(hi)?);
        if flo == 0.0 {
            return Ok(Some(lo));
        }
        if flo > 0.0 && fhi <= 0.0 {
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if f(mid)? > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
                if (hi - lo) <= 1e-14 * hi {
                    break;
                }
            }
            return Ok(Some(0.5 * (lo + hi)));
        }
    }
    Ok(None)
}

/// Evaluates the three diagonal entries across `band` (rad/s).
pub fn stability_report(
    config: &SystemConfig,
    derived: &DerivedPair,
    band: &[f64],
    options: &AnalysisOptions,
) -> Result<StabilityReport, StabilityError> {
    let conv = options.roc_convention;
    let matrices = band
        .iter()
        .map(|&w| stiffness_matrix(config, derived, w, conv))
        .collect::<Result<Vec<_>, _>>()?;
    let horizontal = DofCheck::from_entries(matrices.iter().map(|m| m.horizontal), false);
    let vertical = DofCheck::from_entries(matrices.iter().map(|m| m.vertical), false);
    let rotational = DofCheck::from_entries(matrices.iter().map(|m| m.rotational), true);
    let omega_res = find_resonance(config, derived, band, conv)?;
    let max_band = band.iter().cloned().fold(0.0, f64::max);
    let beyond_adiabatic = Side::BOTH
        .iter()
        .any(|&s| max_band > derived.get(s).linewidth_fwhm / 10.0);
    let gate = options.strict_horizontal_damping;
    let overall = vertical.spring_ok
        && vertical.damping_ok.unwrap_or(true)
        && horizontal.spring_ok
        && (!gate || horizontal.damping_ok.unwrap_or(true))
        && rotational.spring_ok;
    Ok(StabilityReport {
        horizontal,
        vertical,
        rotational,
        horizontal_damping_gated: gate,
        resonance_freq: omega_res.map(|w| w / (2.0 * PI)),
        beyond_adiabatic,
        at_dc: stiffness_matrix(config, derived, 0.0, conv)?,
        at_resonance: omega_res
            .map(|w| stiffness_matrix(config, derived, w, conv))
            .transpose()?,
        overall,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForceBalance {
    /// (F_L − F_U − mg)/(mg).
    pub residual: f64,
    pub pass: bool,
}

pub fn force_balance(config: &SystemConfig, derived: &DerivedPair, tolerance: f64) -> ForceBalance {
    let weight = config.mass() * G_ACC;
    let residual =
        (derived.lower.radiation_force - derived.upper.radiation_force - weight) / weight;
    ForceBalance {
        residual,
        pass: residual.abs() <= tolerance,
    }
}

/// Copy of `config` with the lower input power chosen so that
/// F_L − F_U = mg exactly.
pub fn balance_lower_power(config: &SystemConfig) -> SystemConfig {
    let mut out = config.clone();
    let weight = config.mass() * G_ACC;
    let f_upper = optics::radiation_force(optics::circulating_power(&config.upper));
    let p_circ = (weight + f_upper) * C / 2.0;
    let l = &mut out.lower;
    l.input_power = p_circ * PI * (1.0 + l.detuning_norm * l.detuning_norm) / l.finesse;
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HorizontalBound {
    Detuning,
    Geometric,
    ModeMatch,
}

/// Validity ranges of the linearized trap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrappingRanges {
    /// min λ|δ|/ℱ.
    pub dz_bound: f64,
    /// min √(2aλ|δ|/ℱ).
    pub dx_bound_detuning: f64,
    /// min a.
    pub dx_bound_geometric: f64,
    /// Excursion at which the mode-matching loss (δx/w₀)²/2 + (δθ/θ₀)²/2 reaches one.
    pub dx_bound_modematch: f64,
    pub dx_bound: f64,
    pub binding: HorizontalBound,
}

pub fn trapping_ranges(config: &SystemConfig, derived: &DerivedPair) -> TrappingRanges {
    let lambda = config.laser.wavelength;
    let mut dz = f64::INFINITY;
    let mut dx_det = f64::INFINITY;
    let mut dx_geo = f64::INFINITY;
    let mut dx_mm = f64::INFINITY;
    for side in Side::BOTH {
        let c = config.cavity(side);
        let length_scale = lambda * c.detuning_norm.abs() / c.finesse;
        dz = dz.min(length_scale);
        dx_det = dx_det.min((2.0 * c.coc_distance * length_scale).sqrt());
        dx_geo = dx_geo.min(c.coc_distance);
        let w0 = derived.get(side).waist_radius;
        let theta0 = lambda / (PI * w0);
        let tilt_scale = c.coc_distance * theta0;
        let inv = 1.0 / (w0 * w0) + 1.0 / (tilt_scale * tilt_scale);
        dx_mm = dx_mm.min((2.0 / inv).sqrt());
    }
    let (dx_bound, binding) = [
        (dx_det, HorizontalBound::Detuning),
        (dx_geo, HorizontalBound::Geometric),
        (dx_mm, HorizontalBound::ModeMatch),
    ]
    .into_iter()
    .fold((f64::INFINITY, HorizontalBound::Detuning), |acc, b| {
        if b.0 < acc.0 {
            b
        } else {
            acc
        }
    });
    TrappingRanges {
        dz_bound: dz,
        dx_bound_detuning: dx_det,
        dx_bound_geometric: dx_geo,
        dx_bound_modematch: dx_mm,
        dx_bound,
        binding,
    }
}
