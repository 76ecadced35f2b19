//! Parametric description of the two-cavity levitation system.
//!
//! A [`SystemConfig`] is an immutable record of the levitated mirror, its
//! coating stack, the laser, the lower and upper cavities and the
//! environment. All quantities are plain SI numbers.

mod fields;
mod format;
pub(crate) mod kv;
mod validate;

use std::collections::BTreeMap;
use std::f64::consts::PI;

pub use fields::{CavityField, ScalarField};
pub use format::{parse_config, to_config_string, ConfigError};
pub use validate::{validate, Violation, ViolationKind};

/// The bundled parameter set reproducing the published design table.
pub const TABLE1: &str = include_str!("../../data/table1.conf");

/// Default fractional coating absorption (0.34 ppm at 1064 nm).
pub const DEFAULT_ABSORPTION: f64 = 0.34e-6;
/// Default mean residual-gas molecule mass (air, ~29 u).
pub const DEFAULT_GAS_MOLECULE_MASS: f64 = 4.81e-26;
/// Default lowest structural resonance of the mirror.
pub const DEFAULT_INTERNAL_MODE_FREQ: f64 = 3.1e6;
/// Default coating damage threshold, 2 MW/mm².
pub const DEFAULT_DAMAGE_THRESHOLD: f64 = 2.0e12;
/// Default seismic amplitude coefficient of the 1/f² ground spectrum.
pub const DEFAULT_SEISMIC_COEFFICIENT: f64 = 1.0e-7;
/// Default resonance of the single-stage suspension of the whole setup.
pub const DEFAULT_SUSPENSION_RESONANCE: f64 = 1.0;

/// Which cavity (or which face of the mirror) a quantity refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Lower,
    Upper,
}

impl Side {
    pub const BOTH: [Side; 2] = [Side::Lower, Side::Upper];

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Lower => "lower",
            Side::Upper => "upper",
        }
    }

    pub fn parse(s: &str) -> Option<Side> {
        match s {
            "lower" => Some(Side::Lower),
            "upper" => Some(Side::Upper),
            _ => None,
        }
    }
}

impl std::fmt::Display for Side {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Elastic, dissipative and optical properties of a bulk or thin-film material.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialProps {
    /// Young's modulus (Pa).
    pub young_modulus: f64,
    pub poisson_ratio: f64,
    /// Mechanical loss angle.
    pub loss_angle: f64,
    pub refractive_index: f64,
    /// Mass density (kg/m³).
    pub density: f64,
}

/// One thin-film layer; `material` names an entry of [`CoatingStack::materials`].
#[derive(Debug, Clone, PartialEq)]
pub struct CoatingLayer {
    pub material: String,
    /// Physical thickness (m).
    pub thickness: f64,
}

/// Dielectric stack on the substrate. Layers are ordered from the ambient
/// (cavity) side towards the substrate.
#[derive(Debug, Clone, PartialEq)]
pub struct CoatingStack {
    pub materials: BTreeMap<String, MaterialProps>,
    pub layers: Vec<CoatingLayer>,
    pub substrate: MaterialProps,
}

/// All layers made of one material, with their summed thickness.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerGroup<'a> {
    pub material: &'a str,
    pub props: &'a MaterialProps,
    pub total_thickness: f64,
    pub count: usize,
}

impl CoatingStack {
    pub fn layer_props(&self, layer: &CoatingLayer) -> Option<&MaterialProps> {
        self.materials.get(&layer.material)
    }

    /// Layers grouped by material in order of first appearance. Layers that
    /// reference an unknown material are skipped (reported by `validate`).
    pub fn groups(&self) -> Vec<LayerGroup<'_>> {
        let mut out: Vec<LayerGroup<'_>> = Vec::new();
        for layer in &self.layers {
            let Some((name, props)) = self.materials.get_key_value(&layer.material) else {
                continue;
            };
            match out.iter_mut().find(|g| g.material == name.as_str()) {
                Some(g) => {
                    g.total_thickness += layer.thickness;
                    g.count += 1;
                }
                None => out.push(LayerGroup {
                    material: name,
                    props,
                    total_thickness: layer.thickness,
                    count: 1,
                }),
            }
        }
        out
    }

    pub fn total_thickness(&self) -> f64 {
        self.layers.iter().map(|l| l.thickness).sum()
    }
}

/// The levitated mirror: a fused-silica cylinder with a curved,
/// high-reflective coated face.
#[derive(Debug, Clone, PartialEq)]
pub struct MirrorSpec {
    /// Mirror radius r (m).
    pub radius: f64,
    /// Diameter over thickness.
    pub aspect_ratio: f64,
    /// Radius of curvature R (m); positive when convex downward.
    pub roc: f64,
    pub coating: CoatingStack,
    /// Face that carries the high-reflective coating.
    pub hr_side: Side,
    /// Fractional optical absorption of the coating.
    pub absorption: f64,
    /// Lowest structural resonance (Hz), an input constant.
    pub internal_mode_freq: f64,
    /// Thermal emissivity used in the radiative heat balance.
    pub emissivity: f64,
    /// Coating damage threshold (W/m²).
    pub damage_threshold: f64,
}

impl MirrorSpec {
    /// Thickness h = 2r / aspect_ratio.
    pub fn thickness(&self) -> f64 {
        2.0 * self.radius / self.aspect_ratio
    }

    /// Area of one flat face, π r².
    pub fn face_area(&self) -> f64 {
        PI * self.radius * self.radius
    }

    /// Both faces plus the cylindrical side.
    pub fn total_surface_area(&self) -> f64 {
        2.0 * self.face_area() + 2.0 * PI * self.radius * self.thickness()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LaserSpec {
    /// Vacuum wavelength (m).
    pub wavelength: f64,
    /// Laser frequency noise amplitude spectral density (Hz/√Hz).
    pub freq_noise_asd: f64,
    /// Relative intensity noise (1/√Hz); `None` means shot-noise limited.
    pub rin_asd: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavitySpec {
    pub label: Side,
    /// Cavity length l (m).
    pub length: f64,
    /// ROC of the fixed mirror (m), positive when concave towards the cavity.
    pub fixed_mirror_roc: f64,
    /// Distance a between the centres of curvature of the two mirrors (m).
    pub coc_distance: f64,
    pub finesse: f64,
    /// Input power (W).
    pub input_power: f64,
    /// Detuning normalized by the amplitude decay rate.
    pub detuning_norm: f64,
    /// Spot radius on the levitated mirror to use instead of the value
    /// derived from the resonator geometry.
    pub spot_radius_override: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Environment {
    /// Temperature (K).
    pub temperature: f64,
    /// Residual gas pressure (Pa).
    pub pressure: f64,
    /// Mean mass of a residual-gas molecule (kg).
    pub gas_molecule_mass: f64,
    /// Shape constant C of the gas-damping formula.
    pub gas_shape_constant: f64,
    /// Amplitude of the ground spectrum coefficient/f² (m·Hz^(3/2)).
    pub seismic_coefficient: f64,
    /// Resonance of the isolation suspension (Hz).
    pub suspension_resonance: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    pub mirror: MirrorSpec,
    pub laser: LaserSpec,
    pub lower: CavitySpec,
    pub upper: CavitySpec,
    pub environment: Environment,
}

impl SystemConfig {
    /// The bundled published parameter set.
    pub fn table1() -> SystemConfig {
        parse_config(TABLE1).expect("bundled table1 configuration is valid")
    }

    pub fn cavity(&self, side: Side) -> &CavitySpec {
        match side {
            Side::Lower => &self.lower,
            Side::Upper => &self.upper,
        }
    }

    pub fn cavity_mut(&mut self, side: Side) -> &mut CavitySpec {
        match side {
            Side::Lower => &mut self.lower,
            Side::Upper => &mut self.upper,
        }
    }

    pub fn mass(&self) -> f64 {
        mirror_mass(&self.mirror)
    }
}

/// Mass of the levitated mirror modeled as a right cylinder,
/// ρ·π·r²·(2r/aspect_ratio). The coating mass and the sagitta of the
/// curved face are neglected.
pub fn mirror_mass(mirror: &MirrorSpec) -> f64 {
    mirror.coating.substrate.density * mirror.face_area() * mirror.thickness()
}

/// Design rescaled so that the mirror mass grows by s³ and the finesse by t.
///
/// The mirror radius and beam radii scale by s, lengths along the beam
/// (cavity lengths, curvatures, centre-of-curvature distances) by s² so the
/// g-factors and spot radius ∝ s are preserved, and the input powers by
/// s³/t so the circulating powers keep balancing the weight. Coating
/// layers are optical and stay as they are.
pub fn rescaled(config: &SystemConfig, s: f64, t: f64) -> SystemConfig {
    let mut out = config.clone();
    out.mirror.radius *= s;
    out.mirror.roc *= s * s;
    for side in Side::BOTH {
        let c = out.cavity_mut(side);
        c.length *= s * s;
        c.fixed_mirror_roc *= s * s;
        c.coc_distance *= s * s;
        c.finesse *= t;
        c.input_power *= s * s * s / t;
        c.spot_radius_override = c.spot_radius_override.map(|w| w * s);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn table1_mass_is_point_two_milligram() {
        let cfg = SystemConfig::table1();
        let m = cfg.mass();
        // 2200 · π · (0.35e-3)² · (0.7e-3 / 3)
        assert_relative_eq!(m, 1.975_538e-7, max_relative = 1e-5);
        assert!((m - 0.2e-6).abs() / 0.2e-6 < 0.02);
    }

    #[test]
    fn mass_scales_with_radius_cubed() {
        let mut mirror = SystemConfig::table1().mirror;
        let m1 = mirror_mass(&mirror);
        mirror.radius *= 2.0;
        assert_relative_eq!(mirror_mass(&mirror), 8.0 * m1, max_relative = 1e-12);
        mirror.radius = 0.0;
        assert_eq!(mirror_mass(&mirror), 0.0);
    }

    #[test]
    fn groups_sum_layer_thickness() {
        let cfg = SystemConfig::table1();
        let groups = cfg.mirror.coating.groups();
        assert_eq!(groups.len(), 2);
        assert_eq!(groups[0].material, "ta");
        assert_eq!(groups[0].count, 7);
        assert_relative_eq!(groups[0].total_thickness, 7.0 * 91e-9, max_relative = 1e-12);
        assert_eq!(groups[1].count, 6);
        assert_relative_eq!(groups[1].total_thickness, 6.0 * 237e-9, max_relative = 1e-12);
    }

    #[test]
    fn rescaling_keeps_identity_and_scales_mass() {
        let cfg = SystemConfig::table1();
        assert_eq!(rescaled(&cfg, 1.0, 1.0), cfg);
        let big = rescaled(&cfg, 2.0, 3.0);
        assert_relative_eq!(big.mass(), 8.0 * cfg.mass(), max_relative = 1e-12);
        assert_eq!(big.lower.finesse, 300.0);
        assert_relative_eq!(big.lower.length, 4.0 * cfg.lower.length, max_relative = 1e-15);
        assert_relative_eq!(big.upper.input_power, 4.0 * 8.0 / 3.0, max_relative = 1e-15);
    }
}
