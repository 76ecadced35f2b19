//! Addressable scalar fields of a [`SystemConfig`], used by the design search.

use super::{Side, SystemConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CavityField {
    Length,
    FixedMirrorRoc,
    CocDistance,
    Finesse,
    InputPower,
    DetuningNorm,
    SpotRadiusOverride,
}

impl CavityField {
    const ALL: [CavityField; 7] = [
        CavityField::Length,
        CavityField::FixedMirrorRoc,
        CavityField::CocDistance,
        CavityField::Finesse,
        CavityField::InputPower,
        CavityField::DetuningNorm,
        CavityField::SpotRadiusOverride,
    ];

    fn key(self) -> &'static str {
        match self {
            CavityField::Length => "length",
            CavityField::FixedMirrorRoc => "fixed_mirror_roc",
            CavityField::CocDistance => "coc_distance",
            CavityField::Finesse => "finesse",
            CavityField::InputPower => "input_power",
            CavityField::DetuningNorm => "detuning_norm",
            CavityField::SpotRadiusOverride => "spot_radius_override",
        }
    }
}

/// A numeric configuration value addressed by `section` and `key`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScalarField {
    MirrorRadius,
    MirrorAspectRatio,
    MirrorRoc,
    MirrorAbsorption,
    MirrorInternalModeFreq,
    MirrorEmissivity,
    MirrorDamageThreshold,
    LaserWavelength,
    LaserFreqNoiseAsd,
    LaserRinAsd,
    Cavity(Side, CavityField),
    EnvTemperature,
    EnvPressure,
    EnvGasMoleculeMass,
    EnvGasShapeConstant,
    EnvSeismicCoefficient,
    EnvSuspensionResonance,
}

impl ScalarField {
    pub fn all() -> Vec<ScalarField> {
        use ScalarField::*;
        let mut v = vec![
            MirrorRadius,
            MirrorAspectRatio,
            MirrorRoc,
            MirrorAbsorption,
            MirrorInternalModeFreq,
            MirrorEmissivity,
            MirrorDamageThreshold,
            LaserWavelength,
            LaserFreqNoiseAsd,
            LaserRinAsd,
        ];
        for side in Side::BOTH {
            v.extend(CavityField::ALL.iter().map(|&f| Cavity(side, f)));
        }
        v.extend([
            EnvTemperature,
            EnvPressure,
            EnvGasMoleculeMass,
            EnvGasShapeConstant,
            EnvSeismicCoefficient,
            EnvSuspensionResonance,
        ]);
        v
    }

    pub fn section(self) -> String {
        use ScalarField::*;
        match self {
            MirrorRadius | MirrorAspectRatio | MirrorRoc | MirrorAbsorption
            | MirrorInternalModeFreq | MirrorEmissivity | MirrorDamageThreshold => "mirror".into(),
            LaserWavelength | LaserFreqNoiseAsd | LaserRinAsd => "laser".into(),
            Cavity(side, _) => format!("cavity.{side}"),
            _ => "environment".into(),
        }
    }

    pub fn key(self) -> &'static str {
        use ScalarField::*;
        match self {
            MirrorRadius => "radius",
            MirrorAspectRatio => "aspect_ratio",
            MirrorRoc => "roc",
            MirrorAbsorption => "absorption",
            MirrorInternalModeFreq => "internal_mode_freq",
            MirrorEmissivity => "emissivity",
            MirrorDamageThreshold => "damage_threshold",
            LaserWavelength => "wavelength",
            LaserFreqNoiseAsd => "freq_noise_asd",
            LaserRinAsd => "rin_asd",
            Cavity(_, f) => f.key(),
            EnvTemperature => "temperature",
            EnvPressure => "pressure",
            EnvGasMoleculeMass => "gas_molecule_mass",
            EnvGasShapeConstant => "gas_shape_constant",
            EnvSeismicCoefficient => "seismic_coefficient",
            EnvSuspensionResonance => "suspension_resonance",
        }
    }

    /// Dotted path such as `cavity.lower.input_power`.
    pub fn path(self) -> String {
        format!("{}.{}", self.section(), self.key())
    }

    pub fn lookup(section: &str, key: &str) -> Option<ScalarField> {
        Self::all()
            .into_iter()
            .find(|f| f.key() == key && f.section() == section)
    }

    /// Current value; optional fields that are unset read as `None`.
    pub fn get(self, c: &SystemConfig) -> Option<f64> {
        use ScalarField::*;
        Some(match self {
            MirrorRadius => c.mirror.radius,
            MirrorAspectRatio => c.mirror.aspect_ratio,
            MirrorRoc => c.mirror.roc,
            MirrorAbsorption => c.mirror.absorption,
            MirrorInternalModeFreq => c.mirror.internal_mode_freq,
            MirrorEmissivity => c.mirror.emissivity,
            MirrorDamageThreshold => c.mirror.damage_threshold,
            LaserWavelength => c.laser.wavelength,
            LaserFreqNoiseAsd => c.laser.freq_noise_asd,
            LaserRinAsd => return c.laser.rin_asd,
            Cavity(side, f) => {
                let cav = c.cavity(side);
                match f {
                    CavityField::Length => cav.length,
                    CavityField::FixedMirrorRoc => cav.fixed_mirror_roc,
                    CavityField::CocDistance => cav.coc_distance,
                    CavityField::Finesse => cav.finesse,
                    CavityField::InputPower => cav.input_power,
                    CavityField::DetuningNorm => cav.detuning_norm,
                    CavityField::SpotRadiusOverride => return cav.spot_radius_override,
                }
            }
            EnvTemperature => c.environment.temperature,
            EnvPressure => c.environment.pressure,
            EnvGasMoleculeMass => c.environment.gas_molecule_mass,
            EnvGasShapeConstant => c.environment.gas_shape_constant,
            EnvSeismicCoefficient => c.environment.seismic_coefficient,
            EnvSuspensionResonance => c.environment.suspension_resonance,
        })
    }

    pub fn set(self, c: &mut SystemConfig, value: f64) {
        use ScalarField::*;
        match self {
            MirrorRadius => c.mirror.radius = value,
            MirrorAspectRatio => c.mirror.aspect_ratio = value,
            MirrorRoc => c.mirror.roc = value,
            MirrorAbsorption => c.mirror.absorption = value,
            MirrorInternalModeFreq => c.mirror.internal_mode_freq = value,
            MirrorEmissivity => c.mirror.emissivity = value,
            MirrorDamageThreshold => c.mirror.damage_threshold = value,
            LaserWavelength => c.laser.wavelength = value,
            LaserFreqNoiseAsd => c.laser.freq_noise_asd = value,
            LaserRinAsd => c.laser.rin_asd = Some(value),
            Cavity(side, f) => {
                let cav = c.cavity_mut(side);
                match f {
                    CavityField::Length => cav.length = value,
                    CavityField::FixedMirrorRoc => cav.fixed_mirror_roc = value,
                    CavityField::CocDistance => cav.coc_distance = value,
                    CavityField::Finesse => cav.finesse = value,
                    CavityField::InputPower => cav.input_power = value,
                    CavityField::DetuningNorm => cav.detuning_norm = value,
                    CavityField::SpotRadiusOverride => cav.spot_radius_override = Some(value),
                }
            }
            EnvTemperature => c.environment.temperature = value,
            EnvPressure => c.environment.pressure = value,
            EnvGasMoleculeMass => c.environment.gas_molecule_mass = value,
            EnvGasShapeConstant => c.environment.gas_shape_constant = value,
            EnvSeismicCoefficient => c.environment.seismic_coefficient = value,
            EnvSuspensionResonance => c.environment.suspension_resonance = value,
        }
    }
}

impl std::fmt::Display for ScalarField {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.path())
    }
}
