//! Reading and writing the configuration text format.
//!
//! ```text
//! [mirror]                         radius, aspect_ratio, roc, hr_side, absorption,
//!                                  internal_mode_freq, emissivity, damage_threshold
//! [mirror.substrate]               young_modulus, poisson_ratio, loss_angle,
//!                                  refractive_index, density
//! [mirror.coating]                 layers = name:thickness, name:thickness, ...
//! [mirror.coating.material.NAME]   same keys as the substrate
//! [laser]                          wavelength, freq_noise_asd, rin_asd
//! [cavity.lower], [cavity.upper]   length, fixed_mirror_roc, coc_distance, finesse,
//!                                  input_power, detuning_norm, spot_radius_override
//! [environment]                    temperature, pressure, gas_molecule_mass,
//!                                  gas_shape_constant, seismic_coefficient,
//!                                  suspension_resonance
//! ```

use std::collections::BTreeMap;
use std::fmt::Write as _;

use thiserror::Error;

use super::kv::{self, parse_document, Reader};
use super::{
    validate, CavitySpec, CoatingLayer, CoatingStack, Environment, LaserSpec, MaterialProps,
    MirrorSpec, Side, SystemConfig, Violation, ViolationKind, DEFAULT_ABSORPTION,
    DEFAULT_DAMAGE_THRESHOLD, DEFAULT_GAS_MOLECULE_MASS, DEFAULT_INTERNAL_MODE_FREQ,
    DEFAULT_SEISMIC_COEFFICIENT, DEFAULT_SUSPENSION_RESONANCE,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("missing required key '{key}' in [{section}]")]
    MissingKey { section: String, key: String },
    #[error("line {line}, column {column}: value '{value}' of [{section}] {key} is not a number")]
    NonNumeric {
        section: String,
        key: String,
        value: String,
        line: usize,
        column: usize,
    },
    #[error("line {line}, column {column}: [{section}] {key} has unit suffix '{suffix}'; values must be plain SI numbers")]
    UnitSuffix {
        section: String,
        key: String,
        suffix: String,
        line: usize,
        column: usize,
    },
    #[error("line {line}: invalid value for [{section}] {key}: {message}")]
    InvalidValue {
        section: String,
        key: String,
        line: usize,
        message: String,
    },
    #[error("line {line}: unknown key '{key}' in [{section}]")]
    UnknownKey {
        section: String,
        key: String,
        line: usize,
    },
    #[error("line {line}: unknown section [{section}]")]
    UnknownSection { section: String, line: usize },
    #[error("line {line}: duplicate key '{key}' in [{section}]")]
    DuplicateKey {
        section: String,
        key: String,
        line: usize,
    },
    #[error("line {line}: section [{section}] already defined at line {first_line}")]
    DuplicateSection {
        section: String,
        line: usize,
        first_line: usize,
    },
    #[error("validation error: {}", .0.iter().map(|v| v.message.as_str()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
}

const MATERIAL_PREFIX: &str = "mirror.coating.material";

fn read_material(r: &mut Reader<'_>, section: &str) -> Result<MaterialProps, ConfigError> {
    Ok(MaterialProps {
        young_modulus: r.number(section, "young_modulus")?,
        poisson_ratio: r.number(section, "poisson_ratio")?,
        loss_angle: r.number(section, "loss_angle")?,
        refractive_index: r.number(section, "refractive_index")?,
        density: r.number(section, "density")?,
    })
}

fn read_layers(r: &mut Reader<'_>) -> Result<Vec<CoatingLayer>, ConfigError> {
    let section = "mirror.coating";
    let e = r.require(section, "layers")?;
    let invalid = |message: String| ConfigError::InvalidValue {
        section: section.into(),
        key: "layers".into(),
        line: e.line,
        message,
    };
    let mut layers = Vec::new();
    for token in e
        .value
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
    {
        let (name, thickness) = token
            .split_once(':')
            .ok_or_else(|| invalid(format!("expected 'material:thickness', found '{token}'")))?;
        let thickness = kv::parse_number_str(thickness)
            .map_err(|_| invalid(format!("bad thickness in '{token}'")))?;
        layers.push(CoatingLayer {
            material: name.to_string(),
            thickness,
        });
    }
    Ok(layers)
}

fn read_side(r: &mut Reader<'_>, section: &str, key: &str) -> Result<Option<Side>, ConfigError> {
    match r.take(section, key) {
        None => Ok(None),
        Some(e) => Side::parse(&e.value).map(Some).ok_or_else(|| ConfigError::InvalidValue {
            section: section.into(),
            key: key.into(),
            line: e.line,
            message: format!("expected 'lower' or 'upper', found '{}'", e.value),
        }),
    }
}

fn read_cavity(r: &mut Reader<'_>, side: Side) -> Result<CavitySpec, ConfigError> {
    let s = format!("cavity.{side}");
    let s = s.as_str();
    Ok(CavitySpec {
        label: side,
        length: r.number(s, "length")?,
        fixed_mirror_roc: r.number(s, "fixed_mirror_roc")?,
        coc_distance: r.number(s, "coc_distance")?,
        finesse: r.number(s, "finesse")?,
        input_power: r.number(s, "input_power")?,
        detuning_norm: r.number(s, "detuning_norm")?,
        spot_radius_override: r.optional_number(s, "spot_radius_override")?,
    })
}

/// Parses a configuration document. Optional keys take their documented
/// defaults; unknown keys and physically meaningless values are errors.
/// Design-level problems (e.g. a concave mirror) are left to [`validate`].
pub fn parse_config(text: &str) -> Result<SystemConfig, ConfigError> {
    let doc = parse_document(text)?;
    let mut r = Reader::new(&doc);

    let radius = r.number("mirror", "radius")?;
    let aspect_ratio = r.number("mirror", "aspect_ratio")?;
    let roc = r.number("mirror", "roc")?;
    let hr_side = read_side(&mut r, "mirror", "hr_side")?.unwrap_or(Side::Lower);
    let absorption = r.number_or("mirror", "absorption", DEFAULT_ABSORPTION)?;
    let internal_mode_freq =
        r.number_or("mirror", "internal_mode_freq", DEFAULT_INTERNAL_MODE_FREQ)?;
    let emissivity = r.number_or("mirror", "emissivity", 1.0)?;
    let damage_threshold = r.number_or("mirror", "damage_threshold", DEFAULT_DAMAGE_THRESHOLD)?;
    let substrate = read_material(&mut r, "mirror.substrate")?;
    let layers = read_layers(&mut r)?;
    let mut materials = BTreeMap::new();
    for (name, _) in r.subsections(MATERIAL_PREFIX) {
        let props = read_material(&mut r, &format!("{MATERIAL_PREFIX}.{name}"))?;
        materials.insert(name, props);
    }

    let laser = LaserSpec {
        wavelength: r.number("laser", "wavelength")?,
        freq_noise_asd: r.number("laser", "freq_noise_asd")?,
        rin_asd: r.optional_number("laser", "rin_asd")?,
    };
    let lower = read_cavity(&mut r, Side::Lower)?;
    let upper = read_cavity(&mut r, Side::Upper)?;
    let e = "environment";
    let environment = Environment {
        temperature: r.number(e, "temperature")?,
        pressure: r.number(e, "pressure")?,
        gas_molecule_mass: r.number_or(e, "gas_molecule_mass", DEFAULT_GAS_MOLECULE_MASS)?,
        gas_shape_constant: r.number_or(e, "gas_shape_constant", 1.0)?,
        seismic_coefficient: r.number_or(e, "seismic_coefficient", DEFAULT_SEISMIC_COEFFICIENT)?,
        suspension_resonance: r.number_or(
            e,
            "suspension_resonance",
            DEFAULT_SUSPENSION_RESONANCE,
        )?,
    };
    r.finish()?;

    let config = SystemConfig {
        mirror: MirrorSpec {
            radius,
            aspect_ratio,
            roc,
            coating: CoatingStack {
                materials,
                layers,
                substrate,
            },
            hr_side,
            absorption,
            internal_mode_freq,
            emissivity,
            damage_threshold,
        },
        laser,
        lower,
        upper,
        environment,
    };
    let physical: Vec<Violation> = validate(&config)
        .into_iter()
        .filter(|v| v.kind == ViolationKind::Physical)
        .collect();
    if !physical.is_empty() {
        return Err(ConfigError::Invalid(physical));
    }
    Ok(config)
}

fn num(v: f64) -> String {
    format!("{v:e}")
}

fn write_material(out: &mut String, section: &str, m: &MaterialProps) {
    let _ = writeln!(out, "[{section}]");
    let _ = writeln!(out, "young_modulus = {}", num(m.young_modulus));
    let _ = writeln!(out, "poisson_ratio = {}", num(m.poisson_ratio));
    let _ = writeln!(out, "loss_angle = {}", num(m.loss_angle));
    let _ = writeln!(out, "refractive_index = {}", num(m.refractive_index));
    let _ = writeln!(out, "density = {}", num(m.density));
    out.push('\n');
}

/// Writes a configuration in the format read by [`parse_config`]. Numbers
/// use the shortest representation that parses back to the same value.
pub fn to_config_string(config: &SystemConfig) -> String {
    let mut out = String::new();
    let m = &config.mirror;
    out.push_str("[mirror]\n");
    let _ = writeln!(out, "radius = {}", num(m.radius));
    let _ = writeln!(out, "aspect_ratio = {}", num(m.aspect_ratio));
    let _ = writeln!(out, "roc = {}", num(m.roc));
    let _ = writeln!(out, "hr_side = {}", m.hr_side);
    let _ = writeln!(out, "absorption = {}", num(m.absorption));
    let _ = writeln!(out, "internal_mode_freq = {}", num(m.internal_mode_freq));
    let _ = writeln!(out, "emissivity = {}", num(m.emissivity));
    let _ = writeln!(out, "damage_threshold = {}", num(m.damage_threshold));
    out.push('\n');
    write_material(&mut out, "mirror.substrate", &m.coating.substrate);
    out.push_str("[mirror.coating]\n");
    let layers: Vec<String> = m
        .coating
        .layers
        .iter()
        .map(|l| format!("{}:{}", l.material, num(l.thickness)))
        .collect();
    let _ = writeln!(out, "layers = {}", layers.join(", "));
    out.push('\n');
    for (name, props) in &m.coating.materials {
        write_material(&mut out, &format!("{MATERIAL_PREFIX}.{name}"), props);
    }

    let l = &config.laser;
    out.push_str("[laser]\n");
    let _ = writeln!(out, "wavelength = {}", num(l.wavelength));
    let _ = writeln!(out, "freq_noise_asd = {}", num(l.freq_noise_asd));
    if let Some(rin) = l.rin_asd {
        let _ = writeln!(out, "rin_asd = {}", num(rin));
    }
    out.push('\n');

    for side in Side::BOTH {
        let c = config.cavity(side);
        let _ = writeln!(out, "[cavity.{side}]");
        let _ = writeln!(out, "length = {}", num(c.length));
        let _ = writeln!(out, "fixed_mirror_roc = {}", num(c.fixed_mirror_roc));
        let _ = writeln!(out, "coc_distance = {}", num(c.coc_distance));
        let _ = writeln!(out, "finesse = {}", num(c.finesse));
        let _ = writeln!(out, "input_power = {}", num(c.input_power));
        let _ = writeln!(out, "detuning_norm = {}", num(c.detuning_norm));
        if let Some(w) = c.spot_radius_override {
            let _ = writeln!(out, "spot_radius_override = {}", num(w));
        }
        out.push('\n');
    }

    let e = &config.environment;
    out.push_str("[environment]\n");
    let _ = writeln!(out, "temperature = {}", num(e.temperature));
    let _ = writeln!(out, "pressure = {}", num(e.pressure));
    let _ = writeln!(out, "gas_molecule_mass = {}", num(e.gas_molecule_mass));
    let _ = writeln!(out, "gas_shape_constant = {}", num(e.gas_shape_constant));
    let _ = writeln!(out, "seismic_coefficient = {}", num(e.seismic_coefficient));
    let _ = writeln!(out, "suspension_resonance = {}", num(e.suspension_resonance));
    out
}
