use super::{CavitySpec, MaterialProps, Side, SystemConfig};

/// Whether a violation makes the configuration meaningless (`Physical`) or
/// just describes a design that cannot levitate stably (`Design`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ViolationKind {
    Physical,
    Design,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    /// Machine-readable code, the dotted path of the offending field.
    pub code: String,
    pub kind: ViolationKind,
    pub message: String,
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

struct Collector(Vec<Violation>);

impl Collector {
    fn check(&mut self, ok: bool, code: impl Into<String>, message: impl Into<String>) {
        if !ok {
            self.0.push(Violation {
                code: code.into(),
                kind: ViolationKind::Physical,
                message: message.into(),
            });
        }
    }

    fn design(&mut self, ok: bool, code: impl Into<String>, message: impl Into<String>) {
        if !ok {
            self.0.push(Violation {
                code: code.into(),
                kind: ViolationKind::Design,
                message: message.into(),
            });
        }
    }

    fn material(&mut self, prefix: &str, m: &MaterialProps) {
        self.check(
            m.young_modulus > 0.0,
            format!("{prefix}.young_modulus"),
            "Young's modulus > 0",
        );
        self.check(
            (0.0..0.5).contains(&m.poisson_ratio),
            format!("{prefix}.poisson_ratio"),
            "0 ≤ Poisson ratio < 0.5",
        );
        self.check(
            m.loss_angle >= 0.0,
            format!("{prefix}.loss_angle"),
            "loss angle ≥ 0",
        );
        self.check(
            m.refractive_index >= 1.0,
            format!("{prefix}.refractive_index"),
            "refractive index ≥ 1",
        );
        self.check(m.density > 0.0, format!("{prefix}.density"), "density > 0");
    }

    fn cavity(&mut self, c: &CavitySpec) {
        let p = format!("cavity.{}", c.label);
        self.check(c.length > 0.0, format!("{p}.length"), "cavity length > 0");
        self.check(
            c.fixed_mirror_roc > 0.0,
            format!("{p}.fixed_mirror_roc"),
            "fixed mirror ROC > 0",
        );
        self.check(
            c.coc_distance > 0.0,
            format!("{p}.coc_distance"),
            "COC distance > 0",
        );
        self.check(c.finesse > 0.0, format!("{p}.finesse"), "finesse > 0");
        self.check(
            c.input_power > 0.0,
            format!("{p}.input_power"),
            "input power > 0",
        );
        self.check(
            c.detuning_norm.abs() < 1.0,
            format!("{p}.detuning_norm"),
            "|normalized detuning| < 1",
        );
        if let Some(w) = c.spot_radius_override {
            self.check(
                w > 0.0,
                format!("{p}.spot_radius_override"),
                "spot radius override > 0",
            );
        }
    }
}

/// Every invariant violation of `config`; empty iff the configuration is admissible.
pub fn validate(config: &SystemConfig) -> Vec<Violation> {
    let mut v = Collector(Vec::new());
    let m = &config.mirror;
    v.check(m.radius > 0.0, "mirror.radius", "mirror radius > 0");
    v.check(
        m.aspect_ratio > 0.0,
        "mirror.aspect_ratio",
        "aspect ratio > 0",
    );
    v.check(
        m.roc.is_finite(),
        "mirror.roc",
        "mirror ROC must be finite",
    );
    v.design(
        m.roc > 0.0 || m.roc.is_nan(),
        "mirror.roc",
        "mirror must be convex downward (R > 0)",
    );
    v.design(
        m.hr_side == Side::Lower,
        "mirror.hr_side",
        "only an HR coating on the lower face is supported",
    );
    v.check(m.absorption >= 0.0, "mirror.absorption", "absorption ≥ 0");
    v.check(
        m.internal_mode_freq > 0.0,
        "mirror.internal_mode_freq",
        "internal mode frequency > 0",
    );
    v.check(
        m.emissivity > 0.0 && m.emissivity <= 1.0,
        "mirror.emissivity",
        "0 < emissivity ≤ 1",
    );
    v.check(
        m.damage_threshold > 0.0,
        "mirror.damage_threshold",
        "damage threshold > 0",
    );
    v.material("mirror.substrate", &m.coating.substrate);
    for (name, props) in &m.coating.materials {
        v.material(&format!("mirror.coating.material.{name}"), props);
    }
    v.check(
        !m.coating.layers.is_empty(),
        "mirror.coating.layers",
        "coating must contain at least one layer",
    );
    for (i, layer) in m.coating.layers.iter().enumerate() {
        v.check(
            layer.thickness > 0.0,
            "mirror.coating.layers",
            format!("layer {} thickness > 0", i + 1),
        );
        v.check(
            m.coating.materials.contains_key(&layer.material),
            "mirror.coating.layers",
            format!("layer {} uses undefined material '{}'", i + 1, layer.material),
        );
    }

    let l = &config.laser;
    v.check(l.wavelength > 0.0, "laser.wavelength", "wavelength > 0");
    v.check(
        l.freq_noise_asd >= 0.0,
        "laser.freq_noise_asd",
        "frequency noise ≥ 0",
    );
    if let Some(rin) = l.rin_asd {
        v.check(rin >= 0.0, "laser.rin_asd", "relative intensity noise ≥ 0");
    }

    v.check(
        config.lower.label == Side::Lower,
        "cavity.lower",
        "lower cavity must be labelled lower",
    );
    v.check(
        config.upper.label == Side::Upper,
        "cavity.upper",
        "upper cavity must be labelled upper",
    );
    v.cavity(&config.lower);
    v.cavity(&config.upper);
    v.design(
        config.lower.detuning_norm * config.upper.detuning_norm < 0.0,
        "cavity.detuning_norm",
        "detunings must have opposite signs",
    );

    let e = &config.environment;
    v.check(e.temperature > 0.0, "environment.temperature", "temperature > 0");
    v.check(e.pressure >= 0.0, "environment.pressure", "pressure ≥ 0");
    v.check(
        e.gas_molecule_mass > 0.0,
        "environment.gas_molecule_mass",
        "gas molecule mass > 0",
    );
    v.check(
        e.gas_shape_constant > 0.0,
        "environment.gas_shape_constant",
        "gas shape constant > 0",
    );
    v.check(
        e.seismic_coefficient >= 0.0,
        "environment.seismic_coefficient",
        "seismic coefficient ≥ 0",
    );
    v.check(
        e.suspension_resonance > 0.0,
        "environment.suspension_resonance",
        "suspension resonance > 0",
    );
    v.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table1_is_admissible() {
        assert!(validate(&SystemConfig::table1()).is_empty());
    }

    #[test]
    fn concave_mirror_reported() {
        let mut cfg = SystemConfig::table1();
        cfg.mirror.roc = -0.030;
        let v = validate(&cfg);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].kind, ViolationKind::Design);
        assert_eq!(v[0].message, "mirror must be convex downward (R > 0)");
    }

    #[test]
    fn same_sign_detunings_reported() {
        let mut cfg = SystemConfig::table1();
        cfg.lower.detuning_norm = 0.005;
        let v = validate(&cfg);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].message, "detunings must have opposite signs");
    }

    #[test]
    fn undefined_material_reported() {
        let mut cfg = SystemConfig::table1();
        cfg.mirror.coating.layers[0].material = "nb".into();
        let v = validate(&cfg);
        assert!(v.iter().any(|x| x.message.contains("undefined material 'nb'")));
    }

    #[test]
    fn nan_is_not_admissible() {
        let mut cfg = SystemConfig::table1();
        cfg.lower.finesse = f64::NAN;
        assert!(!validate(&cfg).is_empty());
    }
}
