//! Search-space files.
//!
//! The same sectioned key-value format as configurations. A key with a
//! `_min` / `_max` suffix declares one end of a search interval; a plain key
//! fixes that field. An optional `[search]` section sets `seed`, `samples`
//! and `iterations`.
//!
//! ```text
//! [cavity.lower]
//! input_power_min = 12
//! input_power_max = 14
//!
//! [search]
//! seed = 7
//! ```

use std::collections::BTreeMap;

use super::SearchError;
use crate::config::kv::{parse_document, parse_number_str};
use crate::config::{validate, ConfigError, ScalarField, SystemConfig, ViolationKind};

pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_SAMPLES: usize = 32;
pub const DEFAULT_ITERATIONS: usize = 40;

/// A closed interval over one scalar field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Parameter {
    pub field: ScalarField,
    pub min: f64,
    pub max: f64,
}

impl Parameter {
    pub fn width(&self) -> f64 {
        self.max - self.min
    }

    /// Value at unit coordinate `u` ∈ [0, 1].
    pub fn at(&self, u: f64) -> f64 {
        if u >= 1.0 {
            self.max
        } else {
            self.min + u.max(0.0) * self.width()
        }
    }

    /// Unit coordinate of `value`, clamped into the interval.
    pub fn coordinate(&self, value: f64) -> f64 {
        if self.width() > 0.0 {
            ((value - self.min) / self.width()).clamp(0.0, 1.0)
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchSpace {
    /// Configuration holding the fixed values of every other field.
    pub base: SystemConfig,
    pub parameters: Vec<Parameter>,
    pub seed: u64,
    /// Latin-hypercube sample count.
    pub samples: usize,
    /// Maximum pattern-search iterations.
    pub iterations: usize,
}

impl SearchSpace {
    /// Space with no free parameters around `base`.
    pub fn point(base: SystemConfig) -> Self {
        SearchSpace {
            base,
            parameters: Vec::new(),
            seed: DEFAULT_SEED,
            samples: DEFAULT_SAMPLES,
            iterations: DEFAULT_ITERATIONS,
        }
    }

    /// `base` with every parameter set from unit coordinates `u`.
    pub fn configure(&self, u: &[f64]) -> SystemConfig {
        let mut cfg = self.base.clone();
        for (p, &x) in self.parameters.iter().zip(u) {
            p.field.set(&mut cfg, p.at(x));
        }
        cfg
    }

    /// Unit coordinates of the base configuration, clamped into the intervals.
    pub fn base_coordinates(&self) -> Vec<f64> {
        self.parameters
            .iter()
            .map(|p| p.coordinate(p.field.get(&self.base).unwrap_or(p.min)))
            .collect()
    }
}

fn invalid(line: usize, section: &str, key: &str, message: impl Into<String>) -> SearchError {
    SearchError::Space(ConfigError::InvalidValue {
        section: section.to_string(),
        key: key.to_string(),
        line,
        message: message.into(),
    })
}

fn number(section: &str, key: &str, value: &str, line: usize, column: usize) -> Result<f64, SearchError> {
    parse_number_str(value).map_err(|_| {
        SearchError::Space(ConfigError::NonNumeric {
            section: section.to_string(),
            key: key.to_string(),
            value: value.to_string(),
            line,
            column,
        })
    })
}

/// Parses a search-space file on top of `base`.
pub fn parse_search_space(text: &str, base: &SystemConfig) -> Result<SearchSpace, SearchError> {
    let doc = parse_document(text).map_err(SearchError::Space)?;
    let mut space = SearchSpace::point(base.clone());
    let mut bounds: BTreeMap<String, (ScalarField, Option<f64>, Option<f64>, usize)> =
        BTreeMap::new();
    let mut order: Vec<String> = Vec::new();

    for section in &doc.sections {
        for e in &section.entries {
            let value = number(&section.name, &e.key, &e.value, e.line, e.column)?;
            if section.name == "search" {
                let as_count = |v: f64| -> Result<u64, SearchError> {
                    if v >= 0.0 && v.fract() == 0.0 && v <= u64::MAX as f64 {
                        Ok(v as u64)
                    } else {
                        Err(invalid(e.line, "search", &e.key, "expected a non-negative integer"))
                    }
                };
                match e.key.as_str() {
                    "seed" => space.seed = as_count(value)?,
                    "samples" => space.samples = as_count(value)? as usize,
                    "iterations" => space.iterations = as_count(value)? as usize,
                    _ => {
                        return Err(SearchError::Space(ConfigError::UnknownKey {
                            section: section.name.clone(),
                            key: e.key.clone(),
                            line: e.line,
                        }))
                    }
                }
                continue;
            }
            let (key, end) = match (e.key.strip_suffix("_min"), e.key.strip_suffix("_max")) {
                (Some(k), _) => (k, Some(false)),
                (_, Some(k)) => (k, Some(true)),
                _ => (e.key.as_str(), None),
            };
            let field = ScalarField::lookup(&section.name, key).ok_or_else(|| {
                SearchError::Space(ConfigError::UnknownKey {
                    section: section.name.clone(),
                    key: e.key.clone(),
                    line: e.line,
                })
            })?;
            match end {
                None => field.set(&mut space.base, value),
                Some(is_max) => {
                    let path = field.path();
                    let slot = bounds.entry(path.clone()).or_insert_with(|| {
                        order.push(path.clone());
                        (field, None, None, e.line)
                    });
                    let target = if is_max { &mut slot.2 } else { &mut slot.1 };
                    if target.replace(value).is_some() {
                        return Err(SearchError::Space(ConfigError::DuplicateKey {
                            section: section.name.clone(),
                            key: e.key.clone(),
                            line: e.line,
                        }));
                    }
                }
            }
        }
    }

    for path in order {
        let (field, min, max, line) = bounds[&path];
        let (section, key) = (field.section(), field.key());
        let (Some(min), Some(max)) = (min, max) else {
            return Err(invalid(line, &section, key, "interval needs both _min and _max"));
        };
        if min > max {
            return Err(invalid(line, &section, key, format!("empty interval [{min}, {max}]")));
        }
        for v in [min, max] {
            let mut probe = space.base.clone();
            field.set(&mut probe, v);
            if let Some(bad) = validate(&probe)
                .into_iter()
                .find(|x| x.kind == ViolationKind::Physical && x.code == path)
            {
                return Err(invalid(line, &section, key, format!("{v}: {}", bad.message)));
            }
        }
        space.parameters.push(Parameter { field, min, max });
    }
    Ok(space)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{CavityField, Side};

    #[test]
    fn parses_intervals_and_settings() {
        let text = "\
[cavity.lower]
input_power_min = 12
input_power_max = 14
finesse = 120

[search]
seed = 7
samples = 10
";
        let s = parse_search_space(text, &SystemConfig::table1()).unwrap();
        assert_eq!(s.seed, 7);
        assert_eq!(s.samples, 10);
        assert_eq!(s.iterations, DEFAULT_ITERATIONS);
        assert_eq!(s.parameters.len(), 1);
        let p = s.parameters[0];
        assert_eq!(p.field, ScalarField::Cavity(Side::Lower, CavityField::InputPower));
        assert_eq!((p.min, p.max), (12.0, 14.0));
        assert_eq!(s.base.lower.finesse, 120.0);
        assert_eq!(s.base_coordinates(), vec![0.5]);
        assert_eq!(s.configure(&[1.0]).lower.input_power, 14.0);
    }

    #[test]
    fn rejects_bad_intervals() {
        let base = SystemConfig::table1();
        assert!(parse_search_space("[cavity.lower]\ninput_power_min = 3\n", &base).is_err());
        assert!(parse_search_space(
            "[cavity.lower]\ninput_power_min = 3\ninput_power_max = 2\n",
            &base
        )
        .is_err());
        assert!(parse_search_space(
            "[cavity.lower]\ninput_power_min = -1\ninput_power_max = 2\n",
            &base
        )
        .is_err());
        assert!(parse_search_space("[cavity.lower]\nbogus_min = 1\n", &base).is_err());
        assert!(parse_search_space("[search]\nseed = 1.5\n", &base).is_err());
        assert!(parse_search_space("[cavity.lower\n", &base).is_err());
    }

    #[test]
    fn degenerate_interval_maps_to_its_value() {
        let p = Parameter {
            field: ScalarField::EnvPressure,
            min: 2.0,
            max: 2.0,
        };
        assert_eq!(p.at(0.3), 2.0);
        assert_eq!(p.coordinate(5.0), 0.0);
    }
}
