//! Sectioned key-value text documents.
//!
//! ```text
//! # comment
//! [section.name]
//! key = value   # trailing comment
//! ```

use std::collections::HashSet;

use super::ConfigError;

#[derive(Debug, Clone)]
pub(crate) struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
    /// 1-based column of the first character of the value.
    pub column: usize,
}

#[derive(Debug, Clone)]
pub(crate) struct Section {
    pub name: String,
    pub line: usize,
    pub entries: Vec<Entry>,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct Document {
    pub sections: Vec<Section>,
}

fn is_ident(s: &str) -> bool {
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

pub(crate) fn parse_document(text: &str) -> Result<Document, ConfigError> {
    let mut doc = Document::default();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        };
        let lead = content.len() - content.trim_start().len();
        let trimmed = content.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('[') {
            let Some(name) = rest.strip_suffix(']') else {
                return Err(ConfigError::Syntax {
                    line,
                    column: lead + trimmed.len() + 1,
                    message: "expected ']' to close section header".into(),
                });
            };
            let name = name.trim();
            if name.is_empty() || !name.split('.').all(is_ident) {
                return Err(ConfigError::Syntax {
                    line,
                    column: lead + 2,
                    message: format!("invalid section name '{name}'"),
                });
            }
            if let Some(prev) = doc.sections.iter().find(|s| s.name == name) {
                return Err(ConfigError::DuplicateSection {
                    section: name.to_string(),
                    line,
                    first_line: prev.line,
                });
            }
            doc.sections.push(Section {
                name: name.to_string(),
                line,
                entries: Vec::new(),
            });
            continue;
        }
        let Some(eq) = content.find('=') else {
            return Err(ConfigError::Syntax {
                line,
                column: lead + 1,
                message: "expected 'key = value' or '[section]'".into(),
            });
        };
        let key = content[..eq].trim();
        if !is_ident(key) {
            return Err(ConfigError::Syntax {
                line,
                column: lead + 1,
                message: format!("invalid key '{key}'"),
            });
        }
        let after = &content[eq + 1..];
        let value = after.trim();
        let column = eq + 2 + (after.len() - after.trim_start().len());
        if value.is_empty() {
            return Err(ConfigError::Syntax {
                line,
                column,
                message: format!("missing value for key '{key}'"),
            });
        }
        let Some(section) = doc.sections.last_mut() else {
            return Err(ConfigError::Syntax {
                line,
                column: lead + 1,
                message: "key outside of any [section]".into(),
            });
        };
        if section.entries.iter().any(|e| e.key == key) {
            return Err(ConfigError::DuplicateKey {
                section: section.name.clone(),
                key: key.to_string(),
                line,
            });
        }
        section.entries.push(Entry {
            key: key.to_string(),
            value: value.to_string(),
            line,
            column,
        });
    }
    Ok(doc)
}

/// Typed access to a [`Document`] that remembers which sections and keys
/// have been consumed so leftovers can be reported as unknown.
pub(crate) struct Reader<'a> {
    doc: &'a Document,
    used_sections: HashSet<usize>,
    used_entries: HashSet<(usize, usize)>,
}

impl<'a> Reader<'a> {
    pub fn new(doc: &'a Document) -> Self {
        Reader {
            doc,
            used_sections: HashSet::new(),
            used_entries: HashSet::new(),
        }
    }

    /// Names of sections starting with `prefix.`, marking them as consumed.
    pub fn subsections(&mut self, prefix: &str) -> Vec<(String, usize)> {
        let dotted = format!("{prefix}.");
        let mut out = Vec::new();
        for (i, s) in self.doc.sections.iter().enumerate() {
            if let Some(rest) = s.name.strip_prefix(&dotted) {
                if !rest.contains('.') {
                    self.used_sections.insert(i);
                    out.push((rest.to_string(), s.line));
                }
            }
        }
        out
    }

    pub fn take(&mut self, section: &str, key: &str) -> Option<&'a Entry> {
        let (si, s) = self
            .doc
            .sections
            .iter()
            .enumerate()
            .find(|(_, s)| s.name == section)?;
        self.used_sections.insert(si);
        let (ei, e) = s.entries.iter().enumerate().find(|(_, e)| e.key == key)?;
        self.used_entries.insert((si, ei));
        Some(e)
    }

    pub fn require(&mut self, section: &str, key: &str) -> Result<&'a Entry, ConfigError> {
        self.take(section, key).ok_or_else(|| ConfigError::MissingKey {
            section: section.to_string(),
            key: key.to_string(),
        })
    }

    pub fn number(&mut self, section: &str, key: &str) -> Result<f64, ConfigError> {
        let e = self.require(section, key)?;
        parse_number(section, e)
    }

    pub fn number_or(&mut self, section: &str, key: &str, default: f64) -> Result<f64, ConfigError> {
        self.optional_number(section, key)
            .map(|v| v.unwrap_or(default))
    }

    pub fn optional_number(&mut self, section: &str, key: &str) -> Result<Option<f64>, ConfigError> {
        match self.take(section, key) {
            Some(e) => parse_number(section, e).map(Some),
            None => Ok(None),
        }
    }

    /// First section or key that was never consumed.
    pub fn finish(&self) -> Result<(), ConfigError> {
        for (si, s) in self.doc.sections.iter().enumerate() {
            if !self.used_sections.contains(&si) {
                return Err(ConfigError::UnknownSection {
                    section: s.name.clone(),
                    line: s.line,
                });
            }
            for (ei, e) in s.entries.iter().enumerate() {
                if !self.used_entries.contains(&(si, ei)) {
                    return Err(ConfigError::UnknownKey {
                        section: s.name.clone(),
                        key: e.key.clone(),
                        line: e.line,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Length of the longest prefix of `s` that is a decimal floating-point literal.
fn numeric_prefix_len(s: &str) -> usize {
    let b = s.as_bytes();
    let mut i = 0;
    if i < b.len() && (b[i] == b'+' || b[i] == b'-') {
        i += 1;
    }
    let int_start = i;
    while i < b.len() && b[i].is_ascii_digit() {
        i += 1;
    }
    let mut digits = i - int_start;
    if i < b.len() && b[i] == b'.' {
        i += 1;
        let frac_start = i;
        while i < b.len() && b[i].is_ascii_digit() {
            i += 1;
        }
        digits += i - frac_start;
    }
    if digits == 0 {
        return 0;
    }
    if i < b.len() && (b[i] == b'e' || b[i] == b'E') {
        let mut j = i + 1;
        if j < b.len() && (b[j] == b'+' || b[j] == b'-') {
            j += 1;
        }
        let exp_start = j;
        while j < b.len() && b[j].is_ascii_digit() {
            j += 1;
        }
        if j > exp_start {
            i = j;
        }
    }
    i
}

pub(crate) fn parse_number_str(text: &str) -> Result<f64, NumberError> {
    let len = numeric_prefix_len(text);
    if len == 0 {
        return Err(NumberError::NonNumeric);
    }
    if len < text.len() {
        let rest = text[len..].trim_start();
        return if rest.starts_with(|c: char| c.is_alphabetic() || c == '%' || c == '/') {
            Err(NumberError::UnitSuffix(rest.to_string()))
        } else {
            Err(NumberError::NonNumeric)
        };
    }
    text.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or(NumberError::NonNumeric)
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum NumberError {
    NonNumeric,
    UnitSuffix(String),
}

pub(crate) fn parse_number(section: &str, e: &Entry) -> Result<f64, ConfigError> {
    parse_number_str(&e.value).map_err(|err| match err {
        NumberError::NonNumeric => ConfigError::NonNumeric {
            section: section.to_string(),
            key: e.key.clone(),
            value: e.value.clone(),
            line: e.line,
            column: e.column,
        },
        NumberError::UnitSuffix(suffix) => ConfigError::UnitSuffix {
            section: section.to_string(),
            key: e.key.clone(),
            suffix,
            line: e.line,
            column: e.column,
        },
    })
}
