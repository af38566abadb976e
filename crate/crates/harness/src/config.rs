//! Flat structured-text configuration: `section.key = value` per line,
//! UTF-8, `#` comments. Diff-friendly and parser-dependency-free.

use crate::error::{HarnessError, Result};
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone, Default)]
pub struct Config {
    entries: BTreeMap<String, (String, usize)>,
    pub source: String,
}

pub const EXPERIMENT_KINDS: &[&str] = &[
    "hns2d",
    "ins3d-direct",
    "ins3d-picard",
    "decay-probe",
    "patch",
    "twisted-div",
    "stokes-maxreg",
    "euler-lagrange",
];

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| HarnessError::Config {
                line: lineno + 1,
                message: format!("expected `section.key = value`, got `{raw}`"),
            })?;
            let key = key.trim();
            let value = value.trim();
            if !key.contains('.') {
                return Err(HarnessError::Config {
                    line: lineno + 1,
                    message: format!("key `{key}` must be of the form section.key"),
                });
            }
            if entries
                .insert(key.to_string(), (value.to_string(), lineno + 1))
                .is_some()
            {
                return Err(HarnessError::Config {
                    line: lineno + 1,
                    message: format!("duplicate key `{key}`"),
                });
            }
        }
        Ok(Config {
            entries,
            source: text.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Config {
            line: 0,
            message: format!("cannot read {}: {e}", path.display()),
        })?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|(v, _)| v.as_str())
    }

    fn line_of(&self, key: &str) -> usize {
        self.entries.get(key).map(|(_, l)| *l).unwrap_or(0)
    }

    pub fn require(&self, key: &str) -> Result<&str> {
        self.get(key).ok_or_else(|| HarnessError::Config {
            line: 0,
            message: format!("missing required key `{key}`"),
        })
    }

    pub fn f64(&self, key: &str, default: f64) -> Result<f64> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| HarnessError::Config {
                line: self.line_of(key),
                message: format!("key `{key}`: `{v}` is not a number"),
            }),
        }
    }

    pub fn require_f64(&self, key: &str) -> Result<f64> {
        let v = self.require(key)?;
        v.parse().map_err(|_| HarnessError::Config {
            line: self.line_of(key),
            message: format!("key `{key}`: `{v}` is not a number"),
        })
    }

    pub fn usize(&self, key: &str, default: usize) -> Result<usize> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| HarnessError::Config {
                line: self.line_of(key),
                message: format!("key `{key}`: `{v}` is not an integer"),
            }),
        }
    }

    pub fn u64(&self, key: &str, default: u64) -> Result<u64> {
        match self.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| HarnessError::Config {
                line: self.line_of(key),
                message: format!("key `{key}`: `{v}` is not an integer"),
            }),
        }
    }

    pub fn bool(&self, key: &str, default: bool) -> Result<bool> {
        match self.get(key) {
            None => Ok(default),
            Some("true") | Some("1") | Some("yes") => Ok(true),
            Some("false") | Some("0") | Some("no") => Ok(false),
            Some(v) => Err(HarnessError::Config {
                line: self.line_of(key),
                message: format!("key `{key}`: `{v}` is not a boolean"),
            }),
        }
    }

    pub fn string(&self, key: &str, default: &str) -> String {
        self.get(key).unwrap_or(default).to_string()
    }

    /// Comma-separated list (empty when absent).
    pub fn list(&self, key: &str) -> Vec<String> {
        self.get(key)
            .map(|v| {
                v.split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect()
            })
            .unwrap_or_default()
    }

    pub fn experiment_kind(&self) -> Result<String> {
        let kind = self.require("experiment.kind")?;
        if !EXPERIMENT_KINDS.contains(&kind) {
            return Err(HarnessError::Config {
                line: self.line_of("experiment.kind"),
                message: format!(
                    "unknown experiment kind `{kind}` (known: {})",
                    EXPERIMENT_KINDS.join(", ")
                ),
            });
        }
        Ok(kind.to_string())
    }

    pub fn config_error(&self, key: &str, message: impl Into<String>) -> HarnessError {
        HarnessError::Config {
            line: self.line_of(key),
            message: message.into(),
        }
    }

    /// FNV-1a hash of the raw config text.
    pub fn hash(&self) -> u64 {
        fnv1a(self.source.as_bytes())
    }
}

pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sections_comments_and_types() {
        let text = "\n# comment\nexperiment.kind = hns2d\ntime.dt = 2e-3 # trailing\nrun.deterministic = true\nmonitors.list = a, b,c\n";
        let c = Config::parse(text).unwrap();
        assert_eq!(c.experiment_kind().unwrap(), "hns2d");
        assert_eq!(c.require_f64("time.dt").unwrap(), 2e-3);
        assert!(c.bool("run.deterministic", false).unwrap());
        assert_eq!(c.list("monitors.list"), vec!["a", "b", "c"]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = Config::parse("foo\n").unwrap_err();
        match err {
            HarnessError::Config { line, .. } => assert_eq!(line, 1),
            other => panic!("unexpected {other:?}"),
        }
        let c = Config::parse("experiment.kind = nonsense\n").unwrap();
        assert!(c.experiment_kind().is_err());
    }

    #[test]
    fn duplicate_keys_are_rejected() {
        assert!(Config::parse("a.b = 1\na.b = 2\n").is_err());
    }
}
