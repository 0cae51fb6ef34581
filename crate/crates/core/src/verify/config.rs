//! Key-value config files with `[section]` headers.
//!
//! Grammar (line oriented):
//!
//! ```text
//! # comment
//! [section]
//! key = value          # values: word, number, bool, comma list
//! ```
//!
//! Sections are `manifold`, `metric`, `class`, `check`, `sweep`; a config
//! may omit sections a given command does not need. Unknown sections or
//! keys are errors, with the offending line reported.

use std::collections::BTreeMap;

const SCHEMA: &[(&str, &[&str])] = &[
    (
        "manifold",
        &[
            "kind",
            "n",
            "fiber",
            "genus",
            "fiber_level",
            "grid",
            "circle_subdiv",
            "path",
        ],
    ),
    (
        "metric",
        &[
            "kind",
            "amplitude",
            "fiber",
            "genus",
            "torus_area",
            "circle_length",
            "warp",
            "warp_base",
            "warp_amplitude",
        ],
    ),
    ("class", &["coords"]),
    (
        "check",
        &[
            "target",
            "tol",
            "quad_tol",
            "solver_tol",
            "reference_thurston",
            "sphere_free",
            "km_thurston",
            "km_p",
            "km_delta",
            "km_r",
            "km_cdelta",
        ],
    ),
    ("sweep", &["levels", "seed"]),
];

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: unknown section [{section}]")]
    UnknownSection { line: usize, section: String },
    #[error("line {line}: unknown key {key:?} in section [{section}]")]
    UnknownKey {
        line: usize,
        section: String,
        key: String,
    },
    #[error("line {line}: key outside any section")]
    KeyOutsideSection { line: usize },
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: duplicate key {key:?}")]
    DuplicateKey { line: usize, key: String },
    #[error("missing required key {key:?} in section [{section}]")]
    Missing { section: String, key: String },
    #[error("line {line}: bad value for {key:?}: {message}")]
    BadValue {
        line: usize,
        key: String,
        message: String,
    },
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Default)]
pub struct Config {
    values: BTreeMap<(String, String), (String, usize)>,
    /// the raw text, for input digests
    pub source: String,
}

impl Config {
    pub fn from_text(text: &str) -> Result<Self, ConfigError> {
        let mut values = BTreeMap::new();
        let mut section: Option<String> = None;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = match raw.find('#') {
                Some(p) => &raw[..p],
                None => raw,
            }
            .trim();
            if body.is_empty() {
                continue;
            }
            if let Some(name) = body.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
                let name = name.trim().to_string();
                if !SCHEMA.iter().any(|(s, _)| *s == name) {
                    return Err(ConfigError::UnknownSection {
                        line,
                        section: name,
                    });
                }
                section = Some(name);
                continue;
            }
            let Some(eq) = body.find('=') else {
                return Err(ConfigError::Syntax { line });
            };
            let key = body[..eq].trim().to_string();
            let value = body[eq + 1..].trim().to_string();
            if key.is_empty() || value.is_empty() {
                return Err(ConfigError::Syntax { line });
            }
            let Some(sec) = &section else {
                return Err(ConfigError::KeyOutsideSection { line });
            };
            let allowed = SCHEMA
                .iter()
                .find(|(s, _)| s == sec)
                .map(|(_, k)| *k)
                .unwrap();
            if !allowed.contains(&key.as_str()) {
                return Err(ConfigError::UnknownKey {
                    line,
                    section: sec.clone(),
                    key,
                });
            }
            if values
                .insert((sec.clone(), key.clone()), (value, line))
                .is_some()
            {
                return Err(ConfigError::DuplicateKey { line, key });
            }
        }
        Ok(Self {
            values,
            source: text.to_string(),
        })
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_text(&text)
    }

    pub fn has_section(&self, section: &str) -> bool {
        self.values.keys().any(|(s, _)| s == section)
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.values
            .get(&(section.to_string(), key.to_string()))
            .map(|(v, _)| v.as_str())
    }

    fn line_of(&self, section: &str, key: &str) -> usize {
        self.values
            .get(&(section.to_string(), key.to_string()))
            .map(|&(_, l)| l)
            .unwrap_or(0)
    }

    pub fn require(&self, section: &str, key: &str) -> Result<&str, ConfigError> {
        self.get(section, key).ok_or_else(|| ConfigError::Missing {
            section: section.to_string(),
            key: key.to_string(),
        })
    }

    fn parse<T: std::str::FromStr>(
        &self,
        section: &str,
        key: &str,
        raw: &str,
    ) -> Result<T, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        raw.parse().map_err(|e: T::Err| ConfigError::BadValue {
            line: self.line_of(section, key),
            key: key.to_string(),
            message: e.to_string(),
        })
    }

    pub fn get_usize(&self, section: &str, key: &str) -> Result<Option<usize>, ConfigError> {
        self.get(section, key)
            .map(|v| self.parse(section, key, v))
            .transpose()
    }

    pub fn get_u64(&self, section: &str, key: &str) -> Result<Option<u64>, ConfigError> {
        self.get(section, key)
            .map(|v| self.parse(section, key, v))
            .transpose()
    }

    pub fn get_f64(&self, section: &str, key: &str) -> Result<Option<f64>, ConfigError> {
        self.get(section, key)
            .map(|v| self.parse(section, key, v))
            .transpose()
    }

    pub fn get_bool(&self, section: &str, key: &str) -> Result<Option<bool>, ConfigError> {
        self.get(section, key)
            .map(|v| self.parse(section, key, v))
            .transpose()
    }

    pub fn get_i64_list(&self, section: &str, key: &str) -> Result<Option<Vec<i64>>, ConfigError> {
        match self.get(section, key) {
            None => Ok(None),
            Some(v) => v
                .split(',')
                .map(|p| self.parse(section, key, p.trim()))
                .collect::<Result<Vec<i64>, _>>()
                .map(Some),
        }
    }

    pub fn get_f64_list(&self, section: &str, key: &str) -> Result<Option<Vec<f64>>, ConfigError> {
        match self.get(section, key) {
            None => Ok(None),
            Some(v) => v
                .split(',')
                .map(|p| self.parse(section, key, p.trim()))
                .collect::<Result<Vec<f64>, _>>()
                .map(Some),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_full_example() {
        let cfg = Config::from_text(
            "# demo\n\
             [manifold]\n\
             kind = torus3\n\
             n = 3\n\
             [class]\n\
             coords = 0, 0, 1\n\
             [sweep]\n\
             levels = 16   # comment\n\
             seed = 7\n",
        )
        .unwrap();
        assert_eq!(cfg.get("manifold", "kind"), Some("torus3"));
        assert_eq!(cfg.get_usize("manifold", "n").unwrap(), Some(3));
        assert_eq!(
            cfg.get_i64_list("class", "coords").unwrap(),
            Some(vec![0, 0, 1])
        );
        assert_eq!(cfg.get_u64("sweep", "seed").unwrap(), Some(7));
        assert!(!cfg.has_section("metric"));
    }

    #[test]
    fn unknown_keys_and_sections_error_with_line() {
        match Config::from_text("[manifold]\nbogus = 1\n") {
            Err(ConfigError::UnknownKey { line, key, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(key, "bogus");
            }
            other => panic!("{other:?}"),
        }
        match Config::from_text("[nope]\n") {
            Err(ConfigError::UnknownSection { line, .. }) => assert_eq!(line, 1),
            other => panic!("{other:?}"),
        }
        match Config::from_text("x = 1\n") {
            Err(ConfigError::KeyOutsideSection { line }) => assert_eq!(line, 1),
            other => panic!("{other:?}"),
        }
        match Config::from_text("[check]\ntol = 0.05\ntol = 0.1\n") {
            Err(ConfigError::DuplicateKey { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_values_carry_lines() {
        let cfg = Config::from_text("[manifold]\nn = banana\n").unwrap();
        match cfg.get_usize("manifold", "n") {
            Err(ConfigError::BadValue { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }
}
