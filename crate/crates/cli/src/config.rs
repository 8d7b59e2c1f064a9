//! Flat `key = value` config files with `[section]` headers.
//!
//! Keys before the first header are global. A lookup in a section falls back
//! to the global value.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub message: String,
}

impl ConfigError {
    pub fn new(message: impl Into<String>) -> Self {
        Self {
            line: None,
            message: message.into(),
        }
    }

    fn at(line: usize, message: impl Into<String>) -> Self {
        Self {
            line: Some(line),
            message: message.into(),
        }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.line {
            Some(l) => write!(f, "config line {l}: {}", self.message),
            None => write!(f, "config: {}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Config {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut sections: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        let mut current = String::new();
        sections.insert(current.clone(), BTreeMap::new());
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest
                    .strip_suffix(']')
                    .ok_or_else(|| ConfigError::at(i + 1, "unterminated section header"))?
                    .trim();
                if name.is_empty() {
                    return Err(ConfigError::at(i + 1, "empty section name"));
                }
                current = name.to_string();
                sections.entry(current.clone()).or_default();
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| ConfigError::at(i + 1, format!("expected `key = value`, found `{line}`")))?;
            let key = key.trim();
            if key.is_empty() {
                return Err(ConfigError::at(i + 1, "empty key"));
            }
            let section = sections.get_mut(&current).expect("current section exists");
            if section.insert(key.to_string(), value.trim().to_string()).is_some() {
                return Err(ConfigError::at(i + 1, format!("duplicate key `{key}`")));
            }
        }
        Ok(Self { sections })
    }

    pub fn raw(&self, section: &str, key: &str) -> Option<&str> {
        self.sections
            .get(section)
            .and_then(|s| s.get(key))
            .or_else(|| self.sections.get("").and_then(|s| s.get(key)))
            .map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, section: &str, key: &str) -> Result<Option<T>, ConfigError> {
        self.raw(section, key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|_| ConfigError::new(format!("[{section}] {key}: cannot parse `{v}`")))
            })
            .transpose()
    }
}

/// Comma- or whitespace-separated list.
pub fn parse_list<T: FromStr>(text: &str) -> Result<Vec<T>, ConfigError> {
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| {
            s.parse::<T>()
                .map_err(|_| ConfigError::new(format!("cannot parse list item `{s}`")))
        })
        .collect()
}
