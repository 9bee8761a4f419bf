//! Flat `key = value` config files. Keys match the long flag names; `#` starts a comment.

use std::collections::BTreeMap;
use std::path::Path;

use isosho_core::{Error, Result};

pub const KEYS: [&str; 10] = [
    "out",
    "format",
    "lambda-min",
    "lambda-max",
    "lambda-count",
    "lambda-log",
    "temps",
    "measures",
    "threads",
    "no-timestamp",
];

#[derive(Debug, Default, Clone, PartialEq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("config line {}: expected key = value", lineno + 1)))?;
            let key = k.trim().replace('_', "-");
            if !KEYS.contains(&key.as_str()) {
                return Err(Error::Config(format!("config line {}: unknown key '{}'", lineno + 1, k.trim())));
            }
            values.insert(key, v.trim().to_string());
        }
        Ok(ConfigFile { values })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// Parses `key` if present.
    pub fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.get(key)
            .map(|v| v.parse::<T>().map_err(|_| Error::Config(format!("config key '{key}': cannot parse '{v}'"))))
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_and_comments() {
        let c =
            ConfigFile::parse("# sweep\nlambda_min = 0.5\nlambda-count=3 # inline\n\ntemps = ground, 0.25\n").unwrap();
        assert_eq!(c.parsed::<f64>("lambda-min").unwrap(), Some(0.5));
        assert_eq!(c.parsed::<usize>("lambda-count").unwrap(), Some(3));
        assert_eq!(c.get("temps"), Some("ground, 0.25"));
        assert_eq!(c.get("measures"), None);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(ConfigFile::parse("colour = red").is_err());
        assert!(ConfigFile::parse("lambda-min").is_err());
        let c = ConfigFile::parse("threads = many").unwrap();
        assert!(c.parsed::<usize>("threads").is_err());
    }
}
