//! Flat JSON config file: keys are flag names without the leading dashes.

use std::path::Path;
use std::str::FromStr;

use serde_json::{Map, Value};

const KNOWN_KEYS: &[&str] = &[
    "f56",
    "ft56",
    "ft3",
    "ftp",
    "ftm",
    "n",
    "rho0",
    "sign",
    "branch",
    "convention",
    "tol",
    "out",
    "format",
    "quantity",
    "rho_min",
    "rho_max",
    "points",
    "secular",
    "n_min",
    "n_max",
    "f56_range",
    "ft56_range",
    "ft3_range",
    "ftp_range",
    "ftm_range",
    "verify_points",
    "quad_check",
    "serial",
    "no_propagate",
];

fn normalize_key(k: &str) -> String {
    k.trim_start_matches('-').replace('-', "_").to_ascii_lowercase()
}

#[derive(Debug, Default)]
pub struct Config {
    entries: Map<String, Value>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        Self::parse(&text).map_err(|e| format!("config {}: {e}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let value: Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let Value::Object(obj) = value else {
            return Err("expected a flat JSON object".into());
        };
        let mut entries = Map::new();
        for (k, v) in obj {
            let key = normalize_key(&k);
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(format!("unknown key `{k}`"));
            }
            if matches!(v, Value::Object(_) | Value::Array(_)) {
                return Err(format!("key `{k}` must hold a scalar"));
            }
            entries.insert(key, v);
        }
        Ok(Self { entries })
    }

    /// Parses the entry for `key` with `T::from_str`; numbers and booleans are
    /// read through their JSON text.
    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, String>
    where
        T::Err: std::fmt::Display,
    {
        let text = match self.entries.get(key) {
            None | Some(Value::Null) => return Ok(None),
            Some(Value::String(s)) => s.clone(),
            Some(other) => other.to_string(),
        };
        text.parse()
            .map(Some)
            .map_err(|e| format!("config key `{key}`: {e}"))
    }

    pub fn flag(&self, key: &str) -> Result<bool, String> {
        Ok(self.get::<bool>(key)?.unwrap_or(false))
    }
}

/// Explicit flag if given, else the config entry.
pub fn pick<T: FromStr>(flag: Option<T>, cfg: &Config, key: &str) -> Result<Option<T>, String>
where
    T::Err: std::fmt::Display,
{
    match flag {
        Some(v) => Ok(Some(v)),
        None => cfg.get(key),
    }
}
