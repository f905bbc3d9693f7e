//! `--config` files: a JSON object whose keys are flag names.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::Failure;

pub type Config = Map<String, Value>;

pub fn load(path: &Path) -> Result<Config, String> {
    let text = fs::read_to_string(path).map_err(|e| format!("reading {}: {e}", path.display()))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(format!("{}: expected a JSON object", path.display())),
        Err(e) => Err(format!("{}: {e}", path.display())),
    }
}

/// The `threads` entry, if any.
pub fn threads(config: &Config) -> Result<Option<usize>, String> {
    match config.get("threads") {
        None => Ok(None),
        Some(v) => v.as_u64().map(|t| Some(t as usize)).ok_or_else(|| "config: threads must be an integer".into()),
    }
}

/// Overlays the flags given on the command line onto the config file.
pub fn merge<T: Serialize + DeserializeOwned>(flags: T, config: Option<&Config>) -> Result<T, String> {
    let Some(config) = config else {
        return Ok(flags);
    };
    let mut merged: Config = config
        .iter()
        .filter(|(k, _)| !matches!(k.as_str(), "threads" | "schema"))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    if let Value::Object(given) = serde_json::to_value(&flags).map_err(|e| e.to_string())? {
        for (k, v) in given {
            if !v.is_null() {
                merged.insert(k, v);
            }
        }
    }
    serde_json::from_value(Value::Object(merged)).map_err(|e| format!("config: {e}"))
}

pub fn required<T>(value: Option<T>, flag: &str) -> Result<T, Failure> {
    value.ok_or_else(|| Failure::Usage(format!("missing --{flag}")))
}
