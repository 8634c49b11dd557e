//! Flat `key = value` run summaries. The resolved configuration is embedded
//! under `config.*` dotted keys, so a summary is itself a loadable config.

use std::path::Path;

use slowlight_core::io::write_atomic;

use crate::config::Config;
use crate::CliError;

#[derive(Debug, Clone, Default)]
pub struct Summary {
    entries: Vec<(String, toml::Value)>,
}

impl Summary {
    pub fn new(command: &str) -> Self {
        let mut s = Self::default();
        s.text("command", command);
        s
    }

    pub fn number(&mut self, key: &str, v: f64) {
        self.entries.push((key.into(), toml::Value::Float(v)));
    }

    pub fn integer(&mut self, key: &str, v: usize) {
        self.entries.push((key.into(), toml::Value::Integer(v as i64)));
    }

    pub fn text(&mut self, key: &str, v: &str) {
        self.entries.push((key.into(), toml::Value::String(v.into())));
    }

    pub fn flag(&mut self, key: &str, v: bool) {
        self.entries.push((key.into(), toml::Value::Boolean(v)));
    }

    pub fn texts(&mut self, key: &str, v: &[String]) {
        let items = v.iter().cloned().map(toml::Value::String).collect();
        self.entries.push((key.into(), toml::Value::Array(items)));
    }

    pub fn get(&self, key: &str) -> Option<&toml::Value> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn get_number(&self, key: &str) -> Option<f64> {
        match self.get(key)? {
            toml::Value::Float(f) => Some(*f),
            toml::Value::Integer(i) => Some(*i as f64),
            _ => None,
        }
    }

    pub fn render(&self, config: &Config) -> String {
        let mut out = String::new();
        for (k, v) in &self.entries {
            out.push_str(&format!("{k} = {v}\n"));
        }
        flatten("config", &config.to_value(), &mut |k, v| {
            out.push_str(&format!("{k} = {v}\n"));
        });
        out
    }

    pub fn write(&self, path: &Path, config: &Config) -> Result<(), CliError> {
        Ok(write_atomic(path, self.render(config).as_bytes())?)
    }
}

/// Calls `emit` with every leaf of `value` as a dotted key.
pub fn flatten(prefix: &str, value: &toml::Value, emit: &mut dyn FnMut(&str, &toml::Value)) {
    match value {
        toml::Value::Table(t) => {
            for (k, v) in t {
                flatten(&format!("{prefix}.{k}"), v, emit);
            }
        }
        leaf => emit(prefix, leaf),
    }
}

/// Reads a summary back into a flat table.
pub fn read(path: &Path) -> Result<toml::Table, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| CliError::Config(e.to_string()))
}
