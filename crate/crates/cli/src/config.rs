//! Run configuration: a JSON document merged with command-line flags (flags win). Every value
//! read by a command, including defaults, lands in the effective config echoed in the report.

use crate::CliError;
use serde_json::{Map, Value};
use std::collections::BTreeMap;
use std::path::Path;

#[derive(Debug, Clone, Default)]
pub struct Config {
    values: BTreeMap<String, Value>,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else { return Ok(Self::default()) };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read config {}: {e}", path.display())))?;
        let doc: Value = serde_json::from_str(&text).map_err(|e| CliError::usage(format!("config {} is not valid JSON: {e}", path.display())))?;
        match doc {
            Value::Object(map) => Ok(Self { values: map.into_iter().collect() }),
            _ => Err(CliError::usage("config file must hold a JSON object")),
        }
    }

    pub fn set(&mut self, key: &str, value: Value) {
        self.values.insert(key.to_string(), value);
    }

    pub fn echo(&self) -> Value {
        Value::Object(self.values.iter().map(|(k, v)| (k.clone(), v.clone())).collect::<Map<_, _>>())
    }

    fn missing(key: &str) -> CliError {
        CliError::usage(format!("missing required parameter --{}", key.replace('_', "-")))
    }

    fn bad(key: &str, v: &Value, want: &str) -> CliError {
        CliError::usage(format!("parameter {key} = {v} is not {want}"))
    }

    pub fn f64(&mut self, key: &str, default: Option<f64>) -> Result<f64, CliError> {
        match self.values.get(key) {
            Some(v) => v.as_f64().ok_or_else(|| Self::bad(key, v, "a number")),
            None => {
                let d = default.ok_or_else(|| Self::missing(key))?;
                self.set(key, d.into());
                Ok(d)
            }
        }
    }

    pub fn u64(&mut self, key: &str, default: Option<u64>) -> Result<u64, CliError> {
        match self.values.get(key) {
            Some(v) => v.as_u64().ok_or_else(|| Self::bad(key, v, "a non-negative integer")),
            None => {
                let d = default.ok_or_else(|| Self::missing(key))?;
                self.set(key, d.into());
                Ok(d)
            }
        }
    }

    pub fn usize(&mut self, key: &str, default: Option<usize>) -> Result<usize, CliError> {
        Ok(self.u64(key, default.map(|d| d as u64))? as usize)
    }

    pub fn string(&mut self, key: &str, default: Option<&str>) -> Result<String, CliError> {
        match self.values.get(key) {
            Some(v) => v.as_str().map(str::to_string).ok_or_else(|| Self::bad(key, v, "a string")),
            None => {
                let d = default.ok_or_else(|| Self::missing(key))?;
                self.set(key, d.into());
                Ok(d.to_string())
            }
        }
    }

    pub fn opt_string(&mut self, key: &str) -> Result<Option<String>, CliError> {
        match self.values.get(key) {
            Some(Value::Null) | None => Ok(None),
            Some(v) => v.as_str().map(|s| Some(s.to_string())).ok_or_else(|| Self::bad(key, v, "a string")),
        }
    }

    pub fn bool(&mut self, key: &str, default: bool) -> Result<bool, CliError> {
        match self.values.get(key) {
            Some(v) => v.as_bool().ok_or_else(|| Self::bad(key, v, "a boolean")),
            None => {
                self.set(key, default.into());
                Ok(default)
            }
        }
    }

    /// Comma-separated list or JSON array of numbers.
    pub fn f64_list(&mut self, key: &str, default: &[f64]) -> Result<Vec<f64>, CliError> {
        match self.values.get(key).cloned() {
            Some(Value::Array(a)) => a.iter().map(|v| v.as_f64().ok_or_else(|| Self::bad(key, v, "a number"))).collect(),
            Some(Value::String(s)) => {
                let out = s
                    .split(',')
                    .map(|t| t.trim().parse::<f64>().map_err(|_| CliError::usage(format!("parameter {key}: {t:?} is not a number"))))
                    .collect::<Result<Vec<_>, _>>()?;
                self.set(key, out.clone().into());
                Ok(out)
            }
            Some(v) => Err(Self::bad(key, &v, "a list of numbers")),
            None => {
                self.set(key, default.to_vec().into());
                Ok(default.to_vec())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_and_defaults_are_echoed() {
        let mut c = Config { values: [("p".to_string(), Value::from(1.3)), ("dim".to_string(), Value::from(5))].into_iter().collect() };
        c.set("p", 1.1.into());
        assert_eq!(c.f64("p", None).unwrap(), 1.1);
        assert_eq!(c.usize("dim", Some(4)).unwrap(), 5);
        assert_eq!(c.u64("seed", Some(7)).unwrap(), 7);
        assert_eq!(c.echo()["seed"], 7);
        assert_eq!(c.f64("q", None).unwrap_err().code, 1);
        c.set("lambdas", "1, 2,4".into());
        assert_eq!(c.f64_list("lambdas", &[]).unwrap(), vec![1.0, 2.0, 4.0]);
        assert!(c.echo()["lambdas"].is_array());
    }

    #[test]
    fn echo_round_trips() {
        let mut c = Config::default();
        c.f64("p", Some(0.1 + 0.2)).unwrap();
        let text = serde_json::to_string(&c.echo()).unwrap();
        let back: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back["p"].as_f64().unwrap().to_bits(), (0.1f64 + 0.2).to_bits());
    }
}
