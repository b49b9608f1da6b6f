//! The common result record of every inequality check.

use crate::stats::loglog_slope;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// One point of a size or parameter sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub size: f64,
    pub lhs: f64,
    /// Standard error of lhs; 0 for exact values.
    pub err: f64,
    pub rhs: f64,
    pub ratio: f64,
}

impl SweepPoint {
    pub fn new(size: f64, lhs: f64, err: f64, rhs: f64) -> Self {
        Self { size, lhs, err, rhs, ratio: lhs / rhs }
    }
}

/// Both sides of an inequality measured on one instance, with optional sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InequalityReport {
    pub id: String,
    pub instance: String,
    pub lhs: f64,
    /// Standard error of lhs when it is stochastic, `None` when exact.
    pub lhs_err: Option<f64>,
    pub rhs: f64,
    pub ratio: f64,
    /// Warnings such as "outside proven range".
    pub flags: Vec<String>,
    /// Exponents, seeds and auxiliary quantities.
    pub meta: BTreeMap<String, serde_json::Value>,
    pub sweep: Vec<SweepPoint>,
    /// Fitted slope of log ratio against log size over the sweep.
    pub slope: Option<f64>,
}

impl InequalityReport {
    pub fn new(id: &str, instance: impl Into<String>, lhs: f64, lhs_err: Option<f64>, rhs: f64) -> Self {
        Self {
            id: id.to_string(),
            instance: instance.into(),
            lhs,
            lhs_err,
            rhs,
            ratio: lhs / rhs,
            flags: Vec::new(),
            meta: BTreeMap::new(),
            sweep: Vec::new(),
            slope: None,
        }
    }

    pub fn with_meta(mut self, key: &str, value: impl Serialize) -> Self {
        self.meta.insert(key.to_string(), serde_json::to_value(value).unwrap_or(serde_json::Value::Null));
        self
    }

    pub fn flag(&mut self, msg: impl Into<String>) {
        self.flags.push(msg.into());
    }

    /// Attaches a sweep and fits its slope.
    pub fn with_sweep(mut self, sweep: Vec<SweepPoint>) -> Self {
        let sizes: Vec<f64> = sweep.iter().map(|p| p.size).collect();
        let ratios: Vec<f64> = sweep.iter().map(|p| p.ratio).collect();
        self.slope = (sweep.len() >= 2).then(|| loglog_slope(&sizes, &ratios));
        self.sweep = sweep;
        self
    }

    /// True when the stored ratio equals lhs/rhs.
    pub fn consistent(&self) -> bool {
        let r = self.lhs / self.rhs;
        (r - self.ratio).abs() <= 1e-12 * r.abs().max(1e-300) || (r.is_nan() && self.ratio.is_nan())
    }

    /// Sweep as CSV `size,lhs,err,rhs,ratio`.
    pub fn sweep_csv(&self) -> String {
        let mut s = String::from("size,lhs,err,rhs,ratio\n");
        for p in &self.sweep {
            let _ = writeln!(s, "{},{},{},{},{}", p.size, p.lhs, p.err, p.rhs, p.ratio);
        }
        s
    }

    /// Aligned-column text for terminals.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<10} {}", "check", self.id);
        let _ = writeln!(s, "{:<10} {}", "instance", self.instance);
        match self.lhs_err {
            Some(e) => {
                let _ = writeln!(s, "{:<10} {:.6e} ± {:.2e}", "lhs", self.lhs, e);
            }
            None => {
                let _ = writeln!(s, "{:<10} {:.6e} (exact)", "lhs", self.lhs);
            }
        }
        let _ = writeln!(s, "{:<10} {:.6e}", "rhs", self.rhs);
        let _ = writeln!(s, "{:<10} {:.6e}", "ratio", self.ratio);
        if let Some(sl) = self.slope {
            let _ = writeln!(s, "{:<10} {:.4}", "slope", sl);
        }
        for (k, v) in &self.meta {
            let _ = writeln!(s, "{:<10} {} = {}", "meta", k, v);
        }
        for f in &self.flags {
            let _ = writeln!(s, "{:<10} {}", "flag", f);
        }
        if !self.sweep.is_empty() {
            let _ = writeln!(s, "{:>12} {:>14} {:>10} {:>14} {:>12}", "size", "lhs", "err", "rhs", "ratio");
            for p in &self.sweep {
                let _ = writeln!(s, "{:>12.4e} {:>14.6e} {:>10.2e} {:>14.6e} {:>12.6}", p.size, p.lhs, p.err, p.rhs, p.ratio);
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_and_slope() {
        let sweep: Vec<SweepPoint> = (0..5).map(|i| SweepPoint::new(2f64.powi(i), 2f64.powi(i), 0.0, 1.0)).collect();
        let r = InequalityReport::new("x", "y", 3.0, None, 4.0).with_sweep(sweep);
        assert!(r.consistent());
        assert!((r.slope.unwrap() - 1.0).abs() < 1e-12);
        assert!(r.sweep_csv().lines().count() == 6);
        let j = serde_json::to_string(&r).unwrap();
        let back: InequalityReport = serde_json::from_str(&j).unwrap();
        assert_eq!(back, r);
    }
}
