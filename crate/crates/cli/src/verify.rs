//! `verify <id>`: runs one check and compares it with its frozen bounds.

use crate::config::Config;
use crate::emit::{num, row};
use crate::{atoms, wave, CliError, Output};
use rml_core::ineq_lab::frozen::{self, LP_BOUND, L2_DENSITY, MAIN};
use rml_core::ineq_lab::{
    apply_frozen, check_dyadic_interpolation, default_epsilon, geometric_stack, gram_decay_report, l2_sweep,
    large_radii_sweep, lp_bound_sweep, main_sweep, model_sweep, support_report, Coefficients, InequalityReport,
    ShellSweep, StressFamily,
};
use rml_core::kernels::{Bump, BumpSpec};
use rml_core::wave::{check_decay_bound, default_times, local_smoothing_sweep, single_band, Theta, Window, W_L1_BOUND};
use serde_json::{Map, Value};
use std::sync::Arc;

pub const IDS: [&str; 13] = [
    "model-2.1",
    "interp-2.2",
    "gram-3.3",
    "main-3.1",
    "l2-3.5",
    "lp-3.8",
    "support-3.7",
    "large-radii-6.2",
    "atoms-7.1",
    "wk-9.2",
    "decay-9.7",
    "smoothing-1.2",
    "list",
];

/// Largest fitted log-log slope accepted as "no growth".
pub const SLOPE_TOL: f64 = 0.05;
/// Step ratio E_{k+1}/E_k required from [`E_DECAY_FROM`] on.
pub const E_STEP: f64 = 0.25;
pub const E_DECAY_FROM: u32 = 6;
/// Largest growth of the decay constant across the β range.
pub const DECAY_GROWTH: f64 = 2.0;

struct Check {
    reports: Vec<Value>,
    table: Vec<Map<String, Value>>,
    failures: Vec<String>,
}

impl Check {
    fn new() -> Self {
        Self { reports: Vec::new(), table: Vec::new(), failures: Vec::new() }
    }

    /// Records an inequality report; it fails on any flag or, for sweeps, on growth.
    fn add(&mut self, rep: &InequalityReport, slope_bound: bool) {
        for f in &rep.flags {
            self.failures.push(format!("{}: {f}", rep.instance));
        }
        if slope_bound {
            if let Some(s) = rep.slope.filter(|s| *s > SLOPE_TOL) {
                self.failures.push(format!("{}: slope {s:.4} exceeds {SLOPE_TOL}", rep.instance));
            }
        }
        let base = || row(vec![("id", rep.id.clone().into()), ("instance", rep.instance.clone().into())]);
        if rep.sweep.is_empty() {
            let mut r = base();
            r.extend(row(vec![("lhs", num(rep.lhs)), ("rhs", num(rep.rhs)), ("ratio", num(rep.ratio))]));
            self.table.push(r);
        } else {
            for s in &rep.sweep {
                let mut r = base();
                r.extend(row(vec![
                    ("size", num(s.size)),
                    ("lhs", num(s.lhs)),
                    ("err", num(s.err)),
                    ("rhs", num(s.rhs)),
                    ("ratio", num(s.ratio)),
                ]));
                self.table.push(r);
            }
        }
        self.reports.push(serde_json::to_value(rep).expect("report serializes"));
    }
}

fn families(cfg: &mut Config) -> Result<Vec<StressFamily>, CliError> {
    match cfg.string("family", Some("all"))?.as_str() {
        "all" => Ok(StressFamily::ALL.to_vec()),
        name => Ok(vec![StressFamily::parse(name)?]),
    }
}

fn shell_sweep(cfg: &mut Config) -> Result<ShellSweep, CliError> {
    let def = ShellSweep::default();
    Ok(ShellSweep {
        dim: cfg.usize("dim", Some(def.dim))?,
        k: cfg.u64("k", Some(def.k as u64))? as u32,
        size0: cfg.usize("size", Some(def.size0))?,
        doublings: cfg.u64("doublings", Some(def.doublings as u64))? as u32,
        samples: cfg.usize("samples", Some(def.samples))?,
        coeffs: Coefficients::Ones,
        replicates: cfg.usize("replicates", Some(def.replicates))?,
        seed: cfg.u64("seed", Some(def.seed))?,
    })
}

fn bump(d: usize) -> Result<Arc<Bump>, CliError> {
    Ok(Bump::shared(BumpSpec::new(d))?)
}

fn run_check(id: &str, cfg: &mut Config) -> Result<Check, CliError> {
    let mut c = Check::new();
    match id {
        "model-2.1" => {
            let rep = model_sweep(
                cfg.usize("dg", Some(2))?,
                cfg.f64("beta", Some(1.0))?,
                cfg.f64("p", Some(1.2))?,
                cfg.usize("size", Some(16))?,
                cfg.u64("doublings", Some(4))? as u32,
                cfg.usize("samples", Some(2))?,
                cfg.u64("seed", Some(5))?,
            )?;
            c.add(&rep, true);
        }
        "interp-2.2" => {
            let (f, s) = geometric_stack(cfg.u64("kmax", Some(8))? as u32);
            let rep = check_dyadic_interpolation(&f, &s, 1.0, cfg.f64("q", Some(2.0))?, cfg.f64("p", Some(1.5))?)?;
            c.add(&rep, false);
        }
        "gram-3.3" => {
            let b = Bump::new(BumpSpec::new(cfg.usize("dim", Some(4))?))?;
            let rep = gram_decay_report(&b, cfg.usize("pairs", Some(1000))?, cfg.u64("seed", Some(4))?)?;
            c.add(&rep, false);
        }
        "main-3.1" | "lp-3.8" => {
            let p = cfg.f64("p", Some(1.1))?;
            let sw = shell_sweep(cfg)?;
            let b = bump(sw.dim)?;
            for kind in families(cfg)? {
                let rep = if id == "main-3.1" {
                    apply_frozen(main_sweep(kind, p, &sw, &b)?, &b, p, MAIN)?
                } else {
                    apply_frozen(lp_bound_sweep(kind, p, &sw, &b)?, &b, p, LP_BOUND)?
                };
                c.add(&rep, true);
            }
        }
        "l2-3.5" => {
            let sw = shell_sweep(cfg)?;
            let b = bump(sw.dim)?;
            for kind in families(cfg)? {
                c.add(&apply_frozen(l2_sweep(kind, &sw, &b)?, &b, 2.0, L2_DENSITY)?, true);
            }
        }
        "support-3.7" => {
            let (d, n) = (cfg.usize("dim", Some(4))?, cfg.usize("size", Some(300))?);
            let (k, samples, seed) = (cfg.u64("k", Some(5))? as u32, cfg.usize("samples", Some(2000))?, cfg.u64("seed", Some(0))?);
            for kind in families(cfg)? {
                c.add(&support_report(kind, d, n, k, samples, seed)?, false);
            }
        }
        "large-radii-6.2" => {
            let d = cfg.usize("dim", Some(4))?;
            let p = cfg.f64("p", Some(1.1))?;
            let ells: Vec<u32> = (0..=cfg.u64("ell_max", Some(5))? as u32).collect();
            let b = Bump::new(BumpSpec::new(d))?;
            c.add(&large_radii_sweep(&b, p, &ells, default_epsilon(d, p))?, false);
        }
        "atoms-7.1" => {
            for (label, g, f) in atoms::fields(cfg)? {
                let (rows, ok) = atoms::analyze(&g, &f, &label)?;
                if !ok {
                    c.failures.push(format!("{label}: atom lemma or reconstruction failed"));
                }
                c.table.extend(rows);
            }
        }
        "wk-9.2" => {
            let d = cfg.usize("dim", Some(4))?;
            let kmax = cfg.u64("kmax", Some(10))? as u32;
            let rows = wave::band_table(d, cfg.u64("kmin", Some(2))? as u32, kmax)?;
            for r in &rows {
                let k = r["k"].as_u64().unwrap_or(0) as u32;
                let w = r["w_l1"].as_f64().unwrap_or(f64::INFINITY);
                if w > W_L1_BOUND {
                    c.failures.push(format!("k={k}: w_k L1 {w:.4} exceeds {W_L1_BOUND}"));
                }
                if let Some(step) = r["e_step"].as_f64() {
                    if k > E_DECAY_FROM && step > E_STEP {
                        c.failures.push(format!("k={k}: E_k step ratio {step:.4} exceeds {E_STEP}"));
                    }
                }
            }
            let ks: Vec<f64> = rows.iter().filter(|r| r["k"].as_u64().unwrap_or(0) as u32 >= E_DECAY_FROM).map(|r| r["k"].as_f64().unwrap_or(0.0)).collect();
            let es: Vec<f64> = rows.iter().filter(|r| r["k"].as_u64().unwrap_or(0) as u32 >= E_DECAY_FROM).map(|r| r["e_l1"].as_f64().unwrap_or(0.0).log2()).collect();
            if ks.len() >= 2 {
                let (mk, me) = (ks.iter().sum::<f64>() / ks.len() as f64, es.iter().sum::<f64>() / es.len() as f64);
                let cov: f64 = ks.iter().zip(&es).map(|(k, e)| (k - mk) * (e - me)).sum();
                let var: f64 = ks.iter().map(|k| (k - mk).powi(2)).sum();
                let mut fit = Map::new();
                fit.insert("from_k".into(), E_DECAY_FROM.into());
                fit.insert("log2_slope".into(), num(cov / var));
                c.reports.push(Value::Object(fit));
            }
            c.table.extend(rows);
        }
        "decay-9.7" => {
            let d = cfg.usize("dim", Some(4))?;
            let n = cfg.f64("order", Some(2.0))?;
            let theta = Theta::new(d, Window::default())?;
            let gamma = (d as f64 - 3.0) / 2.0;
            let mut constants = Vec::new();
            for k in cfg.u64("kmin", Some(2))?..=cfg.u64("kmax", Some(10))? {
                let r = check_decay_bound(&theta, 2f64.powi(k as i32), gamma, n)?;
                constants.push(r.constant);
                c.table.push(row(vec![
                    ("beta", num(r.beta)),
                    ("gamma", num(r.gamma)),
                    ("n", num(r.n)),
                    ("constant", num(r.constant)),
                    ("argmax_rho", num(r.argmax_rho)),
                    ("at_one", num(r.at_one)),
                ]));
            }
            if let (Some(first), Some(max)) = (constants.first(), constants.iter().copied().reduce(f64::max)) {
                if !(max <= DECAY_GROWTH * first) {
                    c.failures.push(format!("decay constant grows from {first:.4} to {max:.4} across beta"));
                }
            }
        }
        "smoothing-1.2" => {
            let d = cfg.usize("dim", Some(4))?;
            let q = cfg.f64("q", Some(8.0))?;
            let lambdas = cfg.f64_list("lambdas", &[1.0, 2.0, 4.0, 8.0])?;
            let band = single_band(d, cfg.u64("k", Some(2))? as i32)?;
            c.add(&local_smoothing_sweep(&band, q, &default_times(9), &lambdas)?, true);
        }
        "list" => {}
        other => return Err(CliError::usage(format!("unknown check {other:?}; valid ids: {}", IDS[..IDS.len() - 1].join(", ")))),
    }
    Ok(c)
}

pub fn run(id: &str, cfg: &mut Config) -> Result<Output, CliError> {
    let c = run_check(id, cfg)?;
    let mut report = Map::new();
    report.insert("command".into(), "verify".into());
    report.insert("id".into(), id.into());
    if id == "list" {
        report.insert("ids".into(), IDS[..IDS.len() - 1].to_vec().into());
    }
    report.insert("verdict".into(), if c.failures.is_empty() { "PASS" } else { "FAIL" }.into());
    report.insert("failures".into(), c.failures.clone().into());
    report.insert("frozen".into(), frozen_constants());
    report.insert("reports".into(), c.reports.into());
    report.insert("table".into(), Value::Array(c.table.iter().cloned().map(Value::Object).collect()));
    Ok(Output { report, table: c.table, code: if c.failures.is_empty() { 0 } else { 3 } })
}

fn frozen_constants() -> Value {
    Value::Object(row(vec![
        ("gram_decay", num(frozen::GRAM_DECAY)),
        ("support", num(frozen::SUPPORT)),
        ("main", num(MAIN)),
        ("l2_density", num(L2_DENSITY)),
        ("lp_bound", num(LP_BOUND)),
        ("w_l1", num(W_L1_BOUND)),
        ("slope", num(SLOPE_TOL)),
    ]))
}
