//! `wave`: ∫|w_k|, ‖E_k‖₁ and their step ratios per band, with optional profile export.

use crate::config::Config;
use crate::emit::{num, row};
use crate::{CliError, Output};
use rml_core::specfun::linspace;
use rml_core::wave::{WaveBandKernel, Window, W_L1_BOUND};
use serde_json::{Map, Value};

/// One row per band k = kmin..=kmax.
pub fn band_table(d: usize, kmin: u32, kmax: u32) -> Result<Vec<Map<String, Value>>, CliError> {
    if kmin == 0 || kmin > kmax {
        return Err(CliError::usage(format!("need 1 <= kmin <= kmax, got {kmin}..{kmax}")));
    }
    let mut rows = Vec::new();
    let mut prev: Option<f64> = None;
    for k in kmin..=kmax {
        let kk = WaveBandKernel::new(k, d, Window::default())?;
        let e = kk.e_l1(kk.e_radius());
        rows.push(row(vec![
            ("k", k.into()),
            ("w_l1", num(kk.w_l1())),
            ("e_l1", num(e)),
            ("e_step", prev.map_or(Value::Null, |p| num(e / p))),
        ]));
        prev = Some(e);
    }
    Ok(rows)
}

fn export(prefix: &str, d: usize, kmin: u32, kmax: u32) -> Result<Vec<String>, CliError> {
    let mut written = Vec::new();
    for k in kmin..=kmax {
        let kk = WaveBandKernel::new(k, d, Window::default())?;
        let prof = kk.profiles(&linspace(0.0, 4.0, 801))?;
        let mut files = vec![(format!("{prefix}e_{k}.csv"), prof.e.to_csv())];
        if let Some(w) = &prof.w {
            files.push((format!("{prefix}w_{k}.csv"), w.to_csv()));
        }
        for (path, text) in files {
            std::fs::write(&path, text).map_err(|e| CliError::usage(format!("cannot write {path}: {e}")))?;
            written.push(path);
        }
    }
    Ok(written)
}

pub fn run(cfg: &mut Config) -> Result<Output, CliError> {
    let d = cfg.usize("dim", Some(4))?;
    let kmin = cfg.u64("kmin", Some(1))? as u32;
    let kmax = cfg.u64("kmax", Some(8))? as u32;
    let table = band_table(d, kmin, kmax)?;
    let mut report = Map::new();
    report.insert("command".into(), "wave".into());
    report.insert("w_l1_bound".into(), num(W_L1_BOUND));
    report.insert("bands".into(), Value::Array(table.iter().cloned().map(Value::Object).collect()));
    if let Some(prefix) = cfg.opt_string("export")? {
        report.insert("exported".into(), export(&prefix, d, kmin, kmax)?.into());
    }
    Ok(Output { report, table, code: 0 })
}
