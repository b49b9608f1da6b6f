//! `density`: stratification of a point family with the invariant witnesses of every stratum.

use crate::config::Config;
use crate::emit::{num, row};
use crate::{CliError, Output};
use rml_core::density::{density_decompose, support_measure, verify_stratification, PointFamily};
use rml_core::ineq_lab::StressFamily;
use serde_json::{Map, Value};

fn family(cfg: &mut Config) -> Result<PointFamily, CliError> {
    if let Some(path) = cfg.opt_string("input")? {
        let text = std::fs::read_to_string(&path).map_err(|e| CliError::usage(format!("cannot read {path}: {e}")))?;
        return Ok(PointFamily::from_csv(&text)?);
    }
    let kind = StressFamily::parse(&cfg.string("family", None)?)?;
    let d = cfg.usize("dim", Some(4))?;
    let n = cfg.usize("size", Some(300))?;
    let k = cfg.u64("k", Some(5))? as u32;
    Ok(kind.generate(d, n, k, cfg.u64("seed", Some(0))?)?)
}

pub fn run(cfg: &mut Config) -> Result<Output, CliError> {
    let fam = family(cfg)?;
    let samples = cfg.usize("samples", Some(0))?;
    let seed = cfg.u64("seed", Some(0))?;
    let st = density_decompose(&fam);
    let witnesses = verify_stratification(&fam, &st);
    let mut ok = true;
    let mut table = Vec::new();
    for s in &st.strata {
        let w = witnesses.iter().find(|w| w.k == s.k && w.nu == s.nu);
        let holds = w.is_some_and(|w| w.all_hold());
        ok &= holds;
        let mut r = row(vec![
            ("k", s.k.into()),
            ("nu", s.nu.into()),
            ("u", num(s.u)),
            ("members", s.members.len().into()),
            ("balls", s.balls.len().into()),
        ]);
        if let Some(w) = w {
            r.extend(row(vec![
                ("partition_ok", w.partition_ok.into()),
                ("balls_disjoint", w.balls_disjoint.into()),
                ("covering_ok", w.covering_ok.into()),
                ("radius_sum", num(w.radius_sum)),
                ("radius_bound", num(w.radius_bound)),
                ("density_max_ratio", num(w.density.max_ratio)),
                ("density_holds", w.density.holds.into()),
            ]));
        }
        r.insert("invariants".into(), if holds { "PASS" } else { "FAIL" }.into());
        if samples > 0 && !s.members.is_empty() {
            let m = support_measure(&fam, &st, s.k, s.nu, 0.2, samples, seed)?;
            r.insert("support_normalized".into(), num(m.normalized));
        }
        table.push(r);
    }
    let mut report = Map::new();
    report.insert("command".into(), "density".into());
    report.insert("dim".into(), fam.dim().into());
    report.insert("members".into(), fam.len().into());
    report.insert("kappa".into(), num(st.kappa));
    report.insert("strata".into(), Value::Array(table.iter().cloned().map(Value::Object).collect()));
    Ok(Output { report, table, code: if ok { 0 } else { 3 } })
}
