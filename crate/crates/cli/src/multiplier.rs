//! `analyze-multiplier`: dilation criterion, kernel criteria and empirical lower bounds.

use crate::config::Config;
use crate::emit::{num, row};
use crate::{CliError, Output};
use rml_core::multiplier::{
    criterion_norm, empirical_opnorm_lower, kernel_lp_criterion, lorentz_criteria, EtaChoice, KernelLp, KernelOptions,
    MultiplierKind, MultiplierSpec, SuiteSpec, TGrid, TestFunction,
};
use rml_core::specfun::RadialProfile;
use serde_json::{Map, Value};

fn read_profile(path: &str) -> Result<RadialProfile, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::usage(format!("cannot read {path}: {e}")))?;
    Ok(RadialProfile::from_csv(&text)?)
}

/// Grid points bracketing the nonzero samples; `None` for an identically zero profile.
fn support_of(p: &RadialProfile) -> Option<(f64, f64)> {
    let g = p.grid();
    let nz: Vec<usize> = p.values().iter().enumerate().filter(|(_, v)| v.norm() > 0.0).map(|(i, _)| i).collect();
    let (i, j) = (*nz.first()?, *nz.last()?);
    Some((g[i.saturating_sub(1)], g[(j + 1).min(g.len() - 1)]))
}

fn spec(cfg: &mut Config, p: f64) -> Result<MultiplierSpec, CliError> {
    let family = cfg.string("family", None)?;
    let mut profile_dim = None;
    let kind = match family.as_str() {
        "bochner-riesz" => MultiplierKind::BochnerRiesz { delta: cfg.f64("delta", None)? },
        "annulus" => MultiplierKind::SmoothAnnulus {
            lo: cfg.f64("lo", None)?,
            hi: cfg.f64("hi", None)?,
            h: cfg.f64("h", Some(0.0))?,
        },
        "constant" => MultiplierKind::Constant { c: cfg.f64("c", Some(1.0))? },
        "compact-profile" => {
            let profile = read_profile(&cfg.string("input", None)?)?;
            profile_dim = Some(profile.dim());
            match support_of(&profile) {
                None => MultiplierKind::Constant { c: 0.0 },
                Some((a, b)) => {
                    let rho_min = cfg.f64("rho_min", Some(a))?;
                    let rho_max = cfg.f64("rho_max", Some(b))?;
                    MultiplierKind::CompactProfile { profile, rho_min, rho_max }
                }
            }
        }
        "user-samples" => {
            let profile = read_profile(&cfg.string("input", None)?)?;
            profile_dim = Some(profile.dim());
            MultiplierKind::UserSamples { profile }
        }
        other => {
            return Err(CliError::usage(format!(
                "unknown multiplier family {other:?}; expected bochner-riesz, annulus, constant, compact-profile or user-samples"
            )))
        }
    };
    let dim = cfg.usize("dim", profile_dim)?;
    Ok(MultiplierSpec::new(kind, dim, p)?)
}

fn kernel_json(k: &KernelLp) -> Value {
    let mut m = Map::new();
    m.insert("norm".into(), num(k.norm));
    m.insert("truncated".into(), num(k.truncated));
    m.insert("finite".into(), k.finite.map_or(Value::Null, Value::from));
    m.insert("tail_exponent".into(), k.tail.map_or(Value::Null, |t| num(t.exponent)));
    m.insert("diagnostics".into(), k.diagnostics.clone().into());
    Value::Object(m)
}

pub fn run(cfg: &mut Config) -> Result<Output, CliError> {
    let p = cfg.f64("p", None)?;
    let m = spec(cfg, p)?;
    let eta_choice = match cfg.string("eta", Some("quotient"))?.as_str() {
        "quotient" => EtaChoice::Quotient,
        "annulus" => EtaChoice::Annulus,
        other => return Err(CliError::usage(format!("eta must be quotient or annulus, got {other:?}"))),
    };
    let grid = TGrid { ratio: cfg.f64("t_ratio", Some(2f64.powf(0.25)))?, range: None };
    let opts = KernelOptions { r_max: cfg.f64("r_max", Some(64.0))? };
    let eta = TestFunction::new(m.dim, eta_choice)?;
    let crit = criterion_norm(&m, &eta, grid, opts)?;

    let mut diagnostic = crit.table.iter().any(|r| r.finite.is_none());
    let table: Vec<Map<String, Value>> = crit
        .table
        .iter()
        .map(|r| {
            row(vec![
                ("t", num(r.t)),
                ("norm", num(r.norm)),
                ("truncated", num(r.truncated)),
                ("tail_exponent", r.tail_exponent.map_or(Value::Null, num)),
                ("finite", r.finite.map_or(Value::Null, Value::from)),
            ])
        })
        .collect();
    let finite = if crit.table.iter().any(|r| r.finite == Some(false)) {
        Value::from(false)
    } else if diagnostic {
        Value::Null
    } else {
        Value::from(true)
    };
    let mut c = Map::new();
    c.insert("multiplier".into(), m.label().into());
    c.insert("sup".into(), num(crit.sup));
    c.insert("t_star".into(), num(crit.t_star));
    c.insert("finite".into(), finite);
    c.insert("flags".into(), crit.flags.clone().into());
    c.insert("table".into(), Value::Array(table.iter().cloned().map(Value::Object).collect()));

    let mut report = Map::new();
    report.insert("command".into(), "analyze-multiplier".into());
    report.insert("criterion".into(), Value::Object(c));
    if m.compact_away_from_zero() {
        let k = kernel_lp_criterion(&m, opts)?;
        diagnostic |= k.finite.is_none();
        report.insert("kernel_lp".into(), kernel_json(&k));
        if let Some(nu) = cfg.echo().get("q").and_then(Value::as_f64) {
            let l = lorentz_criteria(&m, nu, opts)?;
            report.insert("lorentz".into(), serde_json::to_value(&l).expect("plain struct"));
        }
    }
    if cfg.bool("empirical", false)? {
        let suite = SuiteSpec { samples: cfg.usize("samples", Some(20_000))?, ..SuiteSpec::default() };
        let e = empirical_opnorm_lower(&m, &eta, &suite, cfg.u64("seed", Some(0))?)?;
        let entries: Vec<Value> = e
            .entries
            .iter()
            .map(|x| Value::Object(row(vec![("label", x.label.clone().into()), ("ratio", num(x.ratio)), ("se", num(x.se))])))
            .collect();
        let mut em = Map::new();
        em.insert("max_ratio".into(), num(e.max_ratio));
        em.insert("witness".into(), e.witness.into());
        em.insert("entries".into(), entries.into());
        report.insert("empirical".into(), Value::Object(em));
    }
    Ok(Output { report, table, code: if diagnostic { 2 } else { 0 } })
}
