//! `atoms`: threshold sets, Whitney cubes and atom lemma quantities of grid fields.

use crate::config::Config;
use crate::emit::{num, row};
use crate::{CliError, Output};
use rml_core::dyadic::io::read_samples;
use rml_core::dyadic::{atom_lemma_reports, band_decompose_real, build_atoms, random_samples, Grid};
use serde_json::{Map, Value};
use std::path::Path;

/// Decomposes one field; returns a row per threshold and whether every check held.
pub fn analyze(grid: &Grid, f: &[f64], label: &str) -> Result<(Vec<Map<String, Value>>, bool), CliError> {
    let field = band_decompose_real(grid, f, grid.s_max - grid.top_level() as i32)?;
    let dec = build_atoms(&field, None)?;
    let (rec, mult) = dec.reconstruct(&field);
    let exact = mult == 1 && rec == field.bands;
    let mut ok = exact;
    let rows = atom_lemma_reports(&dec)
        .into_iter()
        .map(|r| {
            ok &= r.holds();
            row(vec![
                ("field", label.into()),
                ("j", r.j.into()),
                ("meas_omega", num(r.meas_omega)),
                ("meas_omega_star", num(r.meas_omega_star)),
                ("whitney_cubes", r.whitney_cubes.into()),
                ("atoms", r.atoms.into()),
                ("l2_ratio", num(r.l2_ratio)),
                ("l2_constant", num(r.l2_constant)),
                ("sup_ratio", num(r.sup_ratio)),
                ("whitney_fill", num(r.whitney_fill)),
                ("overlap_4x", r.overlap_4x.into()),
                ("reconstruction_exact", exact.into()),
                ("holds", r.holds().into()),
            ])
        })
        .collect();
    Ok((rows, ok))
}

/// Input fields: a binary samples file, or `fields` random fields on a generated grid.
pub fn fields(cfg: &mut Config) -> Result<Vec<(String, Grid, Vec<f64>)>, CliError> {
    if let Some(path) = cfg.opt_string("input")? {
        let (g, f) = read_samples(Path::new(&path))?;
        return Ok(vec![(path, g, f)]);
    }
    let dg = cfg.usize("dg", Some(2))?;
    let n = cfg.usize("grid", Some(128))?;
    if n < 2 || !n.is_power_of_two() {
        return Err(CliError::usage(format!("grid must be a power of two >= 2, got {n}")));
    }
    let g = Grid::new(dg, n, n.trailing_zeros() as i32)?;
    let count = cfg.u64("fields", Some(1))?;
    let seed = cfg.u64("seed", Some(0))?;
    let bumps = cfg.usize("size", Some(8))?;
    Ok((0..count).map(|i| (format!("seed {}", seed + i), g, random_samples(&g, bumps, seed + i))).collect())
}

pub fn run(cfg: &mut Config) -> Result<Output, CliError> {
    let mut table = Vec::new();
    let mut ok = true;
    for (label, g, f) in fields(cfg)? {
        let (rows, held) = analyze(&g, &f, &label)?;
        ok &= held;
        table.extend(rows);
    }
    let mut report = Map::new();
    report.insert("command".into(), "atoms".into());
    report.insert("thresholds".into(), Value::Array(table.iter().cloned().map(Value::Object).collect()));
    Ok(Output { report, table, code: if ok { 0 } else { 3 } })
}
