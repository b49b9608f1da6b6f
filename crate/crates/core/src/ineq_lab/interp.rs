//! Dyadic interpolation: per-level L^{p₀}, L^{p₁} bounds with geometric weights give an L^p
//! bound for the sum.

use super::report::InequalityReport;
use crate::{Result, RmlError, C64};

/// Sequence of functions F_j sampled on a common grid of cells with equal measure.
#[derive(Debug, Clone)]
pub struct LevelFunctions {
    /// Measure of one grid cell.
    pub cell: f64,
    /// (j, samples of F_j).
    pub levels: Vec<(i32, Vec<C64>)>,
}

impl LevelFunctions {
    fn power(&self, f: &[C64], p: f64) -> f64 {
        self.cell * f.iter().map(|v| v.norm().powf(p)).sum::<f64>()
    }

    fn support(&self, f: &[C64]) -> f64 {
        self.cell * f.iter().filter(|v| v.norm() != 0.0).count() as f64
    }
}

/// C^p from the proof: the layer decomposition costs 8^p per layer n and the layers decay like
/// 2^{−σ|n|} with σ = min(p₁ − p, p − p₀); the layers are summed by Minkowski for p ≥ 1 and
/// by the p-triangle inequality below 1.
pub fn interpolation_constant(p0: f64, p1: f64, p: f64) -> f64 {
    let sigma = (p1 - p).min(p - p0);
    if p >= 1.0 {
        let q = 2f64.powf(-sigma / p);
        (8.0 * (1.0 + 2.0 * q / (1.0 - q))).powf(p)
    } else {
        let q = 2f64.powf(-sigma);
        8f64.powf(p) * (1.0 + 2.0 * q / (1.0 - q))
    }
}

/// Measures ‖Σ F_j‖_p^p against M^p Σ 2^{jp} s_j with M the least constant satisfying the
/// hypotheses. `p0 = 0` selects the support variant meas{F_j ≠ 0} ≤ s_j.
pub fn check_dyadic_interpolation(f: &LevelFunctions, s: &[f64], p0: f64, p1: f64, p: f64) -> Result<InequalityReport> {
    if !(p0 >= 0.0 && p0 < p && p < p1) {
        return Err(RmlError::Usage(format!("need 0 <= p0 < p < p1, got p0={p0}, p={p}, p1={p1}")));
    }
    if s.len() != f.levels.len() {
        return Err(RmlError::Usage(format!("{} weights for {} levels", s.len(), f.levels.len())));
    }
    let n = f.levels.first().map_or(0, |(_, v)| v.len());
    if f.levels.iter().any(|(_, v)| v.len() != n) {
        return Err(RmlError::Usage("level functions must share one grid".into()));
    }
    let mut m = 0.0f64;
    for ((j, fj), &sj) in f.levels.iter().zip(s) {
        let mut exps = vec![p1];
        if p0 > 0.0 {
            exps.push(p0);
        } else if f.support(fj) > sj * (1.0 + 1e-12) {
            return Err(RmlError::Usage(format!("level {j}: support {} exceeds s_j = {sj}", f.support(fj))));
        }
        for q in exps {
            let norm = f.power(fj, q);
            if norm == 0.0 {
                continue;
            }
            if sj <= 0.0 {
                return Err(RmlError::Usage(format!("level {j} is nonzero but s_j = {sj}")));
            }
            m = m.max((norm / (2f64.powf(*j as f64 * q) * sj)).powf(1.0 / q));
        }
    }
    let mut total = vec![C64::new(0.0, 0.0); n];
    for (_, fj) in &f.levels {
        for (t, v) in total.iter_mut().zip(fj) {
            *t += v;
        }
    }
    let lhs = f.power(&total, p);
    let rhs = m.powf(p) * f.levels.iter().zip(s).map(|((j, _), sj)| 2f64.powf(*j as f64 * p) * sj).sum::<f64>();
    let c = interpolation_constant(p0, p1, p);
    let mut rep = InequalityReport::new("interp-2.2", format!("{} levels on {} cells", f.levels.len(), n), lhs, None, rhs)
        .with_meta("p0", p0)
        .with_meta("p1", p1)
        .with_meta("p", p)
        .with_meta("M", m)
        .with_meta("proof_constant", c);
    if rhs > 0.0 && rep.ratio > c {
        rep.flag(format!("ratio {} exceeds the proof constant {c}", rep.ratio));
    }
    Ok(rep)
}

/// F_j = 2^j χ_{[0, 2^{−j}]} for j = 0..levels on a grid of 2^{levels+4} cells of [0, 1].
pub fn geometric_stack(levels: u32) -> (LevelFunctions, Vec<f64>) {
    let n = 1usize << (levels + 4);
    let cell = 1.0 / n as f64;
    let fs: Vec<(i32, Vec<C64>)> = (0..=levels as i32)
        .map(|j| {
            let width = n >> j;
            (j, (0..n).map(|i| C64::new(if i < width { 2f64.powi(j) } else { 0.0 }, 0.0)).collect())
        })
        .collect();
    let s = (0..=levels as i32).map(|j| 2f64.powi(-j)).collect();
    (LevelFunctions { cell, levels: fs }, s)
}
