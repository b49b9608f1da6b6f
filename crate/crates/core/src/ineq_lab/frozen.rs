//! Frozen regression constants and the checks that use them.
//!
//! Shell functions carry the large amplitude of ψ, so every constant below is stated after
//! dividing by the single-shell reference ‖F_{0,r}‖_p^p / r^{d−1}, which does not depend on r.
//! Values are the worst measured ratio on the seeded calibration runs plus 20% headroom.

use super::families::StressFamily;
use super::report::InequalityReport;
use crate::density::{density_decompose, support_measure, verify_stratification, Member};
use crate::kernels::{gram_entry, shell_profile, supports_disjoint, Bump};
use crate::specfun::lp_norm_radial;
use crate::{Result, RmlError};
use rand::Rng;

/// |⟨F, F′⟩|(1 + |y − y′| + |r − r′|)^{(d−1)/2} / (r r′)^{(d−1)/2}, normalized. The diagonal gives 1.
pub const GRAM_DECAY: f64 = 1.2;
/// Support measure over u^{−1} 2^{k(d−1)} #ℰ_k with half-width 0.2 (worst measured 345.6).
pub const SUPPORT: f64 = 420.0;
/// Main inequality, normalized (worst measured 3.37).
pub const MAIN: f64 = 4.1;
/// L² density bound, normalized with p = 2 (worst measured 3.10).
pub const L2_DENSITY: f64 = 3.8;
/// Per-level L^p bound, normalized (worst measured 3.16).
pub const LP_BOUND: f64 = 3.8;

/// ‖F_{0,r}‖_p^p / r^{d−1}.
pub fn single_shell_power(bump: &Bump, p: f64) -> Result<f64> {
    let r = 8.0;
    let prof = shell_profile(bump, r)?;
    Ok(lp_norm_radial(&prof, p)?.powf(p) / r.powi(bump.spec.dim as i32 - 1))
}

/// Worst normalized ratio of a report (over its sweep if present), recorded in meta and
/// flagged against `constant`.
pub fn apply_frozen(rep: InequalityReport, bump: &Bump, p: f64, constant: f64) -> Result<InequalityReport> {
    let reference = single_shell_power(bump, p)?;
    let worst = if rep.sweep.is_empty() { rep.ratio } else { rep.sweep.iter().map(|s| s.ratio).fold(0.0, f64::max) };
    let normalized = worst / reference;
    let mut rep = rep.with_meta("shell_reference", reference).with_meta("normalized_ratio", normalized).with_meta("frozen_constant", constant);
    if normalized > constant {
        rep.flag(format!("normalized ratio {normalized:.4} exceeds frozen constant {constant}"));
    }
    Ok(rep)
}

/// Gram decay over `pairs` random pairs with radii in [1, 64], plus exact vanishing on
/// support-disjoint pairs. lhs is the worst normalized ratio, rhs the frozen constant.
pub fn gram_decay_report(bump: &Bump, pairs: usize, seed: u64) -> Result<InequalityReport> {
    let d = bump.spec.dim;
    let e = (d as f64 - 1.0) / 2.0;
    let reference = single_shell_power(bump, 2.0)?;
    let mut rng = crate::rng::stream(seed, 0x33);
    let (mut worst, mut disjoint, mut nonzero) = (0.0f64, 0usize, 0usize);
    for _ in 0..pairs {
        let r1 = 1.0 + 63.0 * rng.gen::<f64>();
        let r2 = 1.0 + 63.0 * rng.gen::<f64>();
        let dy = 40.0 * rng.gen::<f64>();
        let mut dir: Vec<f64> = (0..d).map(|_| rng.gen::<f64>() - 0.5).collect();
        let n = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-12);
        dir.iter_mut().for_each(|v| *v *= dy / n);
        let a = Member::new(vec![0.0; d], r1);
        let b = Member::new(dir, r2);
        let g = gram_entry(&a, &b, bump)?;
        if supports_disjoint(&a, &b) {
            disjoint += 1;
            if g != 0.0 {
                nonzero += 1;
            }
        }
        let ratio = g.abs() * (1.0 + dy + (r1 - r2).abs()).powf(e) / (r1 * r2).powf(e) / reference;
        worst = worst.max(ratio);
    }
    let mut rep = InequalityReport::new("gram-3.3", format!("{pairs} random pairs, d={d}, r in [1,64]"), worst, None, GRAM_DECAY)
        .with_meta("shell_reference", reference)
        .with_meta("disjoint_pairs", disjoint)
        .with_meta("disjoint_nonzero", nonzero)
        .with_meta("seed", seed);
    if nonzero > 0 {
        rep.flag(format!("{nonzero} support-disjoint pairs have nonzero Gram entries"));
    }
    if worst > GRAM_DECAY {
        rep.flag(format!("decay ratio {worst:.4} exceeds frozen constant {GRAM_DECAY}"));
    }
    Ok(rep)
}

/// Decomposes a stress family, verifies its invariants (an `Invariant` error if any fails)
/// and reports the worst normalized support measure over its strata against [`SUPPORT`].
pub fn support_report(kind: StressFamily, d: usize, n: usize, k: u32, samples: usize, seed: u64) -> Result<InequalityReport> {
    let fam = kind.generate(d, n, k, seed)?;
    let st = density_decompose(&fam);
    let witnesses = verify_stratification(&fam, &st);
    if let Some(w) = witnesses.iter().find(|w| !w.all_hold()) {
        return Err(RmlError::Invariant(format!("stratum (k={}, nu={}) violates the decomposition invariants", w.k, w.nu)));
    }
    let mut worst = 0.0f64;
    let mut strata = 0usize;
    for s in st.strata.iter().filter(|s| !s.members.is_empty()) {
        strata += 1;
        let m = support_measure(&fam, &st, s.k, s.nu, 0.2, samples, seed)?;
        worst = worst.max(m.normalized);
    }
    let mut rep = InequalityReport::new("support-3.7", format!("{} family, {n} members, d={d}, k={k}", kind.name()), worst, None, SUPPORT)
        .with_meta("strata", strata)
        .with_meta("invariants", "hold")
        .with_meta("seed", seed);
    if worst > SUPPORT {
        rep.flag(format!("support ratio {worst:.3} exceeds frozen constant {SUPPORT}"));
    }
    Ok(rep)
}
