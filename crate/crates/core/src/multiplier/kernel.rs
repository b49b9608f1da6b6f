//! Convolution kernels of radial multipliers: synthesis, algebraic tail fits and L^p,
//! L^{p,ν} norms with tail extrapolation.

use super::family::{Break, MultiplierKind, MultiplierSpec};
use crate::specfun::exponents::p_d_f64;
use crate::specfun::hankel::{hankel_forward_at, hankel_sum, radial_coeffs};
use crate::specfun::{linspace, lorentz_norm, lp_norm_radial, sphere_area, BdKernel, LorentzExponents, RadialProfile, Rule};
use crate::stats::linear_fit;
use crate::{Result, RmlError, C64};
use serde::{Deserialize, Serialize};

/// Geometric refinements toward an algebraic singularity.
const GRADED_LEVELS: usize = 30;
const GRADED_ORDER: usize = 12;
const PANEL_ORDER: usize = 16;
/// Output samples per shortest period of the synthesized kernel.
const SAMPLES_PER_PERIOD: f64 = 16.0;
/// Local maxima below this fraction of the peak are treated as rounding noise.
const NOISE_FLOOR: f64 = 1e-12;
/// RMS log-residual above which an envelope is not considered algebraic.
const MAX_FIT_RESIDUAL: f64 = 0.35;

/// Controls of kernel synthesis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelOptions {
    /// Kernels are computed on [0, r_max] in units of the inverse support scale.
    pub r_max: f64,
}

impl Default for KernelOptions {
    fn default() -> Self {
        Self { r_max: 64.0 }
    }
}

/// Gauss rule on [lo, hi] with breakpoints, graded toward singular ones.
pub(crate) fn spectral_rule(lo: f64, hi: f64, breaks: &[Break], max_len: f64) -> Rule {
    let mut pts: Vec<Break> = vec![Break { at: lo, singular: false, smooth: true }];
    pts.extend(breaks.iter().copied().filter(|b| b.at > lo && b.at < hi));
    pts.push(Break { at: hi, singular: false, smooth: true });
    for b in breaks {
        if (b.at - lo).abs() <= 1e-14 * lo.abs() {
            pts[0].singular |= b.singular;
        }
        if (b.at - hi).abs() <= 1e-14 * hi.abs() {
            pts.last_mut().expect("nonempty").singular |= b.singular;
        }
    }
    let mut rule = Rule::default();
    for w in pts.windows(2) {
        let (a, b) = (w[0].at, w[1].at);
        if !(b > a) {
            continue;
        }
        let pieces = ((b - a) / max_len).ceil().max(1.0) as usize;
        let h = (b - a) / pieces as f64;
        for i in 0..pieces {
            let (pa, pb) = (a + i as f64 * h, a + (i + 1) as f64 * h);
            let left = i == 0 && w[0].singular;
            let right = i + 1 == pieces && w[1].singular;
            if !(left || right) {
                rule.push_panel(pa, pb, PANEL_ORDER);
                continue;
            }
            let mut cuts = vec![pa, pb];
            let mut g = 0.5 * (pb - pa);
            for _ in 0..GRADED_LEVELS {
                if left {
                    cuts.push(pa + g);
                }
                if right {
                    cuts.push(pb - g);
                }
                g *= 0.5;
            }
            cuts.sort_by(f64::total_cmp);
            cuts.dedup();
            for c in cuts.windows(2) {
                rule.push_panel(c[0], c[1], GRADED_ORDER);
            }
        }
    }
    rule
}

/// Radial inverse transform of g sampled at the nodes of `rule`, on [0, r_max] with
/// spacing resolving frequencies up to `zmax`.
pub(crate) fn synthesize(dim: usize, rule: &Rule, values: &[C64], zmax: f64, r_max: f64) -> Result<RadialProfile> {
    let h = 1.0 / (SAMPLES_PER_PERIOD * zmax);
    let n = (r_max / h).ceil() as usize + 1;
    let out = linspace(0.0, h * (n - 1) as f64, n);
    let kernel = BdKernel::new(dim)?;
    let coeffs = radial_coeffs(dim, rule, values);
    let vals = hankel_sum(&kernel, &rule.nodes, &coeffs, &out);
    RadialProfile::new(dim, out, vals, None)
}

/// Least-squares fit of log|K| ≈ log A + e·log ρ to the block-maximum envelope of |K|.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    /// Exponent over the last two octaves [R/4, R] of data above the noise floor.
    pub exponent: f64,
    /// Exponent over the last octave [R/2, R] alone; more negative than `exponent` for
    /// kernels decaying faster than any power.
    pub last_octave_exponent: f64,
    pub amplitude: f64,
    /// RMS residual of the log-log fit.
    pub residual: f64,
    pub fit_from: f64,
    pub fit_to: f64,
    pub blocks: usize,
    /// The kernel reached rounding noise before the end of the grid; the exponent then only
    /// describes the decay down to the noise floor.
    pub noise_limited: bool,
}

impl TailFit {
    /// The envelope is well described by a single power.
    pub fn algebraic(&self) -> bool {
        self.residual <= MAX_FIT_RESIDUAL
    }

    /// Whether ρ^e is p-integrable against ρ^{d−1} at infinity. A non-algebraic envelope
    /// still decides finiteness when its fitted decay clears the threshold by 2; otherwise
    /// the decision is left open.
    pub fn p_integrable(&self, p: f64, d: usize) -> Option<bool> {
        let margin = self.exponent * p + d as f64;
        if self.noise_limited || (!self.algebraic() && margin < -2.0) {
            Some(true)
        } else if self.algebraic() {
            Some(margin < 0.0)
        } else {
            None
        }
    }
}

/// Maxima of |K| over consecutive blocks of length `len` inside [from, to], as (ρ, max).
fn block_maxima(g: &[f64], a: &[f64], from: f64, to: f64, len: f64) -> Vec<(f64, f64)> {
    let nb = ((to - from) / len).floor().max(1.0) as usize;
    let len = (to - from) / nb as f64;
    let mut out = vec![(0.0, 0.0); nb];
    for (r, v) in g.iter().zip(a) {
        if *r < from || *r > to {
            continue;
        }
        let b = (((r - from) / len) as usize).min(nb - 1);
        if *v > out[b].1 {
            out[b] = (*r, *v);
        }
    }
    out.into_iter().filter(|(_, v)| *v > 0.0).collect()
}

fn loglog_fit(pts: &[(f64, f64)]) -> (f64, f64, f64) {
    let x: Vec<f64> = pts.iter().map(|(r, _)| r.ln()).collect();
    let y: Vec<f64> = pts.iter().map(|(_, v)| v.ln()).collect();
    let (e, c) = linear_fit(&x, &y);
    let res = (x.iter().zip(&y).map(|(xi, yi)| (yi - c - e * xi).powi(2)).sum::<f64>() / x.len() as f64).sqrt();
    (e, c, res)
}

/// Envelope fit over the last two dyadic octaves with data above the noise floor; the
/// envelope is the maximum of |K| over blocks of length max(R/32, 1).
pub fn fit_tail(k: &RadialProfile) -> Result<TailFit> {
    let g = k.grid();
    let a: Vec<f64> = k.values().iter().map(|v| v.norm()).collect();
    let peak = a.iter().fold(0.0f64, |m, x| m.max(*x));
    if peak == 0.0 {
        return Err(RmlError::Numerical("tail fit of the zero kernel".into()));
    }
    let r_max = k.rmax();
    let last = (1..a.len() - 1)
        .rev()
        .find(|&i| a[i] >= a[i - 1] && a[i] >= a[i + 1] && a[i] > NOISE_FLOOR * peak)
        .map_or(0.0, |i| g[i]);
    let noise_limited = last < 0.5 * r_max;
    let end = if noise_limited { last } else { r_max };
    let from = 0.25 * end;
    let len = (end / 32.0).max(1.0);
    let pts = block_maxima(g, &a, from, end, len);
    if pts.len() < 6 {
        return Err(RmlError::Numerical(format!(
            "tail fit needs at least 6 envelope blocks in [{from:.3}, {end:.3}], found {}",
            pts.len()
        )));
    }
    let (e, c, residual) = loglog_fit(&pts);
    let half: Vec<(f64, f64)> = pts.iter().copied().filter(|(r, _)| *r >= 0.5 * end).collect();
    let last_octave_exponent = if half.len() >= 3 { loglog_fit(&half).0 } else { e };
    Ok(TailFit {
        exponent: e,
        last_octave_exponent,
        amplitude: c.exp(),
        residual,
        fit_from: from,
        fit_to: end,
        blocks: pts.len(),
        noise_limited,
    })
}

/// ‖K‖_p of a radial kernel with the tail decided by envelope fitting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KernelLp {
    /// Extrapolated norm; +∞ when the fitted tail is not p-integrable.
    pub norm: f64,
    /// Norm of the computed part on [0, r_max] alone.
    pub truncated: f64,
    pub tail: Option<TailFit>,
    /// None when the tail fit failed; then the norm lies in [truncated, ∞).
    pub finite: Option<bool>,
    /// ‖K χ_{|x|≤1}‖_1.
    pub k0_l1: f64,
    pub diagnostics: Vec<String>,
}

/// L^p norm of a computed kernel profile with algebraic tail extrapolation.
pub fn kernel_lp_of(k: &RadialProfile, p: f64) -> Result<KernelLp> {
    let truncated = lp_norm_radial(k, p)?;
    let k0_l1 = {
        let g = k.grid();
        let cut = g.iter().position(|r| *r >= 1.0).unwrap_or(g.len() - 1);
        let inner = RadialProfile::new(k.dim(), g[..=cut].to_vec(), k.values()[..=cut].to_vec(), None)?;
        lp_norm_radial(&inner, 1.0)?
    };
    let mut diagnostics = Vec::new();
    if k.max_abs() == 0.0 {
        return Ok(KernelLp { norm: 0.0, truncated, tail: None, finite: Some(true), k0_l1, diagnostics });
    }
    let fit = match fit_tail(k) {
        Ok(f) => f,
        Err(e) => {
            diagnostics.push(format!("tail fit failed: {e}; norm in [{truncated:.6e}, inf)"));
            return Ok(KernelLp { norm: f64::INFINITY, truncated, tail: None, finite: None, k0_l1, diagnostics });
        }
    };
    let finite = fit.p_integrable(p, k.dim());
    let norm = match finite {
        Some(true) if fit.noise_limited => {
            diagnostics.push(format!("kernel below rounding noise beyond {:.3}", fit.fit_to));
            truncated
        }
        Some(true) if !fit.algebraic() => {
            diagnostics.push(format!("decay faster than any fitted power beyond {:.3}; tail neglected", fit.fit_to));
            truncated
        }
        Some(true) => match k.clone().with_tail(Some(fit.exponent)) {
            Ok(ext) => lp_norm_radial(&ext, p)?,
            Err(e) => {
                diagnostics.push(format!("tail extrapolation rejected: {e}; tail neglected"));
                truncated
            }
        },
        Some(false) => f64::INFINITY,
        None => {
            diagnostics.push(format!(
                "envelope is not algebraic on [{:.3}, {:.3}] (log residual {:.3}); norm in [{truncated:.6e}, inf)",
                fit.fit_from, fit.fit_to, fit.residual
            ));
            f64::INFINITY
        }
    };
    Ok(KernelLp { norm, truncated, tail: Some(fit), finite, k0_l1, diagnostics })
}

/// Kernel 𝓕^{−1}m of a multiplier compactly supported away from the origin.
pub fn multiplier_kernel(m: &MultiplierSpec, opts: KernelOptions) -> Result<RadialProfile> {
    if !m.compact_away_from_zero() {
        return Err(RmlError::Domain(format!("{} is not compactly supported away from 0", m.label())));
    }
    let (a, b) = m.support();
    let r_max = opts.r_max;
    let rule = spectral_rule(a, b, &m.breaks(), 2.0 / r_max);
    let vals: Vec<C64> = rule.nodes.iter().map(|z| m.eval(*z)).collect();
    synthesize(m.dim, &rule, &vals, b, r_max)
}

/// ‖𝓕^{−1}m‖_p and its finiteness for m compactly supported away from 0.
pub fn kernel_lp_criterion(m: &MultiplierSpec, opts: KernelOptions) -> Result<KernelLp> {
    let k = multiplier_kernel(m, opts)?;
    let mut r = kernel_lp_of(&k, m.p)?;
    if m.is_smooth() && r.finite != Some(true) {
        r.finite = Some(true);
        r.norm = r.truncated;
        r.diagnostics.push(format!("smooth multiplier: Schwartz kernel, tail beyond r={:.1} neglected", k.rmax()));
    }
    if m.p >= p_d_f64(m.dim) || m.dim < 4 {
        r.diagnostics.push(format!("outside proven range: d={}, p={} (p_d={:.4})", m.dim, m.p, p_d_f64(m.dim)));
    }
    Ok(r)
}

/// Finite / infinite decision for a power tail ρ^e in L^{p,ν}.
fn lorentz_tail_finite(e: f64, d: f64, p: f64, nu: f64) -> bool {
    let s = e + d / p;
    if nu.is_infinite() {
        s <= 1e-12
    } else {
        s < -1e-12
    }
}

/// Lorentz quasi-norm of a radial profile through its distribution function, with the
/// last octave continued self-similarly under the declared or fitted tail exponent.
pub fn radial_lorentz(k: &RadialProfile, tail: Option<f64>, lp: LorentzExponents) -> Result<f64> {
    let d = k.dim();
    let g = k.grid();
    let start = if g.len() >= 2 && g[0] <= 0.5 * (g[1] - g[0]) { 0.0 } else { g[0] };
    let mut breaks = vec![start];
    breaks.extend(g.iter().copied().filter(|r| *r > start));
    let rule = Rule::composite(&breaks, f64::INFINITY, 8);
    let area = sphere_area(d);
    let mut samples: Vec<(f64, f64)> = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(r, w)| (k.eval(*r).norm(), area * w * r.powi(d as i32 - 1)))
        .filter(|(_, w)| *w > 0.0)
        .collect();
    if let Some(e) = tail {
        let df = d as f64;
        if !lorentz_tail_finite(e, df, lp.p, lp.nu) {
            return Ok(f64::INFINITY);
        }
        let r = k.rmax();
        let octave: Vec<(f64, f64)> = rule
            .nodes
            .iter()
            .zip(samples.iter())
            .filter(|(x, _)| **x >= 0.5 * r)
            .map(|(_, s)| *s)
            .collect();
        // Each further octave scales values by 2^e and measure by 2^d.
        let s = e + df / lp.p;
        let copies = if s.abs() < 1e-12 { 8 } else { ((-40.0 / s).ceil() as usize).clamp(8, 400) };
        for j in 1..=copies {
            let (fv, fw) = (2f64.powf(e * j as f64), 2f64.powf(df * j as f64));
            samples.extend(octave.iter().map(|(v, w)| (v * fv, w * fw)));
        }
    }
    samples.retain(|(v, _)| *v > 0.0);
    if samples.is_empty() {
        return Ok(0.0);
    }
    if lp.nu.is_infinite() {
        // sup_t t^{1/p} f*(t) with each node's measure centered on its value: the samples
        // stand for cells of a continuous function, and the cell edge would bias by O(h).
        samples.sort_by(|a, b| b.0.total_cmp(&a.0));
        let mut cum = 0.0;
        let mut best = 0.0f64;
        for (v, w) in &samples {
            best = best.max(v * (cum + 0.5 * w).powf(1.0 / lp.p));
            cum += w;
        }
        return Ok(best);
    }
    lorentz_norm(&samples, lp)
}

/// Both operator-norm characterizations for a compactly supported multiplier:
/// ‖𝓕^{−1}m‖_{L^{p,ν}} and ‖𝓕^{−1}m‖_{L^p}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LorentzReport {
    pub p: f64,
    pub nu: f64,
    pub lp: f64,
    pub lpnu: f64,
    pub lp_finite: bool,
    pub lpnu_finite: bool,
    pub tail_exponent: Option<f64>,
    pub diagnostics: Vec<String>,
}

/// Lorentz and Lebesgue norms of a profile whose tail exponent is known or fitted.
pub fn lorentz_pair(k: &RadialProfile, tail: Option<f64>, p: f64, nu: f64) -> Result<LorentzReport> {
    let lpnu = radial_lorentz(k, tail, LorentzExponents::new(p, nu)?)?;
    let lp = radial_lorentz(k, tail, LorentzExponents::new(p, p)?)?;
    Ok(LorentzReport {
        p,
        nu,
        lp,
        lpnu,
        lp_finite: lp.is_finite(),
        lpnu_finite: lpnu.is_finite(),
        tail_exponent: tail,
        diagnostics: Vec::new(),
    })
}

pub fn lorentz_criteria(m: &MultiplierSpec, nu: f64, opts: KernelOptions) -> Result<LorentzReport> {
    let k = multiplier_kernel(m, opts)?;
    let mut diagnostics = Vec::new();
    let tail = match fit_tail(&k) {
        Ok(f) if f.noise_limited => None,
        Ok(f) if f.algebraic() || f.p_integrable(m.p, m.dim) == Some(true) => Some(f.exponent),
        Ok(f) => {
            diagnostics.push(format!("envelope is not algebraic (log residual {:.3}); values are truncated lower bounds", f.residual));
            None
        }
        Err(e) => {
            diagnostics.push(format!("tail fit failed: {e}; values are truncated lower bounds"));
            None
        }
    };
    let mut r = lorentz_pair(&k, tail, m.p, nu)?;
    r.diagnostics = diagnostics;
    Ok(r)
}

/// Output radius and resolution of a synthesized T_m f.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApplyOptions {
    pub r_max: f64,
    /// Frequency cap for multipliers without bounded support.
    pub zeta_cap: f64,
}

impl Default for ApplyOptions {
    fn default() -> Self {
        Self { r_max: 64.0, zeta_cap: 16.0 }
    }
}

/// T_m f for radial f: inverse transform of m · f̂ (f̂ evaluated at the quadrature nodes).
pub fn apply_radial(m: &MultiplierSpec, f: &RadialProfile, opts: ApplyOptions) -> Result<RadialProfile> {
    if f.dim() != m.dim {
        return Err(RmlError::Usage(format!("profile dim {} differs from multiplier dim {}", f.dim(), m.dim)));
    }
    if let MultiplierKind::Constant { c } = m.kind {
        return Ok(f.map(|_, v| v * c));
    }
    let (a, b) = m.support();
    let b = b.min(opts.zeta_cap);
    if !(b > a) {
        return RadialProfile::new(m.dim, vec![0.0, opts.r_max], vec![C64::new(0.0, 0.0); 2], None);
    }
    let r_out = opts.r_max.max(f.rmax());
    let rule = spectral_rule(a, b, &m.breaks(), 2.0 / (r_out + f.rmax()));
    let fhat = hankel_forward_at(f, &rule.nodes)?;
    let vals: Vec<C64> = rule.nodes.iter().zip(&fhat).map(|(z, v)| m.eval(*z) * v).collect();
    synthesize(m.dim, &rule, &vals, b, r_out)
}
