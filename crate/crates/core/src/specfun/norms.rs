//! L^p norms of radial functions and Lorentz quasi-norms of discrete measures.

use super::bessel::sphere_area;
use super::profile::RadialProfile;
use super::quad::Rule;
use crate::{Result, RmlError};

/// ∫ |f(ρ)|^p ρ^{d−1} dρ over [a, b] using the profile interpolant.
pub fn radial_power_integral(f: &RadialProfile, p: f64, a: f64, b: f64) -> f64 {
    let g = f.grid();
    let d = f.dim() as i32;
    let mut breaks: Vec<f64> = Vec::with_capacity(g.len() + 2);
    breaks.push(a);
    breaks.extend(g.iter().copied().filter(|r| *r > a && *r < b));
    breaks.push(b);
    let rule = Rule::composite(&breaks, f64::INFINITY, 8);
    rule.integrate(|r| f.eval(r).norm().powf(p) * r.powi(d - 1))
}

/// (|S^{d−1}| ∫ |f(ρ)|^p ρ^{d−1} dρ)^{1/p}, the L^p(ℝ^d) norm of the radial extension.
///
/// With a declared tail exponent e the last octave of samples is continued self-similarly:
/// the octave [R/q^{j+1}, R/q^j] ↦ [Rq^{j}, Rq^{j+1}] scaled by q^{j(ep+d)}. Returns +∞ when
/// ep + d ≥ 0 and the last octave carries mass.
pub fn lp_norm_radial(f: &RadialProfile, p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(RmlError::Domain(format!("L^p norm needs p > 0, got {p}")));
    }
    let g = f.grid();
    let start = if g.len() >= 2 && g[0] > 0.0 && g[0] <= 0.5 * (g[1] - g[0]) { 0.0 } else { g[0] };
    let r = f.rmax();
    let mut total = radial_power_integral(f, p, start, r);
    if let Some(e) = f.tail() {
        let a = start.max(0.5 * r);
        if a < r {
            let last = radial_power_integral(f, p, a, r);
            if last > 0.0 {
                let expo = e * p + f.dim() as f64;
                if expo >= 0.0 {
                    return Ok(f64::INFINITY);
                }
                let g = (r / a).powf(expo);
                total += last * g / (1.0 - g);
            }
        }
    }
    Ok((sphere_area(f.dim()) * total).powf(1.0 / p))
}

/// Exponents (p, ν) of a Lorentz space L^{p,ν}; ν = ∞ allowed.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LorentzExponents {
    pub p: f64,
    pub nu: f64,
}

impl LorentzExponents {
    pub fn new(p: f64, nu: f64) -> Result<Self> {
        if !(p > 0.0 && p.is_finite()) {
            return Err(RmlError::Domain(format!("Lorentz p must be in (0, inf), got {p}")));
        }
        if !(nu > 0.0) {
            return Err(RmlError::Domain(format!("Lorentz nu must be in (0, inf], got {nu}")));
        }
        Ok(Self { p, nu })
    }

    /// The range p ≤ ν ≤ ∞ in which L^{p,ν} estimates for positive operators interpolate.
    pub fn in_nested_range(&self) -> bool {
        self.p <= self.nu
    }
}

/// L^{p,ν} quasi-norm of the discrete measure Σ w_i δ with values v_i:
/// ((ν/p) ∫₀^∞ (t^{1/p} f*(t))^ν dt/t)^{1/ν}, and sup_t t^{1/p} f*(t) for ν = ∞.
/// The factor (ν/p) makes ν = p reproduce the weighted ℓ^p norm exactly.
pub fn lorentz_norm(samples: &[(f64, f64)], e: LorentzExponents) -> Result<f64> {
    if samples.iter().any(|(v, w)| !(w.is_finite() && *w > 0.0) || !v.is_finite()) {
        return Err(RmlError::Domain("Lorentz samples need finite values and positive weights".into()));
    }
    let mut s: Vec<(f64, f64)> = samples.iter().map(|(v, w)| (v.abs(), *w)).collect();
    s.sort_by(|a, b| b.0.partial_cmp(&a.0).expect("finite values"));
    let (p, nu) = (e.p, e.nu);
    let mut cum = 0.0;
    if nu.is_infinite() {
        let mut best: f64 = 0.0;
        for (v, w) in &s {
            cum += w;
            best = best.max(v * cum.powf(1.0 / p));
        }
        return Ok(best);
    }
    if nu == p {
        let sum: f64 = s.iter().map(|(v, w)| v.powf(p) * w).sum();
        return Ok(sum.powf(1.0 / p));
    }
    let r = nu / p;
    let mut sum = 0.0;
    let mut prev = 0.0f64;
    for (v, w) in &s {
        cum += w;
        let next = cum.powf(r);
        sum += v.powf(nu) * (next - prev);
        prev = next;
    }
    Ok(sum.powf(1.0 / nu))
}
