//! Radial multiplier families and the test functions η used by the dilation criterion.

use crate::dyadic::cutoff;
use crate::kernels::bump::{BaseProfile, BumpSpec};
use crate::specfun::{linspace, RadialProfile};
use crate::{Result, RmlError, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Shape of a radial multiplier, as a function of the radial frequency ρ = |ξ|.
#[derive(Debug, Clone, PartialEq)]
pub enum MultiplierKind {
    /// (1 − ρ²)^δ_+.
    BochnerRiesz { delta: f64 },
    /// Annulus lo < ρ < hi with smooth ramps of width h at both edges; h = 0 is the
    /// indicator.
    SmoothAnnulus { lo: f64, hi: f64, h: f64 },
    /// Sampled profile vanishing outside [rho_min, rho_max], rho_min > 0.
    CompactProfile { profile: RadialProfile, rho_min: f64, rho_max: f64 },
    /// Arbitrary samples; a declared tail exponent continues the profile as ρ^e.
    UserSamples { profile: RadialProfile },
    /// m ≡ c.
    Constant { c: f64 },
}

/// A radial multiplier m(ξ) = kind(scale·|ξ|) in dimension d, examined on L^p.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiplierSpec {
    pub kind: MultiplierKind,
    pub dim: usize,
    pub p: f64,
    pub scale: f64,
}

/// Points where the multiplier is not smooth, in units of the base variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Break {
    pub at: f64,
    /// Algebraic singularity needing graded quadrature (as opposed to a plain jump or kink).
    pub singular: bool,
    /// The multiplier is C^∞ across this point; the break only helps the quadrature.
    pub smooth: bool,
}

impl MultiplierSpec {
    pub fn new(kind: MultiplierKind, dim: usize, p: f64) -> Result<Self> {
        if dim < 2 {
            return Err(RmlError::Domain(format!("multipliers need dim >= 2, got {dim}")));
        }
        if !(p >= 1.0 && p.is_finite()) {
            return Err(RmlError::Domain(format!("exponent p must be in [1, inf), got {p}")));
        }
        match &kind {
            MultiplierKind::BochnerRiesz { delta } if !(*delta > 0.0) => {
                return Err(RmlError::Domain(format!("Bochner-Riesz needs delta > 0, got {delta}")));
            }
            MultiplierKind::SmoothAnnulus { lo, hi, h } => {
                if !(*lo > 0.0 && hi > lo && *h >= 0.0 && 2.0 * h <= hi - lo) {
                    return Err(RmlError::Domain(format!(
                        "annulus needs 0 < lo < hi and 0 <= 2h <= hi - lo, got ({lo}, {hi}, {h})"
                    )));
                }
            }
            MultiplierKind::CompactProfile { profile, rho_min, rho_max } => {
                if !(*rho_min > 0.0 && rho_max > rho_min) {
                    return Err(RmlError::Domain(format!(
                        "compact profile needs 0 < rho_min < rho_max, got [{rho_min}, {rho_max}]"
                    )));
                }
                let peak = profile.max_abs();
                let leak = profile
                    .grid()
                    .iter()
                    .zip(profile.values())
                    .filter(|(r, _)| **r < *rho_min || **r > *rho_max)
                    .fold(0.0f64, |m, (_, v)| m.max(v.norm()));
                if leak > 1e-12 * peak || profile.tail().is_some() {
                    return Err(RmlError::Domain(format!(
                        "profile does not vanish outside [{rho_min}, {rho_max}] (max {leak:.3e})"
                    )));
                }
            }
            MultiplierKind::UserSamples { profile } if profile.dim() != dim => {
                return Err(RmlError::Usage(format!("profile dim {} differs from {dim}", profile.dim())));
            }
            _ => {}
        }
        Ok(Self { kind, dim, p, scale: 1.0 })
    }

    pub fn bochner_riesz(delta: f64, dim: usize, p: f64) -> Result<Self> {
        Self::new(MultiplierKind::BochnerRiesz { delta }, dim, p)
    }

    pub fn annulus(lo: f64, hi: f64, h: f64, dim: usize, p: f64) -> Result<Self> {
        Self::new(MultiplierKind::SmoothAnnulus { lo, hi, h }, dim, p)
    }

    pub fn constant(c: f64, dim: usize, p: f64) -> Result<Self> {
        Self::new(MultiplierKind::Constant { c }, dim, p)
    }

    /// m(λ·).
    pub fn dilate(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(RmlError::Domain(format!("dilation must be positive, got {lambda}")));
        }
        Ok(Self { scale: self.scale * lambda, ..self.clone() })
    }

    /// Value of the base shape at u = scale·|ξ|.
    pub fn base(&self, u: f64) -> C64 {
        match &self.kind {
            MultiplierKind::BochnerRiesz { delta } => {
                let v = 1.0 - u * u;
                C64::new(if v > 0.0 { v.powf(*delta) } else { 0.0 }, 0.0)
            }
            MultiplierKind::SmoothAnnulus { lo, hi, h } => C64::new(annulus_value(*lo, *hi, *h, u), 0.0),
            MultiplierKind::CompactProfile { profile, rho_min, rho_max } => {
                if u < *rho_min || u > *rho_max {
                    C64::new(0.0, 0.0)
                } else {
                    profile.eval(u)
                }
            }
            MultiplierKind::UserSamples { profile } => match profile.tail() {
                Some(e) if u > profile.rmax() => {
                    let r = profile.rmax();
                    profile.values().last().copied().unwrap_or_default() * (u / r).powf(e)
                }
                _ => profile.eval(u),
            },
            MultiplierKind::Constant { c } => C64::new(*c, 0.0),
        }
    }

    /// m(ρ) at radial frequency ρ.
    pub fn eval(&self, rho: f64) -> C64 {
        self.base(self.scale * rho)
    }

    /// Closure of {ρ : m(ρ) ≠ 0} as [lo, hi]; hi may be infinite.
    pub fn support(&self) -> (f64, f64) {
        let (a, b) = match &self.kind {
            MultiplierKind::BochnerRiesz { .. } => (0.0, 1.0),
            MultiplierKind::SmoothAnnulus { lo, hi, .. } => (*lo, *hi),
            MultiplierKind::CompactProfile { rho_min, rho_max, .. } => (*rho_min, *rho_max),
            MultiplierKind::UserSamples { profile } => {
                let g = profile.grid();
                let lo = if g[0] <= 0.5 * g.get(1).map_or(1.0, |x| x - g[0]) { 0.0 } else { g[0] };
                (lo, if profile.tail().is_some() { f64::INFINITY } else { profile.rmax() })
            }
            MultiplierKind::Constant { c } => {
                if *c == 0.0 {
                    (0.0, 0.0)
                } else {
                    (0.0, f64::INFINITY)
                }
            }
        };
        (a / self.scale, b / self.scale)
    }

    /// True when supp m is a compact subset of ℝ^d \ {0}.
    pub fn compact_away_from_zero(&self) -> bool {
        let (a, b) = self.support();
        a > 0.0 && b.is_finite()
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.kind, MultiplierKind::Constant { c } if c == 0.0)
    }

    /// Nonsmooth points of m in radial frequency.
    pub fn breaks(&self) -> Vec<Break> {
        let plain = |at: f64| Break { at, singular: false, smooth: false };
        let mut out = match &self.kind {
            MultiplierKind::BochnerRiesz { delta } => {
                vec![Break { at: 1.0, singular: delta.fract() != 0.0 || *delta < 1.0, smooth: false }]
            }
            MultiplierKind::SmoothAnnulus { lo, hi, h } => {
                if *h == 0.0 {
                    vec![plain(*lo), plain(*hi)]
                } else {
                    [*lo, lo + h, hi - h, *hi].map(|at| Break { at, singular: false, smooth: true }).to_vec()
                }
            }
            MultiplierKind::CompactProfile { profile, rho_min, rho_max } => {
                let mut v: Vec<Break> = profile.grid().iter().step_by(8).map(|r| plain(*r)).collect();
                v.push(plain(*rho_min));
                v.push(plain(*rho_max));
                v
            }
            MultiplierKind::UserSamples { profile } => {
                let mut v: Vec<Break> = profile.grid().iter().step_by(8).map(|r| plain(*r)).collect();
                v.push(plain(profile.rmax()));
                v
            }
            MultiplierKind::Constant { .. } => Vec::new(),
        };
        for b in out.iter_mut() {
            b.at /= self.scale;
        }
        out.sort_by(|a, b| a.at.total_cmp(&b.at));
        out.dedup_by(|a, b| {
            let same = (a.at - b.at).abs() <= 1e-14 * b.at.abs();
            if same {
                b.singular |= a.singular;
                b.smooth &= a.smooth;
            }
            same
        });
        out
    }

    /// m is C^∞ on ℝ^d \ {0} including its support ends, so 𝓕^{−1}m is a Schwartz function
    /// whenever m is also compactly supported away from 0.
    pub fn is_smooth(&self) -> bool {
        self.breaks().iter().all(|b| b.smooth)
    }

    /// A scale t at which m(t·) is nontrivial on the annulus 1/2 < |ζ| < 2.
    pub fn natural_scale(&self) -> f64 {
        let (a, b) = self.support();
        match (a > 0.0, b.is_finite()) {
            (true, true) => (a * b).sqrt(),
            (false, true) if b > 0.0 => b,
            (true, false) => a,
            _ => 1.0,
        }
    }

    /// Short label for reports.
    pub fn label(&self) -> String {
        let base = match &self.kind {
            MultiplierKind::BochnerRiesz { delta } => format!("bochner_riesz(delta={delta})"),
            MultiplierKind::SmoothAnnulus { lo, hi, h } => format!("annulus({lo},{hi},h={h})"),
            MultiplierKind::CompactProfile { rho_min, rho_max, .. } => {
                format!("compact_profile[{rho_min},{rho_max}]")
            }
            MultiplierKind::UserSamples { profile } => format!("user_samples(n={})", profile.len()),
            MultiplierKind::Constant { c } => format!("constant({c})"),
        };
        if self.scale == 1.0 {
            base
        } else {
            format!("{base} dilated by {}", self.scale)
        }
    }
}

/// Smooth step S: 0 for x ≤ 0, 1 for x ≥ 1, C^∞.
fn smooth_step(x: f64) -> f64 {
    1.0 - cutoff(1.0 + x.clamp(0.0, 1.0))
}

fn annulus_value(lo: f64, hi: f64, h: f64, u: f64) -> f64 {
    if u <= lo || u >= hi {
        return 0.0;
    }
    if h == 0.0 {
        return 1.0;
    }
    smooth_step((u - lo) / h) * smooth_step((hi - u) / h)
}

/// Which test function η enters the dilation criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum EtaChoice {
    /// η̂ = η̂_◦/ψ̂ with the M = 3 bump ψ_◦.
    #[default]
    Quotient,
    /// η̂ = η̂_◦.
    Annulus,
}

/// Radial Schwartz function with η̂ supported in 1/2 ≤ |ζ| ≤ 2, normalized to sup η̂ = 1.
///
/// η̂_◦(ζ) = (Φ(ζ) − Φ(2ζ))^{1/2}, so that Σ_s η̂_◦(2^{−s}ζ)² = 1 for ζ ≠ 0.
#[derive(Debug, Clone)]
pub struct TestFunction {
    pub dim: usize,
    pub choice: EtaChoice,
    base: Option<(BaseProfile, f64, i32)>,
    norm: f64,
}

pub const ETA_SUPPORT: (f64, f64) = (0.5, 2.0);

pub fn eta_o_hat(z: f64) -> f64 {
    let z = z.abs();
    (cutoff(z) - cutoff(2.0 * z)).max(0.0).sqrt()
}

impl TestFunction {
    pub fn new(dim: usize, choice: EtaChoice) -> Result<Self> {
        let base = match choice {
            EtaChoice::Annulus => None,
            EtaChoice::Quotient => {
                let spec = BumpSpec::new(dim);
                spec.validate()?;
                Some((BaseProfile::new(dim, spec.chi_power()), spec.scale, spec.order as i32))
            }
        };
        let mut eta = Self { dim, choice, base, norm: 1.0 };
        if eta.base.is_some() {
            let probes = linspace(0.25, 4.0, 301);
            let psi = eta.psi_hat(&probes)?;
            if let Some(i) = psi.iter().position(|v| !(*v > 0.0)) {
                return Err(RmlError::Construction(format!(
                    "psi hat vanishes near {:.4} inside [1/4, 4]",
                    probes[i]
                )));
            }
        }
        let probes = linspace(ETA_SUPPORT.0, ETA_SUPPORT.1, 601);
        eta.norm = eta.hat(&probes)?.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        Ok(eta)
    }

    /// ψ̂ = ψ̂_◦² with ψ̂_◦(ζ) = (−4π²ζ²/λ²)^M χ̂(ζ/λ).
    fn psi_hat(&self, zetas: &[f64]) -> Result<Vec<f64>> {
        let (base, lambda, m) = self.base.as_ref().expect("quotient test function");
        let w: Vec<f64> = zetas.iter().map(|z| z / lambda).collect();
        let chi = base.transform(&w)?;
        Ok(zetas
            .iter()
            .zip(chi)
            .map(|(z, c)| {
                let v = (-4.0 * PI * PI * z * z / (lambda * lambda)).powi(*m) * c;
                v * v
            })
            .collect())
    }

    /// η̂ at the given frequencies (computed exactly, no tables).
    pub fn hat(&self, zetas: &[f64]) -> Result<Vec<f64>> {
        let num: Vec<f64> = zetas.iter().map(|z| eta_o_hat(*z)).collect();
        let vals = match self.base {
            None => num,
            Some(_) => {
                let inside: Vec<f64> = zetas.iter().copied().filter(|z| (0.5..=2.0).contains(&z.abs())).collect();
                let psi = self.psi_hat(&inside)?;
                let mut k = 0;
                num.iter()
                    .zip(zetas)
                    .map(|(n, z)| {
                        if (0.5..=2.0).contains(&z.abs()) {
                            k += 1;
                            n / psi[k - 1]
                        } else {
                            0.0
                        }
                    })
                    .collect()
            }
        };
        Ok(vals.into_iter().map(|v| v / self.norm).collect())
    }
}
