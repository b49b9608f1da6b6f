//! The band kernels K_k, their averaging weights w_k and the error part E_k.
//!
//! With K̂_k(ζ) = e^{2πi|ζ|}ϑ(2^{−k}2π|ζ|) (the unitary convention; in angular frequency this is
//! e^{i|ξ|}ϑ(2^{−k}|ξ|)), polar coordinates give K_k(x) = 2^{k(d−1)/2} w_k(|x|) with
//!
//! w_k(ρ) = |S^{d−2}| (2π)^{−d} 2^{k(d−1)/2} 2^k ∫_{−1}^{1} Θ(2^k(1+τρ)) (1−τ²)^{(d−3)/2} dτ.
//!
//! The τ-integral is tiny away from ρ = 1 and a real-axis rule loses it to cancellation.
//! Because ϑ vanishes below 1/8, Θ is analytic in the upper half-plane with decay e^{−Im σ/8},
//! so the segment [−1, 1] is deformed into two vertical rays from the endpoints, where the
//! integrand is non-oscillatory and the result is computed to full relative accuracy.

use super::window::{Theta, Window, WINDOW_BREAKS};
use crate::specfun::{hankel_fn, sphere_area, HankelOptions, RadialProfile, Rule};
use crate::{Result, RmlError, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// A Θ-type transform σ ↦ ∫ g(s) e^{isσ} ds of a profile g on (0, ∞).
pub trait OscillatoryProfile {
    fn theta(&self, z: C64) -> C64;
    /// a > 0 such that g vanishes on [0, a), if any. Θ then decays like e^{−a Im z} in the
    /// upper half-plane.
    fn support_floor(&self) -> Option<f64>;
    /// Largest s carrying mass, used to size quadrature panels.
    fn support_ceiling(&self) -> f64;
    /// Fraction of ∫|g| lying outside (lo, hi).
    fn mass_outside(&self, lo: f64, hi: f64) -> f64;
}

impl OscillatoryProfile for Theta {
    fn theta(&self, z: C64) -> C64 {
        self.eval(z)
    }

    fn support_floor(&self) -> Option<f64> {
        Some(WINDOW_BREAKS[0])
    }

    fn support_ceiling(&self) -> f64 {
        WINDOW_BREAKS[3]
    }

    fn mass_outside(&self, lo: f64, hi: f64) -> f64 {
        let total = Rule::composite(&WINDOW_BREAKS, 0.05, 16).integrate(|s| self.integrand(s).abs());
        let lo = lo.clamp(WINDOW_BREAKS[0], WINDOW_BREAKS[3]);
        let hi = hi.clamp(lo, WINDOW_BREAKS[3]);
        let mut breaks: Vec<f64> = WINDOW_BREAKS.iter().copied().filter(|b| *b > lo && *b < hi).collect();
        breaks.insert(0, lo);
        breaks.push(hi);
        let inside = Rule::composite(&breaks, 0.05, 16).integrate(|s| self.integrand(s).abs());
        (1.0 - inside / total).max(0.0)
    }
}

/// Gaussian-windowed wave g(s) = exp(−(s−c)²/(2w²)), whose transform √(2π) w e^{icσ} e^{−w²σ²/2}
/// is entire but grows off the real axis, so only real-axis quadrature applies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianWave {
    pub center: f64,
    pub width: f64,
}

impl Default for GaussianWave {
    fn default() -> Self {
        Self { center: 2.0, width: 0.2 }
    }
}

impl OscillatoryProfile for GaussianWave {
    fn theta(&self, z: C64) -> C64 {
        let w = self.width;
        (2.0 * PI).sqrt() * w * (C64::new(0.0, self.center) * z - 0.5 * w * w * z * z).exp()
    }

    fn support_floor(&self) -> Option<f64> {
        None
    }

    fn support_ceiling(&self) -> f64 {
        self.center + 8.0 * self.width
    }

    fn mass_outside(&self, lo: f64, hi: f64) -> f64 {
        let s = std::f64::consts::SQRT_2 * self.width;
        0.5 * libm::erfc((self.center - lo) / s) + 0.5 * libm::erfc((hi - self.center) / s)
    }
}

/// βρ below which the τ-integral is done on the real axis.
const DIRECT_LIMIT: f64 = 64.0;

/// Composite rule on [0, π] in φ = arccos τ, graded toward both ends.
fn phi_rule(max_len: f64) -> Rule {
    let mut breaks = vec![0.0];
    let edge = (PI / 8.0).min(max_len);
    for j in (1..=6).rev() {
        breaks.push(edge * 2f64.powi(-j));
    }
    breaks.push(edge);
    breaks.push(PI - edge);
    for j in 1..=6 {
        breaks.push(PI - edge * 2f64.powi(-j));
    }
    breaks.push(PI);
    Rule::composite(&breaks, max_len, 16)
}

/// ∫_{−1}^{1} Θ(β(1+τρ)) (1−τ²)^γ dτ.
pub fn tau_integral<P: OscillatoryProfile + ?Sized>(p: &P, beta: f64, rho: f64, gamma: f64) -> C64 {
    let br = beta * rho;
    match p.support_floor() {
        Some(a) if br > DIRECT_LIMIT => contour_integral(p, a, beta, rho, gamma),
        _ => {
            // τ = cos φ; the phase of Θ(β(1+ρ cos φ)) changes at rate ≤ βρ·s_max in φ.
            let rate = br * p.support_ceiling();
            let rule = phi_rule((4.0 * PI / rate.max(1e-300)).min(PI / 8.0));
            let e = 2.0 * gamma + 1.0;
            rule.nodes
                .iter()
                .zip(&rule.weights)
                .map(|(phi, w)| p.theta(C64::new(beta * (1.0 + rho * phi.cos()), 0.0)) * (w * phi.sin().powf(e)))
                .sum()
        }
    }
}

/// Upper-half-plane deformation: I = i∫₀^∞ [f(−1+it) − f(1+it)] dt with t = v².
fn contour_integral<P: OscillatoryProfile + ?Sized>(p: &P, floor: f64, beta: f64, rho: f64, gamma: f64) -> C64 {
    let br = beta * rho;
    let vmax = (42.0 / (floor * br)).sqrt();
    let mut breaks = vec![0.0];
    // Inner scale ~ 1/√(8βρ), about vmax/50: seven halvings reach it.
    for j in (0..8).rev() {
        breaks.push(vmax * 2f64.powi(-j));
    }
    let rule = Rule::composite(&breaks, vmax / 2.0, 16);
    let i = C64::new(0.0, 1.0);
    let (ph_l, ph_r) = (C64::from_polar(1.0, 0.5 * PI * gamma), C64::from_polar(1.0, -0.5 * PI * gamma));
    let (xl, xr) = (beta * (1.0 - rho), beta * (1.0 + rho));
    let mut acc = C64::new(0.0, 0.0);
    for (v, w) in rule.nodes.iter().zip(&rule.weights) {
        let t = v * v;
        let jac = 2.0 * v.powf(2.0 * gamma + 1.0) * w;
        let b = br * t;
        let left = ph_l * C64::new(2.0, -t).powf(gamma) * p.theta(C64::new(xl, b));
        let right = ph_r * C64::new(2.0, t).powf(gamma) * p.theta(C64::new(xr, b));
        acc += (left - right) * jac;
    }
    i * acc
}

/// Frozen bound for ∫_{1/2}^{2} |w_k| (measured 0.78–0.81 for k = 2..12 in d = 4).
pub const W_L1_BOUND: f64 = 1.0;

/// K_k together with its averaging weights.
#[derive(Debug, Clone)]
pub struct WaveBandKernel {
    pub k: u32,
    pub dim: usize,
    pub window: Window,
    theta: Theta,
}

/// w_k on the caller's radii inside [1/2, 2], and E_k on all of them (zero inside).
#[derive(Debug, Clone)]
pub struct WkProfiles {
    pub w: Option<RadialProfile>,
    pub e: RadialProfile,
}

/// Breakpoints on [lo, hi] with uniform cells of size h near ρ = 1 (out to 16h) and doubling
/// cells beyond.
fn graded_near_one(lo: f64, hi: f64, h: f64) -> Vec<f64> {
    let mut pts = vec![lo, hi];
    let mut push = |x: f64| {
        if x > lo && x < hi {
            pts.push(x);
        }
    };
    push(1.0);
    for j in 1..=16 {
        push(1.0 - j as f64 * h);
        push(1.0 + j as f64 * h);
    }
    let mut off = 32.0 * h;
    while off < (hi - lo) {
        push(1.0 - off);
        push(1.0 + off);
        off *= 2.0;
    }
    pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    pts
}

impl WaveBandKernel {
    pub fn new(k: u32, dim: usize, window: Window) -> Result<Self> {
        if k == 0 || k > 24 {
            return Err(RmlError::Usage(format!("band index k must be in 1..=24, got {k}")));
        }
        Ok(Self { k, dim, window, theta: Theta::new(dim, window)? })
    }

    pub fn beta(&self) -> f64 {
        2f64.powi(self.k as i32)
    }

    fn gamma(&self) -> f64 {
        (self.dim as f64 - 3.0) / 2.0
    }

    /// K̂_k at the (unitary) radial frequency ζ.
    pub fn multiplier(&self, zeta: f64) -> C64 {
        C64::from_polar(self.window.eval(2.0 * PI * zeta / self.beta()), 2.0 * PI * zeta)
    }

    pub fn w(&self, rho: f64) -> C64 {
        let d = self.dim as f64;
        let pref = sphere_area(self.dim - 1) * (2.0 * PI).powf(-d) * 2f64.powf(self.k as f64 * (d + 1.0) / 2.0);
        tau_integral(&self.theta, self.beta(), rho, self.gamma()) * pref
    }

    /// K_k(ρ) = 2^{k(d−1)/2} w_k(ρ).
    pub fn kernel(&self, rho: f64) -> C64 {
        self.w(rho) * 2f64.powf(self.k as f64 * (self.dim as f64 - 1.0) / 2.0)
    }

    pub fn profiles(&self, rho_grid: &[f64]) -> Result<WkProfiles> {
        let inside: Vec<f64> = rho_grid.iter().copied().filter(|r| (0.5..=2.0).contains(r)).collect();
        let w = if inside.is_empty() {
            None
        } else {
            let vals = inside.iter().map(|&r| self.w(r)).collect();
            Some(RadialProfile::new(self.dim, inside, vals, None)?)
        };
        let e_vals = rho_grid
            .iter()
            .map(|&r| if (0.5..=2.0).contains(&r) { C64::new(0.0, 0.0) } else { self.kernel(r) })
            .collect();
        Ok(WkProfiles { w, e: RadialProfile::new(self.dim, rho_grid.to_vec(), e_vals, None)? })
    }

    /// ∫_{1/2}^{2} |w_k(ρ)| dρ. Beyond 16·2^{−k} from the sphere w_k is below 1e−12 of its
    /// peak, so the doubling cells there get one panel each.
    pub fn w_l1(&self) -> f64 {
        let h = 1.0 / self.beta();
        let rule = Rule::composite(&graded_near_one(0.5, 2.0, h), f64::INFINITY, 16);
        rule.integrate(|r| self.w(r).norm())
    }

    /// Outer radius used for ‖E_k‖₁: low bands spread over distances ~2^{10−k}.
    pub fn e_radius(&self) -> f64 {
        4.0 + 1024.0 / self.beta()
    }

    /// ‖E_k‖_{L¹(ℝ^d)} over |x| ∈ (0, 1/2) ∪ (2, r_max). The integrand oscillates at rate
    /// ≲ 8·2^k in ρ, so panels are 2^{1−k} long.
    pub fn e_l1(&self, r_max: f64) -> f64 {
        let h = 2.0 / self.beta();
        let dm1 = self.dim as i32 - 1;
        let mut rule = Rule::composite(&[0.0, 0.5], h, 16);
        rule.extend(Rule::composite(&[2.0, r_max.max(2.0)], h, 16));
        sphere_area(self.dim) * rule.integrate(|r| self.kernel(r).norm() * r.powi(dm1))
    }

    /// Relative L¹(ℝ^d) distance on |x| ≤ r_max between 2^{k(d−1)/2}w_k and the direct inverse
    /// transform of K̂_k.
    pub fn reconstruction_error(&self, r_max: f64) -> Result<f64> {
        let h = 1.0 / self.beta();
        let rule = Rule::composite(&graded_near_one(0.0, r_max, h), h, 16);
        let scale = self.beta() / (2.0 * PI);
        let breaks: Vec<f64> = WINDOW_BREAKS.iter().map(|b| b * scale).collect();
        let opts = HankelOptions { cycles_per_panel: 1.0, order: 16, estimate_error: false };
        let direct = hankel_fn(self.dim, |z| self.multiplier(z), &breaks, &rule.nodes, opts)?;
        let dm1 = self.dim as i32 - 1;
        let (mut num, mut den) = (0.0, 0.0);
        for ((r, w), kd) in rule.nodes.iter().zip(&rule.weights).zip(direct.profile.values()) {
            let wt = w * r.powi(dm1);
            num += wt * (self.kernel(*r) - kd).norm();
            den += wt * kd.norm();
        }
        Ok(num / den)
    }
}

/// w_k on [1/2, 2] and E_k on the given radii.
pub fn wk_weights(k: u32, rho_grid: &[f64], window: Window, d: usize) -> Result<WkProfiles> {
    WaveBandKernel::new(k, d, window)?.profiles(rho_grid)
}

/// Normalized size of the τ-average of a Θ-type profile.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecayReport {
    pub beta: f64,
    pub gamma: f64,
    pub n: f64,
    /// sup over ρ ∈ (0, 4] of |I(ρ)| β^{γ+1} (1+β|1−ρ|)^N.
    pub constant: f64,
    pub argmax_rho: f64,
    /// |I(1)| β^{γ+1}.
    pub at_one: f64,
}

/// Measures sup_ρ |∫Θ(β(1+τρ))(1−τ²)^γ dτ| β^{γ+1}(1+β|1−ρ|)^N on a grid graded toward ρ = 1.
pub fn check_decay_bound<P: OscillatoryProfile + ?Sized>(p: &P, beta: f64, gamma: f64, n: f64) -> Result<DecayReport> {
    if !(beta >= 1.0) || !(gamma > -1.0) || !n.is_finite() || n < 0.0 {
        return Err(RmlError::Domain(format!("need β ≥ 1, γ > −1, N ≥ 0; got β={beta}, γ={gamma}, N={n}")));
    }
    let out = p.mass_outside(0.125, 8.0);
    if out > 1e-10 {
        return Err(RmlError::Domain(format!("profile has mass fraction {out:.2e} outside (1/8, 8)")));
    }
    let mut pts: Vec<f64> = Vec::new();
    let h = 0.25 / beta;
    for j in 1..=64 {
        pts.push(1.0 - j as f64 * h);
        pts.push(1.0 + j as f64 * h);
    }
    for j in 0..=400 {
        pts.push(0.01 + 3.99 * j as f64 / 400.0);
    }
    pts.push(1.0);
    pts.retain(|r| *r > 0.0 && *r <= 4.0);
    let scale = beta.powf(gamma + 1.0);
    let mut rep = DecayReport { beta, gamma, n, constant: 0.0, argmax_rho: 1.0, at_one: 0.0 };
    for r in pts {
        let v = tau_integral(p, beta, r, gamma).norm() * scale;
        let c = v * (1.0 + beta * (1.0 - r).abs()).powf(n);
        if r == 1.0 {
            rep.at_one = v;
        }
        if c > rep.constant {
            rep.constant = c;
            rep.argmax_rho = r;
        }
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contour_agrees_with_real_axis_rule() {
        let th = Theta::new(4, Window::default()).unwrap();
        // The real-axis rule carries an absolute cancellation floor of ~1e−16·|Θ(0)| ≈ 1e−13.
        for (beta, rho) in [(64.0, 1.1), (32.0, 3.0), (128.0, 0.9), (256.0, 1.0)] {
            let c = contour_integral(&th, 0.125, beta, rho, 0.5);
            let rate = beta * rho * 8.0;
            let rule = phi_rule(PI / rate);
            let d: C64 = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(phi, w)| th.at(beta * (1.0 + rho * phi.cos())) * (w * phi.sin().powi(2)))
                .sum();
            assert!((c - d).norm() <= 1e-8 * d.norm().max(1e-4), "β={beta} ρ={rho}: {c} vs {d}");
        }
    }

    #[test]
    fn contour_handles_half_integer_and_negative_gamma() {
        let th = Theta::new(3, Window::default()).unwrap();
        for gamma in [-0.5, 0.0, 0.25, 1.0] {
            let c = contour_integral(&th, 0.125, 100.0, 0.8, gamma);
            let rule = phi_rule(PI / 1600.0);
            let d: C64 = rule
                .nodes
                .iter()
                .zip(&rule.weights)
                .map(|(phi, w)| th.at(100.0 * (1.0 + 0.8 * phi.cos())) * (w * phi.sin().powf(2.0 * gamma + 1.0)))
                .sum();
            assert!((c - d).norm() <= 1e-6 * d.norm().max(1e-8), "γ={gamma}: {c} vs {d}");
        }
    }

    #[test]
    fn reconstruction_small_k() {
        for d in [3, 4] {
            let kk = WaveBandKernel::new(3, d, Window::default()).unwrap();
            let e = kk.reconstruction_error(4.0).unwrap();
            assert!(e < 1e-3, "d={d} error {e}");
        }
    }

    #[test]
    fn profiles_split_at_the_annulus() {
        let grid: Vec<f64> = (1..40).map(|i| i as f64 * 0.1).collect();
        let p = wk_weights(3, &grid, Window::default(), 4).unwrap();
        let w = p.w.unwrap();
        assert_eq!(w.grid().first().copied(), Some(0.5));
        assert!(p.e.eval(1.0).norm() == 0.0);
        assert!(p.e.values()[2].norm() > 0.0);
    }

    #[test]
    fn decay_bound_normalized_at_one() {
        let th = Theta::new(4, Window::default()).unwrap();
        let a = check_decay_bound(&th, 64.0, 0.5, 4.0).unwrap();
        let b = check_decay_bound(&th, 64.0, 0.5, 6.0).unwrap();
        assert!(b.constant >= a.constant && a.at_one <= a.constant);
        assert!(check_decay_bound(&GaussianWave { center: 2.0, width: 1.5 }, 8.0, 0.0, 2.0).is_err());
        let g = check_decay_bound(&GaussianWave::default(), 16.0, 0.0, 4.0).unwrap();
        assert!(g.constant.is_finite() && g.constant > 0.0);
    }
}
