//! Radial Fourier (Hankel) transforms under the unitary convention:
//! f̂(ζ) = ∫₀^∞ f(ρ) ρ^{d−1} B_d(2πρζ) dρ. The same formula inverts the transform.

use super::bessel::{sphere_area, BdKernel};
use super::profile::RadialProfile;
use super::quad::Rule;
use crate::{Result, RmlError, C64};
use std::f64::consts::PI;

/// Quadrature controls for oscillatory Hankel integrals.
#[derive(Debug, Clone, Copy)]
pub struct HankelOptions {
    /// Maximal number of oscillation periods of the kernel per Gauss panel.
    pub cycles_per_panel: f64,
    /// Gauss–Legendre order per panel.
    pub order: usize,
    /// Re-evaluate with halved panels and report the difference.
    pub estimate_error: bool,
}

impl Default for HankelOptions {
    fn default() -> Self {
        Self { cycles_per_panel: 2.0, order: 16, estimate_error: true }
    }
}

/// A transformed profile with the attached quadrature error estimate (sup-norm, absolute).
#[derive(Debug, Clone)]
pub struct Transformed {
    pub profile: RadialProfile,
    pub error_estimate: f64,
}

/// out_j = Σ_i c_i B_d(2π ω_j x_i): the discrete Hankel sum for precomputed coefficients
/// c_i = w_i f(x_i) x_i^{d−1}.
pub fn hankel_sum(kernel: &BdKernel, nodes: &[f64], coeffs: &[C64], outputs: &[f64]) -> Vec<C64> {
    outputs
        .iter()
        .map(|&w| {
            let a = 2.0 * PI * w;
            let mut acc = C64::new(0.0, 0.0);
            for (x, c) in nodes.iter().zip(coeffs) {
                acc += c * kernel.eval(a * x);
            }
            acc
        })
        .collect()
}

/// Coefficients w_i f(x_i) x_i^{d−1} for a rule and sampled integrand values.
pub fn radial_coeffs(d: usize, rule: &Rule, values: &[C64]) -> Vec<C64> {
    rule.nodes
        .iter()
        .zip(&rule.weights)
        .zip(values)
        .map(|((x, w), v)| v * (w * x.powi(d as i32 - 1)))
        .collect()
}

fn check_outputs(out_grid: &[f64]) -> Result<f64> {
    if out_grid.is_empty() {
        return Err(RmlError::Usage("output grid is empty".into()));
    }
    if out_grid.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
        return Err(RmlError::Usage("output grid must be finite and nonnegative".into()));
    }
    if out_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(RmlError::Usage("output grid must be strictly increasing".into()));
    }
    Ok(out_grid.iter().fold(0.0, |m: f64, w| m.max(*w)))
}

/// Transform of an analytic integrand f supported in [breaks[0], breaks.last()], smooth
/// between consecutive breakpoints.
pub fn hankel_fn<F: Fn(f64) -> C64>(
    d: usize,
    f: F,
    breaks: &[f64],
    out_grid: &[f64],
    opts: HankelOptions,
) -> Result<Transformed> {
    let kernel = BdKernel::new(d)?;
    let wmax = check_outputs(out_grid)?;
    let span = breaks.last().copied().unwrap_or(0.0) - breaks.first().copied().unwrap_or(0.0);
    let max_len = if wmax > 0.0 { opts.cycles_per_panel / wmax } else { span.max(1.0) };
    let run = |len: f64| {
        let rule = Rule::composite(breaks, len, opts.order);
        let vals: Vec<C64> = rule.nodes.iter().map(|&x| f(x)).collect();
        let coeffs = radial_coeffs(d, &rule, &vals);
        hankel_sum(&kernel, &rule.nodes, &coeffs, out_grid)
    };
    let fine = run(max_len.min(span.max(1e-300)));
    let err = if opts.estimate_error {
        let coarse = run((2.0 * max_len).min(span.max(1e-300)));
        fine.iter().zip(&coarse).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    } else {
        0.0
    };
    Ok(Transformed { profile: RadialProfile::new(d, out_grid.to_vec(), fine, None)?, error_estimate: err })
}

/// Breakpoints for integrating the interpolant of a sampled profile: every few grid
/// intervals, starting at 0 when the interpolant extends to the origin.
fn profile_breaks(f: &RadialProfile) -> Vec<f64> {
    let g = f.grid();
    let mut breaks = Vec::with_capacity(g.len() / 4 + 2);
    if g.len() >= 2 && g[0] > 0.0 && g[0] <= 0.5 * (g[1] - g[0]) {
        breaks.push(0.0);
    }
    for (i, r) in g.iter().enumerate() {
        if i % 8 == 0 || i + 1 == g.len() {
            breaks.push(*r);
        }
    }
    breaks
}

fn tail_bound(f: &RadialProfile) -> Result<f64> {
    match f.tail() {
        None => Ok(0.0),
        Some(e) => {
            let d = f.dim() as f64;
            if e + d >= 0.0 {
                return Err(RmlError::Domain(format!(
                    "tail exponent {e} is not integrable against rho^(d-1) in d={}",
                    f.dim()
                )));
            }
            let r = f.rmax();
            let amp = f.values().last().map(|v| v.norm()).unwrap_or(0.0);
            Ok(sphere_area(f.dim()) * amp * r.powf(d) / (-(e + d)))
        }
    }
}

/// Transform values at increasing nodes, without the halving error estimate.
pub fn hankel_forward_at(f: &RadialProfile, nodes: &[f64]) -> Result<Vec<C64>> {
    let opts = HankelOptions { estimate_error: false, ..HankelOptions::default() };
    Ok(hankel_forward_with(f, nodes, opts)?.profile.values().to_vec())
}

/// Radial Fourier transform of a sampled profile onto `out_grid`.
pub fn hankel_forward(f: &RadialProfile, out_grid: &[f64]) -> Result<Transformed> {
    hankel_forward_with(f, out_grid, HankelOptions::default())
}

pub fn hankel_forward_with(f: &RadialProfile, out_grid: &[f64], opts: HankelOptions) -> Result<Transformed> {
    let tail = tail_bound(f)?;
    let breaks = profile_breaks(f);
    let mut t = hankel_fn(f.dim(), |x| f.eval(x), &breaks, out_grid, opts)?;
    t.error_estimate += tail;
    Ok(t)
}

/// Inverse transform; identical formula under the unitary convention.
pub fn hankel_inverse(f: &RadialProfile, out_grid: &[f64]) -> Result<Transformed> {
    hankel_forward(f, out_grid)
}

pub fn hankel_inverse_with(f: &RadialProfile, out_grid: &[f64], opts: HankelOptions) -> Result<Transformed> {
    hankel_forward_with(f, out_grid, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::profile::linspace;

    fn gaussian(d: usize, rmax: f64, n: usize) -> RadialProfile {
        RadialProfile::from_fn(d, linspace(0.0, rmax, n), |r| (-PI * r * r).exp()).unwrap()
    }

    #[test]
    fn gaussian_fixed_point() {
        for d in 2..=6 {
            let out = linspace(0.0, 3.0, 31);
            let t = hankel_forward(&gaussian(d, 6.0, 601), &out).unwrap();
            for (w, v) in out.iter().zip(t.profile.values()) {
                assert!((v.re - (-PI * w * w).exp()).abs() < 1e-9, "d={d} w={w}");
            }
            assert!(t.error_estimate < 1e-8);
        }
    }

    #[test]
    fn ball_indicator_closed_form_d3() {
        let out = linspace(0.05, 4.0, 40);
        let t = hankel_fn(3, |_| C64::new(1.0, 0.0), &[0.0, 1.0], &out, HankelOptions::default()).unwrap();
        for (w, v) in out.iter().zip(t.profile.values()) {
            let s = 2.0 * PI * w;
            let exact = 4.0 * PI * (s.sin() - s * s.cos()) / s.powi(3);
            assert!((v.re - exact).abs() < 1e-12, "w={w}");
        }
    }

    #[test]
    fn divergent_tail_rejected() {
        let p = RadialProfile::from_fn(3, linspace(1.0, 16.0, 200), |r| r.powf(-2.0))
            .unwrap()
            .with_tail(Some(-2.0))
            .unwrap();
        assert!(matches!(hankel_forward(&p, &[0.0, 1.0]), Err(RmlError::Domain(_))));
        assert!(matches!(hankel_forward(&gaussian(3, 1.0, 10), &[]), Err(RmlError::Usage(_))));
    }
}
