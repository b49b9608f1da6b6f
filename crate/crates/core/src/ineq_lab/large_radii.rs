//! Gain for families restricted to radii ≥ 2^ℓ, measured against cube sups on the 2^ℓ tiling.

use super::report::{InequalityReport, SweepPoint};
use crate::kernels::{Bump, SynthField};
use crate::specfun::exponents::p_d_f64 as p_d;
use crate::specfun::quad::gauss_legendre;
use crate::specfun::{sphere_area, Rule, UniformTable};
use crate::{Result, RmlError};
use std::collections::BTreeMap;

/// The default gain exponent ε = ½(d−1)(1/p − 1/p_d), half of the admissible range.
pub fn default_epsilon(d: usize, p: f64) -> f64 {
    0.5 * (d as f64 - 1.0) * (1.0 / p - 1.0 / p_d(d))
}

/// Discrete form: ‖Σ γ F_{y,r}‖_p^p (Monte Carlo) against
/// 2^{−ℓεp} 2^{ℓd} Σ_r Σ_W sup_{y∈W} |γ(y,r)|^p r^{d−1}, with W the cubes of side 2^ℓ.
pub fn check_large_radii(field: &SynthField, ell: u32, p: f64, eps: f64, samples: usize, seed: u64) -> Result<InequalityReport> {
    let fam = field.family();
    let d = fam.dim();
    let side = 2f64.powi(ell as i32);
    if let Some(m) = fam.members().iter().find(|m| m.r < side) {
        return Err(RmlError::Usage(format!("radius {} below 2^ell = {side}", m.r)));
    }
    let mut sups: BTreeMap<(Vec<i64>, u64), f64> = BTreeMap::new();
    for (m, c) in fam.members().iter().zip(field.coeffs()) {
        let cell: Vec<i64> = m.y.iter().map(|v| (v / side).floor() as i64).collect();
        let e = sups.entry((cell, m.r.to_bits())).or_insert(0.0);
        *e = e.max(c.norm().powf(p) * m.r.powi(d as i32 - 1));
    }
    let cube_sum: f64 = sups.values().sum();
    let rhs = 2f64.powf(-(ell as f64) * eps * p) * side.powi(d as i32) * cube_sum;
    let est = field.lp(p, samples, seed)?;
    let mut rep = InequalityReport::new("large-radii-6.2", format!("{} members, ell={ell}", fam.len()), est.power, Some(est.power_se), rhs)
        .with_meta("p", p)
        .with_meta("epsilon", eps)
        .with_meta("ell", ell)
        .with_meta("cube_sum", cube_sum);
    if p >= p_d(d) || p <= 1.0 {
        rep.flag(format!("outside proven range 1 < p < p_d = {}", p_d(d)));
    }
    if eps >= 2.0 * default_epsilon(d, p) {
        rep.flag("epsilon at or beyond (d-1)(1/p - 1/p_d)");
    }
    Ok(rep)
}

/// Area of {z : |z − x| = s, |z| ≤ b} for |x| = ρ in ℝ^d.
fn cap_area(d: usize, rho: f64, s: f64, b: f64, gl: &(Vec<f64>, Vec<f64>)) -> f64 {
    if s <= 0.0 || s >= rho + b || s <= rho - b {
        return 0.0;
    }
    if s <= b - rho {
        return sphere_area(d) * s.powi(d as i32 - 1);
    }
    let tau = ((rho * rho + s * s - b * b) / (2.0 * rho * s)).clamp(-1.0, 1.0);
    let th = tau.acos();
    let half = 0.5 * th;
    let angular: f64 = gl.0.iter().zip(&gl.1).map(|(x, w)| w * (half * (x + 1.0)).sin().powi(d as i32 - 2)).sum::<f64>() * half;
    sphere_area(d - 1) * s.powi(d as i32 - 1) * angular
}

fn sorted_breaks(mut v: Vec<f64>, lo: f64, hi: f64) -> Vec<f64> {
    v.retain(|x| *x > lo && *x < hi);
    v.push(lo);
    v.push(hi);
    v.sort_by(|a, b| a.total_cmp(b));
    v.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    v
}

/// Profile s ↦ (ψ * χ_{B(0,b)})(s) on [b − h, b + h], zero elsewhere.
fn psi_ball(bump: &Bump, b: f64, gl: &(Vec<f64>, Vec<f64>)) -> UniformTable {
    let d = bump.spec.dim;
    let h = bump.spec.psi_support();
    UniformTable::from_fn(b - h, b + h, 4001, |s| {
        let rule = Rule::composite(&sorted_breaks(vec![(s - b).abs()], 0.0, h), h / 4.0, 24);
        rule.integrate(|t| bump.psi(t) * cap_area(d, s, t, b, gl))
    })
}

/// Continuous radial instance h(y, r) = χ_{B(c_W, 2^{ℓ−1})}(y) χ_{[2^ℓ, 2^{ℓ+1})}(r), with the
/// ball inside one cube W. The field ∫∫ h F_{y,r} dr dy = ψ * χ_A * χ_B (A the annulus) is
/// radial, evaluated by nested cap integrals. Returns (‖·‖_p^p, normalizer^p) where the
/// normalizer is 2^{ℓd/p} (∫_{2^ℓ}^{2^{ℓ+1}} r^{d−1} dr)^{1/p}.
pub fn radial_large_radii_instance(bump: &Bump, ell: u32, p: f64) -> Result<(f64, f64)> {
    let d = bump.spec.dim;
    let h = bump.spec.psi_support();
    let big = 2f64.powi(ell as i32);
    let b = big / 2.0;
    if b <= 2.0 * h {
        return Err(RmlError::Usage(format!("ball radius {b} too small against the bump support {h}")));
    }
    let gl = gauss_legendre(24);
    let inner = psi_ball(bump, big, &gl);
    let outer = psi_ball(bump, 2.0 * big, &gl);
    let g = |s: f64| -> f64 {
        let mut v = 0.0;
        if (s - 2.0 * big).abs() < h {
            v += outer.eval(s);
        }
        if (s - big).abs() < h {
            v -= inner.eval(s);
        }
        v
    };
    let field = |rho: f64| -> f64 {
        let mut total = 0.0;
        for c in [big, 2.0 * big] {
            let br = sorted_breaks(vec![(rho - b).abs(), rho + b], c - h, c + h);
            total += Rule::composite(&br, h / 8.0, 16).integrate(|s| g(s) * cap_area(d, rho, s, b, &gl));
        }
        total
    };
    let rmax = 2.0 * big + b + h;
    let singular = [big - b, big + b, 2.0 * big - b, 2.0 * big + b];
    let mut br: Vec<f64> = singular.iter().flat_map(|x| [x - 2.0 * h, x + 2.0 * h]).collect();
    br = sorted_breaks(br, 0.0, rmax);
    let mut lhs = 0.0;
    for w in br.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        let near = singular.iter().any(|x| (mid - x).abs() < 2.0 * h);
        let rule = Rule::composite(w, if near { h / 16.0 } else { 0.25 }, 8);
        lhs += rule.integrate(|rho| field(rho).abs().powf(p) * rho.powi(d as i32 - 1));
    }
    lhs *= sphere_area(d);
    let shell = (2f64.powi(d as i32) - 1.0) * big.powi(d as i32) / d as f64;
    Ok((lhs, big.powi(d as i32) * shell))
}

/// ℓ-sweep of the radial instance. The report's slope is the fitted exponent of the
/// normalized ratio per doubling of 2^ℓ (p-th powers); the meta entry `rate` divides it by p.
pub fn large_radii_sweep(bump: &Bump, p: f64, ells: &[u32], eps: f64) -> Result<InequalityReport> {
    let d = bump.spec.dim;
    let mut pts = Vec::new();
    let mut last = (0.0, 1.0);
    for &ell in ells {
        let (lhs, norm) = radial_large_radii_instance(bump, ell, p)?;
        pts.push(SweepPoint::new(2f64.powi(ell as i32), lhs, 0.0, norm));
        last = (lhs, 2f64.powf(-(ell as f64) * eps * p) * norm);
    }
    let mut rep = InequalityReport::new("large-radii-6.2", format!("radial ball/annulus instance, d={d}"), last.0, None, last.1)
        .with_meta("p", p)
        .with_meta("epsilon", eps)
        .with_sweep(pts);
    let rate = rep.slope.unwrap_or(0.0) / p;
    rep = rep.with_meta("rate", rate);
    if rate > -eps {
        rep.flag(format!("normalized ratio decays at rate {rate:.4} > -epsilon = {:.4}", -eps));
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{Member, PointFamily};
    use crate::kernels::BumpSpec;
    use crate::C64;

    #[test]
    fn cap_area_limits() {
        let gl = gauss_legendre(24);
        for d in [3usize, 4, 5] {
            // Sphere fully inside, fully outside, and the half-space limit for tiny s at the boundary.
            assert!((cap_area(d, 1.0, 0.5, 3.0, &gl) - sphere_area(d) * 0.5f64.powi(d as i32 - 1)).abs() < 1e-12);
            assert_eq!(cap_area(d, 5.0, 1.0, 3.0, &gl), 0.0);
            let half = cap_area(d, 1000.0, 1e-3, 1000.0, &gl) / (sphere_area(d) * 1e-3f64.powi(d as i32 - 1));
            assert!((half - 0.5).abs() < 1e-5, "{half}");
        }
        // d = 3: spherical cap area 2π s² (1 − cos θ₀) in closed form.
        let (rho, s, b) = (2.0, 1.5, 2.5);
        let tau: f64 = (rho * rho + s * s - b * b) / (2.0 * rho * s);
        let exact = 2.0 * std::f64::consts::PI * s * s * (1.0 - tau);
        assert!((cap_area(3, rho, s, b, &gl) - exact).abs() < 1e-12);
    }

    #[test]
    fn single_cell_single_radius_matches_shell() {
        let b = Bump::shared(BumpSpec::new(4)).unwrap();
        let fam = PointFamily::new(4, vec![Member::new(vec![0.5; 4], 9.0)]).unwrap();
        let f = SynthField::new(fam, vec![C64::new(1.0, 0.0)], b).unwrap();
        let r = check_large_radii(&f, 2, 1.1, default_epsilon(4, 1.1), 20_000, 5).unwrap();
        // rhs = 2^{−2εp} 2^{2d} 9^{d−1}: explicit.
        let expect = 2f64.powf(-2.0 * default_epsilon(4, 1.1) * 1.1) * 256.0 * 729.0;
        assert!((r.rhs - expect).abs() < 1e-9 * expect);
        let r0 = check_large_radii(&f, 0, 1.1, default_epsilon(4, 1.1), 20_000, 5).unwrap();
        assert!((r0.rhs - 729.0).abs() < 1e-9);
        assert!(check_large_radii(&f, 4, 1.1, 0.1, 10, 1).is_err());
    }

    #[test]
    fn radial_instance_vanishes_without_boundaries() {
        // ψ * χ_B vanishes inside the ball away from its boundary (vanishing moments).
        let b = Bump::shared(BumpSpec::new(4)).unwrap();
        let gl = gauss_legendre(24);
        let t = psi_ball(&b, 4.0, &gl);
        let peak = t.values().iter().fold(0.0f64, |a, v| a.max(v.abs()));
        assert!(t.eval(3.8001).abs() < 1e-6 * peak && t.eval(4.1999).abs() < 1e-6 * peak);
        assert!(peak > 0.0);
    }
}
