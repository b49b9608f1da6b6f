//! Radial profiles of the shell functions σ_r * ψ.

use super::bump::Bump;
use crate::specfun::bessel::sphere_area;
use crate::specfun::hankel::hankel_sum;
use crate::specfun::{linspace, BdKernel, RadialProfile, Rule};
use crate::{Result, RmlError, C64};
use std::f64::consts::PI;

/// Conservative half-width of the annulus carrying F_{y,r}.
pub const ANNULUS_HALF_WIDTH: f64 = 0.4;
/// Samples of a shell profile across its support.
pub const SHELL_POINTS: usize = 321;
/// Agreement required between the two constructions (relative L²).
pub const SHELL_AGREEMENT: f64 = 1e-5;

/// Direct surface integral:
/// (σ_r*ψ)(s) = c_{d−2} r^{d−1} ∫_{−1}^{1} Ψ(√(s²+r²−2rsτ)) (1−τ²)^{(d−3)/2} dτ,
/// computed in the variable u = |x − z| with u = |s − r| + v².
pub fn shell_value_direct(bump: &Bump, r: f64, s: f64) -> f64 {
    let d = bump.spec.dim;
    let h = bump.spec.psi_support();
    let delta = (s - r).abs();
    let upper = (s + r).min(h);
    if s <= 0.0 || delta >= upper {
        return 0.0;
    }
    let gamma = (d as f64 - 3.0) / 2.0;
    let vmax = (upper - delta).sqrt();
    let two_rs = 2.0 * r * s;
    let rule = Rule::composite(&[0.0, vmax], vmax / 4.0, 16);
    let sum = rule.integrate(|v| {
        let u = delta + v * v;
        let outer = ((s + r) * (s + r) - u * u) / two_rs;
        let inner = (u + delta) / two_rs;
        // (u − δ)^γ · 2v du-Jacobian combined as 2 v^{2γ+1}.
        let jac = 2.0 * v.powf(2.0 * gamma + 1.0);
        bump.psi(u) * u * (inner * outer).powf(gamma) * jac
    });
    sphere_area(d - 1) * r.powi(d as i32 - 1) / (r * s) * sum
}

/// Sampling grid for the profile of σ_r * ψ, spanning exactly the support [r − 2/λ, r + 2/λ].
pub fn shell_grid(bump: &Bump, r: f64) -> Vec<f64> {
    let h = bump.spec.psi_support();
    linspace(r - h, r + h, SHELL_POINTS)
}

/// Method (a) only.
pub fn shell_profile_direct(bump: &Bump, r: f64) -> Result<RadialProfile> {
    check_radius(bump, r)?;
    RadialProfile::from_fn(bump.spec.dim, shell_grid(bump, r), |s| shell_value_direct(bump, r, s))
}

/// Method (b): inverse transform of σ̂_r · ψ̂ = r^{d−1} B_d(2π r ζ) a(ζ) at the given radii.
pub fn shell_values_spectral(bump: &Bump, r: f64, radii: &[f64]) -> Result<Vec<f64>> {
    let d = bump.spec.dim;
    let kernel = BdKernel::new(d)?;
    let smax = radii.iter().fold(0.0f64, |m, s| m.max(*s));
    let zmax = bump.spec.zeta_max();
    let rule = Rule::composite(&[0.0, zmax], 2.0 / (r + smax), 16);
    let rd = r.powi(d as i32 - 1);
    let coeffs: Vec<C64> = rule
        .nodes
        .iter()
        .zip(&rule.weights)
        .map(|(z, w)| C64::new(w * z.powi(d as i32 - 1) * rd * kernel.eval(2.0 * PI * r * z) * bump.a(*z), 0.0))
        .collect();
    Ok(hankel_sum(&kernel, &rule.nodes, &coeffs, radii).into_iter().map(|v| v.re).collect())
}

/// Profile of σ_r * ψ built by the direct surface integral and checked against the
/// spectral construction on every fourth grid point.
pub fn shell_profile(bump: &Bump, r: f64) -> Result<RadialProfile> {
    let direct = shell_profile_direct(bump, r)?;
    let dev = shell_method_deviation(bump, r, &direct)?;
    if dev > SHELL_AGREEMENT {
        return Err(RmlError::Invariant(format!(
            "shell profile at r = {r}: surface-integral and spectral constructions differ by {dev:.3e} (relative L2)"
        )));
    }
    Ok(direct)
}

/// Relative L² (weighted by s^{d−1}) deviation between the two constructions.
pub fn shell_method_deviation(bump: &Bump, r: f64, direct: &RadialProfile) -> Result<f64> {
    let idx: Vec<usize> = (0..direct.len()).step_by(4).collect();
    let radii: Vec<f64> = idx.iter().map(|&i| direct.grid()[i]).collect();
    let spec = shell_values_spectral(bump, r, &radii)?;
    let d = bump.spec.dim as i32;
    let (mut num, mut den) = (0.0, 0.0);
    for (k, &i) in idx.iter().enumerate() {
        let s = direct.grid()[i];
        let a = direct.values()[i].re;
        num += (a - spec[k]).powi(2) * s.powi(d - 1);
        den += a * a * s.powi(d - 1);
    }
    Ok(if den == 0.0 { num.sqrt() } else { (num / den).sqrt() })
}

fn check_radius(bump: &Bump, r: f64) -> Result<()> {
    bump.spec.require_shell_support()?;
    if !(r >= 1.0 && r.is_finite()) {
        return Err(RmlError::Domain(format!("shell radius must be >= 1, got {r}")));
    }
    Ok(())
}

/// ‖σ_r * ψ‖₂² from the sampled profile.
pub fn shell_l2_squared(profile: &RadialProfile) -> Result<f64> {
    Ok(crate::specfun::lp_norm_radial(profile, 2.0)?.powi(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::BumpSpec;

    #[test]
    fn two_constructions_agree() {
        for d in [2usize, 3, 4, 5] {
            let b = Bump::new(BumpSpec::new(d)).unwrap();
            for r in [1.0, 3.7, 12.0] {
                let p = shell_profile_direct(&b, r).unwrap();
                let dev = shell_method_deviation(&b, r, &p).unwrap();
                assert!(dev < SHELL_AGREEMENT, "d={d} r={r} dev={dev:e}");
            }
        }
    }

    #[test]
    fn exact_support() {
        let b = Bump::new(BumpSpec::new(4)).unwrap();
        let p = shell_profile(&b, 5.0).unwrap();
        assert_eq!(p.eval(5.0 + 0.41).re, 0.0);
        assert_eq!(p.eval(5.0 - 0.41).re, 0.0);
        assert_eq!(shell_value_direct(&b, 5.0, 5.2), 0.0);
        assert!(p.eval(5.0).re.abs() > 0.0);
    }

    #[test]
    fn rejects_small_radius() {
        let b = Bump::new(BumpSpec::new(4)).unwrap();
        assert!(shell_profile(&b, 0.5).is_err());
    }
}
