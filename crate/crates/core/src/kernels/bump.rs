//! The compactly supported bump ψ_◦ = λ^d (Δ^M χ)(λ·) and ψ = ψ_◦ * ψ_◦.
//!
//! The base profile is χ(ρ) = (1 − ρ²)^n_+ / χ̂(0) with n = 2M + d + 6, so that Δ^M χ is
//! continuous and its transform decays fast. Spectrally ψ̂_◦(ζ) = (−4π²ζ²/λ²)^M χ̂(ζ/λ).

use crate::specfun::hankel::{hankel_fn, hankel_sum, radial_coeffs, HankelOptions};
use crate::specfun::{linspace, BdKernel, RadialProfile, Rule, UniformTable};
use crate::{Result, RmlError, C64};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Parameters of the bump ψ_◦.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpSpec {
    pub dim: usize,
    /// Radius bound for supp ψ_◦; at most 1/10.
    pub support_radius: f64,
    /// Number M of Laplacians; ψ̂_◦ vanishes to order 2M at the origin.
    pub order: u32,
    /// Dilation λ; supp ψ_◦ has radius 1/λ.
    pub scale: f64,
    /// Verify ψ̂_◦ ≠ 0 on 1/4 ≤ |ζ| ≤ 4 (needed when η̂ is built by division by ψ̂).
    #[serde(default)]
    pub check_nonvanishing: bool,
}

impl BumpSpec {
    pub fn new(dim: usize) -> Self {
        Self { dim, support_radius: 0.1, order: 3, scale: 10.0, check_nonvanishing: false }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim < 2 {
            return Err(RmlError::Domain(format!("bump dimension must be >= 2, got {}", self.dim)));
        }
        if !(self.scale > 0.0) {
            return Err(RmlError::Domain(format!("bump scale must be positive, got {}", self.scale)));
        }
        if !(self.support_radius > 0.0 && self.support_radius.is_finite()) {
            return Err(RmlError::Domain(format!("support radius must be positive, got {}", self.support_radius)));
        }
        if 1.0 / self.scale > self.support_radius * (1.0 + 1e-12) {
            return Err(RmlError::Construction(format!(
                "supp psi_o has radius 1/lambda = {} exceeding the requested {}",
                1.0 / self.scale,
                self.support_radius
            )));
        }
        Ok(())
    }

    /// Shell functions need supp ψ_◦ within radius 1/10 so that supports are annuli of
    /// half-width at most 2/5.
    pub fn require_shell_support(&self) -> Result<()> {
        if self.support_radius > 0.1 + 1e-15 {
            return Err(RmlError::Domain(format!(
                "shell functions need support radius <= 1/10, got {}",
                self.support_radius
            )));
        }
        Ok(())
    }

    /// Exponent n of the base profile (1 − ρ²)^n.
    pub fn chi_power(&self) -> u32 {
        2 * self.order + self.dim as u32 + 6
    }

    /// Radius of supp ψ = supp ψ_◦ * ψ_◦.
    pub fn psi_support(&self) -> f64 {
        2.0 / self.scale
    }

    /// Frequency beyond which ψ̂_◦ is negligible (relative 1e−7 and below).
    pub fn zeta_max(&self) -> f64 {
        8.0 * self.scale
    }
}

/// Base profile χ(ρ) = (1 − ρ²)^n_+ / c with ∫χ = 1.
#[derive(Debug, Clone)]
pub struct BaseProfile {
    pub dim: usize,
    pub power: u32,
    pub norm: f64,
}

impl BaseProfile {
    pub fn new(dim: usize, power: u32) -> Self {
        use crate::specfun::bessel::gamma;
        let n = power as f64;
        let d = dim as f64;
        let norm = PI.powf(d / 2.0) * gamma(n + 1.0) / gamma(n + 1.0 + d / 2.0);
        Self { dim, power, norm }
    }

    pub fn eval(&self, rho: f64) -> f64 {
        if rho >= 1.0 {
            0.0
        } else {
            (1.0 - rho * rho).powi(self.power as i32) / self.norm
        }
    }

    /// Coefficients of Δ^M χ as a polynomial in u = 1 − ρ², index = power of u.
    pub fn laplacian_coeffs(&self, m: u32) -> Vec<f64> {
        let n = self.power as usize;
        let d = self.dim as f64;
        let mut c = vec![0.0; n + 1];
        c[n] = 1.0 / self.norm;
        for _ in 0..m {
            // Δ u^k = 4k(k−1) u^{k−2} − (4k(k−1) + 2dk) u^{k−1} for radial functions of u = 1 − ρ².
            let mut next = vec![0.0; n + 1];
            for (k, ck) in c.iter().enumerate() {
                if *ck == 0.0 {
                    continue;
                }
                let kf = k as f64;
                if k >= 2 {
                    next[k - 2] += ck * 4.0 * kf * (kf - 1.0);
                }
                if k >= 1 {
                    next[k - 1] -= ck * (4.0 * kf * (kf - 1.0) + 2.0 * d * kf);
                }
            }
            c = next;
        }
        c
    }

    /// χ̂ at the given frequencies by Gauss quadrature of the polynomial profile.
    pub fn transform(&self, freqs: &[f64]) -> Result<Vec<f64>> {
        let wmax = freqs.iter().fold(0.0f64, |m, w| m.max(*w));
        let panels = (wmax.ceil() as usize + 2).max(4);
        let rule = Rule::composite(&linspace(0.0, 1.0, panels + 1), f64::INFINITY, 24);
        let vals: Vec<C64> = rule.nodes.iter().map(|&x| C64::new(self.eval(x), 0.0)).collect();
        let coeffs = radial_coeffs(self.dim, &rule, &vals);
        let kernel = BdKernel::new(self.dim)?;
        Ok(hankel_sum(&kernel, &rule.nodes, &coeffs, freqs).into_iter().map(|z| z.re).collect())
    }
}

/// A constructed bump with its tabulated profiles.
#[derive(Debug, Clone)]
pub struct Bump {
    pub spec: BumpSpec,
    pub base: BaseProfile,
    lap: Vec<f64>,
    /// ψ̂_◦ on [0, ζ_max].
    pub psi0_hat: RadialProfile,
    /// ψ̂ = ψ̂_◦² on the same grid, the radial symbol a(ρ).
    pub a: RadialProfile,
    /// Spatial Ψ (profile of ψ) on [0, 2/λ], zero beyond.
    pub psi: RadialProfile,
    psi_fast: UniformTable,
    a_fast: UniformTable,
}

/// Points per unit frequency in the ψ̂ tables.
const FREQ_DENSITY: f64 = 40.0;
/// Points in the spatial table of Ψ.
const PSI_POINTS: usize = 2001;

impl Bump {
    pub fn new(spec: BumpSpec) -> Result<Self> {
        spec.validate()?;
        let base = BaseProfile::new(spec.dim, spec.chi_power());
        let lap = base.laplacian_coeffs(spec.order);
        let lambda = spec.scale;
        let zmax = spec.zeta_max();
        let n = (zmax * FREQ_DENSITY) as usize + 1;
        let zgrid = linspace(0.0, zmax, n);
        let w: Vec<f64> = zgrid.iter().map(|z| z / lambda).collect();
        let chi_hat = base.transform(&w)?;
        let m = spec.order as i32;
        let psi0_hat_vals: Vec<C64> = zgrid
            .iter()
            .zip(&chi_hat)
            .map(|(z, c)| C64::new((-4.0 * PI * PI * z * z / (lambda * lambda)).powi(m) * c, 0.0))
            .collect();
        let a_vals: Vec<C64> = psi0_hat_vals.iter().map(|v| v * v).collect();
        let psi0_hat = RadialProfile::new(spec.dim, zgrid.clone(), psi0_hat_vals, None)?;
        let a = RadialProfile::new(spec.dim, zgrid, a_vals, None)?;

        for probe in linspace(0.25, 4.0, 301).into_iter().filter(|_| spec.check_nonvanishing) {
            if psi0_hat.eval(probe).norm() < 1e-12 * psi0_hat.max_abs() {
                return Err(RmlError::Construction(format!(
                    "psi_o hat vanishes near frequency {probe:.4} inside [1/4, 4]"
                )));
            }
        }

        // Spatial Ψ: inverse transform of a computed from χ̂ evaluated at the quadrature nodes.
        let rho_max = spec.psi_support();
        let out = linspace(0.0, rho_max, PSI_POINTS);
        let breaks = linspace(0.0, zmax, (zmax as usize).max(8) + 1);
        let rule = Rule::composite(&breaks, f64::INFINITY, 16);
        let wn: Vec<f64> = rule.nodes.iter().map(|z| z / lambda).collect();
        let chi_n = base.transform(&wn)?;
        let vals: Vec<C64> = rule
            .nodes
            .iter()
            .zip(&chi_n)
            .map(|(z, c)| {
                let h = (-4.0 * PI * PI * z * z / (lambda * lambda)).powi(m) * c;
                C64::new(h * h, 0.0)
            })
            .collect();
        let coeffs = radial_coeffs(spec.dim, &rule, &vals);
        let kernel = BdKernel::new(spec.dim)?;
        let mut psi_vals = hankel_sum(&kernel, &rule.nodes, &coeffs, &out);
        for v in psi_vals.iter_mut() {
            v.im = 0.0;
        }
        *psi_vals.last_mut().expect("nonempty") = C64::new(0.0, 0.0);
        let psi_fast = UniformTable::new(0.0, rho_max, psi_vals.iter().map(|v| v.re).collect());
        let a_fast = UniformTable::new(0.0, zmax, a.values().iter().map(|v| v.re).collect());
        let psi = RadialProfile::new(spec.dim, out, psi_vals, None)?;
        Ok(Self { spec, base, lap, psi0_hat, a, psi, psi_fast, a_fast })
    }

    /// ψ_◦(ρ) from the exact polynomial Laplacian: λ^d (Δ^M χ)(λρ).
    pub fn psi0(&self, rho: f64) -> f64 {
        let x = self.spec.scale * rho;
        if x >= 1.0 {
            return 0.0;
        }
        let u = 1.0 - x * x;
        let mut acc = 0.0;
        for c in self.lap.iter().rev() {
            acc = acc * u + c;
        }
        self.spec.scale.powi(self.spec.dim as i32) * acc
    }

    /// Ψ(ρ), exactly zero beyond 2/λ.
    pub fn psi(&self, rho: f64) -> f64 {
        if rho >= self.spec.psi_support() {
            0.0
        } else {
            self.psi_fast.eval(rho)
        }
    }

    /// The symbol a(ζ) = ψ̂(ζ), zero beyond ζ_max.
    pub fn a(&self, zeta: f64) -> f64 {
        self.a_fast.eval(zeta)
    }

    /// Shared instance per specification; construction costs a few hundred milliseconds.
    pub fn shared(spec: BumpSpec) -> Result<std::sync::Arc<Bump>> {
        use std::sync::{Arc, Mutex, OnceLock};
        static CACHE: OnceLock<Mutex<Vec<(BumpSpec, Arc<Bump>)>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(Vec::new()));
        if let Some((_, b)) = cache.lock().expect("bump cache").iter().find(|(s, _)| *s == spec) {
            return Ok(b.clone());
        }
        let b = Arc::new(Bump::new(spec)?);
        cache.lock().expect("bump cache").push((spec, b.clone()));
        Ok(b)
    }

    /// Spatial profile of ψ_◦ sampled on `n` points of [0, 1/λ].
    pub fn psi0_profile(&self, n: usize) -> Result<RadialProfile> {
        RadialProfile::from_fn(self.spec.dim, linspace(0.0, 1.0 / self.spec.scale, n), |r| self.psi0(r))
    }
}

/// (ψ_◦ spatial profile, ψ̂_◦ frequency profile) for a bump specification.
pub fn make_bump(spec: BumpSpec) -> Result<(RadialProfile, RadialProfile)> {
    let b = Bump::new(spec)?;
    Ok((b.psi0_profile(801)?, b.psi0_hat.clone()))
}

/// Check the analytic ψ_◦ against the inverse transform of the tabulated ψ̂_◦; returns the
/// relative sup deviation.
pub fn psi0_transform_consistency(b: &Bump) -> Result<f64> {
    let out = linspace(0.0, 1.2 / b.spec.scale, 121);
    let breaks: Vec<f64> = b.psi0_hat.grid().iter().step_by(8).copied().collect();
    let t = hankel_fn(
        b.spec.dim,
        |z| b.psi0_hat.eval(z),
        &breaks,
        &out,
        HankelOptions { estimate_error: false, ..Default::default() },
    )?;
    let scale = out.iter().map(|r| b.psi0(*r).abs()).fold(0.0, f64::max);
    Ok(out
        .iter()
        .zip(t.profile.values())
        .map(|(r, v)| (v.re - b.psi0(*r)).abs())
        .fold(0.0, f64::max)
        / scale)
}
