//! The spherical Bessel-type kernel B_d(s) = ∫_{S^{d−1}} e^{is⟨e₁,θ⟩} dθ = (2π)^{d/2} s^{−ν} J_ν(s),
//! ν = (d−2)/2.

use crate::{Result, RmlError};
use std::f64::consts::PI;

/// Below this argument the power series is used.
const SERIES_CUTOFF: f64 = 12.0;
const SERIES_TERMS: usize = 34;
/// Largest supported dimension; keeps ν below the recurrence-stable range at s ≥ 12.
pub const MAX_DIM: usize = 24;

/// Gamma function for positive arguments (Lanczos, g = 7).
pub fn gamma(x: f64) -> f64 {
    const G: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    let x = x - 1.0;
    let mut a = G[0];
    let t = x + 7.5;
    for (i, g) in G.iter().enumerate().skip(1) {
        a += g / (x + i as f64);
    }
    (2.0 * PI).sqrt() * t.powf(x + 0.5) * (-t).exp() * a
}

/// Surface area of the unit sphere S^{n−1} ⊂ ℝ^n.
pub fn sphere_area(n: usize) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / gamma(n as f64 / 2.0)
}

/// Volume of the unit ball in ℝ^n.
pub fn ball_volume(n: usize) -> f64 {
    sphere_area(n) / n as f64
}

/// Precomputed evaluator for B_d.
#[derive(Debug, Clone)]
pub struct BdKernel {
    d: usize,
    nu: f64,
    scale: f64,
    series: [f64; SERIES_TERMS],
}

impl BdKernel {
    pub fn new(d: usize) -> Result<Self> {
        if d < 2 {
            return Err(RmlError::Domain(format!("B_d needs d >= 2, got {d}")));
        }
        if d > MAX_DIM {
            return Err(RmlError::Domain(format!("B_d supports d <= {MAX_DIM}, got {d}")));
        }
        let nu = (d as f64 - 2.0) / 2.0;
        let scale = (2.0 * PI).powf(d as f64 / 2.0);
        // s^{−ν}J_ν(s) = Σ_k (−1)^k s^{2k} / (2^{2k+ν} k! Γ(k+ν+1))
        let mut series = [0.0; SERIES_TERMS];
        let mut c = 1.0 / (2f64.powf(nu) * gamma(nu + 1.0));
        for (k, slot) in series.iter_mut().enumerate() {
            *slot = c;
            let k1 = k as f64 + 1.0;
            c *= -1.0 / (4.0 * k1 * (k1 + nu));
        }
        Ok(Self { d, nu, scale, series })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// B_d(s) for s ≥ 0 (the kernel is even in s).
    #[inline]
    pub fn eval(&self, s: f64) -> f64 {
        self.scale * self.scaled_j(s.abs())
    }

    /// s^{−ν} J_ν(s).
    #[inline]
    fn scaled_j(&self, s: f64) -> f64 {
        if s < SERIES_CUTOFF {
            let z = s * s;
            let terms = if s < 3.0 {
                15
            } else if s < 7.0 {
                24
            } else {
                SERIES_TERMS
            };
            let mut acc = 0.0;
            for c in self.series[..terms].iter().rev() {
                acc = acc * z + c;
            }
            return acc;
        }
        if self.d % 2 == 1 {
            half_integer_scaled(self.d, s)
        } else {
            integer_scaled(self.nu as usize, s)
        }
    }
}

/// Asymptotic P, Q series of Hankel's expansion for order ν at argument s.
#[inline]
fn hankel_pq(nu: f64, s: f64) -> (f64, f64) {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut t = 1.0;
    let mut prev = f64::INFINITY;
    let inv = 1.0 / (8.0 * s);
    for k in 1..60 {
        let kf = k as f64;
        let odd = 2.0 * kf - 1.0;
        t *= (mu - odd * odd) * inv / kf;
        let at = t.abs();
        if at > prev {
            break;
        }
        match k % 4 {
            1 => q += t,
            2 => p -= t,
            3 => q -= t,
            _ => p += t,
        }
        if at < 1e-17 {
            break;
        }
        prev = at;
    }
    (p, q)
}

/// s^{−n} J_n(s) for integer n at s ≥ 12 via J_0, J_1 asymptotics and forward recurrence.
#[inline]
fn integer_scaled(n: usize, s: f64) -> f64 {
    let (sn, cs) = (s - 0.25 * PI).sin_cos();
    let amp = (2.0 / (PI * s)).sqrt();
    // χ_1 = χ_0 − π/2: cos χ_1 = sin χ_0, sin χ_1 = −cos χ_0.
    let j1 = {
        let (p, q) = hankel_pq(1.0, s);
        amp * (p * sn + q * cs)
    };
    if n == 1 {
        return j1 / s;
    }
    let j0 = {
        let (p, q) = hankel_pq(0.0, s);
        amp * (p * cs - q * sn)
    };
    if n == 0 {
        return j0;
    }
    let (mut jm, mut j) = (j0, j1);
    for m in 1..n {
        let next = 2.0 * m as f64 / s * j - jm;
        jm = j;
        j = next;
    }
    j / s.powi(n as i32)
}

/// s^{−ν} J_ν(s) for ν = m + 1/2 (odd d = 2m + 3) using spherical Bessel functions:
/// s^{−ν}J_ν(s) = √(2/π) s^{−m} j_m(s).
#[inline]
fn half_integer_scaled(d: usize, s: f64) -> f64 {
    let m = (d - 3) / 2;
    let (sn, cs) = s.sin_cos();
    let j0 = sn / s;
    let val = if m == 0 {
        j0
    } else {
        let mut jm = j0;
        let mut j = sn / (s * s) - cs / s;
        for l in 1..m {
            let next = (2 * l + 1) as f64 / s * j - jm;
            jm = j;
            j = next;
        }
        j
    };
    (2.0 / PI).sqrt() * val / s.powi(m as i32)
}

/// B_d(s) with domain checks.
pub fn bd_kernel(d: usize, s: f64) -> Result<f64> {
    if !(s >= 0.0) {
        return Err(RmlError::Domain(format!("B_d needs s >= 0, got {s}")));
    }
    Ok(BdKernel::new(d)?.eval(s))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        let b3 = BdKernel::new(3).unwrap();
        for &s in &[0.3f64, 1.0, 5.0, 11.9, 12.1, 40.0, 333.3] {
            let exact = 4.0 * PI * f64::sin(s) / s;
            assert!((b3.eval(s) - exact).abs() < 1e-12, "d=3 s={s}");
        }
        assert!(bd_kernel(3, PI).unwrap().abs() < 1e-14);
        assert!((bd_kernel(2, 0.0).unwrap() - 2.0 * PI).abs() < 1e-14);
        assert!((bd_kernel(4, 0.0).unwrap() - 2.0 * PI * PI).abs() < 1e-12);
        // d = 5: (2π)^{5/2} s^{-3/2} J_{3/2}(s) = 8π² (sin s − s cos s)/s³.
        let b5 = BdKernel::new(5).unwrap();
        for &s in &[0.7f64, 3.0, 13.0, 90.0] {
            let exact = 8.0 * PI * PI * (s.sin() - s * s.cos()) / s.powi(3);
            assert!((b5.eval(s) - exact).abs() < 1e-11, "d=5 s={s}");
        }
    }

    #[test]
    fn series_and_asymptotic_agree_at_cutoff() {
        for d in 2..=8 {
            let k = BdKernel::new(d).unwrap();
            let below = k.eval(SERIES_CUTOFF - 1e-9);
            let above = k.eval(SERIES_CUTOFF + 1e-9);
            assert!((below - above).abs() < 1e-9 * k.eval(0.0), "d={d}");
        }
    }

    #[test]
    fn gamma_values() {
        assert!((gamma(5.0) - 24.0).abs() < 1e-10);
        assert!((gamma(0.5) - PI.sqrt()).abs() < 1e-13);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-12);
    }

    #[test]
    fn rejects_low_dimension() {
        assert!(bd_kernel(1, 1.0).is_err());
    }
}
