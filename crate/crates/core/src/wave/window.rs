//! The frequency window ϑ and its oscillatory transform Θ(σ) = ∫₀^∞ ϑ(s) s^{d−1} e^{isσ} ds.

use crate::specfun::Rule;
use crate::{Result, RmlError, C64};
use serde::{Deserialize, Serialize};

/// Polynomial in a local variable t ∈ [0, 1], coefficients in increasing degree.
#[derive(Debug, Clone, PartialEq)]
struct Poly(Vec<f64>);

impl Poly {
    fn eval(&self, t: f64) -> f64 {
        self.0.iter().rev().fold(0.0, |acc, c| acc * t + c)
    }

    fn derivative(&self) -> Poly {
        Poly(self.0.iter().enumerate().skip(1).map(|(k, c)| k as f64 * c).collect())
    }

    fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![0.0; self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }
}

fn binom(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Smoothstep of order n: 0 at t = 0, 1 at t = 1, first n derivatives vanishing at both ends.
fn smoothstep(n: u32) -> Poly {
    let mut c = vec![0.0; 2 * n as usize + 2];
    for k in 0..=n {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        c[(n + k + 1) as usize] = sign * binom(n + k, k) * binom(2 * n + 1, n - k);
    }
    Poly(c)
}

/// ϑ: 0 below 1/8 and above 8, 1 on [1/4, 4], with C^n polynomial transitions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    /// Number of continuous derivatives at the transition points.
    pub smoothness: u32,
}

/// Breakpoints of ϑ.
pub const WINDOW_BREAKS: [f64; 4] = [0.125, 0.25, 4.0, 8.0];

impl Default for Window {
    fn default() -> Self {
        Self { smoothness: 6 }
    }
}

impl Window {
    pub fn new(smoothness: u32) -> Result<Self> {
        if smoothness == 0 || smoothness > 12 {
            return Err(RmlError::Usage(format!("window smoothness must be in 1..=12, got {smoothness}")));
        }
        Ok(Self { smoothness })
    }

    pub fn eval(&self, s: f64) -> f64 {
        let [a, b, c, e] = WINDOW_BREAKS;
        if s <= a || s >= e {
            0.0
        } else if s < b {
            smoothstep(self.smoothness).eval((s - a) / (b - a))
        } else if s <= c {
            1.0
        } else {
            smoothstep(self.smoothness).eval((e - s) / (e - c))
        }
    }

    /// ϑ(s) s^{d−1} on each piece, as polynomials in the local variable.
    fn pieces(&self, d: usize) -> Vec<Piece> {
        let st = smoothstep(self.smoothness);
        let rev = Poly(
            // S(1 − t) expanded in t.
            {
                let n = st.0.len();
                let mut out = vec![0.0; n];
                for (k, c) in st.0.iter().enumerate() {
                    // (1 − t)^k
                    for j in 0..=k {
                        let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                        out[j] += c * binom(k as u32, j as u32) * sign;
                    }
                }
                out
            },
        );
        let [a, b, c, e] = WINDOW_BREAKS;
        let spans = [(a, b, st), (b, c, Poly(vec![1.0])), (c, e, rev)];
        spans
            .into_iter()
            .map(|(lo, hi, win)| {
                let w = hi - lo;
                let mut pw = Poly(vec![1.0]);
                for _ in 1..d {
                    pw = pw.mul(&Poly(vec![lo, w]));
                }
                Piece { lo, hi, poly: win.mul(&pw) }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Piece {
    lo: f64,
    hi: f64,
    poly: Poly,
}

impl Piece {
    fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// s-derivatives of all orders at the local point t.
    fn derivs(&self, t: f64) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.poly.0.len());
        let mut p = self.poly.clone();
        let mut scale = 1.0;
        while !p.0.is_empty() {
            out.push(p.eval(t) * scale);
            p = p.derivative();
            scale /= self.width();
        }
        out
    }

    fn value(&self, s: f64) -> f64 {
        self.poly.eval((s - self.lo) / self.width())
    }
}

/// Boundary terms e^{icσ} Σ_m (−1)^m D_m / (iσ)^{m+1}; returns the sum and the largest term.
fn boundary_series(c: f64, jumps: &[f64], sigma: C64) -> (C64, f64) {
    let isig = C64::new(0.0, 1.0) * sigma;
    let inv = 1.0 / isig;
    let mut pw = inv;
    let mut sum = C64::new(0.0, 0.0);
    let mut big = 0.0f64;
    for (m, dm) in jumps.iter().enumerate() {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let term = pw * (sign * dm);
        big = big.max(term.norm());
        sum += term;
        pw *= inv;
    }
    let ph = (C64::new(0.0, c) * sigma).exp();
    (ph * sum, big * ph.norm())
}

/// Θ for a window and dimension, evaluated at complex arguments.
///
/// Away from the origin the transform is the exact finite sum of derivative jumps at the
/// breakpoints (integration by parts on each polynomial piece), which is free of
/// cancellation; near the origin each transition piece is integrated by Gauss–Legendre.
#[derive(Debug, Clone)]
pub struct Theta {
    pub dim: usize,
    pub window: Window,
    pieces: Vec<Piece>,
    /// (breakpoint, left − right derivative jumps) for the lower and the upper cluster.
    lower: [(f64, Vec<f64>); 2],
    upper: [(f64, Vec<f64>); 2],
    /// Middle-piece derivatives at its two ends.
    mid_lo: Vec<f64>,
    mid_hi: Vec<f64>,
    /// Thresholds on |σ| above which the jump series of each cluster is used.
    pub switch_lower: f64,
    pub switch_upper: f64,
}

fn diff(left: &[f64], right: &[f64]) -> Vec<f64> {
    let n = left.len().max(right.len());
    (0..n).map(|m| left.get(m).unwrap_or(&0.0) - right.get(m).unwrap_or(&0.0)).collect()
}

/// Threshold on |σ| beyond which every term of each jump series is at most 2^{−(m−m₀)} times
/// the leading one (m₀ the first nonzero order), so the finite sum has no cancellation.
fn switch_point(series: &[&[f64]]) -> f64 {
    let mut r = 1.0f64;
    for s in series {
        let Some(m0) = s.iter().position(|v| *v != 0.0) else { continue };
        for m in m0 + 1..s.len() {
            r = r.max((s[m].abs() / s[m0].abs()).powf(1.0 / (m - m0) as f64));
        }
    }
    2.0 * r
}

impl Theta {
    pub fn new(dim: usize, window: Window) -> Result<Self> {
        if dim < 2 {
            return Err(RmlError::Domain(format!("Θ needs d >= 2, got {dim}")));
        }
        let pieces = window.pieces(dim);
        let (l, m, u) = (&pieces[0], &pieces[1], &pieces[2]);
        let zero: Vec<f64> = Vec::new();
        // ϑ s^{d−1} is C^n at every breakpoint, so jumps of order ≤ n vanish exactly; only
        // rounding noise would remain there.
        let exact = |mut j: Vec<f64>| {
            j.iter_mut().take(window.smoothness as usize + 1).for_each(|v| *v = 0.0);
            j
        };
        let j0 = exact(diff(&zero, &l.derivs(0.0)));
        let j1 = exact(diff(&l.derivs(1.0), &m.derivs(0.0)));
        let j2 = exact(diff(&m.derivs(1.0), &u.derivs(0.0)));
        let j3 = exact(diff(&u.derivs(1.0), &zero));
        let switch_lower = switch_point(&[&j0, &j1]);
        let switch_upper = switch_point(&[&j2, &j3]);
        Ok(Self {
            dim,
            window,
            mid_lo: m.derivs(0.0),
            mid_hi: m.derivs(1.0),
            lower: [(l.lo, j0), (l.hi, j1)],
            upper: [(u.lo, j2), (u.hi, j3)],
            pieces,
            switch_lower,
            switch_upper,
        })
    }

    /// ϑ(s) s^{d−1}.
    pub fn integrand(&self, s: f64) -> f64 {
        self.pieces.iter().find(|p| s >= p.lo && s <= p.hi).map_or(0.0, |p| p.value(s))
    }

    fn quad_piece(&self, p: &Piece, sigma: C64) -> C64 {
        let a = sigma.re.abs().max(1e-300);
        let b = sigma.im.abs().max(1e-300);
        let len = (4.0 * std::f64::consts::PI / a).min(8.0 / b).min(p.width());
        let rule = Rule::composite(&[p.lo, p.hi], len, 16);
        let i = C64::new(0.0, 1.0);
        rule.nodes.iter().zip(&rule.weights).map(|(s, w)| (i * sigma * s).exp() * (w * p.value(*s))).sum()
    }

    /// Gauss–Legendre evaluation over all pieces (reference path).
    pub fn eval_quadrature(&self, sigma: C64) -> C64 {
        self.pieces.iter().map(|p| self.quad_piece(p, sigma)).sum()
    }

    pub fn eval(&self, sigma: C64) -> C64 {
        let r = sigma.norm();
        if r < 4.0 * self.dim as f64 {
            return self.eval_quadrature(sigma);
        }
        // Θ = (∫_L − B_mid(1/4)) + (B_mid(4) + ∫_U), where B_mid(c) is the middle piece's
        // boundary term at c.
        let lower = if r >= self.switch_lower {
            self.lower.iter().map(|(c, j)| boundary_series(*c, j, sigma).0).sum()
        } else {
            self.quad_piece(&self.pieces[0], sigma) - boundary_series(self.pieces[1].lo, &self.mid_lo, sigma).0
        };
        let upper = if r >= self.switch_upper {
            self.upper.iter().map(|(c, j)| boundary_series(*c, j, sigma).0).sum()
        } else {
            self.quad_piece(&self.pieces[2], sigma) + boundary_series(self.pieces[1].hi, &self.mid_hi, sigma).0
        };
        lower + upper
    }

    /// Θ at a real argument.
    pub fn at(&self, sigma: f64) -> C64 {
        self.eval(C64::new(sigma, 0.0))
    }
}

/// Θ(σ) = ∫₀^∞ ϑ(s)s^{d−1}e^{isσ} ds for the given window.
pub fn theta_kernel(sigma: f64, window: Window, d: usize) -> Result<C64> {
    Ok(Theta::new(d, window)?.at(sigma))
}
