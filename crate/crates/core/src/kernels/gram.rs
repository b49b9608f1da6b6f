//! Scalar products ⟨F_{y,r}, F_{y′,r′}⟩ through the spectral formula
//! ∫ r^{d−1}B_d(2πrρ) r′^{d−1}B_d(2πr′ρ) B_d(2π|y−y′|ρ) a(ρ)² ρ^{d−1} dρ.

use super::bump::Bump;
use super::shell::ANNULUS_HALF_WIDTH;
use crate::density::{Member, PointFamily};
use crate::specfun::{BdKernel, Rule};
use crate::{Result, RmlError};
use std::f64::consts::PI;

/// a(ρ)² is below 1e−20 of its peak beyond 6λ.
fn gram_zeta_max(bump: &Bump) -> f64 {
    6.0 * bump.spec.scale
}

/// True when the conservative annuli around the two spheres are disjoint.
pub fn supports_disjoint(a: &Member, b: &Member) -> bool {
    let dy = a.center_dist(b);
    let w = 2.0 * ANNULUS_HALF_WIDTH;
    (a.r - b.r).abs() > dy + w || dy > a.r + b.r + w
}

/// Exact-support overlap test for the annuli of half-width 2/λ.
pub fn supports_overlap_exact(bump: &Bump, a: &Member, b: &Member) -> bool {
    let dy = a.center_dist(b);
    let w = 2.0 * bump.spec.psi_support();
    (a.r - b.r).abs() < dy + w && dy < a.r + b.r + w
}

/// Evaluator with the kernel and symbol prepared once.
#[derive(Debug, Clone)]
pub struct Gram<'a> {
    bump: &'a Bump,
    kernel: BdKernel,
    zmax: f64,
    /// Gauss panels per two periods of the combined oscillation.
    pub order: usize,
}

impl<'a> Gram<'a> {
    pub fn new(bump: &'a Bump) -> Result<Self> {
        bump.spec.require_shell_support()?;
        Ok(Self { bump, kernel: BdKernel::new(bump.spec.dim)?, zmax: gram_zeta_max(bump), order: 16 })
    }

    fn integrate(&self, r1: f64, r2: f64, dy: f64, cycles: f64) -> (f64, f64) {
        let d = self.bump.spec.dim as i32;
        let freq = r1 + r2 + dy + 1.0;
        let rule = Rule::composite(&[0.0, self.zmax], cycles / freq, self.order);
        let c = (r1 * r2).powi(d - 1);
        let mut sum = 0.0;
        let mut abs = 0.0;
        for (z, w) in rule.nodes.iter().zip(&rule.weights) {
            let a = self.bump.a(*z);
            let t = 2.0 * PI * z;
            let v = w
                * a
                * a
                * z.powi(d - 1)
                * self.kernel.eval(t * r1)
                * self.kernel.eval(t * r2)
                * self.kernel.eval(t * dy);
            sum += v;
            abs += v.abs();
        }
        (c * sum, c * abs)
    }

    /// ⟨F_a, F_b⟩ without the convergence check; exact 0 for disjoint supports.
    pub fn entry_fast(&self, a: &Member, b: &Member) -> f64 {
        if supports_disjoint(a, b) {
            return 0.0;
        }
        self.integrate(a.r, b.r, a.center_dist(b), 2.0).0
    }

    /// ⟨F_a, F_b⟩ with a coarse-rule comparison; fails if the two rules disagree beyond
    /// 1e−9 of the absolute integrand mass.
    pub fn entry(&self, a: &Member, b: &Member) -> Result<f64> {
        if a.r < 1.0 || b.r < 1.0 {
            return Err(RmlError::Domain("gram entries need radii >= 1".into()));
        }
        if supports_disjoint(a, b) {
            return Ok(0.0);
        }
        let dy = a.center_dist(b);
        let (fine, abs) = self.integrate(a.r, b.r, dy, 2.0);
        let (coarse, _) = self.integrate(a.r, b.r, dy, 4.0);
        let err = (fine - coarse).abs();
        if err > 1e-9 * abs.max(f64::MIN_POSITIVE) {
            return Err(RmlError::Numerical(format!(
                "gram quadrature did not converge: achieved {err:.3e} against mass {abs:.3e}"
            )));
        }
        Ok(fine)
    }
}

/// ⟨F_{y,r}, F_{y′,r′}⟩ (real, since ψ is real and radial).
pub fn gram_entry(a: &Member, b: &Member, bump: &Bump) -> Result<f64> {
    Gram::new(bump)?.entry(a, b)
}

/// For each member, the other members whose exact supports can meet its own.
pub fn neighbor_lists(bump: &Bump, family: &PointFamily) -> Vec<Vec<usize>> {
    let m = family.members();
    let mut out = vec![Vec::new(); m.len()];
    for i in 0..m.len() {
        for j in i + 1..m.len() {
            if supports_overlap_exact(bump, &m[i], &m[j]) {
                out[i].push(j);
                out[j].push(i);
            }
        }
    }
    out
}

/// Sparse symmetric Gram matrix as (i, j, value) for i ≤ j over overlapping pairs.
pub fn gram_pairs(bump: &Bump, family: &PointFamily) -> Result<Vec<(usize, usize, f64)>> {
    let g = Gram::new(bump)?;
    let nb = neighbor_lists(bump, family);
    let m = family.members();
    let mut out = Vec::new();
    for i in 0..m.len() {
        out.push((i, i, g.entry_fast(&m[i], &m[i])));
        for &j in nb[i].iter().filter(|&&j| j > i) {
            out.push((i, j, g.entry_fast(&m[i], &m[j])));
        }
    }
    Ok(out)
}

/// Dense Gram matrix.
pub fn gram_matrix(bump: &Bump, family: &PointFamily) -> Result<Vec<Vec<f64>>> {
    let n = family.len();
    let mut g = vec![vec![0.0; n]; n];
    for (i, j, v) in gram_pairs(bump, family)? {
        g[i][j] = v;
        g[j][i] = v;
    }
    Ok(g)
}
