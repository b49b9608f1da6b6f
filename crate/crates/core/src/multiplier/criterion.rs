//! The dilation criterion sup_t ‖𝓕^{−1}[m(t·)η̂]‖_p and empirical lower bounds for ‖T_m‖.

use super::family::{MultiplierSpec, TestFunction, ETA_SUPPORT};
use super::kernel::{apply_radial, kernel_lp_of, spectral_rule, synthesize, ApplyOptions, KernelOptions};
use crate::rng::stream;
use crate::specfun::exponents::p_d_f64;
use crate::specfun::{linspace, lp_norm_radial, RadialProfile};
use crate::{Result, RmlError, C64};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Geometric grid t = ratio^j over a range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TGrid {
    pub ratio: f64,
    /// Explicit [t_min, t_max]; derived from the support of m when absent.
    pub range: Option<(f64, f64)>,
}

impl Default for TGrid {
    fn default() -> Self {
        Self { ratio: 2f64.powf(0.25), range: None }
    }
}

/// Octaves of t examined beyond a support end at 0 or ∞.
const OPEN_END_OCTAVES: i32 = 4;

impl TGrid {
    /// Scales for m, and whether they cover every t with m(t·)η̂ ≢ 0.
    pub fn points(&self, m: &MultiplierSpec) -> Result<(Vec<f64>, bool)> {
        if !(self.ratio > 1.0) {
            return Err(RmlError::Usage(format!("t-grid ratio must exceed 1, got {}", self.ratio)));
        }
        let (a, b) = m.support();
        let (lo, hi, exhaustive) = match self.range {
            Some((lo, hi)) => {
                if !(lo > 0.0 && hi >= lo) {
                    return Err(RmlError::Usage(format!("bad t range [{lo}, {hi}]")));
                }
                (lo, hi, lo <= a / ETA_SUPPORT.1 && hi >= b / ETA_SUPPORT.0)
            }
            None => {
                let open = 2f64.powi(OPEN_END_OCTAVES);
                let mid = m.natural_scale();
                let lo = if a > 0.0 { a / ETA_SUPPORT.1 } else { mid / open };
                let hi = if b.is_finite() { b / ETA_SUPPORT.0 } else { mid * open };
                (lo, hi, a > 0.0 && b.is_finite())
            }
        };
        let l = self.ratio.ln();
        let j0 = (lo.ln() / l - 1e-9).floor() as i64;
        let j1 = (hi.ln() / l + 1e-9).ceil() as i64;
        Ok(((j0..=j1).map(|j| self.ratio.powf(j as f64)).collect(), exhaustive))
    }
}

/// Largest factor by which the kernel radius grows for narrow products m(t·)η̂.
const MAX_RADIUS_GROWTH: f64 = 4.0;

/// 𝓕^{−1}[m(t·)η̂] at one scale.
#[derive(Debug, Clone)]
pub struct ScaleKernel {
    pub kernel: RadialProfile,
    /// m(t·)η̂ is C^∞, so the kernel is a Schwartz function.
    pub smooth: bool,
}

/// 𝓕^{−1}[m(t·)η̂]; None when the product vanishes identically. The radius is r_max,
/// enlarged up to 4-fold when the product lives on a band narrower than 3/2.
pub fn criterion_kernel(
    m: &MultiplierSpec,
    eta: &TestFunction,
    t: f64,
    opts: KernelOptions,
) -> Result<Option<ScaleKernel>> {
    if eta.dim != m.dim {
        return Err(RmlError::Usage(format!("eta dim {} differs from multiplier dim {}", eta.dim, m.dim)));
    }
    let (a, b) = m.support();
    let lo = ETA_SUPPORT.0.max(a / t);
    let hi = ETA_SUPPORT.1.min(b / t);
    if !(hi > lo) || m.is_zero() {
        return Ok(None);
    }
    let breaks: Vec<_> = m
        .breaks()
        .into_iter()
        .map(|mut b| {
            b.at /= t;
            b
        })
        .collect();
    let tol = 1e-12 * hi;
    let smooth = breaks.iter().filter(|b| b.at >= lo - tol && b.at <= hi + tol).all(|b| b.smooth);
    let r_max = opts.r_max * (1.5 / (hi - lo)).clamp(1.0, MAX_RADIUS_GROWTH);
    let rule = spectral_rule(lo, hi, &breaks, 2.0 / r_max);
    let eh = eta.hat(&rule.nodes)?;
    let vals: Vec<C64> = rule.nodes.iter().zip(&eh).map(|(z, e)| m.eval(t * z) * e).collect();
    let kernel = synthesize(m.dim, &rule, &vals, ETA_SUPPORT.1, r_max)?;
    Ok(Some(ScaleKernel { kernel, smooth }))
}

/// The spatial profile of η on [0, r_max].
pub fn eta_profile(eta: &TestFunction, opts: KernelOptions) -> Result<RadialProfile> {
    let rule = spectral_rule(ETA_SUPPORT.0, ETA_SUPPORT.1, &[], 2.0 / opts.r_max);
    let vals: Vec<C64> = eta.hat(&rule.nodes)?.into_iter().map(|v| C64::new(v, 0.0)).collect();
    synthesize(eta.dim, &rule, &vals, ETA_SUPPORT.1, opts.r_max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionRow {
    pub t: f64,
    /// ‖𝓕^{−1}[m(t·)η̂]‖_p with tail extrapolation.
    pub norm: f64,
    pub truncated: f64,
    pub tail_exponent: Option<f64>,
    pub finite: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    pub sup: f64,
    pub t_star: f64,
    pub table: Vec<CriterionRow>,
    pub flags: Vec<String>,
    pub p: f64,
    pub ratio: f64,
}

/// sup over the t-grid of ‖𝓕^{−1}[m(t·)η̂]‖_p, with the per-t table.
pub fn criterion_norm(
    m: &MultiplierSpec,
    eta: &TestFunction,
    grid: TGrid,
    opts: KernelOptions,
) -> Result<CriterionReport> {
    let (ts, exhaustive) = grid.points(m)?;
    let mut flags = Vec::new();
    if !exhaustive {
        flags.push("grid-truncated".to_string());
    }
    if m.dim < 4 || m.p >= p_d_f64(m.dim) {
        flags.push(format!("outside proven range: d={}, p={}", m.dim, m.p));
    }
    let mut table = Vec::with_capacity(ts.len());
    for t in ts {
        let row = match criterion_kernel(m, eta, t, opts)? {
            None => CriterionRow { t, norm: 0.0, truncated: 0.0, tail_exponent: None, finite: Some(true) },
            Some(sk) => {
                let mut lp = kernel_lp_of(&sk.kernel, m.p)?;
                if sk.smooth && lp.finite != Some(true) {
                    // Schwartz kernel whose decay has not set in by the end of the grid.
                    lp.finite = Some(true);
                    lp.norm = lp.truncated;
                    flags.push(format!("t={t:.6}: smooth product, tail beyond r={:.1} neglected", sk.kernel.rmax()));
                } else if lp.finite.is_none() {
                    flags.push(format!("t={t:.6}: {}", lp.diagnostics.join("; ")));
                }
                let exponent = lp.tail.filter(|f| !f.noise_limited).map(|f| f.exponent);
                CriterionRow { t, norm: lp.norm, truncated: lp.truncated, tail_exponent: exponent, finite: lp.finite }
            }
        };
        table.push(row);
    }
    let (sup, t_star) = table
        .iter()
        .fold((0.0f64, f64::NAN), |(s, ts), r| if r.norm > s || ts.is_nan() { (r.norm.max(s), r.t) } else { (s, ts) });
    Ok(CriterionReport { sup, t_star, table, flags, p: m.p, ratio: grid.ratio })
}

/// Test functions used for empirical lower bounds of ‖T_m‖_{p→p}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSpec {
    /// Radii s of the radial bumps (1 − |x|²/s²)^{d+4}_+.
    pub dilations: Vec<f64>,
    /// Number of random superpositions Σ a_z η(· − x_z).
    pub superpositions: usize,
    pub centers: usize,
    /// Centers are uniform in [−spread, spread]^d.
    pub spread: f64,
    pub samples: usize,
    pub apply: ApplyOptions,
}

impl Default for SuiteSpec {
    fn default() -> Self {
        Self {
            dilations: vec![0.25, 0.5, 1.0, 2.0, 4.0, 8.0],
            superpositions: 4,
            centers: 6,
            spread: 6.0,
            samples: 20_000,
            apply: ApplyOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalEntry {
    pub label: String,
    pub ratio: f64,
    /// Standard error; 0 for deterministic entries.
    pub se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalReport {
    pub max_ratio: f64,
    pub witness: String,
    pub entries: Vec<EmpiricalEntry>,
}

fn bump_profile(dim: usize, s: f64) -> Result<RadialProfile> {
    let n = dim as i32 + 4;
    RadialProfile::from_fn(dim, linspace(0.0, s, 401), |r| (1.0 - (r / s).powi(2)).max(0.0).powi(n))
}

/// Radial proposal density from a profile: mass ∝ max(|g|^p, floor) per grid shell.
struct ShellSampler {
    radii: Vec<f64>,
    cdf: Vec<f64>,
    density: Vec<f64>,
    dim: i32,
}

impl ShellSampler {
    fn new(profiles: &[&RadialProfile], p: f64) -> Self {
        let g = profiles[0].grid();
        let dim = profiles[0].dim() as i32;
        let peak: Vec<f64> = profiles.iter().map(|f| f.max_abs().powf(p)).collect();
        let area = crate::specfun::sphere_area(dim as usize);
        let mut cdf = vec![0.0];
        let mut vol = Vec::with_capacity(g.len());
        for w in g.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            let v = area * (w[1].powi(dim) - w[0].powi(dim)) / dim as f64;
            let mass: f64 = profiles
                .iter()
                .zip(&peak)
                .map(|(f, pk)| (f.eval(mid).norm().powf(p) / pk).max(1e-6 * (1.0 + mid).powi(-dim - 1)))
                .sum::<f64>()
                * v;
            cdf.push(cdf.last().copied().unwrap_or(0.0) + mass);
            vol.push(v);
        }
        let total = *cdf.last().expect("nonempty");
        let density = cdf.windows(2).zip(&vol).map(|(c, v)| (c[1] - c[0]) / total / v).collect();
        for c in cdf.iter_mut() {
            *c /= total;
        }
        Self { radii: g.to_vec(), cdf, density, dim }
    }

    fn sample<R: Rng>(&self, rng: &mut R) -> (f64, Vec<f64>) {
        let u: f64 = rng.gen();
        let i = self.cdf.partition_point(|c| *c <= u).clamp(1, self.cdf.len() - 1) - 1;
        let (a, b) = (self.radii[i].powi(self.dim), self.radii[i + 1].powi(self.dim));
        let r = (a + rng.gen::<f64>() * (b - a)).powf(1.0 / self.dim as f64);
        let mut dir: Vec<f64> = (0..self.dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let n = dir.iter().map(|x| x * x).sum::<f64>().sqrt();
        for x in dir.iter_mut() {
            *x *= r / n;
        }
        (r, dir)
    }

    fn pdf(&self, r: f64) -> f64 {
        if r >= *self.radii.last().expect("nonempty") {
            return 0.0;
        }
        let i = self.radii.partition_point(|x| *x <= r).clamp(1, self.radii.len() - 1) - 1;
        self.density[i]
    }
}

/// ‖Σ a_z K(·−x_z)‖_p / ‖Σ a_z η(·−x_z)‖_p by importance sampling with shared points.
fn superposition_ratio(
    eta: &RadialProfile,
    k: &RadialProfile,
    centers: &[Vec<f64>],
    coeffs: &[f64],
    p: f64,
    samples: usize,
    seed: u64,
    task: u64,
) -> (f64, f64) {
    let sampler = ShellSampler::new(&[eta, k], p);
    let mut rng = stream(seed, task);
    let nc = centers.len();
    let (mut sn, mut sd, mut snn, mut sdd, mut snd) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for _ in 0..samples {
        let z = rng.gen_range(0..nc);
        let (_, off) = sampler.sample(&mut rng);
        let x: Vec<f64> = centers[z].iter().zip(&off).map(|(c, o)| c + o).collect();
        let (mut fv, mut kv, mut q) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0), 0.0);
        for (c, a) in centers.iter().zip(coeffs) {
            let r = c.iter().zip(&x).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt();
            fv += eta.eval(r) * *a;
            kv += k.eval(r) * *a;
            q += sampler.pdf(r) / nc as f64;
        }
        let (n, d) = (kv.norm().powf(p) / q, fv.norm().powf(p) / q);
        sn += n;
        sd += d;
        snn += n * n;
        sdd += d * d;
        snd += n * d;
    }
    let s = samples as f64;
    let (mn, md) = (sn / s, sd / s);
    let (vn, vd, c) = (snn / s - mn * mn, sdd / s - md * md, snd / s - mn * md);
    let ratio = (mn / md).powf(1.0 / p);
    let var_log = (vn / (mn * mn) + vd / (md * md) - 2.0 * c / (mn * md)).max(0.0) / s;
    (ratio, ratio * var_log.sqrt() / p)
}

/// max over a test suite of ‖T_m f‖_p/‖f‖_p.
pub fn empirical_opnorm_lower(
    m: &MultiplierSpec,
    eta: &TestFunction,
    suite: &SuiteSpec,
    seed: u64,
) -> Result<EmpiricalReport> {
    let p = m.p;
    let mut entries = Vec::new();
    for &s in &suite.dilations {
        let f = bump_profile(m.dim, s)?;
        let g = apply_radial(m, &f, suite.apply)?;
        let num = {
            let lp = kernel_lp_of(&g, p)?;
            if lp.finite.is_none() {
                lp.truncated
            } else {
                lp.norm
            }
        };
        let den = lp_norm_radial(&f, p)?;
        entries.push(EmpiricalEntry { label: format!("radial bump s={s}"), ratio: num / den, se: 0.0 });
    }
    if suite.superpositions > 0 && suite.centers > 0 {
        let opts = KernelOptions { r_max: suite.apply.r_max };
        let t = m.natural_scale();
        let e = eta_profile(eta, opts)?;
        let k = match criterion_kernel(m, eta, t, opts)? {
            Some(sk) => sk.kernel,
            None => e.map(|_, _| C64::new(0.0, 0.0)),
        };
        for j in 0..suite.superpositions {
            let mut rng = stream(seed, 1000 + j as u64);
            let centers: Vec<Vec<f64>> = (0..suite.centers)
                .map(|_| (0..m.dim).map(|_| rng.gen_range(-suite.spread..=suite.spread)).collect())
                .collect();
            let coeffs: Vec<f64> = (0..suite.centers).map(|_| if rng.gen::<bool>() { 1.0 } else { -1.0 }).collect();
            let (ratio, se) = superposition_ratio(&e, &k, &centers, &coeffs, p, suite.samples, seed, j as u64);
            entries.push(EmpiricalEntry {
                label: format!("superposition {j} ({} centers, t={t:.4})", suite.centers),
                ratio,
                se,
            });
        }
    }
    let best = entries
        .iter()
        .max_by(|a, b| a.ratio.total_cmp(&b.ratio))
        .ok_or_else(|| RmlError::Usage("empty test suite".into()))?;
    Ok(EmpiricalReport { max_ratio: best.ratio, witness: best.label.clone(), entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::multiplier::family::EtaChoice;

    fn small() -> KernelOptions {
        KernelOptions { r_max: 24.0 }
    }

    #[test]
    fn identity_on_dilate_and_zero() {
        let eta = TestFunction::new(4, EtaChoice::Annulus).unwrap();
        let e = kernel_lp_of(&eta_profile(&eta, small()).unwrap(), 1.1).unwrap().norm;
        // m = 1 on [0.4, 2.5] ⊇ supp η̂.
        let m = MultiplierSpec::annulus(0.3, 3.0, 0.05, 4, 1.1).unwrap();
        let grid = TGrid { range: Some((1.0, 1.0)), ..TGrid::default() };
        let r = criterion_norm(&m, &eta, grid, small()).unwrap();
        assert!((r.table[0].norm - e).abs() < 1e-9 * e, "{} vs {e}", r.table[0].norm);
        let z = MultiplierSpec::constant(0.0, 4, 1.1).unwrap();
        assert_eq!(criterion_norm(&z, &eta, grid, small()).unwrap().sup, 0.0);
    }

    #[test]
    fn dilation_invariance_table() {
        let eta = TestFunction::new(4, EtaChoice::Quotient).unwrap();
        let g = TGrid::default();
        let m = MultiplierSpec::annulus(0.7, 1.6, 0.2, 4, 1.1).unwrap();
        let lam = g.ratio.powi(3);
        let a = criterion_norm(&m, &eta, g, small()).unwrap();
        let b = criterion_norm(&m.dilate(lam).unwrap(), &eta, g, small()).unwrap();
        assert!(a.flags.iter().all(|f| f.contains("smooth product")), "{:?}", a.flags);
        assert!(a.sup.is_finite());
        assert_eq!(a.table.len(), b.table.len());
        for (x, y) in a.table.iter().zip(&b.table) {
            assert!((x.t / y.t / lam - 1.0).abs() < 1e-12);
            assert!((x.norm - y.norm).abs() <= 1e-9 * x.norm.max(1e-300), "{} vs {}", x.norm, y.norm);
        }
    }

    #[test]
    fn constant_multiplier_ratios() {
        let eta = TestFunction::new(3, EtaChoice::Annulus).unwrap();
        let suite = SuiteSpec {
            dilations: vec![1.0, 3.0],
            superpositions: 2,
            centers: 3,
            samples: 2000,
            apply: ApplyOptions { r_max: 16.0, zeta_cap: 8.0 },
            ..SuiteSpec::default()
        };
        for c in [1.0, -2.5] {
            let m = MultiplierSpec::constant(c, 3, 1.5).unwrap();
            let r = empirical_opnorm_lower(&m, &eta, &suite, 5).unwrap();
            for e in &r.entries {
                assert!((e.ratio - c.abs()).abs() < 1e-9, "{}: {}", e.label, e.ratio);
            }
        }
    }
}
