//! Half-wave propagation of radial data and local smoothing measurements.

use crate::dyadic::band_multiplier;
use crate::ineq_lab::{InequalityReport, SweepPoint};
use crate::specfun::exponents::{alpha_f64, q_d_f64};
use crate::specfun::hankel::hankel_forward_at;
use crate::specfun::{lp_norm_radial, sphere_area, BdKernel, RadialProfile, Rule};
use crate::stats::loglog_slope;
use crate::{Result, RmlError, C64};
use std::f64::consts::PI;
use std::sync::Arc;

/// Most output radii a single synthesis may use.
pub const MAX_OUTPUT_POINTS: usize = 200_000;

type SpectralFn = Arc<dyn Fn(f64) -> C64 + Send + Sync>;

#[derive(Clone)]
enum Source {
    Analytic(SpectralFn),
    Profile(RadialProfile),
}

/// A radial function with compactly supported (or numerically negligible beyond `zmax`)
/// spectrum and spatial extent `extent`.
#[derive(Clone)]
pub struct BandLimited {
    pub dim: usize,
    source: Source,
    /// Spectral breakpoints in ζ; the spectrum vanishes beyond the last one.
    pub breaks: Vec<f64>,
    /// Radius beyond which the function is negligible.
    pub extent: f64,
}

impl std::fmt::Debug for BandLimited {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BandLimited")
            .field("dim", &self.dim)
            .field("breaks", &self.breaks)
            .field("extent", &self.extent)
            .finish()
    }
}

/// Largest spacing of a radial grid.
fn max_spacing(grid: &[f64]) -> f64 {
    grid.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
}

/// Frequency cutoff of a sampled profile: the last ζ below the grid's Nyquist limit where
/// |f̂(ζ)| ζ^{(d−1)/2} exceeds 1e−10 of its maximum, padded by 20%. Content within the top
/// quarter of the resolvable band means the samples alias.
pub fn spectral_cutoff(f: &RadialProfile) -> Result<f64> {
    let h = max_spacing(f.grid());
    if h <= 0.0 {
        return Err(RmlError::Usage("profile needs at least two samples".into()));
    }
    let nyq = 0.5 / h;
    let probe: Vec<f64> = (1..=512).map(|i| nyq * i as f64 / 512.0).collect();
    let fh = hankel_forward_at(f, &probe)?;
    let env: Vec<f64> = probe.iter().zip(&fh).map(|(z, v)| v.norm() * z.powf(0.5 * (f.dim() as f64 - 1.0))).collect();
    let top = env.iter().copied().fold(0.0, f64::max);
    if top == 0.0 {
        return Ok(nyq / 512.0);
    }
    let near_nyq = env[384..].iter().copied().fold(0.0, f64::max);
    if near_nyq > 1e-7 * top {
        return Err(RmlError::Numerical(format!(
            "aliasing: spectral content {:.2e} of peak within the top quarter below Nyquist {nyq:.3e}; refine the radial grid",
            near_nyq / top
        )));
    }
    let last = env.iter().rposition(|e| *e > 1e-10 * top).unwrap_or(0);
    Ok((1.2 * probe[last] + nyq / 512.0).min(nyq))
}

/// Quadrature nodes in ζ resolving B_d(2πρζ)e^{2πitζ} for ρ + |t| ≤ reach: two periods per
/// 16-point panel.
fn zeta_rule(breaks: &[f64], reach: f64) -> Rule {
    let first = breaks.first().copied().unwrap_or(0.0);
    let last = breaks.last().copied().unwrap_or(0.0);
    let len = (2.0 / reach.max(1e-12)).min((last - first).max(1e-12));
    Rule::composite(breaks, len, 16)
}

/// Uniform radii [0, r] with spacing at most h.
pub fn uniform_radii(r: f64, h: f64) -> Result<Vec<f64>> {
    let n = (r / h).ceil() as usize + 1;
    if n > MAX_OUTPUT_POINTS {
        return Err(RmlError::Usage(format!(
            "output grid needs {n} radii (limit {MAX_OUTPUT_POINTS}); reduce the time or the frequency content"
        )));
    }
    Ok((0..n).map(|i| r * i as f64 / (n - 1).max(1) as f64).collect())
}

impl BandLimited {
    /// From a spectral profile ζ ↦ f̂(ζ) vanishing outside [breaks[0], breaks.last()].
    pub fn from_fn<F>(dim: usize, fhat: F, breaks: Vec<f64>, extent: f64) -> Result<Self>
    where
        F: Fn(f64) -> C64 + Send + Sync + 'static,
    {
        if dim < 2 {
            return Err(RmlError::Domain(format!("need d >= 2, got {dim}")));
        }
        if breaks.len() < 2 || breaks.windows(2).any(|w| !(w[1] > w[0])) || breaks[0] < 0.0 {
            return Err(RmlError::Usage("spectral breakpoints must be increasing and nonnegative".into()));
        }
        if !(extent > 0.0 && extent.is_finite()) {
            return Err(RmlError::Usage(format!("spatial extent must be positive, got {extent}")));
        }
        Ok(Self { dim, source: Source::Analytic(Arc::new(fhat)), breaks, extent })
    }

    /// From samples; the spectrum is cut at [`spectral_cutoff`].
    pub fn from_profile(f: &RadialProfile) -> Result<Self> {
        if f.tail().is_some() {
            return Err(RmlError::Usage("propagation needs a profile without a power tail".into()));
        }
        let z = spectral_cutoff(f)?;
        Ok(Self { dim: f.dim(), source: Source::Profile(f.clone()), breaks: vec![0.0, z], extent: f.rmax() })
    }

    pub fn zmax(&self) -> f64 {
        *self.breaks.last().unwrap()
    }

    /// f(λ·): spectrum λ^{−d} f̂(ζ/λ), extent divided by λ.
    pub fn dilate(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(RmlError::Usage(format!("dilation factor must be positive, got {lambda}")));
        }
        let source = match &self.source {
            Source::Analytic(g) => {
                let g = g.clone();
                let s = lambda.powi(-(self.dim as i32));
                Source::Analytic(Arc::new(move |z| g(z / lambda) * s))
            }
            Source::Profile(p) => {
                let grid = p.grid().iter().map(|r| r / lambda).collect();
                Source::Profile(RadialProfile::new(p.dim(), grid, p.values().to_vec(), None)?)
            }
        };
        Ok(Self {
            dim: self.dim,
            source,
            breaks: self.breaks.iter().map(|b| b * lambda).collect(),
            extent: self.extent / lambda,
        })
    }

    /// Spectrum sampled on a rule adequate for outputs with ρ + |t| ≤ reach.
    pub fn spectrum(&self, reach: f64) -> Result<Spectrum> {
        let rule = zeta_rule(&self.breaks, reach);
        let values = match &self.source {
            Source::Analytic(g) => rule.nodes.iter().map(|&z| g(z)).collect(),
            Source::Profile(p) => hankel_forward_at(p, &rule.nodes)?,
        };
        Ok(Spectrum { dim: self.dim, rule, values })
    }

    /// Output spacing: 16 samples per period of the top frequency keeps the degree-7
    /// interpolant used by the norms accurate to ~1e−8.
    pub fn output_spacing(&self) -> f64 {
        0.0625 / self.zmax()
    }
}

/// Samples of f̂ on a ζ-quadrature rule.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub dim: usize,
    pub rule: Rule,
    pub values: Vec<C64>,
}

impl Spectrum {
    /// ‖f‖₂ by Plancherel.
    pub fn l2_norm(&self) -> f64 {
        let dm1 = self.dim as i32 - 1;
        let s: f64 = self
            .rule
            .nodes
            .iter()
            .zip(&self.rule.weights)
            .zip(&self.values)
            .map(|((z, w), v)| w * v.norm_sqr() * z.powi(dm1))
            .sum();
        (sphere_area(self.dim) * s).sqrt()
    }

    /// Multiplier m(ζ) sampled at the nodes.
    pub fn channel<M: Fn(f64) -> C64>(&self, m: M) -> Vec<C64> {
        self.rule.nodes.iter().map(|&z| m(z)).collect()
    }

    /// Inverse transforms of m_c f̂ for every channel c onto the radii `out`; each Bessel value
    /// is computed once and shared by all channels.
    pub fn synthesize_channels(&self, out: &[f64], channels: &[Vec<C64>]) -> Result<Vec<Vec<C64>>> {
        let kernel = BdKernel::new(self.dim)?;
        let nc = channels.len();
        let nj = self.rule.len();
        if channels.iter().any(|c| c.len() != nj) {
            return Err(RmlError::Usage("channel length differs from the spectral rule".into()));
        }
        let dm1 = self.dim as i32 - 1;
        let mut cc = vec![C64::new(0.0, 0.0); nj * nc];
        for j in 0..nj {
            let base = self.values[j] * (self.rule.weights[j] * self.rule.nodes[j].powi(dm1));
            for c in 0..nc {
                cc[j * nc + c] = base * channels[c][j];
            }
        }
        let mut res = vec![vec![C64::new(0.0, 0.0); out.len()]; nc];
        let mut acc = vec![C64::new(0.0, 0.0); nc];
        for (i, &r) in out.iter().enumerate() {
            acc.iter_mut().for_each(|a| *a = C64::new(0.0, 0.0));
            let a = 2.0 * PI * r;
            for j in 0..nj {
                let b = kernel.eval(a * self.rule.nodes[j]);
                let row = &cc[j * nc..(j + 1) * nc];
                for (s, v) in acc.iter_mut().zip(row) {
                    *s += v * b;
                }
            }
            for c in 0..nc {
                res[c][i] = acc[c];
            }
        }
        Ok(res)
    }

    pub fn synthesize<M: Fn(f64) -> C64>(&self, out: &[f64], m: M) -> Result<RadialProfile> {
        let ch = self.channel(m);
        let v = self.synthesize_channels(out, &[ch])?.pop().unwrap();
        RadialProfile::new(self.dim, out.to_vec(), v, None)
    }
}

/// e^{2πitζ}: the half-wave multiplier e^{it|ξ|} at ξ = 2πζ.
pub fn halfwave_phase(t: f64, zeta: f64) -> C64 {
    C64::from_polar(1.0, 2.0 * PI * t * zeta)
}

/// e^{it√(−Δ)} f on radii [0, extent + |t|], or three times that when f̂(0) ≠ 0.
pub fn halfwave(f: &RadialProfile, t: f64) -> Result<RadialProfile> {
    halfwave_band(&BandLimited::from_profile(f)?, t)
}

pub fn halfwave_band(f: &BandLimited, t: f64) -> Result<RadialProfile> {
    if !t.is_finite() {
        return Err(RmlError::Domain("time must be finite".into()));
    }
    // e^{it|ξ|} is conical at ξ = 0, so unless the spectrum avoids the origin the solution
    // has |x|^{−d−1} tails beyond extent + |t|; a threefold radius keeps their L² share
    // below 1e−7.
    let spread = f.extent + t.abs();
    let r_out = if f.breaks[0] > 0.0 { spread } else { 3.0 * spread };
    let out = uniform_radii(r_out, f.output_spacing())?;
    let spec = f.spectrum(r_out + t.abs())?;
    spec.synthesize(&out, |z| halfwave_phase(t, z))
}

/// Multiplier of P_k at ζ for the family k = 0..=k_max: P_k = Φ(2^{−k}ξ) − Φ(2^{1−k}ξ) for
/// k ≥ 1 and P_0 = Φ(ξ) + 1 − Φ(2^{−k_max}ξ), so that the family sums to 1.
pub fn lp_multiplier(k: u32, k_max: u32, zeta: f64) -> f64 {
    let xi = 2.0 * PI * zeta;
    if k == 0 {
        band_multiplier(0, 0, xi) + 1.0 - band_multiplier(k_max as i32, k_max as i32, xi)
    } else {
        band_multiplier(k as i32, 0, xi)
    }
}

/// Bands P_0 f, ..., P_{k_max} f on the profile's own grid.
pub fn lp_projections(f: &RadialProfile, k_max: u32) -> Result<Vec<RadialProfile>> {
    let src = BandLimited::from_profile(f)?;
    let spec = src.spectrum(2.0 * f.rmax())?;
    let chans: Vec<Vec<C64>> =
        (0..=k_max).map(|k| spec.channel(|z| C64::new(lp_multiplier(k, k_max, z), 0.0))).collect();
    spec.synthesize_channels(f.grid(), &chans)?
        .into_iter()
        .map(|v| RadialProfile::new(f.dim(), f.grid().to_vec(), v, None))
        .collect()
}

/// (1 + 4π²ζ²)^{α/2}, the symbol of (I − Δ)^{α/2}.
pub fn bessel_symbol(alpha: f64, zeta: f64) -> f64 {
    (1.0 + 4.0 * PI * PI * zeta * zeta).powf(0.5 * alpha)
}

/// Smallest k_max with P_k f = 0 for k > k_max.
fn top_band(zmax: f64) -> u32 {
    (2.0 * PI * zmax).log2().ceil().max(0.0) as u32 + 1
}

fn mean_pow(norms: &[f64], q: f64) -> f64 {
    (norms.iter().map(|n| n.powf(q)).sum::<f64>() / norms.len() as f64).powf(1.0 / q)
}

/// Quantities behind one local smoothing measurement.
#[derive(Debug, Clone)]
pub struct SmoothingSides {
    pub lhs: f64,
    pub rhs: f64,
    pub tl: Option<(f64, f64)>,
    /// Largest relative deviation of ‖u_t‖₂ from ‖f‖₂ over the samples.
    pub energy_drift: f64,
}

/// Both sides of the averaged inequality, and optionally of its Triebel–Lizorkin form.
pub fn smoothing_sides(f: &BandLimited, q: f64, t_samples: &[f64], tl: bool) -> Result<SmoothingSides> {
    if !(q > 2.0 && q.is_finite()) {
        return Err(RmlError::Domain(format!("need 2 < q < ∞, got {q}")));
    }
    if t_samples.is_empty() || t_samples.iter().any(|t| !(1.0..=2.0).contains(t)) {
        return Err(RmlError::Usage("time samples must be a nonempty subset of [1, 2]".into()));
    }
    let alpha = alpha_f64(f.dim, q);
    let t_max = 2.0f64;
    let h = f.output_spacing();
    let spread = f.extent + t_max;
    let r_out = if f.breaks[0] > 0.0 { spread } else { 3.0 * spread };
    let out = uniform_radii(r_out, h)?;
    let spec = f.spectrum(r_out + t_max)?;
    let k_top = top_band(f.zmax());
    let mut chans: Vec<Vec<C64>> = t_samples.iter().map(|&t| spec.channel(|z| halfwave_phase(t, z))).collect();
    if tl {
        for &t in t_samples {
            for k in 0..=k_top {
                chans.push(spec.channel(|z| halfwave_phase(t, z) * lp_multiplier(k, k_top, z)));
            }
        }
    }
    let res = spec.synthesize_channels(&out, &chans)?;
    let f2 = spec.l2_norm();
    let nt = t_samples.len();
    let mut norms = Vec::with_capacity(nt);
    let mut drift = 0.0f64;
    for v in res.iter().take(nt) {
        let p = RadialProfile::new(f.dim, out.clone(), v.clone(), None)?;
        norms.push(lp_norm_radial(&p, q)?);
        drift = drift.max((lp_norm_radial(&p, 2.0)? - f2).abs() / f2);
    }
    let lhs = mean_pow(&norms, q);

    let out0 = uniform_radii(f.extent, h)?;
    let spec0 = f.spectrum(2.0 * f.extent)?;
    let rhs = lp_norm_radial(&spec0.synthesize(&out0, |z| C64::new(bessel_symbol(alpha, z), 0.0))?, q)?;

    let tl = if tl {
        let nb = k_top as usize + 1;
        let mut tl_norms = Vec::with_capacity(nt);
        for ti in 0..nt {
            let mut sum = vec![0.0; out.len()];
            for b in 0..nb {
                for (s, v) in sum.iter_mut().zip(&res[nt + ti * nb + b]) {
                    *s += v.norm();
                }
            }
            let vals = sum.into_iter().map(|v| C64::new(v, 0.0)).collect();
            tl_norms.push(lp_norm_radial(&RadialProfile::new(f.dim, out.clone(), vals, None)?, q)?);
        }
        let bands: Vec<Vec<C64>> =
            (0..=k_top).map(|k| spec0.channel(|z| C64::new(lp_multiplier(k, k_top, z), 0.0))).collect();
        let pk = spec0.synthesize_channels(&out0, &bands)?;
        let mut acc = 0.0;
        for (k, v) in pk.into_iter().enumerate() {
            let n = lp_norm_radial(&RadialProfile::new(f.dim, out0.clone(), v, None)?, q)?;
            acc += 2f64.powf(k as f64 * alpha * q) * n.powf(q);
        }
        Some((mean_pow(&tl_norms, q), acc.powf(1.0 / q)))
    } else {
        None
    };
    Ok(SmoothingSides { lhs, rhs, tl, energy_drift: drift })
}

/// `n` equispaced times in [1, 2].
pub fn default_times(n: usize) -> Vec<f64> {
    (0..n).map(|i| 1.0 + i as f64 / (n - 1).max(1) as f64).collect()
}

fn range_flags(report: &mut InequalityReport, d: usize, q: f64) {
    if d < 4 {
        report.flag(format!("outside proven range: d = {d} < 4"));
    } else if q <= q_d_f64(d) {
        report.flag(format!("outside proven range: q = {q} ≤ q_d = {}", q_d_f64(d)));
    }
}

/// Local smoothing ratio for f, with the Triebel–Lizorkin pair in `meta`.
pub fn local_smoothing_band(f: &BandLimited, q: f64, t_samples: &[f64]) -> Result<InequalityReport> {
    let s = smoothing_sides(f, q, t_samples, true)?;
    let (tl_l, tl_r) = s.tl.unwrap();
    let mut rep = InequalityReport::new("smoothing-1.2", format!("radial d={} extent={:.3}", f.dim, f.extent), s.lhs, None, s.rhs)
        .with_meta("q", q)
        .with_meta("alpha", alpha_f64(f.dim, q))
        .with_meta("t_samples", t_samples.len())
        .with_meta("tl_lhs", tl_l)
        .with_meta("tl_rhs", tl_r)
        .with_meta("tl_ratio", tl_l / tl_r)
        .with_meta("energy_drift", s.energy_drift);
    range_flags(&mut rep, f.dim, q);
    if s.energy_drift > 1e-6 {
        rep.flag(format!("L² drift {:.2e}: propagated data leaves the output grid", s.energy_drift));
    }
    Ok(rep)
}

/// Profile version of [`local_smoothing_band`].
pub fn local_smoothing_ratio(f: &RadialProfile, q: f64, t_samples: &[f64]) -> Result<InequalityReport> {
    local_smoothing_band(&BandLimited::from_profile(f)?, q, t_samples)
}

/// Ratio at f_λ = f(λ·) for each λ; the report's sweep holds (λ, lhs, 0, rhs) and its slope.
pub fn local_smoothing_sweep(f: &BandLimited, q: f64, t_samples: &[f64], lambdas: &[f64]) -> Result<InequalityReport> {
    let base = local_smoothing_band(f, q, t_samples)?;
    let mut pts = Vec::with_capacity(lambdas.len());
    let mut drift = 0.0f64;
    for &l in lambdas {
        let s = smoothing_sides(&f.dilate(l)?, q, t_samples, false)?;
        drift = drift.max(s.energy_drift);
        pts.push(SweepPoint::new(l, s.lhs, 0.0, s.rhs));
    }
    let mut rep = base.with_sweep(pts).with_meta("sweep_energy_drift", drift);
    if drift > 1e-6 {
        rep.flag(format!("sweep L² drift {drift:.2e}"));
    }
    Ok(rep)
}

/// Single-band datum: a Gaussian in ξ = 2π|ζ| centered in (2^{k₀−1}, 2^{k₀+1}) with 8.5
/// standard deviations to either edge, truncated there (the cut is below 3e−16).
pub fn single_band(dim: usize, k0: i32) -> Result<BandLimited> {
    let (lo, hi) = (2f64.powi(k0 - 1), 2f64.powi(k0 + 1));
    let (c, sd) = (0.5 * (lo + hi), 0.5 * (hi - lo) / 8.5);
    let z_sd = sd / (2.0 * PI);
    // Spatial envelope e^{−ρ²/(2s²)} with s = 1/(2π σ_ζ); 1e−10 is reached near 6.8 s.
    let extent = 6.8 / (2.0 * PI * z_sd);
    BandLimited::from_fn(
        dim,
        move |z| {
            let xi = 2.0 * PI * z;
            C64::new((-0.5 * ((xi - c) / sd).powi(2)).exp(), 0.0)
        },
        vec![lo / (2.0 * PI), hi / (2.0 * PI)],
        extent,
    )
}

/// Fixed-time check at t = 1 for the dilates f(2^k ·): ‖u(1)‖_q / (2^{kβ}‖f‖_q) with
/// β = (d−1)(1/2 − 1/q), returned as (k, ratio) with the log-log slope over 2^k.
pub fn fixed_time_sobolev(f: &BandLimited, q: f64, ks: &[i32]) -> Result<(Vec<(i32, f64)>, f64)> {
    let beta = (f.dim as f64 - 1.0) * (0.5 - 1.0 / q);
    let mut rows = Vec::new();
    for &k in ks {
        let g = f.dilate(2f64.powi(k))?;
        let u = halfwave_band(&g, 1.0)?;
        let out0 = uniform_radii(g.extent, g.output_spacing())?;
        let f0 = g.spectrum(2.0 * g.extent)?.synthesize(&out0, |_| C64::new(1.0, 0.0))?;
        let r = lp_norm_radial(&u, q)? / (2f64.powf(k as f64 * beta) * lp_norm_radial(&f0, q)?);
        rows.push((k, r));
    }
    let x: Vec<f64> = rows.iter().map(|(k, _)| 2f64.powi(*k)).collect();
    let y: Vec<f64> = rows.iter().map(|(_, r)| *r).collect();
    Ok((rows, loglog_slope(&x, &y)))
}

/// ‖(I − 2^{−2n}L²Δ)^{α/2} f‖_q / ‖(I − L²Δ)^{α/2} f‖_q for n = 0..=n_max.
pub fn rescaling_chain(f: &BandLimited, q: f64, alpha: f64, l: f64, n_max: u32) -> Result<Vec<f64>> {
    let out = uniform_radii(f.extent, f.output_spacing())?;
    let spec = f.spectrum(2.0 * f.extent)?;
    let sym = |s: f64| move |z: f64| C64::new((1.0 + 4.0 * PI * PI * s * s * z * z).powf(0.5 * alpha), 0.0);
    let base = lp_norm_radial(&spec.synthesize(&out, sym(l))?, q)?;
    (0..=n_max)
        .map(|n| Ok(lp_norm_radial(&spec.synthesize(&out, sym(l * 2f64.powi(-(n as i32))))?, q)? / base))
        .collect()
}
