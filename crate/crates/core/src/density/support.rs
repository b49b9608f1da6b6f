//! Measure of the union of supports of a stratum's shell functions.

use super::decompose::{dist, lift, DensityStratification, EPS};
use super::family::PointFamily;
use crate::specfun::ball_volume;
use crate::{Result, RmlError};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupportMeasure {
    /// Σ_i vol(annulus on B_i*), the covering bound.
    pub covering_bound: f64,
    /// Monte-Carlo measure of ∪ supp F_{y,r} over the stratum; never exceeds the bound.
    pub mc_estimate: f64,
    pub mc_se: f64,
    /// Σ of the individual support volumes (the trivial bound).
    pub annuli_sum: f64,
    /// mc_estimate / (u^{−1} 2^{k(d−1)} #ℰ_k).
    pub normalized: f64,
}

/// Volume of {x ∈ ℝ^d : |‖x − y‖ − r| ≤ h}.
pub fn annulus_volume(dim: usize, r: f64, h: f64) -> f64 {
    let d = dim as i32;
    ball_volume(dim) * ((r + h).powi(d) - (r - h).max(0.0).powi(d))
}

struct Annulus {
    y: Vec<f64>,
    r: f64,
    h: f64,
}

impl Annulus {
    fn contains(&self, x: &[f64]) -> bool {
        (dist(x, &self.y) - self.r).abs() <= self.h
    }
}

/// Covering bound and Monte-Carlo measure for stratum (k, 2^ν) with support half-width `w`.
///
/// A member (y, r) in B_i* (center (y_i, r_i), radius R*) has its support inside the annulus
/// about the sphere S(y_i, r_i) of half-width w + √2·R*. Points are sampled uniformly in
/// these covering annuli and weighted by their covering multiplicity, so the estimate is at
/// most the covering bound sample by sample.
pub fn support_measure(
    family: &PointFamily,
    st: &DensityStratification,
    k: i32,
    nu: u32,
    w: f64,
    n_samples: usize,
    seed: u64,
) -> Result<SupportMeasure> {
    let stratum = st
        .strata
        .iter()
        .find(|s| s.k == k && s.nu == nu)
        .ok_or_else(|| RmlError::Usage(format!("no stratum (k={k}, nu={nu})")))?;
    let d = family.dim();
    let n_k = family.shell(k).len() as f64;
    let scale = 2f64.powi(k * (d as i32 - 1)) * n_k / stratum.u;
    let annuli_sum: f64 = stratum.members.iter().map(|&i| annulus_volume(d, family.member(i).r, w)).sum();
    let zero = SupportMeasure { covering_bound: 0.0, mc_estimate: 0.0, mc_se: 0.0, annuli_sum, normalized: 0.0 };
    if stratum.members.is_empty() {
        return Ok(zero);
    }
    let cover: Vec<Annulus> = stratum
        .balls
        .iter()
        .map(|b| Annulus { y: b.center[..d].to_vec(), r: b.center[d], h: w + std::f64::consts::SQRT_2 * 5.0 * b.radius + EPS })
        .collect();
    // Members grouped by the covering balls whose dilate contains them.
    let mut owned: Vec<Vec<usize>> = vec![Vec::new(); cover.len()];
    for &i in &stratum.members {
        let x = lift(family, i);
        let mut any = false;
        for (j, b) in stratum.balls.iter().enumerate() {
            if dist(&b.center, &x) <= 5.0 * b.radius + EPS {
                owned[j].push(i);
                any = true;
            }
        }
        if !any {
            return Err(RmlError::Invariant(format!("member {i} is not covered by the dilated balls")));
        }
    }
    let vols: Vec<f64> = cover.iter().map(|a| annulus_volume(d, a.r, a.h)).collect();
    let total: f64 = vols.iter().sum();
    let mut cdf = Vec::with_capacity(vols.len());
    let mut acc = 0.0;
    for v in &vols {
        acc += v;
        cdf.push(acc);
    }
    let mut rng = crate::rng::stream(seed, 0x5u64);
    let (mut s1, mut s2) = (0.0, 0.0);
    let mut x = vec![0.0; d];
    let mut g = vec![0.0f64; d];
    for _ in 0..n_samples {
        let pick = rng.gen::<f64>() * total;
        let j = cdf.partition_point(|c| *c <= pick).min(cdf.len() - 1);
        let a = &cover[j];
        let (lo, hi) = ((a.r - a.h).max(0.0).powi(d as i32), (a.r + a.h).powi(d as i32));
        let rho = (lo + rng.gen::<f64>() * (hi - lo)).powf(1.0 / d as f64);
        let mut nrm = 0.0f64;
        for c in g.iter_mut() {
            *c = rng.sample::<f64, _>(StandardNormal);
            nrm += *c * *c;
        }
        let nrm = nrm.sqrt();
        for t in 0..d {
            x[t] = a.y[t] + rho * g[t] / nrm;
        }
        let mut mult = 0usize;
        let mut inside = false;
        for (jj, c) in cover.iter().enumerate() {
            if c.contains(&x) {
                mult += 1;
                if !inside {
                    inside = owned[jj].iter().any(|&i| {
                        let m = family.member(i);
                        (dist(&x, &m.y) - m.r).abs() <= w
                    });
                }
            }
        }
        let y = if inside { total / mult.max(1) as f64 } else { 0.0 };
        s1 += y;
        s2 += y * y;
    }
    let n = n_samples.max(1) as f64;
    let mean = s1 / n;
    let var = if n_samples > 1 { ((s2 - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
    Ok(SupportMeasure {
        covering_bound: total,
        mc_estimate: mean,
        mc_se: (var / n).sqrt(),
        annuli_sum,
        normalized: mean / scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{density_decompose, Member};

    #[test]
    fn single_member_annulus() {
        let f = PointFamily::new(4, vec![Member::new(vec![0.0; 4], 20.0)]).unwrap();
        let st = density_decompose(&f);
        let m = support_measure(&f, &st, 4, 0, 0.2, 20_000, 1).unwrap();
        let exact = annulus_volume(4, 20.0, 0.2);
        assert!(m.mc_estimate <= m.covering_bound);
        assert!((m.mc_estimate - exact).abs() < 4.0 * m.mc_se, "{} vs {exact} ± {}", m.mc_estimate, m.mc_se);
    }

    #[test]
    fn concentric_pair_between_max_and_sum() {
        let f = PointFamily::new(4, vec![Member::new(vec![0.0; 4], 20.0), Member::new(vec![0.0; 4], 21.0)]).unwrap();
        let st = density_decompose(&f);
        let nu = st.levels[0];
        let m = support_measure(&f, &st, 4, nu, 0.2, 40_000, 2).unwrap();
        let a = annulus_volume(4, 20.0, 0.2);
        let b = annulus_volume(4, 21.0, 0.2);
        assert!(m.mc_estimate <= a + b + 4.0 * m.mc_se);
        assert!(m.mc_estimate >= b - 4.0 * m.mc_se);
    }
}
