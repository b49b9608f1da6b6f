//! Synthesized fields Σ c(y,r) F_{y,r}: pointwise evaluation, exact L² through the Gram
//! form, and importance-sampled L^p norms.

use super::bump::{Bump, BumpSpec};
use super::gram::{neighbor_lists, Gram};
use super::shell::{shell_grid, shell_value_direct, ANNULUS_HALF_WIDTH, SHELL_POINTS};
use crate::density::family::parse_rows;
use crate::density::{Member, PointFamily};
use crate::specfun::{ball_volume, UniformTable};
use crate::{Result, RmlError, C64};
use rand::Rng;
use rand_distr::StandardNormal;
use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

/// Unit buckets over (y, r) used to prune terms in pointwise evaluation.
#[derive(Debug, Clone)]
struct BucketIndex {
    buckets: Vec<(Vec<i64>, Vec<usize>)>,
}

impl BucketIndex {
    fn new(family: &PointFamily) -> Self {
        let mut map: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        for (i, m) in family.members().iter().enumerate() {
            let key: Vec<i64> = m.y.iter().chain(std::iter::once(&m.r)).map(|c| c.floor() as i64).collect();
            map.entry(key).or_default().push(i);
        }
        let mut buckets: Vec<_> = map.into_iter().collect();
        buckets.sort();
        Self { buckets }
    }

    /// Members whose annulus of half-width 2/5 may contain x.
    fn candidates<'a>(&'a self, x: &'a [f64]) -> impl Iterator<Item = usize> + 'a {
        self.buckets
            .iter()
            .filter(move |(key, _)| {
                let d = x.len();
                let (mut lo, mut hi) = (0.0f64, 0.0f64);
                for (xi, &k) in x.iter().zip(&key[..d]) {
                    let (a, b) = (k as f64, k as f64 + 1.0);
                    let near = if *xi < a { a - xi } else if *xi > b { xi - b } else { 0.0 };
                    let far = (xi - a).abs().max((xi - b).abs());
                    lo += near * near;
                    hi += far * far;
                }
                let r0 = key[d] as f64;
                lo.sqrt() <= r0 + 1.0 + ANNULUS_HALF_WIDTH && hi.sqrt() >= r0 - ANNULUS_HALF_WIDTH
            })
            .flat_map(|(_, v)| v.iter().copied())
    }
}

/// Result of a Monte-Carlo L^p estimate.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct LpEstimate {
    /// Estimate of ‖F‖_p.
    pub norm: f64,
    /// Standard error of `norm` (delta method).
    pub norm_se: f64,
    /// Estimate of ∫|F|^p.
    pub power: f64,
    pub power_se: f64,
    pub samples: usize,
}

/// Σ c(y,r) F_{y,r} over a point family.
#[derive(Debug, Clone)]
pub struct SynthField {
    family: PointFamily,
    coeffs: Vec<C64>,
    bump: Arc<Bump>,
    profiles: Vec<Arc<UniformTable>>,
    index: BucketIndex,
    neighbors: Vec<Vec<usize>>,
}

impl SynthField {
    pub fn new(family: PointFamily, coeffs: Vec<C64>, bump: Arc<Bump>) -> Result<Self> {
        bump.spec.require_shell_support()?;
        if coeffs.len() != family.len() {
            return Err(RmlError::Usage(format!(
                "{} coefficients for a family of {} members",
                coeffs.len(),
                family.len()
            )));
        }
        if !family.is_empty() && family.dim() != bump.spec.dim {
            return Err(RmlError::Usage(format!(
                "family dimension {} differs from bump dimension {}",
                family.dim(),
                bump.spec.dim
            )));
        }
        let mut cache: HashMap<u64, Arc<UniformTable>> = HashMap::new();
        let profiles = family
            .members()
            .iter()
            .map(|m| {
                cache
                    .entry(m.r.to_bits())
                    .or_insert_with(|| {
                        let g = shell_grid(&bump, m.r);
                        let vals = g.iter().map(|&s| shell_value_direct(&bump, m.r, s)).collect();
                        Arc::new(UniformTable::new(g[0], g[SHELL_POINTS - 1], vals))
                    })
                    .clone()
            })
            .collect();
        let index = BucketIndex::new(&family);
        let neighbors = neighbor_lists(&bump, &family);
        Ok(Self { family, coeffs, bump, profiles, index, neighbors })
    }

    /// Field with the coefficient bound |c| ≤ 1 enforced.
    pub fn new_bounded(family: PointFamily, coeffs: Vec<C64>, bump: Arc<Bump>) -> Result<Self> {
        if let Some(i) = coeffs.iter().position(|c| c.norm() > 1.0 + 1e-12) {
            return Err(RmlError::Domain(format!("coefficient {i} exceeds 1 in modulus")));
        }
        Self::new(family, coeffs, bump)
    }

    pub fn family(&self) -> &PointFamily {
        &self.family
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn bump(&self) -> &Arc<Bump> {
        &self.bump
    }

    /// Same family and bump with scaled coefficients.
    pub fn scaled(&self, t: f64) -> Self {
        let mut out = self.clone();
        for c in out.coeffs.iter_mut() {
            *c *= t;
        }
        out
    }

    fn term(&self, i: usize, x: &[f64]) -> C64 {
        let m = self.family.member(i);
        let s = dist(x, &m.y);
        self.coeffs[i] * self.profiles[i].eval(s)
    }

    /// F(x), summing only members whose annulus can contain x.
    pub fn eval(&self, x: &[f64]) -> C64 {
        self.index
            .candidates(x)
            .filter(|&i| (dist(x, &self.family.member(i).y) - self.family.member(i).r).abs() <= ANNULUS_HALF_WIDTH)
            .map(|i| self.term(i, x))
            .sum()
    }

    /// Brute-force evaluation over every member (oracle for the index).
    pub fn eval_all(&self, x: &[f64]) -> C64 {
        (0..self.family.len()).map(|i| self.term(i, x)).sum()
    }

    /// ‖F‖₂ from the Gram quadratic form over overlapping pairs.
    pub fn l2(&self) -> Result<f64> {
        let g = Gram::new(&self.bump)?;
        let m = self.family.members();
        let mut total = 0.0;
        for i in 0..m.len() {
            total += self.coeffs[i].norm_sqr() * g.entry_fast(&m[i], &m[i]);
            for &j in self.neighbors[i].iter().filter(|&&j| j > i) {
                let cross = (self.coeffs[i] * self.coeffs[j].conj()).re;
                if cross != 0.0 {
                    total += 2.0 * cross * g.entry_fast(&m[i], &m[j]);
                }
            }
        }
        Ok(total.max(0.0).sqrt())
    }

    /// Volume of the exact support annulus of member i.
    fn annulus_volume(&self, i: usize) -> f64 {
        let m = self.family.member(i);
        let h = self.bump.spec.psi_support();
        let d = self.family.dim() as i32;
        ball_volume(self.family.dim()) * ((m.r + h).powi(d) - (m.r - h).powi(d))
    }

    /// Importance-sampled ‖F‖_p: annuli chosen proportionally to volume, points uniform in
    /// the chosen annulus, weights by the mixture density.
    pub fn lp(&self, p: f64, n_samples: usize, seed: u64) -> Result<LpEstimate> {
        if !(p > 0.0) {
            return Err(RmlError::Domain(format!("L^p needs p > 0, got {p}")));
        }
        let zero = LpEstimate { norm: 0.0, norm_se: 0.0, power: 0.0, power_se: 0.0, samples: n_samples };
        if self.family.is_empty() || n_samples == 0 {
            return Ok(zero);
        }
        let vols: Vec<f64> = (0..self.family.len()).map(|i| self.annulus_volume(i)).collect();
        let mut cdf = Vec::with_capacity(vols.len());
        let mut acc = 0.0;
        for v in &vols {
            acc += v;
            cdf.push(acc);
        }
        let total = acc;
        if total <= 0.0 {
            return Ok(zero);
        }
        let d = self.family.dim();
        let h = self.bump.spec.psi_support();
        let mut rng = crate::rng::stream(seed, 0x11);
        let mut sum = 0.0;
        let mut sum2 = 0.0;
        let mut x = vec![0.0; d];
        let mut dir = vec![0.0; d];
        for _ in 0..n_samples {
            let u: f64 = rng.gen::<f64>() * total;
            let j = cdf.partition_point(|c| *c <= u).min(cdf.len() - 1);
            let m = self.family.member(j);
            let (lo, hi) = ((m.r - h).powi(d as i32), (m.r + h).powi(d as i32));
            let rho = (lo + rng.gen::<f64>() * (hi - lo)).powf(1.0 / d as f64);
            let mut nrm = 0.0f64;
            for c in dir.iter_mut() {
                *c = rng.sample::<f64, _>(StandardNormal);
                nrm += *c * *c;
            }
            let nrm = nrm.sqrt();
            for k in 0..d {
                x[k] = m.y[k] + rho * dir[k] / nrm;
            }
            let mut value = self.term(j, &x);
            let mut count = 1usize;
            for &k in &self.neighbors[j] {
                let mk = self.family.member(k);
                let s = dist(&x, &mk.y);
                if (s - mk.r).abs() < h {
                    count += 1;
                    value += self.coeffs[k] * self.profiles[k].eval(s);
                }
            }
            let y = total * value.norm().powf(p) / count as f64;
            sum += y;
            sum2 += y * y;
        }
        let n = n_samples as f64;
        let mean = sum / n;
        let var = if n_samples > 1 { ((sum2 - n * mean * mean) / (n - 1.0)).max(0.0) } else { 0.0 };
        let se = (var / n).sqrt();
        let norm = mean.powf(1.0 / p);
        let norm_se = if mean > 0.0 { se * norm / (p * mean) } else { 0.0 };
        Ok(LpEstimate { norm, norm_se, power: mean, power_se: se, samples: n_samples })
    }

    /// CSV: header `# dim=<d> support_radius=.. order=.. scale=..` and rows y_1,…,y_d,r,re,im.
    pub fn to_csv(&self) -> String {
        let s = &self.bump.spec;
        let mut out = format!(
            "# dim={} support_radius={:.16e} order={} scale={:.16e}\n",
            s.dim, s.support_radius, s.order, s.scale
        );
        for (m, c) in self.family.members().iter().zip(&self.coeffs) {
            for v in &m.y {
                let _ = write!(out, "{:.16e},", v);
            }
            let _ = writeln!(out, "{:.16e},{:.16e},{:.16e}", m.r, c.re, c.im);
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let rows = parse_rows(text)?;
        let dim = rows.dim;
        let get = |k: &str| -> Result<f64> {
            rows.header
                .get(k)
                .ok_or_else(|| RmlError::Parse(format!("header lacks {k}=")))?
                .parse::<f64>()
                .map_err(|e| RmlError::Parse(format!("{k}: {e}")))
        };
        let spec = BumpSpec {
            dim,
            support_radius: get("support_radius")?,
            order: get("order")? as u32,
            scale: get("scale")?,
            check_nonvanishing: false,
        };
        let mut members = Vec::with_capacity(rows.rows.len());
        let mut coeffs = Vec::with_capacity(rows.rows.len());
        for (i, v) in rows.rows.iter().enumerate() {
            if v.len() != dim + 3 {
                return Err(RmlError::Parse(format!("row {}: expected {} columns, got {}", i + 1, dim + 3, v.len())));
            }
            members.push(Member::new(v[..dim].to_vec(), v[dim]));
            coeffs.push(C64::new(v[dim + 1], v[dim + 2]));
        }
        Self::new(PointFamily::new(dim, members)?, coeffs, Bump::shared(spec)?)
    }
}

fn dist(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// F(x) for a field.
pub fn field_eval(f: &SynthField, x: &[f64]) -> C64 {
    f.eval(x)
}

/// ‖F‖₂ via the Gram form.
pub fn field_l2(f: &SynthField) -> Result<f64> {
    f.l2()
}

/// Monte-Carlo (‖F‖_p, standard error).
pub fn field_lp(f: &SynthField, p: f64, n_samples: usize, seed: u64) -> Result<(f64, f64)> {
    let e = f.lp(p, n_samples, seed)?;
    Ok((e.norm, e.norm_se))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::shell::shell_profile_direct;

    fn bump4() -> Arc<Bump> {
        Bump::shared(BumpSpec::new(4)).unwrap()
    }

    #[test]
    fn empty_and_single_term() {
        let b = bump4();
        let empty = SynthField::new(PointFamily::empty(4), vec![], b.clone()).unwrap();
        assert_eq!(empty.eval(&[0.0; 4]), C64::new(0.0, 0.0));
        assert_eq!(empty.lp(1.1, 100, 1).unwrap().norm, 0.0);
        let fam = PointFamily::new(4, vec![Member::new(vec![1.0, 2.0, 0.0, 0.0], 5.0)]).unwrap();
        let c = C64::new(0.5, -0.25);
        let f = SynthField::new(fam, vec![c], b.clone()).unwrap();
        let x = [1.0, 7.0, 0.0, 0.0];
        let want = c * shell_profile_direct(&b, 5.0).unwrap().eval(5.0);
        assert!((f.eval(&x) - want).norm() < 1e-12 * want.norm());
    }

    #[test]
    fn index_matches_brute_force() {
        let b = bump4();
        let fam = PointFamily::new(
            4,
            vec![
                Member::new(vec![0.0, 0.0, 0.0, 0.0], 3.0),
                Member::new(vec![0.5, 0.0, 0.0, 0.0], 3.9),
                Member::new(vec![4.0, 1.0, 0.0, 0.0], 1.5),
            ],
        )
        .unwrap();
        let f = SynthField::new(fam, vec![C64::new(1.0, 0.0); 3], b).unwrap();
        let mut rng = crate::rng::stream(3, 0);
        for _ in 0..2000 {
            let x: Vec<f64> = (0..4).map(|_| rng.gen_range(-5.0..7.0)).collect();
            assert_eq!(f.eval(&x), f.eval_all(&x));
        }
    }

    #[test]
    fn single_shell_mc_matches_gram() {
        let b = bump4();
        let fam = PointFamily::new(4, vec![Member::new(vec![0.0; 4], 6.0)]).unwrap();
        let f = SynthField::new(fam, vec![C64::new(1.0, 0.0)], b).unwrap();
        let exact = f.l2().unwrap();
        let e = f.lp(2.0, 20_000, 5).unwrap();
        assert!((e.norm - exact).abs() < 3.0 * e.norm_se, "{} vs {exact} ± {}", e.norm, e.norm_se);
        let t = f.scaled(2.5).lp(2.0, 20_000, 5).unwrap();
        assert!((t.norm - 2.5 * e.norm).abs() < 1e-12 * e.norm);
    }

    #[test]
    fn csv_round_trip() {
        let b = bump4();
        let fam = PointFamily::new(4, vec![Member::new(vec![0.25, 0.0, -1.0, 3.0], 2.0)]).unwrap();
        let f = SynthField::new(fam, vec![C64::new(0.3, 0.1)], b).unwrap();
        let g = SynthField::from_csv(&f.to_csv()).unwrap();
        assert_eq!(g.family(), f.family());
        assert_eq!(g.coeffs(), f.coeffs());
        assert_eq!(g.bump().spec, f.bump().spec);
    }
}
