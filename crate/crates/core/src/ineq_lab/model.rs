//! The model case: functions in one unit cube whose scalar products decay like
//! (1 + |z − z′|)^{−β}, measured on a grid of that cube.

use super::report::{InequalityReport, SweepPoint};
use crate::{Result, RmlError, C64};
use rand::Rng;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

/// f_z(x) = s·v(x)·e^{2πi⟨z,x⟩} on [0,1)^{d_g} with v(x)² = |x − x₀|^{β−d_g}, whose Fourier
/// transform decays like |ξ|^{−β}; s rescales the family so that the decay holds with
/// constant 1 on the index set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelFamily {
    pub dg: usize,
    pub beta: f64,
    /// Grid points per axis.
    pub n: usize,
    pub indices: Vec<Vec<i64>>,
}

impl ModelFamily {
    /// Indices {0, …, m−1}^{d_g} with m^{d_g} ≥ `count` (truncated to `count`), on a grid of
    /// 16·m points per axis.
    pub fn clustered(dg: usize, beta: f64, count: usize) -> Self {
        let m = (count as f64).powf(1.0 / dg as f64).ceil() as i64;
        let mut indices = Vec::with_capacity(count);
        'outer: for i in 0..m.pow(dg as u32) {
            let mut z = Vec::with_capacity(dg);
            let mut t = i;
            for _ in 0..dg {
                z.push(t % m);
                t /= m;
            }
            indices.push(z);
            if indices.len() == count {
                break 'outer;
            }
        }
        let n = (16 * m as usize).next_power_of_two().max(64);
        Self { dg, beta, n, indices }
    }

    fn validate(&self) -> Result<()> {
        if !(1..=2).contains(&self.dg) {
            return Err(RmlError::Usage(format!("grid dimension must be 1 or 2, got {}", self.dg)));
        }
        if !(self.beta > 0.0 && self.beta < self.dg as f64) {
            return Err(RmlError::Usage(format!("need 0 < beta < {}, got {}", self.dg, self.beta)));
        }
        let half = (self.n / 2) as i64;
        for z in &self.indices {
            if z.len() != self.dg || z.iter().any(|c| c.abs() >= half / 2) {
                return Err(RmlError::Usage(format!("index {z:?} not resolved by {} grid points", self.n)));
            }
        }
        Ok(())
    }

    fn cells(&self) -> usize {
        self.n.pow(self.dg as u32)
    }

    /// v(x)² at cell midpoints; x₀ is the cube center, which is a cell corner.
    fn weight_sq(&self) -> Vec<f64> {
        let n = self.n;
        let h = 1.0 / n as f64;
        (0..self.cells())
            .map(|i| {
                let (a, b) = (i % n, i / n);
                let dx = (a as f64 + 0.5) * h - 0.5;
                let dy = if self.dg == 2 { (b as f64 + 0.5) * h - 0.5 } else { 0.0 };
                (dx * dx + dy * dy).sqrt().powf(self.beta - self.dg as f64)
            })
            .collect()
    }

    /// Σ_z a_z e^{2πi⟨z,x⟩} at the cell midpoints.
    fn trig_poly(&self, a: &[C64]) -> Vec<C64> {
        let n = self.n;
        let mut data = vec![C64::new(0.0, 0.0); self.cells()];
        for (z, &c) in self.indices.iter().zip(a) {
            // The half-cell shift of the midpoints becomes a phase.
            let shift: f64 = z.iter().map(|&k| k as f64).sum::<f64>() / (2 * n) as f64;
            let idx = z.iter().rev().fold(0usize, |acc, &k| acc * n + k.rem_euclid(n as i64) as usize);
            data[idx] += c * C64::from_polar(1.0, std::f64::consts::TAU * shift);
        }
        let fft = FftPlanner::<f64>::new().plan_fft_inverse(n);
        for row in data.chunks_mut(n) {
            fft.process(row);
        }
        if self.dg == 2 {
            let mut col = vec![C64::new(0.0, 0.0); n];
            for x in 0..n {
                for y in 0..n {
                    col[y] = data[y * n + x];
                }
                fft.process(&mut col);
                for y in 0..n {
                    data[y * n + x] = col[y];
                }
            }
        }
        data
    }

    /// Scale s² and the measured Gram decay sup |⟨f_z, f_z′⟩|·(1 + |z − z′|)^β before scaling.
    fn gram_scale(&self, w2: &[f64]) -> f64 {
        let n = self.n;
        let h = (1.0 / n as f64).powi(self.dg as i32);
        let mut diffs: Vec<Vec<i64>> = Vec::new();
        for a in &self.indices {
            for b in &self.indices {
                let dz: Vec<i64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
                diffs.push(dz);
            }
        }
        diffs.sort();
        diffs.dedup();
        let mut worst = 0.0f64;
        for dz in diffs {
            let mut g = C64::new(0.0, 0.0);
            for (i, w) in w2.iter().enumerate() {
                let (a, b) = ((i % n) as f64 + 0.5, (i / n) as f64 + 0.5);
                let phase = dz[0] as f64 * a + if self.dg == 2 { dz[1] as f64 * b } else { 0.0 };
                g += C64::from_polar(*w, std::f64::consts::TAU * phase / n as f64);
            }
            let len = dz.iter().map(|&k| (k * k) as f64).sum::<f64>().sqrt();
            worst = worst.max(g.norm() * h * (1.0 + len).powf(self.beta));
        }
        worst
    }
}

/// Critical exponent 2d_g/(2d_g − β).
pub fn model_critical_p(dg: usize, beta: f64) -> f64 {
    2.0 * dg as f64 / (2.0 * dg as f64 - beta)
}

/// ‖Σ a_z f_z‖_p^p against Σ|a_z|^p, worst over the all-ones vector and `draws` random
/// phase vectors.
pub fn check_model_lemma(fam: &ModelFamily, p: f64, draws: usize, seed: u64) -> Result<InequalityReport> {
    fam.validate()?;
    let pc = model_critical_p(fam.dg, fam.beta);
    if !(p > 0.0 && p < pc) {
        return Err(RmlError::Usage(format!("p = {p} outside (0, {pc}) for beta = {}", fam.beta)));
    }
    let w2 = fam.weight_sq();
    let s2 = 1.0 / fam.gram_scale(&w2);
    let h = (1.0 / fam.n as f64).powi(fam.dg as i32);
    let amp: Vec<f64> = w2.iter().map(|w| (s2 * w).sqrt()).collect();
    let mut rng = crate::rng::stream(seed, 0x21);
    let mut best: Option<(f64, f64)> = None;
    for t in 0..=draws {
        let a: Vec<C64> = (0..fam.indices.len())
            .map(|_| if t == 0 { C64::new(1.0, 0.0) } else { C64::from_polar(1.0, rng.gen::<f64>() * std::f64::consts::TAU) })
            .collect();
        let poly = fam.trig_poly(&a);
        let lhs: f64 = h * poly.iter().zip(&amp).map(|(v, w)| (v.norm() * w).powf(p)).sum::<f64>();
        let rhs: f64 = a.iter().map(|c| c.norm().powf(p)).sum();
        if best.map_or(true, |(l, r)| lhs / rhs > l / r) {
            best = Some((lhs, rhs));
        }
    }
    let (lhs, rhs) = best.expect("at least one draw");
    Ok(InequalityReport::new("model-2.1", format!("d_g={} beta={} #E={}", fam.dg, fam.beta, fam.indices.len()), lhs, None, rhs)
        .with_meta("p", p)
        .with_meta("p_critical", pc)
        .with_meta("grid", fam.n)
        .with_meta("draws", draws)
        .with_meta("seed", seed))
}

/// No-growth sweep over clustered index sets of sizes `count0·2^i`, i = 0..=doublings.
pub fn model_sweep(dg: usize, beta: f64, p: f64, count0: usize, doublings: u32, draws: usize, seed: u64) -> Result<InequalityReport> {
    let mut pts = Vec::new();
    let mut last = None;
    for i in 0..=doublings {
        let count = count0 << i;
        let rep = check_model_lemma(&ModelFamily::clustered(dg, beta, count), p, draws, crate::rng::derive(seed, i as u64))?;
        pts.push(SweepPoint::new(count as f64, rep.lhs, 0.0, rep.rhs));
        last = Some(rep);
    }
    let last = last.expect("nonempty sweep");
    Ok(InequalityReport::new("model-2.1", format!("clustered sweep d_g={dg} beta={beta}"), last.lhs, None, last.rhs)
        .with_meta("p", p)
        .with_meta("p_critical", model_critical_p(dg, beta))
        .with_sweep(pts))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_index_is_fixed_constant() {
        let fam = ModelFamily { dg: 1, beta: 0.5, n: 256, indices: vec![vec![0]] };
        let a = check_model_lemma(&fam, 1.2, 0, 1).unwrap();
        let fam2 = ModelFamily { indices: vec![vec![5]], ..fam.clone() };
        let b = check_model_lemma(&fam2, 1.2, 3, 2).unwrap();
        // Modulation does not change |f_z|, so the ratio is ‖f‖_p^p for every index.
        assert!((a.ratio - b.ratio).abs() < 1e-12 * a.ratio);
        let w2 = fam.weight_sq();
        let s2 = 1.0 / fam.gram_scale(&w2);
        let direct: f64 = w2.iter().map(|w| (s2 * w).sqrt().powf(1.2)).sum::<f64>() / 256.0;
        assert!((a.lhs - direct).abs() < 1e-12 * direct);
    }

    #[test]
    fn trig_poly_matches_direct_sum() {
        let fam = ModelFamily { dg: 2, beta: 1.0, n: 64, indices: vec![vec![0, 1], vec![3, 2], vec![-2, 5]] };
        let a = [C64::new(1.0, 0.5), C64::new(-0.3, 0.0), C64::new(0.0, 2.0)];
        let v = fam.trig_poly(&a);
        for &(x, y) in &[(0usize, 0usize), (5, 17), (63, 40)] {
            let (px, py) = ((x as f64 + 0.5) / 64.0, (y as f64 + 0.5) / 64.0);
            let d: C64 = fam.indices.iter().zip(&a).map(|(z, c)| c * C64::from_polar(1.0, std::f64::consts::TAU * (z[0] as f64 * px + z[1] as f64 * py))).sum();
            assert!((v[y * 64 + x] - d).norm() < 1e-10);
        }
    }

    #[test]
    fn clustered_sweep_no_growth() {
        let rep = model_sweep(1, 0.5, 1.2, 16, 6, 4, 3).unwrap();
        assert!(rep.slope.unwrap() <= 0.05, "{}", rep.to_text());
        assert!(matches!(check_model_lemma(&ModelFamily::clustered(1, 0.5, 4), 1.4, 1, 1), Err(RmlError::Usage(_))));
    }
}
