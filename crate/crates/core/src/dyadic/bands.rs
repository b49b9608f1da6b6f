//! Littlewood–Paley bands on the periodic grid.

use super::grid::{fft, Grid};
use crate::{Result, RmlError, C64};
use serde::{Deserialize, Serialize};

/// Smooth cutoff: 1 on [0, 1], 0 on [2, ∞), C^∞ in between.
pub fn cutoff(t: f64) -> f64 {
    let t = t.abs();
    if t <= 1.0 {
        return 1.0;
    }
    if t >= 2.0 {
        return 0.0;
    }
    let g = |x: f64| if x > 0.0 { (-1.0 / x).exp() } else { 0.0 };
    let (a, b) = (g(2.0 - t), g(t - 1.0));
    a / (a + b)
}

/// Multiplier of band s at radial frequency ρ.
///
/// Bands above `s_min` are Φ(2^{−s}ρ) − Φ(2^{1−s}ρ), supported in 2^{s−1} < ρ < 2^{s+1}; the
/// lowest band is Φ(2^{−s_min}ρ) and carries the zero frequency. The sum telescopes to
/// Φ(2^{−s_max}ρ), which is 1 on every resolved frequency of the grid.
pub fn band_multiplier(s: i32, s_min: i32, rho: f64) -> f64 {
    let hi = cutoff(rho * 2f64.powi(-s));
    if s == s_min {
        hi
    } else {
        hi - cutoff(rho * 2f64.powi(1 - s))
    }
}

/// Bands f_s, s = s_min..=s_max, of a function on the grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridField {
    pub grid: Grid,
    pub s_min: i32,
    /// `bands[i]` holds f_{s_min + i}.
    pub bands: Vec<Vec<C64>>,
    /// Declared bound on the energy fraction of a band outside its annulus.
    pub leakage_tol: f64,
}

impl GridField {
    pub fn new(grid: Grid, s_min: i32, bands: Vec<Vec<C64>>) -> Result<Self> {
        check_range(&grid, s_min)?;
        let want = (grid.s_max - s_min + 1) as usize;
        if bands.len() != want {
            return Err(RmlError::Usage(format!("expected {want} bands, got {}", bands.len())));
        }
        if let Some(b) = bands.iter().find(|b| b.len() != grid.len()) {
            return Err(RmlError::Usage(format!("band of {} samples on a grid of {}", b.len(), grid.len())));
        }
        Ok(Self { grid, s_min, bands, leakage_tol: 1e-6 })
    }

    pub fn zero(grid: Grid, s_min: i32) -> Result<Self> {
        let nb = (grid.s_max - s_min + 1).max(0) as usize;
        Self::new(grid, s_min, vec![vec![C64::new(0.0, 0.0); grid.len()]; nb])
    }

    pub fn s_max(&self) -> i32 {
        self.grid.s_max
    }

    pub fn scales(&self) -> std::ops::RangeInclusive<i32> {
        self.s_min..=self.grid.s_max
    }

    pub fn band(&self, s: i32) -> &[C64] {
        &self.bands[(s - self.s_min) as usize]
    }

    /// Level (log₂ of the side in cells) of the dyadic cubes of side 2^{−s}.
    pub fn cell_level(&self, s: i32) -> u32 {
        (self.grid.s_max - s) as u32
    }

    /// Σ_s f_s.
    pub fn sum(&self) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.grid.len()];
        for b in &self.bands {
            for (o, v) in out.iter_mut().zip(b) {
                *o += v;
            }
        }
        out
    }

    /// Energy fraction of each band outside {2^{s−1} < |ξ| < 2^{s+1}} (for the lowest band,
    /// outside |ξ| < 2^{s_min+1}).
    pub fn leakage(&self) -> Vec<f64> {
        self.scales()
            .map(|s| {
                let mut spec = self.band(s).to_vec();
                fft(&self.grid, &mut spec, false);
                let (mut inside, mut total) = (0.0, 0.0);
                let lo = if s == self.s_min { -1.0 } else { 2f64.powi(s - 1) };
                let hi = 2f64.powi(s + 1);
                for (i, v) in spec.iter().enumerate() {
                    let rho = radial_freq(&self.grid, i);
                    let e = v.norm_sqr();
                    total += e;
                    if rho > lo && rho < hi {
                        inside += e;
                    }
                }
                if total > 0.0 {
                    1.0 - inside / total
                } else {
                    0.0
                }
            })
            .collect()
    }

    /// Fails when some band leaks more than the declared tolerance.
    pub fn check_leakage(&self) -> Result<()> {
        for (s, l) in self.scales().zip(self.leakage()) {
            if l > self.leakage_tol {
                return Err(RmlError::Invariant(format!(
                    "band {s} has energy fraction {l:.3e} outside its annulus (tolerance {:.1e})",
                    self.leakage_tol
                )));
            }
        }
        Ok(())
    }
}

fn check_range(grid: &Grid, s_min: i32) -> Result<()> {
    let coarsest = grid.s_max - grid.top_level() as i32;
    if s_min > grid.s_max || s_min < coarsest {
        return Err(RmlError::Usage(format!(
            "band range {s_min}..={} not resolvable on a grid of {} cells (s_min must lie in {coarsest}..={})",
            grid.s_max, grid.n, grid.s_max
        )));
    }
    Ok(())
}

/// |ξ| of the FFT coefficient at flat index i.
pub fn radial_freq(grid: &Grid, i: usize) -> f64 {
    let (mx, my) = grid.coords(i);
    let fx = grid.freq(mx);
    let fy = if grid.dg == 2 { grid.freq(my) } else { 0.0 };
    fx.hypot(fy)
}

/// Littlewood–Paley decomposition of grid samples into bands s_min..=s_max.
pub fn band_decompose(grid: &Grid, f: &[C64], s_min: i32) -> Result<GridField> {
    check_range(grid, s_min)?;
    if f.len() != grid.len() {
        return Err(RmlError::Usage(format!("{} samples on a grid of {}", f.len(), grid.len())));
    }
    if f.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
        return Err(RmlError::Domain("non-finite grid samples".into()));
    }
    let mut spec = f.to_vec();
    fft(grid, &mut spec, false);
    let norm = 1.0 / grid.len() as f64;
    let bands = (s_min..=grid.s_max)
        .map(|s| {
            let mut b: Vec<C64> = spec
                .iter()
                .enumerate()
                .map(|(i, v)| v * (band_multiplier(s, s_min, radial_freq(grid, i)) * norm))
                .collect();
            fft(grid, &mut b, true);
            b
        })
        .collect();
    GridField::new(*grid, s_min, bands)
}

/// Real-valued convenience wrapper.
pub fn band_decompose_real(grid: &Grid, f: &[f64], s_min: i32) -> Result<GridField> {
    let c: Vec<C64> = f.iter().map(|&v| C64::new(v, 0.0)).collect();
    band_decompose(grid, &c, s_min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use rand::Rng;

    fn rel_l2(a: &[C64], b: &[C64]) -> f64 {
        let num: f64 = a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum();
        let den: f64 = b.iter().map(|y| y.norm_sqr()).sum();
        (num / den).sqrt()
    }

    #[test]
    fn cutoff_shape() {
        assert_eq!(cutoff(0.5), 1.0);
        assert_eq!(cutoff(2.5), 0.0);
        assert!((cutoff(1.5) - 0.5).abs() < 1e-15);
        let mut prev = 1.0;
        for i in 0..=100 {
            let v = cutoff(1.0 + i as f64 / 100.0);
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn random_input_telescopes() {
        let g = Grid::new(2, 32, 5).unwrap();
        let mut rng = stream(3, 0);
        let f: Vec<C64> = (0..g.len()).map(|_| C64::new(rng.gen::<f64>() - 0.5, 0.0)).collect();
        let field = band_decompose(&g, &f, 0).unwrap();
        assert!(rel_l2(&field.sum(), &f) < 1e-12);
        assert!(field.leakage().iter().all(|&l| l < 1e-20));
    }

    #[test]
    fn zero_input_gives_zero_bands() {
        let g = Grid::new(1, 64, 6).unwrap();
        let field = band_decompose(&g, &vec![C64::new(0.0, 0.0); 64], 1).unwrap();
        assert!(field.bands.iter().flatten().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn pure_wave_lands_in_neighbouring_bands() {
        let g = Grid::new(1, 256, 8).unwrap();
        // Frequency 16 = 2^4 in physical units: m / (n h) = m.
        let f: Vec<C64> = (0..256)
            .map(|x| C64::from_polar(1.0, 2.0 * std::f64::consts::PI * 16.0 * x as f64 * g.h()))
            .collect();
        let field = band_decompose(&g, &f, 0).unwrap();
        for s in field.scales() {
            let e: f64 = field.band(s).iter().map(|v| v.norm_sqr()).sum();
            if !(3..=5).contains(&s) {
                assert!(e < 1e-20, "band {s} energy {e}");
            }
        }
    }

    #[test]
    fn coarse_range_rejected() {
        let g = Grid::new(2, 16, 4).unwrap();
        assert!(matches!(band_decompose(&g, &vec![C64::new(0.0, 0.0); 256], -1), Err(RmlError::Usage(_))));
        assert!(band_decompose(&g, &vec![C64::new(0.0, 0.0); 256], 0).is_ok());
    }
}
