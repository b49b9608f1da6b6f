//! Sampled radial functions.

use crate::{Result, RmlError, C64};
use std::fmt::Write as _;

/// Half-width of the interpolation stencil (degree 2·STENCIL − 1).
const STENCIL: usize = 4;

/// A sampled function of the radius ρ ≥ 0 in ambient dimension `dim`.
///
/// Between samples the profile is the local degree-7 Lagrange interpolant; beyond the last
/// sample it is zero for evaluation purposes. A declared `tail` exponent e means the true
/// function continues like ρ^e and is used by the norms.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    dim: usize,
    grid: Vec<f64>,
    values: Vec<C64>,
    tail: Option<f64>,
}

impl RadialProfile {
    pub fn new(dim: usize, grid: Vec<f64>, values: Vec<C64>, tail: Option<f64>) -> Result<Self> {
        if dim < 2 {
            return Err(RmlError::Domain(format!("profiles need dim >= 2, got {dim}")));
        }
        if grid.is_empty() {
            return Err(RmlError::Usage("empty radial grid".into()));
        }
        if grid.len() != values.len() {
            return Err(RmlError::Usage(format!(
                "grid has {} points but {} values",
                grid.len(),
                values.len()
            )));
        }
        if grid[0] < 0.0 || grid.iter().any(|g| !g.is_finite()) {
            return Err(RmlError::Usage("radial grid must be finite and nonnegative".into()));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(RmlError::Usage("radial grid must be strictly increasing".into()));
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(RmlError::Usage("profile values must be finite".into()));
        }
        let p = Self { dim, grid, values, tail };
        if let Some(e) = tail {
            p.check_tail(e)?;
        }
        Ok(p)
    }

    /// Real-valued profile from a closure sampled on `grid`.
    pub fn from_fn<F: Fn(f64) -> f64>(dim: usize, grid: Vec<f64>, f: F) -> Result<Self> {
        let values = grid.iter().map(|&r| C64::new(f(r), 0.0)).collect();
        Self::new(dim, grid, values, None)
    }

    /// Complex profile from a closure sampled on `grid`.
    pub fn from_cfn<F: Fn(f64) -> C64>(dim: usize, grid: Vec<f64>, f: F) -> Result<Self> {
        let values = grid.iter().map(|&r| f(r)).collect();
        Self::new(dim, grid, values, None)
    }

    /// The declared tail must agree with the decay between the last two octaves of the grid:
    /// peak magnitudes over [R/2, R] and [R/4, R/2] may differ from the ratio 2^e by at most 4×.
    fn check_tail(&self, e: f64) -> Result<()> {
        let r = self.rmax();
        let peak = |lo: f64, hi: f64| {
            self.grid
                .iter()
                .zip(&self.values)
                .filter(|(g, _)| **g >= lo && **g <= hi)
                .map(|(_, v)| v.norm())
                .fold(0.0, f64::max)
        };
        let last = peak(0.5 * r, r);
        let prev = peak(0.25 * r, 0.5 * r);
        if self.grid[0] > 0.25 * r || prev == 0.0 || last == 0.0 {
            return Ok(());
        }
        let ratio = last / prev / 2f64.powf(e);
        if !(0.25..=4.0).contains(&ratio) {
            return Err(RmlError::Domain(format!(
                "declared tail exponent {e} inconsistent with sampled decay (ratio {ratio:.3})"
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn tail(&self) -> Option<f64> {
        self.tail
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn rmax(&self) -> f64 {
        *self.grid.last().expect("nonempty grid")
    }

    pub fn with_tail(mut self, tail: Option<f64>) -> Result<Self> {
        if let Some(e) = tail {
            self.check_tail(e)?;
        }
        self.tail = tail;
        Ok(self)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Pointwise map of the values, keeping grid and tail.
    pub fn map<F: Fn(f64, C64) -> C64>(&self, f: F) -> RadialProfile {
        RadialProfile {
            dim: self.dim,
            grid: self.grid.clone(),
            values: self.grid.iter().zip(&self.values).map(|(r, v)| f(*r, *v)).collect(),
            tail: self.tail,
        }
    }

    /// Index i with grid[i] ≤ ρ < grid[i+1], clamped to valid interval indices.
    fn interval(&self, rho: f64) -> usize {
        let n = self.grid.len();
        if n < 2 {
            return 0;
        }
        match self.grid.binary_search_by(|g| g.partial_cmp(&rho).expect("finite grid")) {
            Ok(i) => i.min(n - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(n - 2),
        }
    }

    /// Interpolated value; zero beyond the last sample and below the first sample when the
    /// first sample is away from the origin.
    pub fn eval(&self, rho: f64) -> C64 {
        let n = self.grid.len();
        if n == 1 {
            return if rho == self.grid[0] { self.values[0] } else { C64::new(0.0, 0.0) };
        }
        if rho > self.rmax() || rho < 0.0 {
            return C64::new(0.0, 0.0);
        }
        if rho < self.grid[0] && self.grid[0] > 0.5 * (self.grid[1] - self.grid[0]) {
            return C64::new(0.0, 0.0);
        }
        let i = self.interval(rho);
        let lo = i.saturating_sub(STENCIL - 1).min(n.saturating_sub(2 * STENCIL));
        let hi = (lo + 2 * STENCIL).min(n);
        let mut acc = C64::new(0.0, 0.0);
        for j in lo..hi {
            let mut w = 1.0;
            for m in lo..hi {
                if m != j {
                    w *= (rho - self.grid[m]) / (self.grid[j] - self.grid[m]);
                }
            }
            acc += self.values[j] * w;
        }
        acc
    }

    /// CSV text: header `# dim=<d> tail=<e|none>` then `ρ,value` or `ρ,re,im` rows at 17
    /// significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let tail = match self.tail {
            Some(e) => format!("{:.16e}", e),
            None => "none".to_string(),
        };
        let _ = writeln!(out, "# dim={} tail={}", self.dim, tail);
        let complex = self.values.iter().any(|v| v.im != 0.0);
        for (r, v) in self.grid.iter().zip(&self.values) {
            if complex {
                let _ = writeln!(out, "{:.16e},{:.16e},{:.16e}", r, v.re, v.im);
            } else {
                let _ = writeln!(out, "{:.16e},{:.16e}", r, v.re);
            }
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| RmlError::Parse("empty profile CSV".into()))?;
        let header = header
            .trim()
            .strip_prefix('#')
            .ok_or_else(|| RmlError::Parse("missing '# dim=.. tail=..' header".into()))?;
        let mut dim = None;
        let mut tail = None;
        for tok in header.split_whitespace() {
            if let Some(v) = tok.strip_prefix("dim=") {
                dim = Some(v.parse::<usize>().map_err(|e| RmlError::Parse(format!("dim: {e}")))?);
            } else if let Some(v) = tok.strip_prefix("tail=") {
                if v != "none" {
                    tail = Some(v.parse::<f64>().map_err(|e| RmlError::Parse(format!("tail: {e}")))?);
                }
            }
        }
        let dim = dim.ok_or_else(|| RmlError::Parse("header lacks dim=".into()))?;
        let mut grid = Vec::new();
        let mut values = Vec::new();
        for (ln, line) in lines.enumerate() {
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            let num = |s: &str| {
                s.parse::<f64>()
                    .map_err(|e| RmlError::Parse(format!("row {}: {e}", ln + 2)))
            };
            match cols.len() {
                2 => {
                    grid.push(num(cols[0])?);
                    values.push(C64::new(num(cols[1])?, 0.0));
                }
                3 => {
                    grid.push(num(cols[0])?);
                    values.push(C64::new(num(cols[1])?, num(cols[2])?));
                }
                k => return Err(RmlError::Parse(format!("row {}: expected 2 or 3 columns, got {k}", ln + 2))),
            }
        }
        Self::new(dim, grid, values, tail)
    }
}

/// Real samples on a uniform grid with fast 8-point barycentric interpolation; zero outside
/// [x0, x0 + (n−1)h].
#[derive(Debug, Clone, PartialEq)]
pub struct UniformTable {
    x0: f64,
    h: f64,
    values: Vec<f64>,
}

/// Barycentric weights (−1)^j C(7, j) of the equispaced 8-point stencil.
const BARY: [f64; 8] = [1.0, -7.0, 21.0, -35.0, 35.0, -21.0, 7.0, -1.0];

impl UniformTable {
    pub fn new(x0: f64, x1: f64, values: Vec<f64>) -> Self {
        assert!(values.len() >= 2 * STENCIL && x1 > x0, "uniform table needs at least 8 samples");
        let h = (x1 - x0) / (values.len() - 1) as f64;
        Self { x0, h, values }
    }

    pub fn from_fn<F: Fn(f64) -> f64>(x0: f64, x1: f64, n: usize, f: F) -> Self {
        let values = linspace(x0, x1, n).into_iter().map(f).collect();
        Self::new(x0, x1, values)
    }

    pub fn start(&self) -> f64 {
        self.x0
    }

    pub fn end(&self) -> f64 {
        self.x0 + self.h * (self.values.len() - 1) as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn grid(&self) -> Vec<f64> {
        linspace(self.x0, self.end(), self.values.len())
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        let t = (x - self.x0) / self.h;
        let n = self.values.len();
        if !(t >= 0.0 && t <= (n - 1) as f64) {
            return 0.0;
        }
        let i = (t.floor() as usize).min(n - 2);
        let lo = i.saturating_sub(STENCIL - 1).min(n - 2 * STENCIL);
        let mut num = 0.0;
        let mut den = 0.0;
        for (j, b) in BARY.iter().enumerate() {
            let dt = t - (lo + j) as f64;
            if dt == 0.0 {
                return self.values[lo + j];
            }
            let w = b / dt;
            num += w * self.values[lo + j];
            den += w;
        }
        num / den
    }
}

/// Uniform grid of n points on [a, b].
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let h = (b - a) / (n - 1) as f64;
    (0..n).map(|i| a + i as f64 * h).collect()
}
