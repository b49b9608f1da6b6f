//! Periodic regular grids in dimension 1 or 2, box sums and FFTs.

use crate::{Result, RmlError, C64};
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

/// A torus of `n` cells per side (n a power of two), cell side 2^{−s_max}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    pub dg: usize,
    pub n: usize,
    pub s_max: i32,
}

impl Grid {
    pub fn new(dg: usize, n: usize, s_max: i32) -> Result<Self> {
        if !(dg == 1 || dg == 2) {
            return Err(RmlError::Usage(format!("grid dimension must be 1 or 2, got {dg}")));
        }
        if n < 2 || !n.is_power_of_two() {
            return Err(RmlError::Usage(format!("cells per side must be a power of two >= 2, got {n}")));
        }
        Ok(Self { dg, n, s_max })
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dg as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// log₂ n: level of the cube covering the whole torus.
    pub fn top_level(&self) -> u32 {
        self.n.trailing_zeros()
    }

    /// Cell side 2^{−s_max}.
    pub fn h(&self) -> f64 {
        2f64.powi(-self.s_max)
    }

    pub fn cell_volume(&self) -> f64 {
        self.h().powi(self.dg as i32)
    }

    /// Flat index of cell (x, y); y is ignored in one dimension.
    #[inline]
    pub fn idx(&self, x: usize, y: usize) -> usize {
        if self.dg == 1 {
            x
        } else {
            y * self.n + x
        }
    }

    #[inline]
    pub fn coords(&self, i: usize) -> (usize, usize) {
        if self.dg == 1 {
            (i, 0)
        } else {
            (i % self.n, i / self.n)
        }
    }

    /// Extent in the second coordinate (1 for a one-dimensional grid).
    pub fn ny(&self) -> usize {
        if self.dg == 1 {
            1
        } else {
            self.n
        }
    }

    /// Frequency (in physical units) of FFT index m.
    pub fn freq(&self, m: usize) -> f64 {
        let n = self.n as i64;
        let k = if (m as i64) < n / 2 { m as i64 } else { m as i64 - n };
        k as f64 / (self.n as f64 * self.h())
    }
}

/// Summed-area table over the doubled torus, giving box sums with wraparound in O(1).
#[derive(Debug, Clone)]
pub struct BoxSums {
    grid: Grid,
    w: usize,
    table: Vec<f64>,
}

impl BoxSums {
    pub fn new(grid: Grid, values: &[f64]) -> Self {
        let n = grid.n;
        let (ex, ey) = (2 * n, if grid.dg == 1 { 1 } else { 2 * n });
        let w = ex + 1;
        let mut table = vec![0.0; w * (ey + 1)];
        for y in 0..ey {
            let mut row = 0.0;
            for x in 0..ex {
                row += values[grid.idx(x % n, y % n)];
                table[(y + 1) * w + x + 1] = table[y * w + x + 1] + row;
            }
        }
        Self { grid, w, table }
    }

    /// Sum over the box with corner (x0, y0) (reduced mod n) and side `side` ≤ n.
    #[inline]
    pub fn sum(&self, x0: i64, y0: i64, side: usize) -> f64 {
        let n = self.grid.n as i64;
        let side = side.min(self.grid.n);
        let x0 = x0.rem_euclid(n) as usize;
        if self.grid.dg == 1 {
            return self.table[self.w + x0 + side] - self.table[self.w + x0];
        }
        let y0 = y0.rem_euclid(n) as usize;
        let (x1, y1) = (x0 + side, y0 + side);
        let t = |x: usize, y: usize| self.table[y * self.w + x];
        t(x1, y1) - t(x0, y1) - t(x1, y0) + t(x0, y0)
    }

    /// Number of cells in a box of the given side.
    pub fn area(&self, side: usize) -> f64 {
        (side.min(self.grid.n) as f64).powi(self.grid.dg as i32)
    }
}

/// In-place FFT over all grid axes (unnormalised; `inverse` uses the conjugate kernel).
pub fn fft(grid: &Grid, data: &mut [C64], inverse: bool) {
    let n = grid.n;
    let mut planner = FftPlanner::<f64>::new();
    let plan = if inverse { planner.plan_fft_inverse(n) } else { planner.plan_fft_forward(n) };
    for row in data.chunks_mut(n) {
        plan.process(row);
    }
    if grid.dg == 2 {
        let mut col = vec![C64::new(0.0, 0.0); n];
        for x in 0..n {
            for y in 0..n {
                col[y] = data[y * n + x];
            }
            plan.process(&mut col);
            for y in 0..n {
                data[y * n + x] = col[y];
            }
        }
    }
}

/// L^p norm on the grid with cell-volume weights.
pub fn grid_lp(grid: &Grid, f: &[C64], p: f64) -> f64 {
    (f.iter().map(|v| v.norm().powf(p)).sum::<f64>() * grid.cell_volume()).powf(1.0 / p)
}
