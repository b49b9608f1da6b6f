//! Hardy–Littlewood maximal function and Peetre's square function on the torus.

use super::bands::GridField;
use super::grid::{BoxSums, Grid};

/// Centered maximal function: max over odd cubes of side ≤ n centered at each cell, and the
/// average over the whole torus. Uses |g|.
pub fn hl_maximal(grid: &Grid, g: &[f64]) -> Vec<f64> {
    let abs: Vec<f64> = g.iter().map(|v| v.abs()).collect();
    let bs = BoxSums::new(*grid, &abs);
    let whole = abs.iter().sum::<f64>() / grid.len() as f64;
    let half = (grid.n - 1) / 2;
    (0..grid.len())
        .map(|i| {
            let (x, y) = grid.coords(i);
            let mut best = whole;
            for m in 0..=half {
                let side = 2 * m + 1;
                let v = bs.sum(x as i64 - m as i64, y as i64 - m as i64, side) / bs.area(side);
                if v > best {
                    best = v;
                }
            }
            best
        })
        .collect()
}

/// Direct enumeration of the same cube family, summing cell by cell.
pub fn hl_maximal_brute(grid: &Grid, g: &[f64]) -> Vec<f64> {
    let n = grid.n as i64;
    let whole = g.iter().map(|v| v.abs()).sum::<f64>() / grid.len() as f64;
    (0..grid.len())
        .map(|i| {
            let (x, y) = grid.coords(i);
            let mut best = whole;
            for m in 0..=((n - 1) / 2) {
                let ys: Vec<i64> = if grid.dg == 1 { vec![0] } else { (-m..=m).collect() };
                let mut sum = 0.0;
                let mut cnt = 0.0;
                for &dy in &ys {
                    for dx in -m..=m {
                        let xx = (x as i64 + dx).rem_euclid(n) as usize;
                        let yy = (y as i64 + dy).rem_euclid(n) as usize;
                        sum += g[grid.idx(xx, yy)].abs();
                        cnt += 1.0;
                    }
                }
                best = best.max(sum / cnt);
            }
            best
        })
        .collect()
}

/// Peetre radius 10·d_g·2^{−s} measured in cells.
pub fn peetre_radius_cells(grid: &Grid, s: i32) -> u64 {
    10 * grid.dg as u64 * (1u64 << (grid.s_max - s).max(0))
}

fn isqrt(v: u64) -> u64 {
    let mut r = (v as f64).sqrt() as u64;
    while r * r > v {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= v {
        r += 1;
    }
    r
}

/// Circular range-maximum over one row (sparse table on the doubled row).
struct RowMax {
    n: usize,
    levels: Vec<Vec<f64>>,
}

impl RowMax {
    fn new(row: &[f64]) -> Self {
        let n = row.len();
        let mut base = row.to_vec();
        base.extend_from_slice(row);
        let mut levels = vec![base];
        let mut w = 1;
        while 2 * w <= n {
            let prev = levels.last().unwrap();
            let next: Vec<f64> = (0..prev.len() - w).map(|i| prev[i].max(prev[i + w])).collect();
            levels.push(next);
            w *= 2;
        }
        Self { n, levels }
    }

    /// Max over cells x − w ..= x + w (mod n).
    fn query(&self, x: usize, w: usize) -> f64 {
        let len = 2 * w + 1;
        if len >= self.n {
            return self.levels.last().map_or(0.0, |l| {
                let top = 1usize << (self.levels.len() - 1);
                // The top level covers windows of length `top`; two of them cover the row.
                l[0].max(l[self.n - top])
            });
        }
        let start = (x + self.n - w) % self.n;
        let k = usize::BITS as usize - 1 - len.leading_zeros() as usize;
        let l = &self.levels[k];
        l[start].max(l[start + len - (1 << k)])
    }
}

/// sup_{|y| ≤ R} v(x + y) over grid offsets in the Euclidean ball of radius R cells, with
/// offsets taken as minimal torus representatives.
pub fn ball_sup(grid: &Grid, v: &[f64], radius_cells: u64) -> Vec<f64> {
    let n = grid.n;
    let ny = grid.ny();
    let rows: Vec<RowMax> = (0..ny).map(|y| RowMax::new(&v[y * n..(y + 1) * n])).collect();
    let r2 = radius_cells * radius_cells;
    // Row offsets dy with |dy| minimal on the torus, and their half-widths.
    let offsets: Vec<(usize, usize)> = if grid.dg == 1 {
        vec![(0, radius_cells.min(n as u64) as usize)]
    } else {
        let lo = -(n as i64 / 2) + 1;
        (lo..=n as i64 / 2)
            .filter(|dy| (dy.unsigned_abs()).pow(2) <= r2)
            .map(|dy| {
                let w = isqrt(r2 - dy.unsigned_abs().pow(2)).min(n as u64) as usize;
                (dy.rem_euclid(n as i64) as usize, w)
            })
            .collect()
    };
    let mut out = vec![0.0; grid.len()];
    for y in 0..ny {
        for x in 0..n {
            let mut best = f64::NEG_INFINITY;
            for &(dy, w) in &offsets {
                best = best.max(rows[(y + dy) % ny].query(x, w));
            }
            out[grid.idx(x, y)] = best;
        }
    }
    out
}

/// Sf(x) = (Σ_s sup_{|y| ≤ 10 d_g 2^{−s}} |f_s(x+y)|²)^{1/2}, exact over grid points.
#[allow(non_snake_case)]
pub fn peetre_S(field: &GridField) -> Vec<f64> {
    let grid = &field.grid;
    let mut acc = vec![0.0; grid.len()];
    for s in field.scales() {
        let sq: Vec<f64> = field.band(s).iter().map(|v| v.norm_sqr()).collect();
        for (a, v) in acc.iter_mut().zip(ball_sup(grid, &sq, peetre_radius_cells(grid, s))) {
            *a += v;
        }
    }
    acc.into_iter().map(f64::sqrt).collect()
}

/// Oracle for [`peetre_S`]: every offset of the torus tested against the ball.
#[allow(non_snake_case)]
pub fn peetre_S_brute(field: &GridField) -> Vec<f64> {
    let grid = &field.grid;
    let n = grid.n as i64;
    let minrep = |d: i64| {
        let d = d.rem_euclid(n);
        d.min(n - d)
    };
    let mut acc = vec![0.0; grid.len()];
    for s in field.scales() {
        let r = peetre_radius_cells(grid, s) as i64;
        let band = field.band(s);
        for i in 0..grid.len() {
            let (x, y) = grid.coords(i);
            let mut best = 0.0f64;
            for j in 0..grid.len() {
                let (u, v) = grid.coords(j);
                let (dx, dy) = (minrep(u as i64 - x as i64), minrep(v as i64 - y as i64));
                if dx * dx + dy * dy <= r * r {
                    best = best.max(band[j].norm_sqr());
                }
            }
            acc[i] += best;
        }
    }
    acc.into_iter().map(f64::sqrt).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::band_decompose_real;
    use crate::rng::stream;
    use crate::C64;
    use rand::Rng;

    #[test]
    fn constant_is_fixed() {
        let g = Grid::new(2, 8, 3).unwrap();
        let m = hl_maximal(&g, &vec![2.5; 64]);
        assert!(m.iter().all(|v| (v - 2.5).abs() < 1e-12));
    }

    #[test]
    fn single_cell_pattern() {
        let g = Grid::new(2, 16, 4).unwrap();
        let mut v = vec![0.0; 256];
        v[g.idx(5, 5)] = 1.0;
        let m = hl_maximal(&g, &v);
        assert_eq!(m[g.idx(5, 5)], 1.0);
        // Chebyshev distance 3 needs a cube of side 7.
        assert!((m[g.idx(8, 4)] - 1.0 / 49.0).abs() < 1e-15);
    }

    #[test]
    fn two_cells_match_brute_force() {
        for dg in [1, 2] {
            let g = Grid::new(dg, 8, 3).unwrap();
            let mut v = vec![0.0; g.len()];
            v[g.idx(1, if dg == 2 { 2 } else { 0 })] = 1.0;
            v[g.idx(6, if dg == 2 { 7 } else { 0 })] = 1.0;
            let a = hl_maximal(&g, &v);
            let b = hl_maximal_brute(&g, &v);
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn peetre_matches_brute_force() {
        for (dg, n, smax) in [(1, 64, 6), (2, 16, 4)] {
            let g = Grid::new(dg, n, smax).unwrap();
            let mut rng = stream(11, dg as u64);
            let f: Vec<f64> = (0..g.len()).map(|_| rng.gen::<f64>() - 0.5).collect();
            let field = band_decompose_real(&g, &f, smax - g.top_level() as i32).unwrap();
            let a = peetre_S(&field);
            let b = peetre_S_brute(&field);
            for (x, y) in a.iter().zip(&b) {
                assert!((x - y).abs() <= 1e-14 * y.max(1.0), "{x} vs {y}");
            }
            for s in field.scales() {
                for (sv, fv) in a.iter().zip(field.band(s)) {
                    assert!(*sv >= fv.norm() - 1e-15);
                }
            }
        }
    }

    #[test]
    fn indicator_band_gives_dilated_indicator() {
        let g = Grid::new(2, 128, 7).unwrap();
        let mut field = crate::dyadic::GridField::zero(g, 7).unwrap();
        field.bands[0][g.idx(10, 20)] = C64::new(1.0, 0.0);
        let s = peetre_S(&field);
        // Radius 20 cells at s = s_max in two dimensions.
        for i in 0..g.len() {
            let (x, y) = g.coords(i);
            let wrap = |d: i64| d.rem_euclid(128).min(128 - d.rem_euclid(128));
            let (dx, dy) = (wrap(x as i64 - 10), wrap(y as i64 - 20));
            let inside = dx * dx + dy * dy <= 400;
            assert_eq!(s[i], if inside { 1.0 } else { 0.0 }, "({x},{y})");
        }
    }
}
