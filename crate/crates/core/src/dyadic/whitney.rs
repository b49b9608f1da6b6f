//! Dyadic cubes on the torus and Whitney decompositions of grid masks.

use super::grid::{BoxSums, Grid};
use serde::{Deserialize, Serialize};

/// The cube [z·2^ν, (z+1)·2^ν)^{d_g} in physical units; unused coordinates of z are 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DyadicCube {
    pub level: i32,
    pub z: [i64; 2],
}

impl DyadicCube {
    pub fn new(level: i32, z: [i64; 2]) -> Self {
        Self { level, z }
    }

    /// Cube of side 2^ℓ cells whose corner cell is (x, y).
    pub fn from_cells(grid: &Grid, cell_level: u32, x: usize, y: usize) -> Self {
        let z = [(x >> cell_level) as i64, if grid.dg == 2 { (y >> cell_level) as i64 } else { 0 }];
        Self { level: cell_level as i32 - grid.s_max, z }
    }

    pub fn cell_level(&self, grid: &Grid) -> u32 {
        (self.level + grid.s_max) as u32
    }

    pub fn side_cells(&self, grid: &Grid) -> usize {
        1 << self.cell_level(grid)
    }

    pub fn corner_cell(&self, grid: &Grid) -> (usize, usize) {
        let l = self.cell_level(grid);
        ((self.z[0] as usize) << l, (self.z[1] as usize) << l)
    }

    pub fn side(&self) -> f64 {
        2f64.powi(self.level)
    }

    pub fn measure(&self, dg: usize) -> f64 {
        self.side().powi(dg as i32)
    }

    pub fn parent(&self) -> Self {
        Self { level: self.level + 1, z: [self.z[0].div_euclid(2), self.z[1].div_euclid(2)] }
    }

    pub fn children(&self, dg: usize) -> Vec<Self> {
        let ys: &[i64] = if dg == 2 { &[0, 1] } else { &[0] };
        let mut out = Vec::with_capacity(1 << dg);
        for &dy in ys {
            for dx in 0..2 {
                let zy = if dg == 2 { 2 * self.z[1] + dy } else { 0 };
                out.push(Self { level: self.level - 1, z: [2 * self.z[0] + dx, zy] });
            }
        }
        out
    }

    /// True if `other` ⊂ self.
    pub fn contains(&self, other: &Self) -> bool {
        if other.level > self.level {
            return false;
        }
        let sh = (self.level - other.level) as u32;
        other.z[0] >> sh == self.z[0] && other.z[1] >> sh == self.z[1]
    }

    /// Flat indices of the cells of the cube.
    pub fn cells(&self, grid: &Grid) -> Vec<usize> {
        let (x0, y0) = self.corner_cell(grid);
        let l = self.side_cells(grid);
        let ly = if grid.dg == 2 { l } else { 1 };
        let mut out = Vec::with_capacity(l * ly);
        for y in y0..y0 + ly {
            for x in x0..x0 + l {
                out.push(grid.idx(x, y));
            }
        }
        out
    }
}

/// Cells meeting the interior of the `factor`-fold dilate of a cube of side 2^ℓ cells with
/// corner cell a, as (first cell, count) along one axis. `factor` must be even.
pub fn dilate_span(cell_level: u32, a: usize, factor: i64) -> (i64, usize) {
    let l = 1i64 << cell_level;
    let lo2 = 2 * a as i64 + l - factor * l;
    let hi2 = 2 * a as i64 + l + factor * l;
    let start = lo2.div_euclid(2);
    let end = (hi2 + 1).div_euclid(2);
    (start, (end - start) as usize)
}

fn dilate_inside(grid: &Grid, bs: &BoxSums, full: f64, cube: &DyadicCube, factor: i64) -> bool {
    let (x0, y0) = cube.corner_cell(grid);
    let (sx, len) = dilate_span(cube.cell_level(grid), x0, factor);
    if len >= grid.n {
        return bs.sum(0, 0, grid.n) == full;
    }
    let (sy, _) = dilate_span(cube.cell_level(grid), y0, factor);
    bs.sum(sx, sy, len) == bs.area(len)
}

/// Whitney cubes of a mask together with the mask cells left uncovered.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Whitney {
    pub cubes: Vec<DyadicCube>,
    /// Mask cells lying in no selected cube (the 20-fold dilate of their own cell leaves the mask).
    pub uncovered: Vec<usize>,
}

/// Maximal dyadic cubes whose 20-fold dilate lies in the mask (wrapped on the torus).
///
/// Containment of dilates is monotone under refinement, so a top-down pass from the cube
/// covering the whole torus selects exactly the maximal cubes.
pub fn whitney(grid: &Grid, mask: &[bool]) -> Whitney {
    let ind: Vec<f64> = mask.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect();
    let bs = BoxSums::new(*grid, &ind);
    let full = grid.len() as f64;
    let top = grid.top_level();
    let mut cubes = Vec::new();
    let mut uncovered = Vec::new();
    let mut stack = vec![DyadicCube::from_cells(grid, top, 0, 0)];
    while let Some(c) = stack.pop() {
        let (x0, y0) = c.corner_cell(grid);
        let side = c.side_cells(grid);
        if bs.sum(x0 as i64, y0 as i64, side) == 0.0 {
            continue;
        }
        if dilate_inside(grid, &bs, full, &c, 20) {
            cubes.push(c);
        } else if c.cell_level(grid) > 0 {
            stack.extend(c.children(grid.dg));
        } else {
            uncovered.push(grid.idx(x0, y0));
        }
    }
    cubes.sort();
    uncovered.sort_unstable();
    Whitney { cubes, uncovered }
}

/// Oracle: every dyadic cube of every level is tested cell by cell, and kept if its dilate
/// lies in the mask while no ancestor's does.
pub fn whitney_brute(grid: &Grid, mask: &[bool]) -> Vec<DyadicCube> {
    let n = grid.n as i64;
    let ok = |c: &DyadicCube| {
        let (x0, y0) = c.corner_cell(grid);
        let (sx, lx) = dilate_span(c.cell_level(grid), x0, 20);
        let (sy, ly) = dilate_span(c.cell_level(grid), y0, 20);
        let ly = if grid.dg == 2 { ly } else { 1 };
        let sy = if grid.dg == 2 { sy } else { 0 };
        (0..ly as i64).all(|dy| {
            (0..lx as i64).all(|dx| {
                mask[grid.idx((sx + dx).rem_euclid(n) as usize, (sy + dy).rem_euclid(n) as usize)]
            })
        })
    };
    let top = grid.top_level() as i32 - grid.s_max;
    let mut out = Vec::new();
    for cl in 0..=grid.top_level() {
        let per = grid.n >> cl;
        let py = if grid.dg == 2 { per } else { 1 };
        for zy in 0..py {
            for zx in 0..per {
                let c = DyadicCube::from_cells(grid, cl, zx << cl, zy << cl);
                if !ok(&c) {
                    continue;
                }
                let mut anc = c;
                let mut maximal = true;
                while anc.level < top {
                    anc = anc.parent();
                    if ok(&anc) {
                        maximal = false;
                        break;
                    }
                }
                if maximal {
                    out.push(c);
                }
            }
        }
    }
    out.sort();
    out
}

/// Cell → index of the cube containing it.
pub fn owner_map(grid: &Grid, cubes: &[DyadicCube]) -> Vec<Option<usize>> {
    let mut own = vec![None; grid.len()];
    for (k, c) in cubes.iter().enumerate() {
        for i in c.cells(grid) {
            own[i] = Some(k);
        }
    }
    own
}

/// Largest number of `factor`-fold dilates covering one cell.
pub fn overlap_multiplicity(grid: &Grid, cubes: &[DyadicCube], factor: i64) -> u32 {
    let n = grid.n as i64;
    let mut count = vec![0u32; grid.len()];
    for c in cubes {
        let (x0, y0) = c.corner_cell(grid);
        let (sx, lx) = dilate_span(c.cell_level(grid), x0, factor);
        let (sy, ly) = dilate_span(c.cell_level(grid), y0, factor);
        let lx = lx.min(grid.n);
        let (sy, ly) = if grid.dg == 2 { (sy, ly.min(grid.n)) } else { (0, 1) };
        for dy in 0..ly as i64 {
            for dx in 0..lx as i64 {
                count[grid.idx((sx + dx).rem_euclid(n) as usize, (sy + dy).rem_euclid(n) as usize)] += 1;
            }
        }
    }
    count.into_iter().max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use rand::Rng;

    #[test]
    fn cube_relations() {
        let c = DyadicCube::new(-2, [3, 5]);
        assert_eq!(c.parent(), DyadicCube::new(-1, [1, 2]));
        for ch in c.children(2) {
            assert_eq!(ch.parent(), c);
            assert!(c.contains(&ch));
        }
        assert!(!c.contains(&c.parent()));
    }

    #[test]
    fn full_mask_gives_top_cube() {
        let g = Grid::new(2, 32, 5).unwrap();
        let w = whitney(&g, &vec![true; g.len()]);
        assert_eq!(w.cubes, vec![DyadicCube::new(0, [0, 0])]);
        assert!(w.uncovered.is_empty());
    }

    #[test]
    fn single_cell_is_uncovered() {
        let g = Grid::new(2, 64, 6).unwrap();
        let mut m = vec![false; g.len()];
        m[g.idx(7, 9)] = true;
        let w = whitney(&g, &m);
        assert!(w.cubes.is_empty());
        assert_eq!(w.uncovered, vec![g.idx(7, 9)]);
    }

    #[test]
    fn random_masks_match_brute_force() {
        for (dg, n) in [(1usize, 128usize), (2, 64)] {
            let g = Grid::new(dg, n, 6).unwrap();
            for seed in 0..4 {
                let mut rng = stream(seed, 77);
                // Union of random boxes so that Whitney cubes of several levels appear.
                let mut m = vec![false; g.len()];
                for _ in 0..3 {
                    let (cx, cy) = (rng.gen_range(0..n), rng.gen_range(0..n));
                    let (hx, hy) = (rng.gen_range(5..n / 2 + 20), rng.gen_range(5..n / 2 + 20));
                    for i in 0..g.len() {
                        let (x, y) = g.coords(i);
                        let dx = (x as i64 - cx as i64).rem_euclid(n as i64);
                        let dy = (y as i64 - cy as i64).rem_euclid(n as i64);
                        if dx < hx as i64 && (dg == 1 || dy < hy as i64) {
                            m[i] = true;
                        }
                    }
                }
                let w = whitney(&g, &m);
                assert_eq!(w.cubes, whitney_brute(&g, &m), "dg={dg} seed={seed}");
                let own = owner_map(&g, &w.cubes);
                let covered = own.iter().filter(|o| o.is_some()).count();
                assert_eq!(covered, w.cubes.iter().map(|c| c.cells(&g).len()).sum::<usize>());
                for i in 0..g.len() {
                    assert_eq!(m[i] && own[i].is_none(), w.uncovered.binary_search(&i).is_ok());
                }
            }
        }
    }
}
