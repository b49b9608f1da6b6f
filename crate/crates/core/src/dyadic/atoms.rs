//! Level sets of the Peetre function, cube families 𝒬^s_j and atoms A_{s,W,j}.

use super::bands::GridField;
use super::grid::{BoxSums, Grid};
use super::maximal::{hl_maximal, peetre_S};
use super::whitney::{overlap_multiplicity, owner_map, whitney, DyadicCube};
use crate::{Result, RmlError, C64};
use serde::Serialize;
use std::collections::{BTreeMap, HashMap};

/// Ω_j* = {M χ_{Ω_j} > 100^{−d_g}}.
pub fn omega_star_threshold(dg: usize) -> f64 {
    100f64.powi(-(dg as i32))
}

/// Constant in Σ_W |W| ‖A_{s(W),W,j}‖_∞^p ≤ C 2^{pj} |Ω_j|: the sup bound 2^{j+1}, the sum
/// Σ|W| ≤ |Ω_j*| and the weak (1,1) bound |Ω_j*| ≤ 3^{d_g}·100^{d_g}|Ω_j| for centered cubes.
pub fn lemma_ii_constant(dg: usize, p: f64) -> f64 {
    2f64.powf(p) * 300f64.powi(dg as i32)
}

/// Frozen constant for Σ_W Σ_s ‖A_{s,W,j}‖₂² ≤ C 2^{2j} |Ω_j|, from the chain
/// ≤ 8·2^{2j}|Ω_j*| ≤ 8·300^{d_g}·2^{2j}|Ω_j|.
pub fn lemma_i_constant(dg: usize) -> f64 {
    8.0 * 300f64.powi(dg as i32)
}

/// f_s restricted to the cubes of 𝒬^s_j inside one Whitney cube.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Atom {
    pub s: i32,
    /// Index into the Whitney cubes of the enclosing [`AtomSet`].
    pub whitney: usize,
    pub cubes: Vec<DyadicCube>,
    /// ‖A_{s,W,j}‖_∞.
    pub sup: f64,
    /// ‖A_{s,W,j}‖₂².
    pub l2_squared: f64,
}

/// Everything built for one threshold 2^j.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomSet {
    pub j: i32,
    #[serde(skip)]
    pub omega: Vec<bool>,
    #[serde(skip)]
    pub omega_star: Vec<bool>,
    pub whitney: Vec<DyadicCube>,
    /// Cells of Ω_j* not covered by any Whitney cube.
    pub uncovered: usize,
    pub atoms: Vec<Atom>,
}

impl AtomSet {
    pub fn meas_omega(&self, grid: &Grid) -> f64 {
        self.omega.iter().filter(|&&b| b).count() as f64 * grid.cell_volume()
    }

    pub fn meas_omega_star(&self, grid: &Grid) -> f64 {
        self.omega_star.iter().filter(|&&b| b).count() as f64 * grid.cell_volume()
    }
}

/// Atoms for every threshold in a j-range.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomDecomposition {
    pub grid: Grid,
    pub s_min: i32,
    #[serde(skip)]
    pub sf: Vec<f64>,
    pub j_min: i32,
    pub j_max: i32,
    pub sets: Vec<AtomSet>,
}

impl AtomDecomposition {
    /// A_{s,W} = Σ_{j: W ∈ 𝒲_j} A_{s,W,j}, keyed by (s, W), as lists of (j, atom index).
    pub fn cumulative(&self) -> BTreeMap<(i32, DyadicCube), Vec<(i32, usize)>> {
        let mut out: BTreeMap<(i32, DyadicCube), Vec<(i32, usize)>> = BTreeMap::new();
        for set in &self.sets {
            for (k, a) in set.atoms.iter().enumerate() {
                out.entry((a.s, set.whitney[a.whitney])).or_default().push((set.j, k));
            }
        }
        out
    }

    /// Σ_W A_{s,W} for every band, and the largest number of atoms covering one cell of a
    /// band (1 when the cubes are disjoint).
    pub fn reconstruct(&self, field: &GridField) -> (Vec<Vec<C64>>, u32) {
        let g = &self.grid;
        let mut out = vec![vec![C64::new(0.0, 0.0); g.len()]; field.bands.len()];
        let mut count = vec![vec![0u32; g.len()]; field.bands.len()];
        for ((s, _), parts) in self.cumulative() {
            let b = (s - field.s_min) as usize;
            for (j, k) in parts {
                let set = &self.sets[(j - self.j_min) as usize];
                for q in &set.atoms[k].cubes {
                    for i in q.cells(g) {
                        out[b][i] += field.bands[b][i];
                        count[b][i] += 1;
                    }
                }
            }
        }
        let mult = count.iter().flatten().copied().max().unwrap_or(0);
        (out, mult)
    }
}

/// [floor(log₂ min Sf⁺) − 1, floor(log₂ max Sf)], so that Ω_{j_min} = {Sf > 0} and
/// Ω_{j_max+1} = ∅. None when Sf vanishes identically.
pub fn auto_j_range(sf: &[f64]) -> Option<(i32, i32)> {
    let pos = sf.iter().copied().filter(|&v| v > 0.0);
    let lo = pos.clone().fold(f64::INFINITY, f64::min);
    let hi = pos.fold(0.0, f64::max);
    if hi <= 0.0 {
        return None;
    }
    Some((lo.log2().floor() as i32 - 1, hi.log2().floor() as i32))
}

fn level_mask(sf: &[f64], j: i32) -> Vec<bool> {
    let t = 2f64.powi(j);
    sf.iter().map(|&v| v > t).collect()
}

fn indicator(m: &[bool]) -> Vec<f64> {
    m.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect()
}

/// Atoms for one threshold j, given Sf.
pub fn build_atom_set(field: &GridField, sf: &[f64], j: i32) -> Result<AtomSet> {
    let g = &field.grid;
    let omega = level_mask(sf, j);
    let next = level_mask(sf, j + 1);
    let thr = omega_star_threshold(g.dg);
    let omega_star: Vec<bool> = hl_maximal(g, &indicator(&omega)).into_iter().map(|v| v > thr).collect();
    let w = whitney(g, &omega_star);
    let owner = owner_map(g, &w.cubes);
    let bs_j = BoxSums::new(*g, &indicator(&omega));
    let bs_next = BoxSums::new(*g, &indicator(&next));
    let mut groups: HashMap<(i32, usize), Vec<DyadicCube>> = HashMap::new();
    for s in field.scales() {
        let cl = field.cell_level(s);
        let side = 1usize << cl;
        let half = bs_j.area(side) / 2.0;
        let per = g.n >> cl;
        let py = if g.dg == 2 { per } else { 1 };
        for zy in 0..py {
            for zx in 0..per {
                let (x0, y0) = (zx << cl, zy << cl);
                if bs_j.sum(x0 as i64, y0 as i64, side) < half || bs_next.sum(x0 as i64, y0 as i64, side) >= half {
                    continue;
                }
                let q = DyadicCube::from_cells(g, cl, x0, y0);
                let k = owner[g.idx(x0, y0)]
                    .filter(|&k| w.cubes[k].contains(&q))
                    .ok_or_else(|| {
                        RmlError::Invariant(format!("cube {q:?} of band {s} lies in no Whitney cube of level {j}"))
                    })?;
                groups.entry((s, k)).or_default().push(q);
            }
        }
    }
    let mut keys: Vec<_> = groups.keys().copied().collect();
    keys.sort_unstable();
    let atoms = keys
        .into_iter()
        .map(|(s, k)| {
            let cubes = groups.remove(&(s, k)).unwrap_or_default();
            let band = field.band(s);
            let (mut sup, mut l2) = (0.0f64, 0.0);
            for q in &cubes {
                for i in q.cells(g) {
                    let v = band[i].norm();
                    sup = sup.max(v);
                    l2 += v * v;
                }
            }
            Atom { s, whitney: k, cubes, sup, l2_squared: l2 * g.cell_volume() }
        })
        .collect();
    Ok(AtomSet { j, omega, omega_star, whitney: w.cubes, uncovered: w.uncovered.len(), atoms })
}

/// Ω_j, Ω_j*, Whitney cubes and atoms for each j in the range (automatic when None).
pub fn build_atoms(field: &GridField, j_range: Option<(i32, i32)>) -> Result<AtomDecomposition> {
    let sf = peetre_S(field);
    let (j_min, j_max) = match j_range.or_else(|| auto_j_range(&sf)) {
        Some(r) => r,
        None => (0, -1),
    };
    if j_max - j_min > 200 {
        return Err(RmlError::Usage(format!("threshold range {j_min}..={j_max} is too wide")));
    }
    let sets = (j_min..=j_max).map(|j| build_atom_set(field, &sf, j)).collect::<Result<Vec<_>>>()?;
    Ok(AtomDecomposition { grid: field.grid, s_min: field.s_min, sf, j_min, j_max, sets })
}

/// Measured quantities of the atom lemma for one threshold.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AtomLemmaReport {
    pub j: i32,
    pub meas_omega: f64,
    pub meas_omega_star: f64,
    pub whitney_cubes: usize,
    pub atoms: usize,
    /// Σ_W Σ_s ‖A_{s,W,j}‖₂².
    pub l2_sum: f64,
    /// l2_sum / (2^{2j} |Ω_j|).
    pub l2_ratio: f64,
    /// Frozen bound for `l2_ratio`.
    pub l2_constant: f64,
    /// l2_sum ≤ 8·2^{2j}|Ω_j*|.
    pub l2_chain_holds: bool,
    /// (p, Σ_W |W| max_s ‖A_{s,W,j}‖_∞^p, C_d 2^{pj} |Ω_j|).
    pub sup_measure: Vec<(f64, f64, f64)>,
    /// max ‖A_{s,W,j}‖_∞ / 2^{j+1}.
    pub sup_ratio: f64,
    /// Σ_W |W| / |Ω_j*|.
    pub whitney_fill: f64,
    pub overlap_4x: u32,
    pub uncovered: usize,
}

impl AtomLemmaReport {
    /// Both parts of the lemma, the sup bound and the Whitney measure bound.
    pub fn holds(&self) -> bool {
        self.l2_chain_holds
            && self.l2_ratio <= self.l2_constant
            && self.sup_ratio <= 1.0
            && self.whitney_fill <= 1.0 + 1e-12
            && self.sup_measure.iter().all(|(_, lhs, rhs)| lhs <= rhs)
    }
}

pub const LEMMA_EXPONENTS: [f64; 4] = [0.5, 1.0, 1.5, 2.0];

/// Lemma quantities for every threshold of a decomposition.
pub fn atom_lemma_reports(dec: &AtomDecomposition) -> Vec<AtomLemmaReport> {
    let g = &dec.grid;
    let dg = g.dg;
    dec.sets
        .iter()
        .map(|set| {
            let mo = set.meas_omega(g);
            let ms = set.meas_omega_star(g);
            let l2_sum: f64 = set.atoms.iter().map(|a| a.l2_squared).sum();
            let four_j = 4f64.powi(set.j);
            let mut worst = vec![0.0f64; set.whitney.len()];
            let mut sup_max = 0.0f64;
            for a in &set.atoms {
                worst[a.whitney] = worst[a.whitney].max(a.sup);
                sup_max = sup_max.max(a.sup);
            }
            let sup_measure = LEMMA_EXPONENTS
                .iter()
                .map(|&p| {
                    let lhs: f64 = set
                        .whitney
                        .iter()
                        .zip(&worst)
                        .map(|(w, &m)| if m > 0.0 { w.measure(dg) * m.powf(p) } else { 0.0 })
                        .sum();
                    (p, lhs, lemma_ii_constant(dg, p) * 2f64.powf(p * set.j as f64) * mo)
                })
                .collect();
            let wsum: f64 = set.whitney.iter().map(|w| w.measure(dg)).sum();
            AtomLemmaReport {
                j: set.j,
                meas_omega: mo,
                meas_omega_star: ms,
                whitney_cubes: set.whitney.len(),
                atoms: set.atoms.len(),
                l2_sum,
                l2_ratio: if mo > 0.0 { l2_sum / (four_j * mo) } else { 0.0 },
                l2_constant: lemma_i_constant(dg),
                l2_chain_holds: l2_sum <= 8.0 * four_j * ms * (1.0 + 1e-12),
                sup_measure,
                sup_ratio: sup_max / 2f64.powi(set.j + 1),
                whitney_fill: if ms > 0.0 { wsum / ms } else { 0.0 },
                overlap_4x: overlap_multiplicity(g, &set.whitney, 4),
                uncovered: set.uncovered,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::{band_decompose_real, random_samples};

    #[test]
    fn small_field_has_no_atoms_above_its_peak() {
        let g = Grid::new(2, 32, 5).unwrap();
        let f = random_samples(&g, 4, 1);
        let field = band_decompose_real(&g, &f, 0).unwrap();
        let sf = peetre_S(&field);
        let j = auto_j_range(&sf).unwrap().1 + 1;
        let set = build_atom_set(&field, &sf, j).unwrap();
        assert!(set.omega.iter().all(|&b| !b));
        assert!(set.atoms.is_empty() && set.whitney.is_empty());
    }

    #[test]
    fn reconstruction_is_exact_and_lemma_holds() {
        for (dg, n, smax) in [(1usize, 128usize, 7), (2, 32, 5)] {
            let g = Grid::new(dg, n, smax).unwrap();
            for seed in 0..3 {
                let f = random_samples(&g, 6, seed);
                let field = band_decompose_real(&g, &f, smax - g.top_level() as i32).unwrap();
                let dec = build_atoms(&field, None).unwrap();
                let (rec, mult) = dec.reconstruct(&field);
                assert_eq!(mult, 1);
                for (r, b) in rec.iter().zip(&field.bands) {
                    for (x, y) in r.iter().zip(b) {
                        assert!(x == y || y.norm() == 0.0, "dg={dg} seed={seed}");
                    }
                }
                for rep in atom_lemma_reports(&dec) {
                    assert!(rep.holds(), "{rep:?}");
                }
            }
        }
    }
}
