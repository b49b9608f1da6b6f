//! Dyadic machinery on periodic grids of dimension 1 or 2: Littlewood–Paley bands, the
//! Hardy–Littlewood and Peetre maximal functions, Whitney cubes and atoms.
//!
//! Every operator treats the grid as a torus, so masks touching the boundary wrap around.

pub mod atoms;
pub mod bands;
pub mod grid;
pub mod io;
pub mod maximal;
pub mod whitney;

pub use atoms::{
    atom_lemma_reports, auto_j_range, build_atom_set, build_atoms, lemma_i_constant, lemma_ii_constant,
    omega_star_threshold, Atom, AtomDecomposition, AtomLemmaReport, AtomSet, LEMMA_EXPONENTS,
};
pub use bands::{band_decompose, band_decompose_real, band_multiplier, cutoff, GridField};
pub use grid::{fft, grid_lp, BoxSums, Grid};
pub use maximal::{ball_sup, hl_maximal, hl_maximal_brute, peetre_S, peetre_S_brute, peetre_radius_cells};
pub use whitney::{overlap_multiplicity, owner_map, whitney, whitney_brute, DyadicCube, Whitney};

use rand::Rng;

/// Real test signal: a sum of `bumps` Gaussians with random centers, widths between one cell
/// and a quarter of the torus, and signed amplitudes, wrapped periodically.
pub fn random_samples(grid: &Grid, bumps: usize, seed: u64) -> Vec<f64> {
    let mut rng = crate::rng::stream(seed, 0xD1AD);
    let n = grid.n as f64;
    let mut out = vec![0.0; grid.len()];
    for _ in 0..bumps {
        let c = [rng.gen::<f64>() * n, rng.gen::<f64>() * n];
        let w = (n / 4.0).powf(rng.gen::<f64>());
        let amp = (rng.gen::<f64>() - 0.5) * 4.0;
        for (i, o) in out.iter_mut().enumerate() {
            let (x, y) = grid.coords(i);
            let wrap = |d: f64| {
                let d = d.rem_euclid(n);
                d.min(n - d)
            };
            let dx = wrap(x as f64 - c[0]);
            let dy = if grid.dg == 2 { wrap(y as f64 - c[1]) } else { 0.0 };
            *o += amp * (-(dx * dx + dy * dy) / (2.0 * w * w)).exp();
        }
    }
    out
}
