use proptest::prelude::*;
use rml_core::dyadic::*;

fn field_for(seed: u64) -> (Grid, GridField) {
    let g = Grid::new(2, 128, 7).unwrap();
    let f = random_samples(&g, 8, seed);
    let field = band_decompose_real(&g, &f, 7 - g.top_level() as i32).unwrap();
    (g, field)
}

#[test]
fn atoms_on_128_grids() {
    for seed in 0..6u64 {
        let (g, field) = field_for(seed);
        let dec = build_atoms(&field, None).unwrap();
        let (rec, mult) = dec.reconstruct(&field);
        assert_eq!(mult, 1);
        for (r, b) in rec.iter().zip(&field.bands) {
            assert_eq!(r, b, "seed={seed}");
        }
        for set in &dec.sets {
            assert_eq!(whitney(&g, &set.omega_star).cubes, whitney_brute(&g, &set.omega_star), "seed={seed} j={}", set.j);
        }
        for rep in atom_lemma_reports(&dec) {
            assert!(rep.holds(), "{rep:?}");
            assert!(rep.sup_ratio <= 1.0);
        }
    }
}

#[test]
fn peetre_fast_matches_brute() {
    let g = Grid::new(2, 32, 5).unwrap();
    let f = random_samples(&g, 5, 4);
    let field = band_decompose_real(&g, &f, 0).unwrap();
    let (a, b) = (peetre_S(&field), peetre_S_brute(&field));
    for (x, y) in a.iter().zip(&b) {
        assert!((x - y).abs() <= 1e-12 * y.abs().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn band_sum_reproduces_samples(seed in 0u64..10_000, bumps in 1usize..6) {
        let g = Grid::new(2, 32, 5).unwrap();
        let f = random_samples(&g, bumps, seed);
        let field = band_decompose_real(&g, &f, 0).unwrap();
        let s = field.sum();
        let top = f.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        for (x, y) in s.iter().zip(&f) {
            prop_assert!((x.re - y).abs() <= 1e-10 * top.max(1.0) && x.im.abs() <= 1e-10 * top.max(1.0));
        }
    }

    #[test]
    fn hl_maximal_fast_matches_brute(seed in 0u64..10_000) {
        let g = Grid::new(2, 32, 5).unwrap();
        let v: Vec<f64> = random_samples(&g, 3, seed).iter().map(|x| x.abs()).collect();
        let (a, b) = (hl_maximal(&g, &v), hl_maximal_brute(&g, &v));
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() <= 1e-10 * y.abs().max(1.0));
        }
    }
}
