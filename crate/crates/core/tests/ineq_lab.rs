use proptest::prelude::*;
use rml_core::ineq_lab::frozen::{LP_BOUND, MAIN};
use rml_core::ineq_lab::*;
use rml_core::kernels::{Bump, BumpSpec, SynthField};
use rml_core::{RmlError, C64};

fn quick() -> ShellSweep {
    ShellSweep { doublings: 3, samples: 8000, replicates: 2, ..ShellSweep::default() }
}

#[test]
fn main_inequality_within_frozen_constant() {
    let bump = Bump::shared(BumpSpec::new(4)).unwrap();
    for kind in StressFamily::ALL {
        let rep = apply_frozen(main_sweep(kind, 1.1, &quick(), &bump).unwrap(), &bump, 1.1, MAIN).unwrap();
        assert!(rep.flags.is_empty(), "{}", rep.to_text());
    }
}

#[test]
fn lp_bound_within_frozen_constant() {
    let bump = Bump::shared(BumpSpec::new(4)).unwrap();
    let rep = apply_frozen(lp_bound_sweep(StressFamily::AnnulusConcentrated, 1.1, &quick(), &bump).unwrap(), &bump, 1.1, LP_BOUND).unwrap();
    assert!(rep.flags.is_empty(), "{}", rep.to_text());
}

#[test]
fn main_inequality_flags_and_rejects() {
    let bump = Bump::shared(BumpSpec::new(4)).unwrap();
    let fam = StressFamily::UniformRandom.generate(4, 6, 3, 1).unwrap();
    let field = SynthField::new(fam.clone(), Coefficients::Ones.draw(6, 0), bump.clone()).unwrap();
    assert!(!check_main_inequality(&field, 1.3, 2000, 1).unwrap().flags.is_empty());
    let big = SynthField::new(fam, vec![C64::new(2.0, 0.0); 6], bump).unwrap();
    assert!(matches!(check_main_inequality(&big, 1.1, 2000, 1), Err(RmlError::Usage(_))));
}

#[test]
fn model_lemma_two_dimensional_no_growth() {
    let rep = model_sweep(2, 1.0, 1.2, 16, 4, 2, 5).unwrap();
    assert!(rep.slope.unwrap() <= 0.05, "{}", rep.to_text());
}

#[test]
fn large_radii_gain() {
    let bump = Bump::new(BumpSpec::new(4)).unwrap();
    let eps = default_epsilon(4, 1.1);
    let rep = large_radii_sweep(&bump, 1.1, &[1, 2, 3, 4], eps).unwrap();
    assert!(rep.meta["rate"].as_f64().unwrap() <= -eps, "{}", rep.to_text());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn interpolation_within_proof_constant(
        vals in proptest::collection::vec(proptest::collection::vec(0.0f64..4.0, 32), 1..6),
        p in 1.1f64..1.9,
        support in proptest::bool::ANY,
    ) {
        let levels: Vec<(i32, Vec<C64>)> = vals
            .iter()
            .enumerate()
            .map(|(j, v)| (j as i32, v.iter().map(|x| C64::new(*x, 0.0)).collect()))
            .collect();
        let f = LevelFunctions { cell: 1.0 / 32.0, levels };
        let p0 = if support { 0.0 } else { 1.0 };
        let s: Vec<f64> = vals.iter().map(|v| if support { v.iter().filter(|x| **x != 0.0).count() as f64 / 32.0 } else { 1.0 }).collect();
        let rep = check_dyadic_interpolation(&f, &s, p0, 2.0, p).unwrap();
        prop_assert!(rep.flags.is_empty(), "{}", rep.to_text());
    }
}
