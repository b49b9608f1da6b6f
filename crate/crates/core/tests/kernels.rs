use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rml_core::density::{Member, PointFamily};
use rml_core::ineq_lab::{gram_decay_report, Coefficients};
use rml_core::kernels::{field_l2, field_lp, gram_entry, Bump, BumpSpec, SynthField};

fn random_family(rng: &mut ChaCha8Rng, n: usize) -> PointFamily {
    let mut members: Vec<Member> = Vec::new();
    while members.len() < n {
        let m = Member::new((0..4).map(|_| rng.gen::<f64>() * 24.0).collect(), 1.0 + rng.gen::<f64>() * 31.0);
        if members.iter().all(|o| o.dist(&m) >= 1.0) {
            members.push(m);
        }
    }
    PointFamily::new(4, members).unwrap()
}

#[test]
fn gram_norm_agrees_with_monte_carlo() {
    let bump = Bump::shared(BumpSpec::new(4)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut within = 0;
    for t in 0..20u64 {
        let n = rng.gen_range(1..=20);
        let fam = random_family(&mut rng, n);
        let field = SynthField::new(fam, Coefficients::RandomPhase.draw(n, t), bump.clone()).unwrap();
        let exact = field_l2(&field).unwrap();
        let (mc, se) = field_lp(&field, 2.0, 20_000, t).unwrap();
        if (mc - exact).abs() <= 3.0 * se {
            within += 1;
        }
    }
    assert!(within >= 19, "{within}/20 within 3 sigma");
}

#[test]
fn gram_decay_and_disjoint_vanishing() {
    let bump = Bump::new(BumpSpec::new(4)).unwrap();
    let rep = gram_decay_report(&bump, 300, 11).unwrap();
    assert!(rep.flags.is_empty(), "{}", rep.to_text());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn gram_is_symmetric_and_translation_invariant(
        r1 in 1.0f64..20.0, r2 in 1.0f64..20.0, dy in 0.0f64..10.0, shift in -5.0f64..5.0,
    ) {
        let bump = Bump::new(BumpSpec::new(4)).unwrap();
        let a = Member::new(vec![0.0; 4], r1);
        let b = Member::new(vec![dy, 0.0, 0.0, 0.0], r2);
        let g = gram_entry(&a, &b, &bump).unwrap();
        // Tolerances relative to the Cauchy–Schwarz scale of the pair.
        let scale = (gram_entry(&a, &a, &bump).unwrap() * gram_entry(&b, &b, &bump).unwrap()).sqrt();
        prop_assert!((g - gram_entry(&b, &a, &bump).unwrap()).abs() <= 1e-9 * scale);
        let a2 = Member::new(vec![shift; 4], r1);
        let b2 = Member::new(vec![dy + shift, shift, shift, shift], r2);
        prop_assert!((g - gram_entry(&a2, &b2, &bump).unwrap()).abs() <= 1e-6 * scale);
    }
}
