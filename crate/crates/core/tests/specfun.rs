mod common;

use proptest::prelude::*;
use rml_core::specfun::exponents::{alpha, p_d, q_d};
use rml_core::specfun::{hankel_forward, hankel_inverse, linspace, lp_norm_radial, RadialProfile};
use num_rational::Rational64;
use std::f64::consts::PI;

fn gaussian(d: usize, a: f64) -> RadialProfile {
    RadialProfile::from_fn(d, linspace(0.0, 7.0 / a.sqrt(), 1401), |r| (-PI * a * r * r).exp()).unwrap()
}

fn bump4(r: f64) -> f64 {
    (1.0 - r * r).max(0.0).powi(4)
}

#[test]
fn exponent_anchors() {
    assert_eq!(p_d(4).unwrap(), Rational64::new(6, 5));
    assert_eq!(p_d(5).unwrap(), Rational64::new(4, 3));
    assert_eq!(q_d(4).unwrap(), Rational64::from_integer(6));
    assert_eq!(alpha(4, Rational64::from_integer(6)).unwrap(), Rational64::new(5, 6));
}

#[test]
fn round_trip_all_dimensions() {
    let f = |r: f64| (1.0 + 2.0 * r * r) * (-PI * r * r).exp();
    for d in 2..=6 {
        let prof = RadialProfile::from_fn(d, linspace(0.0, 7.0, 1401), f).unwrap();
        let fwd = hankel_forward(&prof, &linspace(0.0, 7.0, 1401)).unwrap();
        let out = linspace(0.0, 3.0, 31);
        let back = hankel_inverse(&fwd.profile, &out).unwrap();
        for (r, v) in out.iter().zip(back.profile.values()) {
            assert!((v.re - f(*r)).abs() <= 1e-6 && v.im.abs() <= 1e-6, "d={d} r={r}: {v}");
        }
    }
}

#[test]
fn compact_bump_matches_fft_oracle() {
    let prof_for = |d| RadialProfile::from_fn(d, linspace(0.0, 1.0, 2001), bump4).unwrap();
    for d in [2usize, 3] {
        let (n, l) = (256usize, 8.0);
        let oracle = common::fft_radial_transform(d, n, l, bump4);
        let freqs: Vec<f64> = (0..48).map(|k| k as f64 / l).collect();
        let t = hankel_forward(&prof_for(d), &freqs).unwrap();
        let peak = oracle[0].abs();
        for (k, v) in t.profile.values().iter().enumerate() {
            assert!((v.re - oracle[k]).abs() < 1e-3 * peak, "d={d} k={k}: {} vs {}", v.re, oracle[k]);
        }
    }
}

#[test]
fn plancherel() {
    let prof = RadialProfile::from_fn(4, linspace(0.0, 1.0, 2001), bump4).unwrap();
    let t = hankel_forward(&prof, &linspace(0.0, 40.0, 8001)).unwrap();
    let a = lp_norm_radial(&prof, 2.0).unwrap();
    let b = lp_norm_radial(&t.profile, 2.0).unwrap();
    assert!((a - b).abs() < 1e-3 * a, "{a} vs {b}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gaussian_dilation_law(d in 2usize..=6, a in 0.5f64..2.0, w in 0.0f64..2.0) {
        let t = hankel_forward(&gaussian(d, a), &[w]).unwrap();
        let exact = a.powf(-(d as f64) / 2.0) * (-PI * w * w / a).exp();
        prop_assert!((t.profile.values()[0].re - exact).abs() < 1e-8);
    }

    #[test]
    fn transform_is_linear(d in 2usize..=5, c in -3.0f64..3.0, a in 0.5f64..2.0) {
        let g1 = gaussian(d, 1.0);
        let g2 = RadialProfile::from_fn(d, g1.grid().to_vec(), |r| bump4(r) + c * (-PI * a * r * r).exp()).unwrap();
        let sum = RadialProfile::from_fn(d, g1.grid().to_vec(), |r| (-PI * r * r).exp() + bump4(r) + c * (-PI * a * r * r).exp()).unwrap();
        let out = [0.3, 1.1];
        let (x, y, z) = (hankel_forward(&g1, &out).unwrap(), hankel_forward(&g2, &out).unwrap(), hankel_forward(&sum, &out).unwrap());
        for i in 0..2 {
            prop_assert!((x.profile.values()[i] + y.profile.values()[i] - z.profile.values()[i]).norm() < 1e-9);
        }
    }
}
