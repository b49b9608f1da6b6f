use proptest::prelude::*;
use rml_core::multiplier::*;
use rml_core::specfun::{linspace, RadialProfile};
use rml_core::C64;
use rustfft::FftPlanner;
use std::f64::consts::PI;

fn gaussian(d: usize, a: f64) -> RadialProfile {
    RadialProfile::from_fn(d, linspace(0.0, 6.0 / a.sqrt(), 601), |r| (-PI * a * r * r).exp()).unwrap()
}

/// Riemann sum of m(ξ) e^{−π|ξ|²} e^{2πi x·ξ} over the lattice ξ ∈ ℤ³/L, via a 3-D FFT.
fn fft_oracle_3d(m: impl Fn(f64) -> f64, n: usize, l: f64) -> Vec<f64> {
    let mut data = vec![C64::new(0.0, 0.0); n * n * n];
    let freq = |k: usize| if k < n / 2 { k as f64 / l } else { (k as f64 - n as f64) / l };
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let r = (freq(i).powi(2) + freq(j).powi(2) + freq(k).powi(2)).sqrt();
                data[(i * n + j) * n + k] = C64::new(m(r) * (-PI * r * r).exp() / l.powi(3), 0.0);
            }
        }
    }
    let fft = FftPlanner::<f64>::new().plan_fft_inverse(n);
    let mut line = vec![C64::new(0.0, 0.0); n];
    for axis in 0..3 {
        for a in 0..n {
            for b in 0..n {
                let idx = |c: usize| match axis {
                    0 => (c * n + a) * n + b,
                    1 => (a * n + c) * n + b,
                    _ => (a * n + b) * n + c,
                };
                for c in 0..n {
                    line[c] = data[idx(c)];
                }
                fft.process(&mut line);
                for c in 0..n {
                    data[idx(c)] = line[c];
                }
            }
        }
    }
    // Values along the first axis: x = (j L / n, 0, 0).
    (0..n / 2).map(|j| data[j * n * n].re).collect()
}

#[test]
fn bochner_riesz_matches_fft_oracle_d3() {
    let (n, l) = (128usize, 32.0);
    let m = MultiplierSpec::bochner_riesz(1.0, 3, 1.5).unwrap();
    let oracle = fft_oracle_3d(|r| (1.0 - r * r).max(0.0), n, l);
    let out = apply_radial(&m, &gaussian(3, 1.0), ApplyOptions { r_max: 16.0, zeta_cap: 8.0 }).unwrap();
    let peak = oracle.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    for (j, o) in oracle.iter().enumerate().take(40) {
        let x = j as f64 * l / n as f64;
        let v = out.eval(x).re;
        assert!((v - o).abs() < 1e-3 * peak, "x={x}: {v} vs {o}");
    }
}

#[test]
fn unit_multiplier_round_trip() {
    // Samples of m ≡ 1 on [0, 4]: the Gaussian's spectrum beyond 4 is below e^{-16π}.
    let one = RadialProfile::from_fn(4, linspace(0.0, 4.0, 81), |_| 1.0).unwrap();
    let m = MultiplierSpec::new(MultiplierKind::UserSamples { profile: one }, 4, 1.1).unwrap();
    let f = gaussian(4, 1.0);
    let g = apply_radial(&m, &f, ApplyOptions { r_max: 6.0, zeta_cap: 8.0 }).unwrap();
    for r in linspace(0.0, 3.0, 31) {
        assert!((g.eval(r) - f.eval(r)).norm() < 1e-6, "r={r}");
    }
}

#[test]
fn bochner_riesz_classification_and_exponents() {
    // Critical index for d=4, p=1.1: 4(1/1.1 − 1/2) − 1/2 ≈ 1.136.
    let eta = TestFunction::new(4, EtaChoice::Quotient).unwrap();
    let opts = KernelOptions { r_max: 48.0 };
    let below = criterion_norm(&MultiplierSpec::bochner_riesz(0.8, 4, 1.1).unwrap(), &eta, TGrid::default(), opts).unwrap();
    let above = criterion_norm(&MultiplierSpec::bochner_riesz(1.6, 4, 1.1).unwrap(), &eta, TGrid::default(), opts).unwrap();
    assert!(below.sup.is_infinite());
    assert!(above.sup.is_finite());
    assert!(below.flags.iter().any(|f| f == "grid-truncated"));
    // Envelope |x|^{−(d+1)/2−δ} once the singular sphere sits well inside supp η̂.
    let row = below.table.iter().find(|r| (r.t - 2f64.sqrt()).abs() < 1e-9).unwrap();
    assert!((row.tail_exponent.unwrap() + 3.3).abs() < 0.08, "{row:?}");
}

#[test]
fn kernel_criterion_and_split() {
    let m = MultiplierSpec::annulus(0.5, 2.0, 0.45, 4, 1.1).unwrap();
    let k = kernel_lp_criterion(&m, KernelOptions { r_max: 32.0 }).unwrap();
    assert_eq!(k.finite, Some(true));
    // ‖K χ_{|x|≤1}‖_1 ≤ C ‖K‖_p with C = 1 frozen for the normalized annulus.
    assert!(k.k0_l1 <= k.norm, "{} vs {}", k.k0_l1, k.norm);
    let ind = MultiplierSpec::annulus(0.5, 2.0, 0.0, 4, 1.1).unwrap();
    let ki = kernel_lp_criterion(&ind, KernelOptions { r_max: 32.0 }).unwrap();
    assert_eq!(ki.finite, Some(false));
    let lz = lorentz_criteria(&m, 1.1, KernelOptions { r_max: 32.0 }).unwrap();
    assert!((lz.lp - lz.lpnu).abs() < 1e-12 * lz.lp);
}

#[test]
fn sandwich_and_eta_independence() {
    let q = TestFunction::new(4, EtaChoice::Quotient).unwrap();
    let a = TestFunction::new(4, EtaChoice::Annulus).unwrap();
    let opts = KernelOptions { r_max: 32.0 };
    let suite = SuiteSpec { superpositions: 2, samples: 5000, ..SuiteSpec::default() };
    for h in [0.45, 0.2] {
        let m = MultiplierSpec::annulus(0.5, 2.0, h, 4, 1.1).unwrap();
        let cq = criterion_norm(&m, &q, TGrid::default(), opts).unwrap();
        let ca = criterion_norm(&m, &a, TGrid::default(), opts).unwrap();
        let ratio = cq.sup / ca.sup;
        assert!((0.25..=4.0).contains(&ratio), "h={h}: eta ratio {ratio}");
        let e = empirical_opnorm_lower(&m, &q, &suite, 11).unwrap();
        assert!(e.max_ratio <= 1.0 * cq.sup, "h={h}: {} vs {}", e.max_ratio, cq.sup);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn apply_radial_is_linear(alpha in -3.0f64..3.0, w1 in 0.5f64..2.0, w2 in 0.5f64..2.0) {
        let m = MultiplierSpec::annulus(0.6, 1.8, 0.2, 3, 1.5).unwrap();
        let grid = linspace(0.0, 8.0, 401);
        let f = RadialProfile::from_fn(3, grid.clone(), |r| (-PI * w1 * r * r).exp()).unwrap();
        let g = RadialProfile::from_fn(3, grid.clone(), |r| (-PI * w2 * r * r).exp()).unwrap();
        let h = RadialProfile::from_fn(3, grid, |r| alpha * (-PI * w1 * r * r).exp() + (-PI * w2 * r * r).exp()).unwrap();
        let o = ApplyOptions { r_max: 8.0, zeta_cap: 8.0 };
        let (tf, tg, th) = (apply_radial(&m, &f, o).unwrap(), apply_radial(&m, &g, o).unwrap(), apply_radial(&m, &h, o).unwrap());
        let scale = th.max_abs().max(1.0);
        for (i, v) in th.values().iter().enumerate() {
            let lin = tf.values()[i] * alpha + tg.values()[i];
            prop_assert!((v - lin).norm() < 1e-12 * scale);
        }
    }
}
