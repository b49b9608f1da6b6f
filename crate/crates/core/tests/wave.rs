use rml_core::specfun::{linspace, lp_norm_radial, RadialProfile};
use rml_core::wave::*;

#[test]
fn averaging_weights_bounded_in_l1() {
    for k in 2..=12 {
        let l1 = WaveBandKernel::new(k, 4, Window::default()).unwrap().w_l1();
        assert!(l1 > 0.0 && l1 <= W_L1_BOUND, "k={k}: {l1}");
    }
}

#[test]
fn error_term_decays_for_large_k() {
    // The 1/4 step ratio is met from k = 6 on; earlier steps are dominated by the window's
    // low-frequency leakage.
    let e: Vec<f64> = (6..=10)
        .map(|k| {
            let kk = WaveBandKernel::new(k, 4, Window::default()).unwrap();
            kk.e_l1(kk.e_radius())
        })
        .collect();
    for w in e.windows(2) {
        assert!(w[1] <= 0.25 * w[0], "{e:?}");
    }
}

#[test]
fn kernel_reconstruction() {
    for k in [3u32, 5] {
        let kk = WaveBandKernel::new(k, 4, Window::default()).unwrap();
        let err = kk.reconstruction_error(4.0).unwrap();
        assert!(err <= 1e-3, "k={k}: {err}");
    }
}

#[test]
fn halfwave_preserves_l2() {
    for d in [2usize, 4, 5] {
        let f = RadialProfile::from_fn(d, linspace(0.0, 8.0, 401), |r| (-r * r / 0.72).exp()).unwrap();
        let n0 = lp_norm_radial(&f, 2.0).unwrap();
        for t in [0.5, 1.7] {
            let n = lp_norm_radial(&halfwave(&f, t).unwrap(), 2.0).unwrap();
            assert!((n - n0).abs() <= 1e-6 * n0, "d={d} t={t}: {n} vs {n0}");
        }
    }
}

#[test]
fn local_smoothing_sweeps_do_not_grow() {
    for (d, q) in [(4usize, 8.0), (5, 5.0)] {
        let f = single_band(d, 2).unwrap();
        let rep = local_smoothing_sweep(&f, q, &default_times(9), &[1.0, 2.0, 4.0, 8.0]).unwrap();
        assert!(rep.slope.unwrap() <= 0.05, "d={d} q={q}: {}", rep.to_text());
    }
}
