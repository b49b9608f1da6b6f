#![allow(dead_code)]

use rml_core::C64;
use rustfft::FftPlanner;

/// Riemann-sum Fourier transform of a radial function f(|x|) sampled on the grid
/// x ∈ (−L/2 + hℤ)^d ∩ [−L/2, L/2)^d, h = L/n, via a d-dimensional FFT (d = 2 or 3).
/// Returns f̂(k/L, 0, …) for k = 0..n/2.
pub fn fft_radial_transform(d: usize, n: usize, l: f64, f: impl Fn(f64) -> f64) -> Vec<f64> {
    assert!(d == 2 || d == 3);
    let h = l / n as f64;
    let total = n.pow(d as u32);
    let coord = |i: usize| -l / 2.0 + i as f64 * h;
    let mut data: Vec<C64> = (0..total)
        .map(|mut idx| {
            let mut r2 = 0.0;
            for _ in 0..d {
                r2 += coord(idx % n).powi(2);
                idx /= n;
            }
            C64::new(f(r2.sqrt()), 0.0)
        })
        .collect();
    let fft = FftPlanner::<f64>::new().plan_fft_forward(n);
    let mut line = vec![C64::new(0.0, 0.0); n];
    for axis in 0..d {
        let stride = n.pow(axis as u32);
        for base in 0..total {
            if (base / stride) % n != 0 {
                continue;
            }
            for c in 0..n {
                line[c] = data[base + c * stride];
            }
            fft.process(&mut line);
            for c in 0..n {
                data[base + c * stride] = line[c];
            }
        }
    }
    // e^{−2πi(−L/2)k/L} = (−1)^k along the sampled axis.
    (0..=n / 2).map(|k| data[k].re * h.powi(d as i32) * if k % 2 == 0 { 1.0 } else { -1.0 }).collect()
}
