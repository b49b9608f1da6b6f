//! Gauss–Legendre rules and composite panel quadrature.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Mutex, OnceLock};

/// Nodes and weights of the n-point Gauss–Legendre rule on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    static CACHE: OnceLock<Mutex<HashMap<usize, (Vec<f64>, Vec<f64>)>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().expect("quadrature cache").get(&n) {
        return hit.clone();
    }
    let rule = compute_gl(n);
    cache.lock().expect("quadrature cache").insert(n, rule.clone());
    rule
}

fn compute_gl(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..(n + 1) / 2 {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else { p1 };
            let pnm1 = p0;
            dp = n as f64 * (z * pn - pnm1) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// A flattened quadrature rule: ∫ f ≈ Σ w_i f(x_i).
#[derive(Debug, Clone, Default)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Append an `order`-point Gauss–Legendre panel on [a, b].
    pub fn push_panel(&mut self, a: f64, b: f64, order: usize) {
        if !(b > a) {
            return;
        }
        let (x, w) = gauss_legendre(order);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (xi, wi) in x.iter().zip(&w) {
            self.nodes.push(mid + half * xi);
            self.weights.push(half * wi);
        }
    }

    /// Composite rule over consecutive breakpoints, each interval split into equal panels of
    /// length at most `max_len`.
    pub fn composite(breaks: &[f64], max_len: f64, order: usize) -> Rule {
        let mut rule = Rule::default();
        for win in breaks.windows(2) {
            let (a, b) = (win[0], win[1]);
            if !(b > a) {
                continue;
            }
            let pieces = ((b - a) / max_len).ceil().max(1.0) as usize;
            let h = (b - a) / pieces as f64;
            for i in 0..pieces {
                rule.push_panel(a + i as f64 * h, a + (i + 1) as f64 * h, order);
            }
        }
        rule
    }

    /// Panels on [a, b] geometrically graded toward `b` (ratio 1/2, `levels` refinements),
    /// suited to algebraic endpoint singularities at b.
    pub fn graded_toward_right(a: f64, b: f64, levels: usize, max_len: f64, order: usize) -> Rule {
        let mut breaks = vec![a];
        let mut cut = b - 0.5 * (b - a);
        let mut right = Vec::new();
        for _ in 0..levels {
            right.push(cut);
            cut = b - 0.5 * (b - cut);
        }
        breaks.extend(right.iter().copied());
        breaks.push(b);
        let mut rule = Rule::default();
        for win in breaks.windows(2) {
            let (lo, hi) = (win[0], win[1]);
            let pieces = ((hi - lo) / max_len).ceil().max(1.0) as usize;
            let h = (hi - lo) / pieces as f64;
            for i in 0..pieces {
                rule.push_panel(lo + i as f64 * h, lo + (i + 1) as f64 * h, order);
            }
        }
        rule
    }

    pub fn extend(&mut self, other: Rule) {
        self.nodes.extend(other.nodes);
        self.weights.extend(other.weights);
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(x, w)| w * f(*x)).sum()
    }
}
