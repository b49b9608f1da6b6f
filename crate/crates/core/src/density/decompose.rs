//! Density decomposition of the dyadic shells ℰ_k into strata ℰ_k(u), u = 2^ν.
//!
//! Candidate balls are centered at family points with radii drawn from {1} ∪ {pairwise
//! distances} (capped at 2^k, inflated by [`EPS`] when counting). Radii below 1 are excluded:
//! a 1-separated set puts one point in arbitrarily small balls, which would make every point
//! dense at every level.

use super::family::PointFamily;
use serde::Serialize;

/// Inflation of ball radii when counting points on the boundary.
pub const EPS: f64 = 1e-9;
/// Slack constant of the implementation: strata are of density type (KAPPA·u, 2^k).
pub const KAPPA: f64 = 2.0;

/// A closed ball in ℝ^{d+1}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ball {
    pub center: Vec<f64>,
    pub radius: f64,
}

impl Ball {
    pub fn contains(&self, x: &[f64]) -> bool {
        dist(&self.center, x) <= self.radius + EPS
    }
}

/// One stratum ℰ_k(u) with its Vitali balls.
#[derive(Debug, Clone, Serialize)]
pub struct Stratum {
    pub k: i32,
    pub nu: u32,
    pub u: f64,
    /// Member indices (into the source family) of ℰ_k(u).
    pub members: Vec<usize>,
    /// Disjoint balls whose 5-fold dilates cover ℰ̂_k(u) = ∪_{u′ ≥ u} ℰ_k(u′).
    pub balls: Vec<Ball>,
}

/// The partition of every shell plus per-member levels.
#[derive(Debug, Clone, Serialize)]
pub struct DensityStratification {
    pub dim: usize,
    pub kappa: f64,
    /// Level ν of each member: it lies in ℰ_k(2^ν).
    pub levels: Vec<u32>,
    pub strata: Vec<Stratum>,
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Point (y, r) ∈ ℝ^{d+1}.
pub(crate) fn lift(f: &PointFamily, i: usize) -> Vec<f64> {
    let m = f.member(i);
    let mut v = m.y.clone();
    v.push(m.r);
    v
}

/// Per-center detection data: the largest firing radius ρ*(ν) for ν = 0..len.
#[derive(Debug, Clone)]
struct CenterFiring {
    rho_star: Vec<f64>,
}

/// (radius, count) candidates for one center, ascending and deduplicated.
fn candidates(sorted: &[f64], rmax: f64) -> Vec<(f64, usize)> {
    let count_at = |rho: f64| sorted.partition_point(|&d| d <= rho + EPS);
    let mut out = vec![(1.0, count_at(1.0))];
    for &d in sorted {
        if d > 1.0 && d <= rmax + EPS {
            let rho = d.min(rmax);
            if out.last().map_or(true, |l| rho > l.0) {
                out.push((rho, count_at(rho)));
            }
        }
    }
    out
}

fn firing(cands: &[(f64, usize)]) -> CenterFiring {
    let mut rho_star = Vec::new();
    let mut nu = 0u32;
    loop {
        let u = 2f64.powi(nu as i32);
        let best = cands.iter().filter(|(rho, c)| *c as f64 >= u * rho).map(|(rho, _)| *rho).fold(None, |m: Option<f64>, r| {
            Some(m.map_or(r, |m| m.max(r)))
        });
        match best {
            Some(r) => rho_star.push(r),
            None => break,
        }
        nu += 1;
    }
    CenterFiring { rho_star }
}

/// Levels ν(q) = max{ν : q lies in a firing candidate ball at u = 2^ν} for a point set whose
/// candidate radii are capped at `rmax`, plus the firing data per center.
fn detect(points: &[Vec<f64>], rmax: f64) -> (Vec<u32>, Vec<CenterFiring>) {
    let n = points.len();
    let mut level = vec![0u32; n];
    let mut fire = Vec::with_capacity(n);
    let mut order: Vec<(f64, usize)> = Vec::with_capacity(n);
    for p in 0..n {
        order.clear();
        order.extend((0..n).map(|q| (dist(&points[p], &points[q]), q)));
        order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let sorted: Vec<f64> = order.iter().map(|o| o.0).collect();
        let f = firing(&candidates(&sorted, rmax));
        // ρ*(ν) decreases in ν; walk points outward and lower ν as the distance grows.
        let mut nu = f.rho_star.len();
        for &(d, q) in &order {
            while nu > 0 && d > f.rho_star[nu - 1] + EPS {
                nu -= 1;
            }
            if nu == 0 {
                break;
            }
            level[q] = level[q].max(nu as u32 - 1);
        }
        fire.push(f);
    }
    (level, fire)
}

/// Exhaustive oracle: every (center, candidate radius) ball is counted directly.
pub fn exhaustive_levels(points: &[Vec<f64>], rmax: f64) -> Vec<u32> {
    let n = points.len();
    let mut level = vec![0u32; n];
    for p in 0..n {
        let mut radii = vec![1.0];
        for q in 0..n {
            let d = dist(&points[p], &points[q]);
            if d > 1.0 && d <= rmax + EPS {
                radii.push(d.min(rmax));
            }
        }
        for rho in radii {
            let inside: Vec<usize> = (0..n).filter(|&q| dist(&points[p], &points[q]) <= rho + EPS).collect();
            let ratio = inside.len() as f64 / rho;
            if ratio < 1.0 {
                continue;
            }
            let mut nu = 0u32;
            while inside.len() as f64 >= 2f64.powi(nu as i32 + 1) * rho {
                nu += 1;
            }
            for q in inside {
                level[q] = level[q].max(nu);
            }
        }
    }
    level
}

/// Greedy Vitali selection: radius descending, then lexicographic center; a ball is kept when
/// it is disjoint (with a 2·EPS margin) from all kept balls.
pub fn vitali_select(mut balls: Vec<Ball>) -> Vec<Ball> {
    balls.sort_by(|a, b| {
        b.radius.total_cmp(&a.radius).then_with(|| {
            a.center
                .iter()
                .zip(&b.center)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    let mut kept: Vec<Ball> = Vec::new();
    for b in balls {
        if kept.iter().all(|k| dist(&k.center, &b.center) > k.radius + b.radius + 2.0 * EPS) {
            kept.push(b);
        }
    }
    kept
}

/// Decompose every shell of the family.
pub fn density_decompose(family: &PointFamily) -> DensityStratification {
    let mut levels = vec![0u32; family.len()];
    let mut strata = Vec::new();
    for (&k, idx) in family.shells() {
        let rmax = 2f64.powi(k);
        let points: Vec<Vec<f64>> = idx.iter().map(|&i| lift(family, i)).collect();
        let (lv, fire) = detect(&points, rmax);
        for (j, &i) in idx.iter().enumerate() {
            levels[i] = lv[j];
        }
        let top = lv.iter().copied().max().unwrap_or(0);
        for nu in 0..=top {
            let members: Vec<usize> = idx.iter().zip(&lv).filter(|(_, &l)| l == nu).map(|(&i, _)| i).collect();
            let detected: Vec<Ball> = fire
                .iter()
                .zip(&points)
                .filter(|(f, _)| f.rho_star.len() > nu as usize)
                .map(|(f, p)| Ball { center: p.clone(), radius: f.rho_star[nu as usize] })
                .collect();
            strata.push(Stratum { k, nu, u: 2f64.powi(nu as i32), members, balls: vitali_select(detected) });
        }
    }
    DensityStratification { dim: family.dim(), kappa: KAPPA, levels, strata }
}

/// Outcome of a density-type test.
#[derive(Debug, Clone, Serialize)]
pub struct DensityCheck {
    pub holds: bool,
    /// max #(B ∩ S)/diam(B) over the candidate balls.
    pub max_ratio: f64,
    pub witness: Option<Ball>,
    pub witness_count: usize,
}

/// Above this size the pair-midpoint candidates are skipped (cubic cost).
const MIDPOINT_LIMIT: usize = 600;

/// Test #(B ∩ S) ≤ u·diam(B) over candidate balls of diameter in [1, R]: balls centered at
/// points of S with radius 1/2 or a pairwise distance, and (for |S| ≤ 600) the balls having
/// a pair of points as diameter.
pub fn density_type_check(points: &[Vec<f64>], u: f64, r_max: f64) -> DensityCheck {
    let n = points.len();
    let mut best = DensityCheck { holds: true, max_ratio: 0.0, witness: None, witness_count: 0 };
    let mut consider = |center: &[f64], radius: f64, count: usize| {
        let ratio = count as f64 / (2.0 * radius);
        if ratio > best.max_ratio {
            best.max_ratio = ratio;
            best.witness = Some(Ball { center: center.to_vec(), radius });
            best.witness_count = count;
        }
    };
    for p in 0..n {
        let mut d: Vec<f64> = (0..n).map(|q| dist(&points[p], &points[q])).collect();
        d.sort_by(|a, b| a.total_cmp(b));
        let count_at = |rho: f64| d.partition_point(|&x| x <= rho + EPS);
        if r_max >= 1.0 {
            consider(&points[p], 0.5, count_at(0.5));
        }
        for &rho in d.iter().filter(|&&x| x >= 0.5 && 2.0 * x <= r_max) {
            consider(&points[p], rho, count_at(rho));
        }
    }
    if n <= MIDPOINT_LIMIT {
        for p in 0..n {
            for q in p + 1..n {
                let diam = dist(&points[p], &points[q]);
                if diam < 1.0 || diam > r_max {
                    continue;
                }
                let mid: Vec<f64> = points[p].iter().zip(&points[q]).map(|(a, b)| 0.5 * (a + b)).collect();
                let count = points.iter().filter(|x| dist(&mid, x) <= 0.5 * diam + EPS).count();
                consider(&mid, 0.5 * diam, count);
            }
        }
    }
    best.holds = best.max_ratio <= u * (1.0 + 1e-12);
    best
}

/// Exact checks of the decomposition's structural properties.
#[derive(Debug, Clone, Serialize)]
pub struct InvariantWitness {
    pub k: i32,
    pub nu: u32,
    pub partition_ok: bool,
    pub balls_disjoint: bool,
    pub covering_ok: bool,
    /// Σ rad(B_i) and the bound (κ/u)·#ℰ_k.
    pub radius_sum: f64,
    pub radius_bound: f64,
    /// u·Σ rad(B_i)/#ℰ_k; at most 1 by construction.
    pub radius_factor: f64,
    pub density: DensityCheck,
}

impl InvariantWitness {
    pub fn all_hold(&self) -> bool {
        self.partition_ok
            && self.balls_disjoint
            && self.covering_ok
            && self.radius_sum <= self.radius_bound * (1.0 + 1e-12)
            && self.density.holds
    }
}

/// Verify the invariants of every stratum.
pub fn verify_stratification(family: &PointFamily, st: &DensityStratification) -> Vec<InvariantWitness> {
    let mut out = Vec::new();
    for (&k, idx) in family.shells() {
        // Partition: every member of ℰ_k in exactly one stratum of shell k.
        let mut seen = vec![0usize; family.len()];
        for s in st.strata.iter().filter(|s| s.k == k) {
            for &i in &s.members {
                seen[i] += 1;
            }
        }
        let partition_ok = idx.iter().all(|&i| seen[i] == 1)
            && seen.iter().enumerate().all(|(i, &c)| c == 0 || idx.contains(&i));
        let n_k = idx.len() as f64;
        for s in st.strata.iter().filter(|s| s.k == k) {
            let balls_disjoint = s.balls.iter().enumerate().all(|(a, ba)| {
                s.balls[a + 1..].iter().all(|bb| dist(&ba.center, &bb.center) > ba.radius + bb.radius)
            });
            let covering_ok = idx.iter().filter(|&&i| st.levels[i] >= s.nu).all(|&i| {
                let x = lift(family, i);
                s.balls.iter().any(|b| dist(&b.center, &x) <= 5.0 * b.radius + EPS)
            });
            let radius_sum: f64 = s.balls.iter().map(|b| b.radius).sum();
            let points: Vec<Vec<f64>> = s.members.iter().map(|&i| lift(family, i)).collect();
            let density = density_type_check(&points, KAPPA * s.u, 2f64.powi(k));
            out.push(InvariantWitness {
                k,
                nu: s.nu,
                partition_ok,
                balls_disjoint,
                covering_ok,
                radius_sum,
                radius_bound: KAPPA / s.u * n_k,
                radius_factor: s.u * radius_sum / n_k,
                density,
            });
        }
    }
    out
}
