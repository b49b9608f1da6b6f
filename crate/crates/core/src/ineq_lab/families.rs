//! Seeded stress families of (center, radius) pairs.

use crate::density::{Member, PointFamily};
use crate::{Result, RmlError, C64};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StressFamily {
    /// Uniform random points in a box of ℝ^{d+1} with volume 4^{d+1} per member.
    UniformRandom,
    /// Unit-lattice points of ℝ^{d+1} nearest to a fixed center.
    LatticeClustered,
    /// Spheres all passing through the origin: y = −r ω for spread directions ω.
    AnnulusConcentrated,
}

impl StressFamily {
    pub const ALL: [StressFamily; 3] = [Self::UniformRandom, Self::LatticeClustered, Self::AnnulusConcentrated];

    pub fn name(self) -> &'static str {
        match self {
            Self::UniformRandom => "uniform",
            Self::LatticeClustered => "clustered",
            Self::AnnulusConcentrated => "concentrated",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| RmlError::Usage(format!("unknown stress family {s:?}; expected uniform, clustered or concentrated")))
    }

    /// `n` members of shell k (radii in [2^k, 2^{k+1})) in dimension d.
    pub fn generate(self, d: usize, n: usize, k: u32, seed: u64) -> Result<PointFamily> {
        if d < 2 {
            return Err(RmlError::Usage(format!("stress families need d >= 2, got {d}")));
        }
        let r0 = 2f64.powi(k as i32);
        let members = match self {
            Self::UniformRandom => {
                // Box of volume 4^{d+1}·n in (y, r), with the r-extent capped by the shell.
                let vol = 4f64.powi(d as i32 + 1) * n as f64;
                let r_ext = vol.powf(1.0 / (d + 1) as f64).min(r0);
                let side = (vol / r_ext).powf(1.0 / d as f64);
                let mut rng = crate::rng::stream(seed, 0x51);
                rejection(n, |_| {
                    let y: Vec<f64> = (0..d).map(|_| rng.gen::<f64>() * side).collect();
                    Member::new(y, r0 + rng.gen::<f64>() * r_ext)
                })?
            }
            Self::LatticeClustered => lattice_ball(d, n, r0)?,
            Self::AnnulusConcentrated => {
                let mut rng = crate::rng::stream(seed, 0x52);
                rejection(n, |i| {
                    let r = r0 + (i as f64 * 0.618_033_988_75 * r0) % r0;
                    let mut w: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
                    let nrm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
                    // Directions confined to a cap so that the spheres overlap heavily near 0.
                    w[0] = w[0].abs() + 2.0 * nrm;
                    let nrm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
                    Member::new(w.iter().map(|v| -r * v / nrm).collect(), r)
                })?
            }
        };
        PointFamily::new(d, members)
    }
}

fn rejection(n: usize, mut draw: impl FnMut(usize) -> Member) -> Result<Vec<Member>> {
    let mut out: Vec<Member> = Vec::with_capacity(n);
    let mut tries = 0usize;
    while out.len() < n {
        tries += 1;
        if tries > 1000 * n + 1000 {
            return Err(RmlError::Construction(format!("could not place {n} separated members")));
        }
        let m = draw(out.len());
        if out.iter().all(|o| o.dist(&m) >= 1.0) {
            out.push(m);
        }
    }
    Ok(out)
}

fn lattice_ball(d: usize, n: usize, r0: f64) -> Result<Vec<Member>> {
    let side = ((n as f64).powf(1.0 / (d + 1) as f64).ceil() as i64 + 2).max(2);
    if side as f64 > r0 {
        return Err(RmlError::Usage(format!("{n} lattice members do not fit in one shell of radius {r0}")));
    }
    let c = (side - 1) as f64 / 2.0 + 0.1;
    let total = (side as usize).pow(d as u32 + 1);
    let mut pts: Vec<Vec<f64>> = (0..total)
        .map(|mut i| {
            (0..=d)
                .map(|_| {
                    let v = (i % side as usize) as f64;
                    i /= side as usize;
                    v
                })
                .collect()
        })
        .collect();
    let key = |p: &Vec<f64>| p.iter().map(|v| (v - c) * (v - c)).sum::<f64>();
    pts.sort_by(|a, b| key(a).total_cmp(&key(b)).then_with(|| a.partial_cmp(b).expect("finite")));
    pts.truncate(n);
    Ok(pts.into_iter().map(|p| Member::new(p[..d].to_vec(), r0 + p[d])).collect())
}

/// Coefficient choices for synthesized fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Coefficients {
    Ones,
    /// Uniform random phases e^{iθ}.
    RandomPhase,
    /// Random signs ±1.
    RandomSign,
}

impl Coefficients {
    pub fn draw(self, n: usize, seed: u64) -> Vec<C64> {
        let mut rng = crate::rng::stream(seed, 0x53);
        (0..n)
            .map(|_| match self {
                Self::Ones => C64::new(1.0, 0.0),
                Self::RandomPhase => C64::from_polar(1.0, rng.gen::<f64>() * std::f64::consts::TAU),
                Self::RandomSign => C64::new(if rng.gen::<bool>() { 1.0 } else { -1.0 }, 0.0),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn families_are_separated_and_in_shell() {
        for f in StressFamily::ALL {
            let fam = f.generate(4, 40, 3, 5).unwrap();
            assert_eq!(fam.len(), 40);
            assert_eq!(fam.shells().len(), 1, "{f:?}");
            assert!(fam.shell(3).len() == 40);
        }
        let a = StressFamily::UniformRandom.generate(4, 20, 3, 9).unwrap();
        let b = StressFamily::UniformRandom.generate(4, 20, 3, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn concentrated_spheres_meet_at_origin() {
        let fam = StressFamily::AnnulusConcentrated.generate(4, 16, 4, 1).unwrap();
        for m in fam.members() {
            let n = m.y.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((n - m.r).abs() < 1e-9);
        }
    }
}
