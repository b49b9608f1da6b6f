//! 1-separated families of (center, radius) pairs.

use crate::{Result, RmlError};
use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

/// Slack allowed in the separation test for coordinates produced by arithmetic.
const SEP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct Member {
    pub y: Vec<f64>,
    pub r: f64,
}

impl Member {
    pub fn new(y: Vec<f64>, r: f64) -> Self {
        Self { y, r }
    }

    /// Distance in ℝ^{d+1} between (y, r) pairs.
    pub fn dist(&self, other: &Member) -> f64 {
        let s: f64 = self.y.iter().zip(&other.y).map(|(a, b)| (a - b) * (a - b)).sum();
        (s + (self.r - other.r) * (self.r - other.r)).sqrt()
    }

    /// Distance between the centers in ℝ^d.
    pub fn center_dist(&self, other: &Member) -> f64 {
        self.y.iter().zip(&other.y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
    }
}

/// Dyadic shell index k with r ∈ [2^k, 2^{k+1}).
pub fn shell_index(r: f64) -> i32 {
    let k = r.log2().floor() as i32;
    // Guard against log2 rounding at exact powers of two.
    if 2f64.powi(k + 1) <= r {
        k + 1
    } else if 2f64.powi(k) > r {
        k - 1
    } else {
        k
    }
}

/// A finite 1-separated subset of ℝ^d × [1, ∞).
#[derive(Debug, Clone, PartialEq)]
pub struct PointFamily {
    dim: usize,
    members: Vec<Member>,
    shells: BTreeMap<i32, Vec<usize>>,
}

impl PointFamily {
    pub fn new(dim: usize, members: Vec<Member>) -> Result<Self> {
        if dim < 1 {
            return Err(RmlError::Domain("point family needs dim >= 1".into()));
        }
        for (i, m) in members.iter().enumerate() {
            if m.y.len() != dim {
                return Err(RmlError::Domain(format!(
                    "member {i} has {} coordinates, expected {dim}",
                    m.y.len()
                )));
            }
            if !(m.r >= 1.0 && m.r.is_finite()) || m.y.iter().any(|c| !c.is_finite()) {
                return Err(RmlError::Domain(format!("member {i} must have finite y and r >= 1, got r = {}", m.r)));
            }
        }
        if let Some((i, j, d)) = find_close_pair(&members) {
            return Err(RmlError::Domain(format!(
                "family is not 1-separated: members {i} and {j} are at distance {d:.6}"
            )));
        }
        let mut shells: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
        for (i, m) in members.iter().enumerate() {
            shells.entry(shell_index(m.r)).or_default().push(i);
        }
        Ok(Self { dim, members, shells })
    }

    pub fn empty(dim: usize) -> Self {
        Self { dim, members: Vec::new(), shells: BTreeMap::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn members(&self) -> &[Member] {
        &self.members
    }

    pub fn member(&self, i: usize) -> &Member {
        &self.members[i]
    }

    /// Shell index k ↦ member indices with r ∈ [2^k, 2^{k+1}).
    pub fn shells(&self) -> &BTreeMap<i32, Vec<usize>> {
        &self.shells
    }

    pub fn shell(&self, k: i32) -> &[usize] {
        self.shells.get(&k).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Σ_k 2^{k(d−1)} #ℰ_k.
    pub fn shell_weight(&self) -> f64 {
        self.shells
            .iter()
            .map(|(k, v)| 2f64.powi(k * (self.dim as i32 - 1)) * v.len() as f64)
            .sum()
    }

    /// Sub-family on the given member indices (separation is inherited).
    pub fn subset(&self, idx: &[usize]) -> PointFamily {
        let members: Vec<Member> = idx.iter().map(|&i| self.members[i].clone()).collect();
        let mut shells: BTreeMap<i32, Vec<usize>> = BTreeMap::new();
        for (i, m) in members.iter().enumerate() {
            shells.entry(shell_index(m.r)).or_default().push(i);
        }
        PointFamily { dim: self.dim, members, shells }
    }

    /// CSV: header `# dim=<d>` then rows `y_1,…,y_d,r`.
    pub fn to_csv(&self) -> String {
        let mut out = format!("# dim={}\n", self.dim);
        for m in &self.members {
            for c in &m.y {
                let _ = write!(out, "{:.16e},", c);
            }
            let _ = writeln!(out, "{:.16e}", m.r);
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let rows = parse_rows(text)?;
        let dim = rows.dim;
        let members = rows
            .rows
            .into_iter()
            .enumerate()
            .map(|(i, v)| {
                if v.len() != dim + 1 {
                    return Err(RmlError::Parse(format!("row {}: expected {} columns, got {}", i + 1, dim + 1, v.len())));
                }
                Ok(Member::new(v[..dim].to_vec(), v[dim]))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(dim, members)
    }
}

pub(crate) struct CsvRows {
    pub dim: usize,
    pub header: HashMap<String, String>,
    pub rows: Vec<Vec<f64>>,
}

/// Parse a `# key=value ...` header followed by numeric comma-separated rows.
pub(crate) fn parse_rows(text: &str) -> Result<CsvRows> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let head = lines
        .next()
        .and_then(|l| l.trim().strip_prefix('#'))
        .ok_or_else(|| RmlError::Parse("missing '# dim=..' header".into()))?;
    let header: HashMap<String, String> = head
        .split_whitespace()
        .filter_map(|t| t.split_once('=').map(|(k, v)| (k.to_string(), v.to_string())))
        .collect();
    let dim = header
        .get("dim")
        .ok_or_else(|| RmlError::Parse("header lacks dim=".into()))?
        .parse::<usize>()
        .map_err(|e| RmlError::Parse(format!("dim: {e}")))?;
    let rows = lines
        .enumerate()
        .map(|(i, l)| {
            l.split(',')
                .map(|c| c.trim().parse::<f64>().map_err(|e| RmlError::Parse(format!("row {}: {e}", i + 1))))
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CsvRows { dim, header, rows })
}

/// First pair closer than 1 (up to rounding), found through a unit cell hash in ℝ^{d+1}.
fn find_close_pair(members: &[Member]) -> Option<(usize, usize, f64)> {
    let key = |m: &Member| -> Vec<i64> {
        m.y.iter().chain(std::iter::once(&m.r)).map(|c| c.floor() as i64).collect()
    };
    let mut cells: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    for (i, m) in members.iter().enumerate() {
        cells.entry(key(m)).or_default().push(i);
    }
    let mut best: Option<(usize, usize, f64)> = None;
    for (i, m) in members.iter().enumerate() {
        let base = key(m);
        let n = base.len();
        let mut offset = vec![-1i64; n];
        loop {
            let cell: Vec<i64> = base.iter().zip(&offset).map(|(b, o)| b + o).collect();
            if let Some(list) = cells.get(&cell) {
                for &j in list.iter().filter(|&&j| j > i) {
                    let d = m.dist(&members[j]);
                    if d < 1.0 - SEP_TOL && best.map_or(true, |b| (i, j) < (b.0, b.1)) {
                        best = Some((i, j, d));
                    }
                }
            }
            let mut t = 0;
            while t < n && offset[t] == 1 {
                offset[t] = -1;
                t += 1;
            }
            if t == n {
                break;
            }
            offset[t] += 1;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shells_and_separation() {
        let f = PointFamily::new(
            2,
            vec![Member::new(vec![0.0, 0.0], 1.0), Member::new(vec![0.0, 0.0], 2.0), Member::new(vec![1.0, 0.0], 3.9)],
        )
        .unwrap();
        assert_eq!(f.shell(0), &[0]);
        assert_eq!(f.shell(1), &[1, 2]);
        assert_eq!(shell_index(4.0), 2);
        assert_eq!(shell_index(3.999999), 1);
        let bad = PointFamily::new(2, vec![Member::new(vec![0.0, 0.0], 1.0), Member::new(vec![0.5, 0.5], 1.2)]);
        match bad {
            Err(RmlError::Domain(msg)) => assert!(msg.contains("members 0 and 1")),
            other => panic!("unexpected {other:?}"),
        }
        assert!(PointFamily::new(2, vec![Member::new(vec![0.0, 0.0], 0.5)]).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let f = PointFamily::new(3, vec![Member::new(vec![0.1, -2.0, 1.0 / 3.0], 1.5), Member::new(vec![5.0, 0.0, 0.0], 7.0)])
            .unwrap();
        assert_eq!(PointFamily::from_csv(&f.to_csv()).unwrap(), f);
    }
}
