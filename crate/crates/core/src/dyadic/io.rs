//! Flat little-endian binary arrays with JSON sidecars.

use super::bands::GridField;
use super::grid::Grid;
use crate::{Result, RmlError, C64};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Metadata written next to every binary array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    /// "samples" (real f64), "field" (interleaved re/im per band) or "mask" (u8).
    pub kind: String,
    pub grid: Grid,
    #[serde(default)]
    pub levels: Vec<i32>,
    #[serde(default)]
    pub thresholds: Vec<i32>,
    pub values: usize,
}

fn sidecar_path(bin: &Path) -> PathBuf {
    bin.with_extension("json")
}

fn write_pair(bin: &Path, bytes: &[u8], meta: &Sidecar) -> Result<()> {
    std::fs::write(bin, bytes)?;
    let json = serde_json::to_string_pretty(meta).map_err(|e| RmlError::Parse(e.to_string()))?;
    std::fs::write(sidecar_path(bin), json)?;
    Ok(())
}

fn read_pair(bin: &Path, kind: &str) -> Result<(Vec<u8>, Sidecar)> {
    let text = std::fs::read_to_string(sidecar_path(bin))?;
    let meta: Sidecar = serde_json::from_str(&text).map_err(|e| RmlError::Parse(format!("sidecar: {e}")))?;
    if meta.kind != kind {
        return Err(RmlError::Parse(format!("expected a {kind} file, sidecar says {}", meta.kind)));
    }
    Grid::new(meta.grid.dg, meta.grid.n, meta.grid.s_max)?;
    Ok((std::fs::read(bin)?, meta))
}

fn f64s(bytes: &[u8], want: usize) -> Result<Vec<f64>> {
    if bytes.len() != 8 * want {
        return Err(RmlError::Parse(format!("expected {} bytes, found {}", 8 * want, bytes.len())));
    }
    Ok(bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().unwrap())).collect())
}

pub fn write_samples(bin: &Path, grid: &Grid, f: &[f64]) -> Result<()> {
    let bytes: Vec<u8> = f.iter().flat_map(|v| v.to_le_bytes()).collect();
    let meta = Sidecar { kind: "samples".into(), grid: *grid, levels: vec![], thresholds: vec![], values: f.len() };
    write_pair(bin, &bytes, &meta)
}

pub fn read_samples(bin: &Path) -> Result<(Grid, Vec<f64>)> {
    let (bytes, meta) = read_pair(bin, "samples")?;
    Ok((meta.grid, f64s(&bytes, meta.grid.len())?))
}

pub fn write_field(bin: &Path, field: &GridField) -> Result<()> {
    let bytes: Vec<u8> =
        field.bands.iter().flatten().flat_map(|v| [v.re.to_le_bytes(), v.im.to_le_bytes()]).flatten().collect();
    let meta = Sidecar {
        kind: "field".into(),
        grid: field.grid,
        levels: field.scales().collect(),
        thresholds: vec![],
        values: field.bands.len() * field.grid.len(),
    };
    write_pair(bin, &bytes, &meta)
}

pub fn read_field(bin: &Path) -> Result<GridField> {
    let (bytes, meta) = read_pair(bin, "field")?;
    let s_min = *meta.levels.first().ok_or_else(|| RmlError::Parse("field sidecar lists no levels".into()))?;
    let len = meta.grid.len();
    let v = f64s(&bytes, 2 * len * meta.levels.len())?;
    let bands = v
        .chunks_exact(2 * len)
        .map(|b| b.chunks_exact(2).map(|c| C64::new(c[0], c[1])).collect())
        .collect();
    GridField::new(meta.grid, s_min, bands)
}

pub fn write_mask(bin: &Path, grid: &Grid, mask: &[bool], thresholds: Vec<i32>) -> Result<()> {
    let bytes: Vec<u8> = mask.iter().map(|&b| b as u8).collect();
    let meta = Sidecar { kind: "mask".into(), grid: *grid, levels: vec![], thresholds, values: mask.len() };
    write_pair(bin, &bytes, &meta)
}

pub fn read_mask(bin: &Path) -> Result<(Grid, Vec<bool>)> {
    let (bytes, meta) = read_pair(bin, "mask")?;
    if bytes.len() != meta.grid.len() {
        return Err(RmlError::Parse(format!("mask has {} cells, grid has {}", bytes.len(), meta.grid.len())));
    }
    Ok((meta.grid, bytes.into_iter().map(|b| b != 0).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::{band_decompose_real, random_samples};

    #[test]
    fn round_trips() {
        let dir = std::env::temp_dir().join(format!("rml-io-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let g = Grid::new(2, 16, 4).unwrap();
        let f = random_samples(&g, 3, 9);
        write_samples(&dir.join("f.bin"), &g, &f).unwrap();
        assert_eq!(read_samples(&dir.join("f.bin")).unwrap(), (g, f.clone()));
        let field = band_decompose_real(&g, &f, 1).unwrap();
        write_field(&dir.join("b.bin"), &field).unwrap();
        assert_eq!(read_field(&dir.join("b.bin")).unwrap(), field);
        let m: Vec<bool> = f.iter().map(|v| *v > 0.0).collect();
        write_mask(&dir.join("m.bin"), &g, &m, vec![2]).unwrap();
        assert_eq!(read_mask(&dir.join("m.bin")).unwrap().1, m);
        assert!(matches!(read_field(&dir.join("f.bin")), Err(RmlError::Parse(_))));
        std::fs::remove_dir_all(&dir).ok();
    }
}
