//! Grid file format.
//!
//! A grid is stored as two files: a TOML header (`d`, `n`, `side`,
//! `components`, `data`) and a flat binary payload of little-endian `f64`
//! values in row-major order. `components = 1` stores real parts only;
//! `components = 2` interleaves real and imaginary parts.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{GridFunction, GridSpec};
use crate::error::{CzError, Result};

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GridHeader {
    pub d: usize,
    pub n: usize,
    pub side: f64,
    pub components: usize,
    /// Payload path relative to the header file.
    pub data: String,
}

pub fn to_bytes(f: &GridFunction, components: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(f.values().len() * 8 * components);
    for v in f.values() {
        out.extend_from_slice(&v.re.to_le_bytes());
        if components == 2 {
            out.extend_from_slice(&v.im.to_le_bytes());
        }
    }
    out
}

pub fn from_bytes(spec: GridSpec, components: usize, bytes: &[u8]) -> Result<GridFunction> {
    if components != 1 && components != 2 {
        return Err(CzError::Parameter(format!("components must be 1 or 2, got {components}")));
    }
    let expected = spec.len() * 8 * components;
    if bytes.len() != expected {
        return Err(CzError::GridMismatch(format!("payload has {} bytes, expected {expected}", bytes.len())));
    }
    let floats: Vec<f64> =
        bytes.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("chunk of 8"))).collect();
    let values = if components == 1 {
        floats.into_iter().map(|re| Complex64::new(re, 0.0)).collect()
    } else {
        floats.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect()
    };
    GridFunction::new(spec, values)
}

/// Writes `<header>` and its payload next to it (`<header stem>.bin`).
/// Real-valued grids are stored with one component.
pub fn write_grid(header_path: &Path, f: &GridFunction) -> Result<PathBuf> {
    let components = if f.is_real(0.0) { 1 } else { 2 };
    let data_path = header_path.with_extension("bin");
    let data_name =
        data_path.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "grid.bin".into());
    let spec = f.spec();
    let header = GridHeader { d: spec.d, n: spec.n, side: spec.side, components, data: data_name };
    let text =
        toml::to_string(&header).map_err(|e| CzError::Config { path: "grid header".into(), msg: e.to_string() })?;
    fs::write(header_path, text).map_err(|e| CzError::io(header_path, e))?;
    fs::write(&data_path, to_bytes(f, components)).map_err(|e| CzError::io(&data_path, e))?;
    Ok(data_path)
}

pub fn read_grid(header_path: &Path) -> Result<GridFunction> {
    let text = fs::read_to_string(header_path).map_err(|e| CzError::io(header_path, e))?;
    let header: GridHeader = toml::from_str(&text)
        .map_err(|e| CzError::Config { path: header_path.display().to_string(), msg: e.to_string() })?;
    let spec = GridSpec::new(header.d, header.n, header.side)?;
    let data_path = header_path.parent().unwrap_or(Path::new(".")).join(&header.data);
    let bytes = fs::read(&data_path).map_err(|e| CzError::io(&data_path, e))?;
    from_bytes(spec, header.components, &bytes)
}

/// CSV of the 1-d slice along `axis` through the point `through`
/// (columns: index, coordinate, re, im).
pub fn write_slice_csv<W: Write>(f: &GridFunction, axis: usize, through: usize, mut out: W) -> std::io::Result<()> {
    let spec = f.spec();
    let base = spec.unravel(through);
    writeln!(out, "index,coord,re,im")?;
    for i in 0..spec.n {
        let mut idx = base;
        idx[axis] = i;
        let flat = spec.ravel(&idx);
        let v = f.get(flat);
        writeln!(out, "{},{},{},{}", i, spec.coord(flat)[axis], v.re, v.im)?;
    }
    Ok(())
}
