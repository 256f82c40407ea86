//! PFLD binary fields with JSON sidecars.
//!
//! A PFLD record is the magic `PFLD`, a little-endian `u32` version (1), a `u8`
//! dimension, a `u32` points per axis and then `n^dim` little-endian `f64` values in
//! row-major order. A time field is its frames' records concatenated; its sidecar
//! lists the times.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ops::TimeField;
use crate::spectral::{Field, TorusGrid};

pub const MAGIC: &[u8; 4] = b"PFLD";
pub const VERSION: u32 = 1;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kernel: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub equation: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub component: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub format: String,
    pub grid: TorusGrid,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
    #[serde(default)]
    pub provenance: Provenance,
}

impl Sidecar {
    pub fn field(grid: TorusGrid, provenance: Provenance) -> Self {
        Self { format: "PFLD".into(), grid, times: None, provenance }
    }
}

/// `foo.pfld` -> `foo.pfld.json`
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

pub fn encode_field(f: &Field, out: &mut Vec<u8>) {
    let g = f.grid();
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&VERSION.to_le_bytes());
    out.push(g.dim as u8);
    out.extend_from_slice(&(g.n as u32).to_le_bytes());
    for v in f.data() {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

/// Decodes one record at the start of `bytes`; returns the field and the bytes consumed.
/// The record does not carry the period, so `length` is supplied by the caller.
pub fn decode_field(bytes: &[u8], length: f64) -> Result<(Field, usize)> {
    if bytes.len() < 13 || &bytes[..4] != MAGIC {
        return Err(Error::Format("missing PFLD magic".into()));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes"));
    if version != VERSION {
        return Err(Error::Format(format!("unsupported PFLD version {version}")));
    }
    let dim = bytes[8] as usize;
    let n = u32::from_le_bytes(bytes[9..13].try_into().expect("4 bytes")) as usize;
    let grid = TorusGrid::with_length(dim, n, length)?;
    let count = grid.len();
    let end = 13 + 8 * count;
    if bytes.len() < end {
        return Err(Error::Format(format!("truncated PFLD record: need {end} bytes, have {}", bytes.len())));
    }
    let data = bytes[13..end].chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
    Ok((Field::from_vec(grid, data)?, end))
}

fn read_sidecar(path: &Path) -> Result<Option<Sidecar>> {
    let p = sidecar_path(path);
    if !p.exists() {
        return Ok(None);
    }
    Ok(Some(serde_json::from_slice(&fs::read(p)?)?))
}

fn write_sidecar(path: &Path, sidecar: &Sidecar) -> Result<()> {
    fs::write(sidecar_path(path), serde_json::to_vec_pretty(sidecar)?)?;
    Ok(())
}

pub fn write_field(path: &Path, f: &Field, provenance: Provenance) -> Result<()> {
    let mut buf = Vec::with_capacity(13 + 8 * f.data().len());
    encode_field(f, &mut buf);
    fs::write(path, buf)?;
    write_sidecar(path, &Sidecar::field(*f.grid(), provenance))
}

/// Reads a field; the sidecar, when present, supplies the period.
pub fn read_field(path: &Path) -> Result<Field> {
    let bytes = fs::read(path)?;
    let length = read_sidecar(path)?.map_or(1.0, |s| s.grid.length);
    let (f, used) = decode_field(&bytes, length)?;
    if used != bytes.len() {
        return Err(Error::Format(format!(
            "{} holds {} trailing bytes; use read_time_field for multi-frame files",
            path.display(),
            bytes.len() - used
        )));
    }
    Ok(f)
}

pub fn write_time_field(path: &Path, tf: &TimeField, provenance: Provenance) -> Result<()> {
    let mut buf = Vec::with_capacity(tf.len() * (13 + 8 * tf.grid.len()));
    for f in &tf.frames {
        encode_field(f, &mut buf);
    }
    fs::write(path, buf)?;
    let sidecar = Sidecar { format: "PFLD-frames".into(), grid: tf.grid, times: Some(tf.times.clone()), provenance };
    write_sidecar(path, &sidecar)
}

pub fn read_time_field(path: &Path) -> Result<TimeField> {
    let bytes = fs::read(path)?;
    let sidecar = read_sidecar(path)?
        .ok_or_else(|| Error::Format(format!("{} has no sidecar listing the times", path.display())))?;
    let times = sidecar.times.ok_or_else(|| Error::Format("sidecar lists no times".into()))?;
    let mut frames = Vec::with_capacity(times.len());
    let mut at = 0;
    while at < bytes.len() {
        let (f, used) = decode_field(&bytes[at..], sidecar.grid.length)?;
        frames.push(f);
        at += used;
    }
    TimeField::new(times, frames)
}

/// Reads either a single field or the last frame of a time field.
pub fn read_any_field(path: &Path) -> Result<Field> {
    match read_sidecar(path)? {
        Some(s) if s.times.is_some() => Ok(read_time_field(path)?.last().clone()),
        _ => read_field(path),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_layout() {
        let g = TorusGrid::new(1, 32).unwrap();
        let f = Field::from_fn(g, |x| x[0]);
        let mut buf = Vec::new();
        encode_field(&f, &mut buf);
        assert_eq!(buf.len(), 13 + 8 * 32);
        assert_eq!(&buf[..4], b"PFLD");
        assert_eq!(buf[8], 1);
        assert_eq!(u32::from_le_bytes(buf[9..13].try_into().unwrap()), 32);
        let (back, used) = decode_field(&buf, 1.0).unwrap();
        assert_eq!(used, buf.len());
        assert_eq!(back, f);
    }

    #[test]
    fn rejects_bad_magic() {
        assert!(decode_field(b"PFLX\x01\x00\x00\x00\x01\x20\x00\x00\x00", 1.0).is_err());
    }
}
