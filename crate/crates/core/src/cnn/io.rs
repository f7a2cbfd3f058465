//! Versioned binary model files.
//!
//! Layout: 8-byte magic, little-endian `u32` format version, little-endian
//! `u32` header length, JSON header (architecture, seed, parameter count),
//! then every parameter as a little-endian `f64` in flat order. Weights are
//! always stored in double precision, which round-trips both supported
//! scalar types bit-exactly.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ArchSpec, CnnModel};
use crate::error::{Error, Result};
use crate::scalar::{dbl, lit, Real};

/// Identifies model files produced by this crate.
pub const MODEL_MAGIC: &[u8; 8] = b"QMAGCNN1";
/// Current file format version.
pub const MODEL_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct Header {
    arch: ArchSpec,
    seed: u64,
    params: usize,
}

/// Writes the model to `path`, overwriting any existing file.
pub fn save_model<T: Real>(model: &CnnModel<T>, path: impl AsRef<Path>) -> Result<()> {
    let header = Header {
        arch: model.arch().clone(),
        seed: model.seed(),
        params: model.param_count(),
    };
    let header_bytes = serde_json::to_vec(&header)?;
    let mut buf =
        Vec::with_capacity(16 + header_bytes.len() + model.param_count() * 8);
    buf.extend_from_slice(MODEL_MAGIC);
    buf.extend_from_slice(&MODEL_VERSION.to_le_bytes());
    buf.extend_from_slice(&(header_bytes.len() as u32).to_le_bytes());
    buf.extend_from_slice(&header_bytes);
    for p in model.to_flat() {
        buf.extend_from_slice(&dbl(p).to_le_bytes());
    }
    fs::write(path, buf)?;
    Ok(())
}

fn take<'a>(bytes: &'a [u8], cursor: &mut usize, n: usize) -> Result<&'a [u8]> {
    let end = cursor
        .checked_add(n)
        .filter(|&e| e <= bytes.len())
        .ok_or_else(|| Error::ModelFormat("unexpected end of file".into()))?;
    let slice = &bytes[*cursor..end];
    *cursor = end;
    Ok(slice)
}

/// Reads a model written by [`save_model`].
pub fn load_model<T: Real>(path: impl AsRef<Path>) -> Result<CnnModel<T>> {
    let bytes = fs::read(path)?;
    let mut cursor = 0usize;
    let magic = take(&bytes, &mut cursor, MODEL_MAGIC.len())?;
    if magic != MODEL_MAGIC {
        return Err(Error::ModelFormat("bad magic bytes".into()));
    }
    let version = u32::from_le_bytes(take(&bytes, &mut cursor, 4)?.try_into().unwrap());
    if version != MODEL_VERSION {
        return Err(Error::ModelFormat(format!(
            "unsupported format version {version}, expected {MODEL_VERSION}"
        )));
    }
    let header_len = u32::from_le_bytes(take(&bytes, &mut cursor, 4)?.try_into().unwrap()) as usize;
    let header: Header = serde_json::from_slice(take(&bytes, &mut cursor, header_len)?)?;
    let mut model = CnnModel::<T>::new(header.arch, header.seed)?;
    if header.params != model.param_count() {
        return Err(Error::ModelFormat(format!(
            "header declares {} parameters but the architecture has {}",
            header.params,
            model.param_count()
        )));
    }
    let blob = take(&bytes, &mut cursor, header.params * 8)?;
    if cursor != bytes.len() {
        return Err(Error::ModelFormat(format!(
            "{} trailing bytes after the weight block",
            bytes.len() - cursor
        )));
    }
    let flat: Vec<T> = blob
        .chunks_exact(8)
        .map(|c| lit::<T>(f64::from_le_bytes(c.try_into().unwrap())))
        .collect();
    model.load_flat(&flat)?;
    Ok(model)
}
