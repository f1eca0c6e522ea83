//! Flat binary container for sampled fields plus a JSON sidecar manifest.
//!
//! Layout (little-endian throughout):
//!
//! ```text
//! magic    8 bytes  "PHFIELD\0"
//! version  u32      1
//! dim      u32
//! points   u32
//! centered u32      0 | 1
//! extent   f64
//! count    u64      points^dim
//! payload  count * (re: f64, im: f64)
//! ```
//!
//! The sidecar `<file>.json` records provenance, the optional support radius
//! and the payload checksum. Round-trips are bit-exact for `f64` fields.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CoreError, Result};
use crate::fields::{GridSpec, SampledField};
use crate::scalar::Real;

const MAGIC: &[u8; 8] = b"PHFIELD\0";
const VERSION: u32 = 1;

/// JSON sidecar of a field file.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FieldSidecar {
    pub format: String,
    pub dim: usize,
    pub points: usize,
    pub extent: f64,
    pub origin_centered: bool,
    pub support_radius: Option<f64>,
    pub provenance: String,
    pub payload_sha256: String,
}

fn sidecar_path(path: &Path) -> PathBuf {
    let mut os = path.as_os_str().to_owned();
    os.push(".json");
    PathBuf::from(os)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

fn encode_field<T: Real>(field: &SampledField<T>) -> Vec<u8> {
    let grid = field.grid();
    let mut buf = Vec::with_capacity(40 + 16 * field.values().len());
    buf.extend_from_slice(MAGIC);
    buf.extend_from_slice(&VERSION.to_le_bytes());
    buf.extend_from_slice(&(grid.dim as u32).to_le_bytes());
    buf.extend_from_slice(&(grid.points as u32).to_le_bytes());
    buf.extend_from_slice(&(grid.origin_centered as u32).to_le_bytes());
    buf.extend_from_slice(&grid.extent.as_f64().to_le_bytes());
    buf.extend_from_slice(&(field.values().len() as u64).to_le_bytes());
    for v in field.values() {
        buf.extend_from_slice(&v.re.as_f64().to_le_bytes());
        buf.extend_from_slice(&v.im.as_f64().to_le_bytes());
    }
    buf
}

/// Checksum of a field's binary encoding, without touching disk.
pub fn field_sha256<T: Real>(field: &SampledField<T>) -> String {
    sha256_hex(&encode_field(field))
}

/// Serialize a field to `path` (binary) and `path.json` (sidecar).
pub fn save_field<T: Real>(
    field: &SampledField<T>,
    path: &Path,
    provenance: &str,
) -> Result<FieldSidecar> {
    let grid = field.grid();
    let buf = encode_field(field);
    let sidecar = FieldSidecar {
        format: format!("phfield-v{VERSION}"),
        dim: grid.dim,
        points: grid.points,
        extent: grid.extent.as_f64(),
        origin_centered: grid.origin_centered,
        support_radius: field.support_radius().map(|r| r.as_f64()),
        provenance: provenance.to_string(),
        payload_sha256: sha256_hex(&buf),
    };
    let mut f = fs::File::create(path)?;
    f.write_all(&buf)?;
    fs::write(
        sidecar_path(path),
        serde_json::to_string_pretty(&sidecar)? + "\n",
    )?;
    Ok(sidecar)
}

/// Load a field written by [`save_field`], verifying the checksum.
pub fn load_field(path: &Path) -> Result<(SampledField<f64>, FieldSidecar)> {
    let mut bytes = Vec::new();
    fs::File::open(path)?.read_to_end(&mut bytes)?;
    if bytes.len() < 40 || &bytes[0..8] != MAGIC {
        return Err(CoreError::Format("not a field container".into()));
    }
    let read_u32 = |off: usize| u32::from_le_bytes(bytes[off..off + 4].try_into().unwrap());
    let version = read_u32(8);
    if version != VERSION {
        return Err(CoreError::Format(format!(
            "unsupported field container version {version}"
        )));
    }
    let dim = read_u32(12) as usize;
    let points = read_u32(16) as usize;
    let centered = read_u32(20) != 0;
    let extent = f64::from_le_bytes(bytes[24..32].try_into().unwrap());
    let count = u64::from_le_bytes(bytes[32..40].try_into().unwrap()) as usize;
    if bytes.len() != 40 + 16 * count {
        return Err(CoreError::Format("field payload truncated".into()));
    }

    let sidecar: FieldSidecar = serde_json::from_str(&fs::read_to_string(sidecar_path(path))?)?;
    if sidecar.payload_sha256 != sha256_hex(&bytes) {
        return Err(CoreError::Format("field checksum mismatch".into()));
    }

    let mut values = Vec::with_capacity(count);
    for i in 0..count {
        let off = 40 + 16 * i;
        let re = f64::from_le_bytes(bytes[off..off + 8].try_into().unwrap());
        let im = f64::from_le_bytes(bytes[off + 8..off + 16].try_into().unwrap());
        values.push(Complex::new(re, im));
    }
    let grid = GridSpec::with_centering(dim, extent, points, centered)?;
    let field = SampledField::new(grid, values, sidecar.support_radius)?;
    Ok((field, sidecar))
}
