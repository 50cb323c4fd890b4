use std::fmt::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::mesh::{NormalDomain, NormalField, Vec3};

use super::{read_text, write_atomic};

/// Vectors shorter than this are rejected on load.
pub const MIN_NORMAL_LENGTH: f64 = 1e-12;

/// Parses one whitespace-separated `nx ny nz` triple per non-blank line into
/// a unit per-vertex field of exactly `expected_len` entries.
pub fn parse_normal_field(text: &str, expected_len: usize, path: &Path) -> Result<NormalField> {
    let mut values = Vec::with_capacity(expected_len);
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let parse_error = |message: String| Error::Parse {
            path: path.to_path_buf(),
            line: k + 1,
            message,
        };
        let coords: Vec<f64> = line
            .split_whitespace()
            .map(str::parse::<f64>)
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| parse_error(format!("bad normal component: {e}")))?;
        if coords.len() != 3 {
            return Err(parse_error(format!("expected 3 components, found {}", coords.len())));
        }
        if !coords.iter().all(|c| c.is_finite()) {
            return Err(parse_error("non-finite normal component".into()));
        }
        let n = Vec3::new(coords[0], coords[1], coords[2]);
        if n.norm() < MIN_NORMAL_LENGTH {
            return Err(Error::ZeroNormal { index: values.len() });
        }
        values.push(n);
    }
    if values.len() != expected_len {
        return Err(Error::DimensionMismatch {
            expected: expected_len,
            found: values.len(),
        });
    }
    NormalField::normalized(NormalDomain::Vertex, values)
}

pub fn read_normal_field(path: &Path, expected_len: usize) -> Result<NormalField> {
    parse_normal_field(&read_text(path)?, expected_len, path)
}

pub fn format_normal_field(normals: &NormalField) -> String {
    let mut out = String::new();
    for n in normals.values() {
        let _ = writeln!(out, "{} {} {}", n.x, n.y, n.z);
    }
    out
}

pub fn write_normal_field(normals: &NormalField, path: &Path) -> Result<()> {
    write_atomic(path, format_normal_field(normals).as_bytes())
}
