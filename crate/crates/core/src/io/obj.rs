use std::fmt::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::mesh::{Mesh, Vec3};

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

/// Parses `v` and `f` records. Face corners may be `i`, `i/t`, `i//n` or
/// `i/t/n`; negative indices count back from the latest vertex. Other
/// records are ignored.
pub fn parse_obj(text: &str, path: &Path) -> Result<Mesh> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let coords: Vec<f64> = tokens
                    .take(3)
                    .map(|t| t.parse::<f64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(|e| parse_error(path, line_no, format!("bad vertex coordinate: {e}")))?;
                if coords.len() != 3 {
                    return Err(parse_error(path, line_no, "vertex needs three coordinates"));
                }
                if !coords.iter().all(|c| c.is_finite()) {
                    return Err(parse_error(path, line_no, "non-finite vertex coordinate"));
                }
                vertices.push(Vec3::new(coords[0], coords[1], coords[2]));
            }
            Some("f") => {
                let corners: Vec<&str> = tokens.collect();
                if corners.len() != 3 {
                    return Err(parse_error(
                        path,
                        line_no,
                        format!("face with {} vertices; only triangles are supported", corners.len()),
                    ));
                }
                let mut face = [0usize; 3];
                for (slot, corner) in face.iter_mut().zip(corners) {
                    let index: i64 = corner
                        .split('/')
                        .next()
                        .unwrap_or("")
                        .parse()
                        .map_err(|_| parse_error(path, line_no, format!("bad face index `{corner}`")))?;
                    let resolved = if index > 0 {
                        index - 1
                    } else {
                        vertices.len() as i64 + index
                    };
                    if index == 0 || resolved < 0 || resolved >= vertices.len() as i64 {
                        return Err(parse_error(path, line_no, format!("face index {index} out of range")));
                    }
                    *slot = resolved as usize;
                }
                faces.push(face);
            }
            _ => {}
        }
    }
    Mesh::new(vertices, faces)
}

/// OBJ text with 1-based indices and shortest round-trip float formatting.
pub fn write_obj(mesh: &Mesh) -> String {
    let mut out = String::new();
    for p in mesh.vertices() {
        let _ = writeln!(out, "v {} {} {}", p.x, p.y, p.z);
    }
    for [a, b, c] in mesh.faces() {
        let _ = writeln!(out, "f {} {} {}", a + 1, b + 1, c + 1);
    }
    out
}
