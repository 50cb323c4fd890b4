use std::fmt::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::mesh::{Mesh, NormalDomain, NormalField, Vec3};

/// A mesh together with the vertex normals its file carried, if any.
#[derive(Debug, Clone)]
pub struct PlyMesh {
    pub mesh: Mesh,
    pub vertex_normals: Option<NormalField>,
}

fn parse_error(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        message: message.into(),
    }
}

struct Element {
    name: String,
    count: usize,
    /// Scalar property names; list properties are recorded as `None`.
    properties: Vec<Option<String>>,
}

/// Parses ASCII PLY with a `vertex` element (`x y z`, optionally
/// `nx ny nz`) and a `face` element whose first list property holds
/// triangle indices. Other elements are skipped.
pub fn parse_ply(text: &str, path: &Path) -> Result<PlyMesh> {
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l.trim()));
    match lines.next() {
        Some((_, "ply")) => {}
        _ => return Err(parse_error(path, 1, "missing `ply` magic")),
    }
    let mut elements: Vec<Element> = Vec::new();
    let mut ascii = false;
    loop {
        let Some((no, line)) = lines.next() else {
            return Err(parse_error(path, text.lines().count(), "header has no `end_header`"));
        };
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.as_slice() {
            ["end_header"] => break,
            ["format", "ascii", _] => ascii = true,
            ["format", other, _] => {
                return Err(parse_error(path, no, format!("unsupported PLY format `{other}`")));
            }
            ["comment", ..] | ["obj_info", ..] | [] => {}
            ["element", name, count] => {
                let count = count
                    .parse()
                    .map_err(|_| parse_error(path, no, format!("bad element count `{count}`")))?;
                elements.push(Element {
                    name: name.to_string(),
                    count,
                    properties: Vec::new(),
                });
            }
            ["property", "list", _, _, _] => match elements.last_mut() {
                Some(e) => e.properties.push(None),
                None => return Err(parse_error(path, no, "property before any element")),
            },
            ["property", _, name] => match elements.last_mut() {
                Some(e) => e.properties.push(Some(name.to_string())),
                None => return Err(parse_error(path, no, "property before any element")),
            },
            _ => return Err(parse_error(path, no, format!("unrecognized header line `{line}`"))),
        }
    }
    if !ascii {
        return Err(parse_error(path, 1, "missing `format ascii 1.0`"));
    }

    let mut vertices = Vec::new();
    let mut normals: Option<Vec<Vec3>> = None;
    let mut faces = Vec::new();
    for element in &elements {
        let position = |name: &str| element.properties.iter().position(|p| p.as_deref() == Some(name));
        let (xyz, nxyz) = (
            [position("x"), position("y"), position("z")],
            [position("nx"), position("ny"), position("nz")],
        );
        let has_normals = nxyz.iter().all(Option::is_some);
        if element.name == "vertex" && xyz.iter().any(Option::is_none) {
            return Err(parse_error(path, 1, "vertex element lacks x, y or z"));
        }
        if element.name == "vertex" && has_normals {
            normals = Some(Vec::with_capacity(element.count));
        }
        for _ in 0..element.count {
            let Some((no, line)) = lines.next() else {
                return Err(parse_error(
                    path,
                    text.lines().count(),
                    format!("file ends inside element `{}`", element.name),
                ));
            };
            let tokens: Vec<&str> = line.split_whitespace().collect();
            match element.name.as_str() {
                "vertex" => {
                    let values: Vec<f64> = tokens
                        .iter()
                        .map(|t| t.parse::<f64>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|e| parse_error(path, no, format!("bad vertex value: {e}")))?;
                    if values.len() < element.properties.len() || !values.iter().all(|v| v.is_finite()) {
                        return Err(parse_error(path, no, "malformed vertex line"));
                    }
                    let pick = |idx: [Option<usize>; 3]| {
                        Vec3::new(values[idx[0].unwrap()], values[idx[1].unwrap()], values[idx[2].unwrap()])
                    };
                    vertices.push(pick(xyz));
                    if let Some(n) = normals.as_mut() {
                        n.push(pick(nxyz));
                    }
                }
                "face" => {
                    let count: usize = tokens
                        .first()
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| parse_error(path, no, "malformed face line"))?;
                    if count != 3 {
                        return Err(parse_error(
                            path,
                            no,
                            format!("face with {count} vertices; only triangles are supported"),
                        ));
                    }
                    let mut face = [0usize; 3];
                    for (slot, t) in face.iter_mut().zip(tokens.iter().skip(1)) {
                        *slot = t
                            .parse()
                            .map_err(|_| parse_error(path, no, format!("bad face index `{t}`")))?;
                    }
                    if tokens.len() < 4 {
                        return Err(parse_error(path, no, "face line has fewer than three indices"));
                    }
                    faces.push(face);
                }
                _ => {}
            }
        }
    }
    let mesh = Mesh::new(vertices, faces)?;
    let vertex_normals = normals
        .map(|n| NormalField::normalized(NormalDomain::Vertex, n))
        .transpose()?;
    Ok(PlyMesh { mesh, vertex_normals })
}

/// ASCII PLY text, with `nx ny nz` vertex properties when `normals` is set.
pub fn write_ply(mesh: &Mesh, normals: Option<&NormalField>) -> String {
    let mut out = String::new();
    out.push_str("ply\nformat ascii 1.0\n");
    let _ = writeln!(out, "element vertex {}", mesh.n_vertices());
    out.push_str("property double x\nproperty double y\nproperty double z\n");
    if normals.is_some() {
        out.push_str("property double nx\nproperty double ny\nproperty double nz\n");
    }
    let _ = writeln!(out, "element face {}", mesh.n_faces());
    out.push_str("property list uchar int vertex_indices\nend_header\n");
    for (v, p) in mesh.vertices().iter().enumerate() {
        let _ = write!(out, "{} {} {}", p.x, p.y, p.z);
        if let Some(n) = normals.map(|f| f.values()[v]) {
            let _ = write!(out, " {} {} {}", n.x, n.y, n.z);
        }
        out.push('\n');
    }
    for [a, b, c] in mesh.faces() {
        let _ = writeln!(out, "3 {a} {b} {c}");
    }
    out
}
