//! Plain-text file formats: OBJ and ASCII PLY meshes, normal fields,
//! key=value reports and configs, CSV histograms.
//!
//! Every writer goes through a temporary file in the destination directory
//! that is renamed into place, so a failed write leaves no partial output.

mod config;
mod normals;
mod obj;
mod ply;
mod report;

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::mesh::{Mesh, NormalField};

pub use config::{parse_config, read_config};
pub use normals::{format_normal_field, parse_normal_field, read_normal_field, write_normal_field};
pub use obj::{parse_obj, write_obj};
pub use ply::{parse_ply, write_ply, PlyMesh};
pub use report::{histogram_csv, report_text, write_histogram_csv, write_report};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Obj,
    Ply,
}

impl MeshFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase);
        match ext.as_deref() {
            Some("obj") => Ok(MeshFormat::Obj),
            Some("ply") => Ok(MeshFormat::Ply),
            _ => Err(Error::UnsupportedFormat {
                path: path.to_path_buf(),
            }),
        }
    }
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes `contents` to `path` through a sibling temporary file.
pub fn write_atomic(path: &Path, contents: &[u8]) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err)?;
    tmp.write_all(contents).map_err(io_err)?;
    tmp.as_file().sync_all().map_err(io_err)?;
    tmp.persist(path).map_err(|e| io_err(e.error))?;
    Ok(())
}

/// Reads a mesh, choosing the format from the extension.
pub fn read_mesh(path: &Path) -> Result<Mesh> {
    Ok(read_mesh_with_normals(path)?.mesh)
}

/// Reads a mesh and, for PLY files that carry them, its vertex normals.
pub fn read_mesh_with_normals(path: &Path) -> Result<PlyMesh> {
    let text = read_text(path)?;
    match MeshFormat::from_path(path)? {
        MeshFormat::Obj => Ok(PlyMesh {
            mesh: parse_obj(&text, path)?,
            vertex_normals: None,
        }),
        MeshFormat::Ply => parse_ply(&text, path),
    }
}

/// Serializes a mesh in the format implied by the extension of `path`.
pub fn format_mesh(mesh: &Mesh, path: &Path) -> Result<String> {
    Ok(match MeshFormat::from_path(path)? {
        MeshFormat::Obj => write_obj(mesh),
        MeshFormat::Ply => write_ply(mesh, None),
    })
}

pub fn write_mesh(mesh: &Mesh, path: &Path) -> Result<()> {
    write_atomic(path, format_mesh(mesh, path)?.as_bytes())
}

/// Writes a PLY mesh with per-vertex normal properties.
pub fn write_mesh_with_normals(mesh: &Mesh, normals: &NormalField, path: &Path) -> Result<()> {
    if MeshFormat::from_path(path)? != MeshFormat::Ply {
        return Err(Error::invalid("path", "normals can only be stored in PLY files"));
    }
    write_atomic(path, write_ply(mesh, Some(normals)).as_bytes())
}
