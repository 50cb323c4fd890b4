use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by mesh construction, optimization, evaluation and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("mesh has no faces")]
    EmptyMesh,

    #[error("face {face} references vertex {index}, but the mesh has {n_vertices} vertices")]
    InvalidFaceIndex {
        face: usize,
        index: usize,
        n_vertices: usize,
    },

    #[error("face {face} repeats vertex {vertex}")]
    RepeatedVertex { face: usize, vertex: usize },

    #[error("index {index} out of range ({len} entries)")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("face {face} has zero area")]
    DegenerateFace { face: usize },

    #[error("vertex {vertex} has no usable incident face or edge")]
    IsolatedVertex { vertex: usize },

    #[error("vertex {vertex} has zero local scale")]
    ZeroLocalScale { vertex: usize },

    #[error("face {face} is not in the 1-ring of vertex {vertex}")]
    FaceNotInRing { vertex: usize, face: usize },

    #[error("face {other} does not share a vertex with face {face}")]
    NotAdjacent { face: usize, other: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("meshes have different topology")]
    TopologyMismatch,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("normal field has a near-zero vector at entry {index}")]
    ZeroNormal { index: usize },

    #[error("dense factorization failed: system matrix is not positive definite")]
    NotPositiveDefinite,

    #[error("round {round}: {source}")]
    Round {
        round: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: unsupported mesh format (expected .obj or .ply)")]
    UnsupportedFormat { path: PathBuf },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn in_round(self, round: usize) -> Self {
        Error::Round {
            round,
            source: Box::new(self),
        }
    }
}
