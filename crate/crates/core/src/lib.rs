//! Mesh optimization with a face-fairness term.
//!
//! Vertex positions are found by minimizing a global quadratic cost made of
//! a data term, an anisotropic bilateral Laplacian driven by a face-normal
//! field, and a penalty that pulls each vertex toward the centroid of its
//! ring within the local tangent plane. The same solver backs two
//! pipelines: denoising (normal mollification followed by vertex
//! correction) and fusion of a smooth mesh with a detailed normal field.

pub mod error;
pub mod eval;
pub mod io;
pub mod mesh;
pub mod mollifier;
pub mod pipeline;
pub mod solver;
pub mod sparse;

pub use error::{Error, Result};
pub use mesh::{LocalScale, Mesh, NormalDomain, NormalField, Vec3, VertexNormalScheme};
pub use mollifier::{mollify_normals, MollifyParams};
pub use pipeline::{denoise, fuse_normals, vertex_to_face_normals, DenoiseConfig, FusionInput};
pub use solver::{IterativeMethod, SolverParams};
