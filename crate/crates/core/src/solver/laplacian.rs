use nalgebra::Matrix3;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mesh::{LocalScale, Mesh, NormalDomain, NormalField};
use crate::sparse::SparseBlockOperator;

use super::SolverParams;

/// Weight and projector contributed by one ring face to a vertex Laplacian.
#[derive(Debug, Clone, PartialEq)]
pub struct LaplacianTerm {
    pub face: usize,
    /// Normal-offset kernel.
    pub a: f64,
    /// Spatial kernel.
    pub b: f64,
    /// `a b / ((1 + a) sum_ring b)`.
    pub weight: f64,
    /// Outer product of the face normal with itself.
    pub projector: Matrix3<f64>,
}

pub(crate) fn check_face_field(mesh: &Mesh, normals: &NormalField) -> Result<()> {
    if normals.domain() != NormalDomain::Face {
        return Err(Error::invalid("face_normals", "expected a per-face field"));
    }
    if normals.len() != mesh.n_faces() {
        return Err(Error::DimensionMismatch {
            expected: mesh.n_faces(),
            found: normals.len(),
        });
    }
    Ok(())
}

/// Bilateral terms of every ring face of `v` with a usable normal.
///
/// `scale` is the local scale `l_v`; both bandwidths are multiples of it.
pub fn vertex_laplacian_terms(
    mesh: &Mesh,
    v: usize,
    face_normals: &NormalField,
    scale: f64,
    sigma1: f64,
    sigma2: f64,
) -> Result<Vec<LaplacianTerm>> {
    check_face_field(mesh, face_normals)?;
    if v >= mesh.n_vertices() {
        return Err(Error::IndexOutOfRange {
            index: v,
            len: mesh.n_vertices(),
        });
    }
    let ring: Vec<usize> = mesh
        .vertex_face_ring(v)
        .iter()
        .copied()
        .filter(|&f| face_normals.is_valid(f))
        .collect();
    if ring.is_empty() {
        return Err(Error::IsolatedVertex { vertex: v });
    }
    if scale.is_nan() || scale <= 0.0 {
        return Err(Error::ZeroLocalScale { vertex: v });
    }

    let p = mesh.vertex(v);
    let norm_den = 2.0 * sigma1 * sigma1 * scale * scale;
    let space_den = 2.0 * sigma2 * sigma2 * scale * scale;
    let mut terms: Vec<LaplacianTerm> = ring
        .iter()
        .map(|&f| {
            let n = face_normals.get(f).expect("filtered to valid faces");
            let offset = mesh.face_centroid(f) - p;
            let along = n.dot(&offset);
            LaplacianTerm {
                face: f,
                a: (-along * along / norm_den).exp(),
                b: (-offset.norm_squared() / space_den).exp(),
                weight: 0.0,
                projector: n * n.transpose(),
            }
        })
        .collect();
    let b_sum: f64 = terms.iter().map(|t| t.b).sum();
    for t in &mut terms {
        t.weight = if b_sum > 0.0 {
            t.a * t.b / ((1.0 + t.a) * b_sum)
        } else {
            0.0
        };
    }
    Ok(terms)
}

/// Weight `w_vf` and projector `A_f` for one ring face `f` of vertex `v`.
pub fn laplacian_weight(
    mesh: &Mesh,
    v: usize,
    f: usize,
    face_normals: &NormalField,
    scales: &LocalScale,
    sigma1: f64,
    sigma2: f64,
) -> Result<LaplacianTerm> {
    let terms = vertex_laplacian_terms(mesh, v, face_normals, scales.get(v), sigma1, sigma2)?;
    terms
        .into_iter()
        .find(|t| t.face == f)
        .ok_or(Error::FaceNotInRing { vertex: v, face: f })
}

/// Global Laplacian whose row `i` maps the vertex vector to
/// `sum_j w_ij A_j (v_i - c_j)`, with `c_j` the centroid of ring face `j`.
///
/// Vertices with no usable ring face, and interior vertices with fewer than
/// two, get an empty row.
pub fn assemble_laplacian(
    mesh: &Mesh,
    face_normals: &NormalField,
    scales: &LocalScale,
    params: &SolverParams,
) -> Result<SparseBlockOperator> {
    check_face_field(mesh, face_normals)?;
    if scales.as_slice().len() != mesh.n_vertices() {
        return Err(Error::DimensionMismatch {
            expected: mesh.n_vertices(),
            found: scales.as_slice().len(),
        });
    }
    let rows = (0..mesh.n_vertices())
        .into_par_iter()
        .map(|v| {
            let usable = mesh
                .vertex_face_ring(v)
                .iter()
                .filter(|&&f| face_normals.is_valid(f))
                .count();
            if usable == 0 || (usable < 2 && !mesh.is_boundary(v)) {
                return Ok(Vec::new());
            }
            let terms = vertex_laplacian_terms(
                mesh,
                v,
                face_normals,
                scales.get(v),
                params.sigma1,
                params.sigma2,
            )?;
            let mut row = Vec::with_capacity(1 + 3 * terms.len());
            for t in &terms {
                let block = t.weight * t.projector;
                row.push((v, block));
                for &corner in &mesh.face(t.face) {
                    row.push((corner, -block / 3.0));
                }
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    SparseBlockOperator::from_rows(mesh.n_vertices(), rows)
}
