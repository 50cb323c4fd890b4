use nalgebra::Matrix3;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mesh::{Mesh, NormalDomain, NormalField, Vec3};
use crate::sparse::SparseBlockOperator;

use super::laplacian::check_face_field;

/// Per-vertex fairness weights `r_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct FairnessWeights(Vec<f64>);

impl FairnessWeights {
    pub fn get(&self, v: usize) -> f64 {
        self.0[v]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

/// Flatness weight of vertex `v`: zero on the boundary, otherwise
/// `max(mean_{p<q} n_p . n_q - delta, 0)` over distinct pairs of ring faces.
///
/// Rings with fewer than two usable normals get zero.
pub fn fairness_weight(mesh: &Mesh, v: usize, face_normals: &NormalField, delta: f64) -> f64 {
    if mesh.is_boundary(v) {
        return 0.0;
    }
    let normals: Vec<Vec3> = mesh
        .vertex_face_ring(v)
        .iter()
        .filter_map(|&f| face_normals.get(f))
        .collect();
    if normals.len() < 2 {
        return 0.0;
    }
    let mut sum = 0.0;
    let mut pairs = 0usize;
    for p in 0..normals.len() {
        for q in p + 1..normals.len() {
            sum += normals[p].dot(&normals[q]);
            pairs += 1;
        }
    }
    (sum / pairs as f64 - delta).max(0.0)
}

pub fn fairness_weights(mesh: &Mesh, face_normals: &NormalField, delta: f64) -> FairnessWeights {
    FairnessWeights(
        (0..mesh.n_vertices())
            .map(|v| fairness_weight(mesh, v, face_normals, delta))
            .collect(),
    )
}

/// Mean of the centroids of the faces incident to `v`.
pub fn ring_centroid(mesh: &Mesh, v: usize) -> Vec3 {
    let ring = mesh.vertex_face_ring(v);
    let sum: Vec3 = ring.iter().map(|&f| mesh.face_centroid(f)).sum();
    sum / ring.len() as f64
}

/// Fairness operator whose row `i` maps the vertex vector to
/// `r_i (I - n_i n_i^T)(c_i - v_i)`, where `c_i` is the mean of the ring
/// face centroids (a linear function of the vertices) and `n_i` is taken
/// from `vertex_normals`. Weights and projectors are frozen at assembly.
pub fn assemble_fairness(
    mesh: &Mesh,
    vertex_normals: &NormalField,
    face_normals: &NormalField,
    delta: f64,
) -> Result<SparseBlockOperator> {
    check_face_field(mesh, face_normals)?;
    if vertex_normals.domain() != NormalDomain::Vertex {
        return Err(Error::invalid("vertex_normals", "expected a per-vertex field"));
    }
    if vertex_normals.len() != mesh.n_vertices() {
        return Err(Error::DimensionMismatch {
            expected: mesh.n_vertices(),
            found: vertex_normals.len(),
        });
    }
    let rows: Vec<Vec<(usize, Matrix3<f64>)>> = (0..mesh.n_vertices())
        .into_par_iter()
        .map(|v| {
            let r = fairness_weight(mesh, v, face_normals, delta);
            let Some(n) = vertex_normals.get(v) else {
                return Vec::new();
            };
            if r == 0.0 {
                return Vec::new();
            }
            let projector = r * (Matrix3::identity() - n * n.transpose());
            let ring = mesh.vertex_face_ring(v);
            let share = projector / (3.0 * ring.len() as f64);
            let mut row = Vec::with_capacity(1 + 3 * ring.len());
            row.push((v, -projector));
            for &f in ring {
                for &corner in &mesh.face(f) {
                    row.push((corner, share));
                }
            }
            row
        })
        .collect();
    SparseBlockOperator::from_rows(mesh.n_vertices(), rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::fixtures;
    use crate::mesh::VertexNormalScheme;

    #[test]
    fn boundary_and_flat_interior_weights() {
        let mesh = fixtures::grid_mesh(3).unwrap();
        let normals = mesh.face_normals();
        assert_eq!(fairness_weight(&mesh, 0, &normals, 0.2), 0.0);
        assert!((fairness_weight(&mesh, 5, &normals, 0.2) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn orthogonal_ring_normals_give_zero() {
        // Closed cube-corner cap: the three faces meeting at vertex 0 have
        // mutually orthogonal normals (mean pairwise dot 0 < delta). A fourth
        // face closes the fan so vertex 0 is interior.
        let mesh = Mesh::from_arrays(
            &[
                [0.0, 0.0, 0.0],
                [0.0, 1.0, 0.0],
                [0.0, 0.0, 1.0],
                [1.0, 0.0, 0.0],
            ],
            &[[0, 1, 2], [0, 2, 3], [0, 3, 1], [1, 3, 2]],
        )
        .unwrap();
        assert!(!mesh.is_boundary(0));
        let normals = mesh.face_normals();
        // Only the three axis faces are in the ring of vertex 0.
        assert_eq!(mesh.vertex_face_ring(0), &[0, 1, 2]);
        assert_eq!(fairness_weight(&mesh, 0, &normals, 0.2), 0.0);
    }

    #[test]
    fn single_triangle_has_zero_operator() {
        let mesh = Mesh::from_arrays(&[[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], &[[0, 1, 2]])
            .unwrap();
        let k = assemble_fairness(
            &mesh,
            &mesh.vertex_normals(VertexNormalScheme::AngleWeighted),
            &mesh.face_normals(),
            0.2,
        )
        .unwrap();
        assert_eq!(k.n_blocks(), 0);
    }

    #[test]
    fn symmetric_grid_vertex_has_zero_offset() {
        let mesh = fixtures::grid_mesh(4).unwrap();
        let k = assemble_fairness(
            &mesh,
            &mesh.vertex_normals(VertexNormalScheme::AngleWeighted),
            &mesh.face_normals(),
            0.2,
        )
        .unwrap();
        let kv = k.apply(mesh.vertices()).unwrap();
        for (v, x) in kv.iter().enumerate() {
            assert!(x.norm() < 1e-12, "vertex {v}: {x}");
        }
    }
}
