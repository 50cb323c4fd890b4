//! Indexed triangle mesh with fixed topology.
//!
//! A [`Mesh`] owns its vertex positions and shares an immutable topology
//! (faces, incidence lists, edges, boundary flags) behind an [`Arc`]. Every
//! optimization in this crate moves vertices only, so [`Mesh::with_vertices`]
//! produces a new geometry on the same topology without rebuilding anything.
//!
//! All neighborhood lists are sorted by ascending index so that sums over
//! them are reproducible bit for bit.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::Vector3;

use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

/// Relative area threshold below which a face counts as degenerate: the
/// cross-product norm must exceed this times the squared mean edge length.
pub const DEGENERATE_AREA_EPS: f64 = 1e-12;

#[derive(Debug)]
struct Topology {
    n_vertices: usize,
    faces: Vec<[usize; 3]>,
    vertex_faces: Vec<Vec<usize>>,
    vertex_neighbors: Vec<Vec<usize>>,
    edges: Vec<[usize; 2]>,
    edge_face_counts: Vec<usize>,
    boundary: Vec<bool>,
    face_neighbors: Vec<Vec<usize>>,
}

impl Topology {
    fn build(n_vertices: usize, faces: Vec<[usize; 3]>) -> Result<Self> {
        if faces.is_empty() {
            return Err(Error::EmptyMesh);
        }
        for (f, face) in faces.iter().enumerate() {
            for &index in face {
                if index >= n_vertices {
                    return Err(Error::InvalidFaceIndex {
                        face: f,
                        index,
                        n_vertices,
                    });
                }
            }
            if face[0] == face[1] || face[0] == face[2] {
                return Err(Error::RepeatedVertex {
                    face: f,
                    vertex: face[0],
                });
            }
            if face[1] == face[2] {
                return Err(Error::RepeatedVertex {
                    face: f,
                    vertex: face[1],
                });
            }
        }

        let mut vertex_faces = vec![Vec::new(); n_vertices];
        let mut edge_counts: BTreeMap<[usize; 2], usize> = BTreeMap::new();
        for (f, face) in faces.iter().enumerate() {
            for k in 0..3 {
                vertex_faces[face[k]].push(f);
                let (a, b) = (face[k], face[(k + 1) % 3]);
                *edge_counts.entry([a.min(b), a.max(b)]).or_insert(0) += 1;
            }
        }

        let mut vertex_neighbors = vec![Vec::new(); n_vertices];
        let mut boundary = vec![false; n_vertices];
        let mut edges = Vec::with_capacity(edge_counts.len());
        let mut edge_face_counts = Vec::with_capacity(edge_counts.len());
        for (&[a, b], &count) in &edge_counts {
            vertex_neighbors[a].push(b);
            vertex_neighbors[b].push(a);
            if count == 1 {
                boundary[a] = true;
                boundary[b] = true;
            }
            edges.push([a, b]);
            edge_face_counts.push(count);
        }
        for list in &mut vertex_neighbors {
            list.sort_unstable();
        }

        let face_neighbors = faces
            .iter()
            .enumerate()
            .map(|(f, face)| {
                let mut ring: Vec<usize> = face
                    .iter()
                    .flat_map(|&v| vertex_faces[v].iter().copied())
                    .filter(|&g| g != f)
                    .collect();
                ring.sort_unstable();
                ring.dedup();
                ring
            })
            .collect();

        Ok(Self {
            n_vertices,
            faces,
            vertex_faces,
            vertex_neighbors,
            edges,
            edge_face_counts,
            boundary,
            face_neighbors,
        })
    }
}

/// Indexed triangle mesh. Faces are counter-clockwise vertex-index triples.
#[derive(Debug, Clone)]
pub struct Mesh {
    vertices: Vec<Vec3>,
    topology: Arc<Topology>,
    mean_edge_length: f64,
}

/// Averaging scheme for vertex normals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VertexNormalScheme {
    /// Weight each incident face by its corner angle at the vertex.
    #[default]
    AngleWeighted,
    /// Weight each incident face by its area.
    AreaWeighted,
}

impl Mesh {
    /// Builds a mesh and its derived adjacency, edge and boundary sets.
    pub fn new(vertices: Vec<Vec3>, faces: Vec<[usize; 3]>) -> Result<Self> {
        if vertices.iter().any(|v| !v.iter().all(|c| c.is_finite())) {
            return Err(Error::NonFinite("vertex positions"));
        }
        let topology = Arc::new(Topology::build(vertices.len(), faces)?);
        Ok(Self::assemble(vertices, topology))
    }

    /// Convenience constructor from plain coordinate arrays.
    pub fn from_arrays(vertices: &[[f64; 3]], faces: &[[usize; 3]]) -> Result<Self> {
        Self::new(
            vertices.iter().map(|p| Vec3::new(p[0], p[1], p[2])).collect(),
            faces.to_vec(),
        )
    }

    /// Same topology, new vertex positions.
    pub fn with_vertices(&self, vertices: Vec<Vec3>) -> Result<Self> {
        if vertices.len() != self.n_vertices() {
            return Err(Error::DimensionMismatch {
                expected: self.n_vertices(),
                found: vertices.len(),
            });
        }
        if vertices.iter().any(|v| !v.iter().all(|c| c.is_finite())) {
            return Err(Error::NonFinite("vertex positions"));
        }
        Ok(Self::assemble(vertices, Arc::clone(&self.topology)))
    }

    fn assemble(vertices: Vec<Vec3>, topology: Arc<Topology>) -> Self {
        let total: f64 = topology
            .edges
            .iter()
            .map(|&[a, b]| (vertices[a] - vertices[b]).norm())
            .sum();
        let mean_edge_length = if topology.edges.is_empty() {
            0.0
        } else {
            total / topology.edges.len() as f64
        };
        Self {
            vertices,
            topology,
            mean_edge_length,
        }
    }

    pub fn vertices(&self) -> &[Vec3] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> Vec3 {
        self.vertices[v]
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.topology.faces
    }

    pub fn face(&self, f: usize) -> [usize; 3] {
        self.topology.faces[f]
    }

    pub fn n_vertices(&self) -> usize {
        self.topology.n_vertices
    }

    pub fn n_faces(&self) -> usize {
        self.topology.faces.len()
    }

    /// Undirected edges `[a, b]` with `a < b`, ascending.
    pub fn edges(&self) -> &[[usize; 2]] {
        &self.topology.edges
    }

    /// Number of faces incident to each edge, aligned with [`Mesh::edges`].
    pub fn edge_face_counts(&self) -> &[usize] {
        &self.topology.edge_face_counts
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.topology.boundary[v]
    }

    pub fn boundary_vertices(&self) -> Vec<usize> {
        (0..self.n_vertices()).filter(|&v| self.is_boundary(v)).collect()
    }

    /// Faces containing `v`, ascending.
    pub fn vertex_face_ring(&self, v: usize) -> &[usize] {
        &self.topology.vertex_faces[v]
    }

    /// Vertices sharing an edge with `v`, ascending.
    pub fn vertex_neighbors(&self, v: usize) -> &[usize] {
        &self.topology.vertex_neighbors[v]
    }

    /// Faces sharing at least one vertex with `f`, excluding `f`, ascending.
    pub fn face_neighborhood(&self, f: usize) -> &[usize] {
        &self.topology.face_neighbors[f]
    }

    /// True when both meshes were built from the same face list.
    pub fn same_topology(&self, other: &Mesh) -> bool {
        Arc::ptr_eq(&self.topology, &other.topology)
            || (self.n_vertices() == other.n_vertices() && self.faces() == other.faces())
    }

    pub fn mean_edge_length(&self) -> f64 {
        self.mean_edge_length
    }

    pub fn face_positions(&self, f: usize) -> [Vec3; 3] {
        let [a, b, c] = self.topology.faces[f];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    fn face_cross(&self, f: usize) -> Vec3 {
        let [a, b, c] = self.face_positions(f);
        (b - a).cross(&(c - a))
    }

    pub fn face_centroid(&self, f: usize) -> Vec3 {
        let [a, b, c] = self.face_positions(f);
        (a + b + c) / 3.0
    }

    pub fn face_area(&self, f: usize) -> f64 {
        0.5 * self.face_cross(f).norm()
    }

    pub fn mean_face_area(&self) -> f64 {
        (0..self.n_faces()).map(|f| self.face_area(f)).sum::<f64>() / self.n_faces() as f64
    }

    pub fn is_degenerate(&self, f: usize) -> bool {
        let threshold = DEGENERATE_AREA_EPS * self.mean_edge_length * self.mean_edge_length;
        self.face_cross(f).norm() <= threshold
    }

    /// Unit normal of the face plane, right-handed with respect to the
    /// counter-clockwise vertex order.
    pub fn face_normal(&self, f: usize) -> Result<Vec3> {
        if f >= self.n_faces() {
            return Err(Error::IndexOutOfRange {
                index: f,
                len: self.n_faces(),
            });
        }
        if self.is_degenerate(f) {
            return Err(Error::DegenerateFace { face: f });
        }
        Ok(self.face_cross(f).normalize())
    }

    /// Geometric face normals; zero-area faces are flagged.
    pub fn face_normals(&self) -> NormalField {
        let mut values = Vec::with_capacity(self.n_faces());
        let mut valid = Vec::with_capacity(self.n_faces());
        for f in 0..self.n_faces() {
            match self.face_normal(f) {
                Ok(n) => {
                    values.push(n);
                    valid.push(true);
                }
                Err(_) => {
                    values.push(Vec3::zeros());
                    valid.push(false);
                }
            }
        }
        NormalField {
            domain: NormalDomain::Face,
            values,
            valid,
        }
    }

    /// Interior angles (radians) at the three corners of `f`, in face order.
    /// Zero-area faces yield `[0, 0, pi]`.
    pub fn corner_angles(&self, f: usize) -> [f64; 3] {
        if self.is_degenerate(f) {
            return [0.0, 0.0, std::f64::consts::PI];
        }
        let p = self.face_positions(f);
        let mut angles = [0.0; 3];
        for k in 0..3 {
            let u = p[(k + 1) % 3] - p[k];
            let w = p[(k + 2) % 3] - p[k];
            angles[k] = u.cross(&w).norm().atan2(u.dot(&w));
        }
        angles
    }

    /// Corner angle of face `f` at vertex `v`, or `None` if `v` is not a
    /// corner of `f`.
    pub fn corner_angle_at(&self, f: usize, v: usize) -> Option<f64> {
        let face = self.face(f);
        let k = face.iter().position(|&x| x == v)?;
        Some(self.corner_angles(f)[k])
    }

    /// Normal at `v` from the mesh's own face normals.
    pub fn vertex_normal(&self, v: usize, scheme: VertexNormalScheme) -> Result<Vec3> {
        if v >= self.n_vertices() {
            return Err(Error::IndexOutOfRange {
                index: v,
                len: self.n_vertices(),
            });
        }
        let normals = self.face_normals();
        self.weighted_vertex_normal(v, &normals, scheme)
            .ok_or(Error::IsolatedVertex { vertex: v })
    }

    /// Per-vertex normals from the mesh's own face normals.
    pub fn vertex_normals(&self, scheme: VertexNormalScheme) -> NormalField {
        self.vertex_normals_from(&self.face_normals(), scheme)
    }

    /// Per-vertex normals averaged from an arbitrary per-face field, using
    /// weights from the current geometry. Vertices without a usable incident
    /// face are flagged.
    pub fn vertex_normals_from(
        &self,
        face_normals: &NormalField,
        scheme: VertexNormalScheme,
    ) -> NormalField {
        let mut values = Vec::with_capacity(self.n_vertices());
        let mut valid = Vec::with_capacity(self.n_vertices());
        for v in 0..self.n_vertices() {
            match self.weighted_vertex_normal(v, face_normals, scheme) {
                Some(n) => {
                    values.push(n);
                    valid.push(true);
                }
                None => {
                    values.push(Vec3::zeros());
                    valid.push(false);
                }
            }
        }
        NormalField {
            domain: NormalDomain::Vertex,
            values,
            valid,
        }
    }

    fn weighted_vertex_normal(
        &self,
        v: usize,
        face_normals: &NormalField,
        scheme: VertexNormalScheme,
    ) -> Option<Vec3> {
        let mut sum = Vec3::zeros();
        for &f in self.vertex_face_ring(v) {
            let Some(n) = face_normals.get(f) else {
                continue;
            };
            if self.is_degenerate(f) {
                continue;
            }
            let weight = match scheme {
                VertexNormalScheme::AngleWeighted => self.corner_angle_at(f, v)?,
                VertexNormalScheme::AreaWeighted => self.face_area(f),
            };
            sum += weight * n;
        }
        let norm = sum.norm();
        (norm > 0.0 && norm.is_finite()).then(|| sum / norm)
    }

    /// Mean length of the edges incident to `v`.
    pub fn local_scale(&self, v: usize) -> Result<f64> {
        let neighbors = self.vertex_neighbors(v);
        if neighbors.is_empty() {
            return Err(Error::IsolatedVertex { vertex: v });
        }
        let p = self.vertices[v];
        let total: f64 = neighbors.iter().map(|&u| (self.vertices[u] - p).norm()).sum();
        Ok(total / neighbors.len() as f64)
    }

    /// Local scale of every vertex; zero for vertices without edges.
    pub fn local_scales(&self) -> LocalScale {
        LocalScale(
            (0..self.n_vertices())
                .map(|v| self.local_scale(v).unwrap_or(0.0))
                .collect(),
        )
    }
}

/// Which index space a [`NormalField`] lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalDomain {
    Face,
    Vertex,
}

/// Per-face or per-vertex unit normals. Entries that could not be computed
/// (zero-area faces, isolated vertices) are flagged and hold a zero vector.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalField {
    domain: NormalDomain,
    values: Vec<Vec3>,
    valid: Vec<bool>,
}

impl NormalField {
    /// Normalizes every vector; near-zero or non-finite vectors are rejected.
    pub fn normalized(domain: NormalDomain, raw: Vec<Vec3>) -> Result<Self> {
        let mut values = raw;
        for (index, n) in values.iter_mut().enumerate() {
            if !n.iter().all(|c| c.is_finite()) {
                return Err(Error::NonFinite("normal field"));
            }
            let norm = n.norm();
            if norm < 1e-12 {
                return Err(Error::ZeroNormal { index });
            }
            *n /= norm;
        }
        let valid = vec![true; values.len()];
        Ok(Self {
            domain,
            values,
            valid,
        })
    }

    /// Builds a field from vectors with explicit validity flags. Valid
    /// entries are renormalized; flagged entries are zeroed.
    pub fn with_flags(domain: NormalDomain, values: Vec<Vec3>, valid: Vec<bool>) -> Result<Self> {
        if values.len() != valid.len() {
            return Err(Error::DimensionMismatch {
                expected: values.len(),
                found: valid.len(),
            });
        }
        let mut values = values;
        for (index, (n, &ok)) in values.iter_mut().zip(&valid).enumerate() {
            if !ok {
                *n = Vec3::zeros();
                continue;
            }
            let norm = n.norm();
            if !norm.is_finite() {
                return Err(Error::NonFinite("normal field"));
            }
            if norm < 1e-12 {
                return Err(Error::ZeroNormal { index });
            }
            *n /= norm;
        }
        Ok(Self {
            domain,
            values,
            valid,
        })
    }

    /// A field repeating one direction `len` times.
    pub fn constant(domain: NormalDomain, direction: Vec3, len: usize) -> Result<Self> {
        Self::normalized(domain, vec![direction; len])
    }

    pub fn domain(&self) -> NormalDomain {
        self.domain
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// The normal at `i`, or `None` if flagged.
    pub fn get(&self, i: usize) -> Option<Vec3> {
        self.valid[i].then(|| self.values[i])
    }

    pub fn is_valid(&self, i: usize) -> bool {
        self.valid[i]
    }

    /// Raw storage; flagged entries are zero.
    pub fn values(&self) -> &[Vec3] {
        &self.values
    }

    pub fn flagged(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.valid[i]).collect()
    }

    pub(crate) fn valid_mask(&self) -> &[bool] {
        &self.valid
    }
}

/// Per-vertex local sampling scale (mean incident edge length).
#[derive(Debug, Clone, PartialEq)]
pub struct LocalScale(Vec<f64>);

impl LocalScale {
    pub fn get(&self, v: usize) -> f64 {
        self.0[v]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    macro_rules! assert_close {
        ($a:expr, $b:expr, $tol:expr) => {{
            let (a, b): (f64, f64) = ($a, $b);
            assert!((a - b).abs() <= $tol, "{} != {} (tol {})", a, b, $tol);
        }};
    }

    fn triangle() -> Mesh {
        Mesh::from_arrays(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], &[[0, 1, 2]])
            .unwrap()
    }

    fn tetrahedron() -> Mesh {
        Mesh::from_arrays(
            &[
                [0.0, 0.0, 0.0],
                [1.0, 0.0, 0.0],
                [0.0, 1.0, 0.0],
                [0.0, 0.0, 1.0],
            ],
            &[[0, 2, 1], [0, 1, 3], [1, 2, 3], [0, 3, 2]],
        )
        .unwrap()
    }

    /// (n+1)^2 unit grid, each cell split along its (i,j)-(i+1,j+1) diagonal.
    fn grid(n: usize) -> Mesh {
        let mut vertices = Vec::new();
        for j in 0..=n {
            for i in 0..=n {
                vertices.push([i as f64, j as f64, 0.0]);
            }
        }
        let idx = |i: usize, j: usize| j * (n + 1) + i;
        let mut faces = Vec::new();
        for j in 0..n {
            for i in 0..n {
                faces.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
                faces.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
            }
        }
        Mesh::from_arrays(&vertices, &faces).unwrap()
    }

    #[test]
    fn single_triangle_is_all_boundary() {
        let mesh = triangle();
        assert_eq!(mesh.edges().len(), 3);
        assert_eq!(mesh.boundary_vertices(), vec![0, 1, 2]);
    }

    #[test]
    fn tetrahedron_is_closed() {
        let mesh = tetrahedron();
        assert!(mesh.boundary_vertices().is_empty());
        assert_eq!(mesh.edges().len(), 6);
        assert!(mesh.edge_face_counts().iter().all(|&c| c == 2));
    }

    #[test]
    fn rejects_bad_faces() {
        let verts = [[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]];
        match Mesh::from_arrays(&verts, &[[0, 0, 1]]) {
            Err(Error::RepeatedVertex { face: 0, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        match Mesh::from_arrays(&verts, &[[0, 1, 2], [0, 1, 5]]) {
            Err(Error::InvalidFaceIndex { face: 1, index: 5, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            Mesh::from_arrays(&verts, &[]),
            Err(Error::EmptyMesh)
        ));
    }

    #[test]
    fn face_normal_orientation() {
        let mesh = triangle();
        assert_eq!(mesh.face_normal(0).unwrap(), Vec3::new(0.0, 0.0, 1.0));
        let flipped =
            Mesh::from_arrays(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], &[[0, 2, 1]])
                .unwrap();
        assert_eq!(flipped.face_normal(0).unwrap(), Vec3::new(0.0, 0.0, -1.0));
    }

    #[test]
    fn face_normal_on_oblique_plane() {
        let mesh =
            Mesh::from_arrays(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]], &[[0, 1, 2]])
                .unwrap();
        let n = mesh.face_normal(0).unwrap();
        let expected = Vec3::new(1.0, 1.0, 1.0) / 3f64.sqrt();
        assert!((n - expected).norm() < 1e-15);
    }

    #[test]
    fn centroid_and_area() {
        let mesh = triangle();
        assert!((mesh.face_centroid(0) - Vec3::new(1.0 / 3.0, 1.0 / 3.0, 0.0)).norm() < 1e-15);
        assert_close!(mesh.face_area(0), 0.5, 1e-15);

        let h = 3f64.sqrt();
        let equilateral =
            Mesh::from_arrays(&[[0.0, 0.0, 0.0], [2.0, 0.0, 0.0], [1.0, h, 0.0]], &[[0, 1, 2]])
                .unwrap();
        assert_close!(equilateral.face_area(0), 3f64.sqrt(), 1e-14);
    }

    #[test]
    fn collinear_face_is_flagged() {
        let mesh = Mesh::from_arrays(
            &[
                [0.0, 0.0, 0.0],
                [1.0, 0.0, 0.0],
                [2.0, 0.0, 0.0],
                [0.0, 1.0, 0.0],
            ],
            &[[0, 1, 2], [0, 1, 3]],
        )
        .unwrap();
        assert_eq!(mesh.face_area(0), 0.0);
        assert!(matches!(
            mesh.face_normal(0),
            Err(Error::DegenerateFace { face: 0 })
        ));
        let normals = mesh.face_normals();
        assert_eq!(normals.flagged(), vec![0]);
        // The degenerate face is skipped in the vertex average.
        let n = mesh
            .vertex_normal(0, VertexNormalScheme::AngleWeighted)
            .unwrap();
        assert_eq!(n, Vec3::new(0.0, 0.0, 1.0));
        assert_eq!(mesh.corner_angles(0), [0.0, 0.0, std::f64::consts::PI]);
    }

    #[test]
    fn vertex_normals_on_flat_grid_and_pyramid() {
        let mesh = grid(3);
        for scheme in [
            VertexNormalScheme::AngleWeighted,
            VertexNormalScheme::AreaWeighted,
        ] {
            let n = mesh.vertex_normal(5, scheme).unwrap();
            assert_eq!(n, Vec3::new(0.0, 0.0, 1.0));
        }

        let pyramid = Mesh::from_arrays(
            &[
                [0.0, 0.0, 1.0],
                [1.0, 0.0, 0.0],
                [0.0, 1.0, 0.0],
                [-1.0, 0.0, 0.0],
                [0.0, -1.0, 0.0],
            ],
            &[[0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 1]],
        )
        .unwrap();
        let n = pyramid
            .vertex_normal(0, VertexNormalScheme::AngleWeighted)
            .unwrap();
        assert!((n - Vec3::new(0.0, 0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn cube_corner_area_weighted() {
        // Three equal right triangles meeting at the origin, one on each
        // coordinate plane, oriented outward from the positive octant's
        // complement (normals +x, +y, +z).
        let mesh = Mesh::from_arrays(
            &[
                [0.0, 0.0, 0.0],
                [0.0, 1.0, 0.0],
                [0.0, 0.0, 1.0],
                [1.0, 0.0, 0.0],
            ],
            &[[0, 1, 2], [0, 2, 3], [0, 3, 1]],
        )
        .unwrap();
        let normals = mesh.face_normals();
        assert_eq!(normals.get(0).unwrap(), Vec3::new(1.0, 0.0, 0.0));
        assert_eq!(normals.get(1).unwrap(), Vec3::new(0.0, 1.0, 0.0));
        assert_eq!(normals.get(2).unwrap(), Vec3::new(0.0, 0.0, 1.0));
        let n = mesh
            .vertex_normal(0, VertexNormalScheme::AreaWeighted)
            .unwrap();
        assert!((n - Vec3::new(1.0, 1.0, 1.0) / 3f64.sqrt()).norm() < 1e-15);
    }

    #[test]
    fn isolated_vertex_has_no_normal_or_scale() {
        let mesh = Mesh::from_arrays(
            &[[0.0; 3], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [5.0, 5.0, 5.0]],
            &[[0, 1, 2]],
        )
        .unwrap();
        assert!(matches!(
            mesh.vertex_normal(3, VertexNormalScheme::AngleWeighted),
            Err(Error::IsolatedVertex { vertex: 3 })
        ));
        assert!(mesh.local_scale(3).is_err());
        assert_eq!(mesh.local_scales().get(3), 0.0);
        assert_eq!(mesh.vertex_normals(VertexNormalScheme::AngleWeighted).flagged(), vec![3]);
    }

    #[test]
    fn rings_on_grid_and_tetrahedron() {
        let mesh = grid(3);
        // Interior vertex (1,1) has index 5.
        assert_eq!(mesh.vertex_face_ring(5).len(), 6);
        // Corners: (0,0) touches one face, (3,0) touches one, (0,3) two... on
        // this diagonal convention (0,0) and (3,3) get two faces.
        let corners = [0, 3, 12, 15];
        let counts: Vec<usize> = corners
            .iter()
            .map(|&v| mesh.vertex_face_ring(v).len())
            .collect();
        let brute: Vec<usize> = corners
            .iter()
            .map(|&v| mesh.faces().iter().filter(|f| f.contains(&v)).count())
            .collect();
        assert_eq!(counts, brute);
        assert_eq!(counts, vec![2, 1, 1, 2]);

        let tet = tetrahedron();
        for v in 0..4 {
            assert_eq!(tet.vertex_face_ring(v).len(), 3);
        }
        for f in 0..4 {
            let expected: Vec<usize> = (0..4).filter(|&g| g != f).collect();
            assert_eq!(tet.face_neighborhood(f), expected.as_slice());
        }
        assert!(triangle().face_neighborhood(0).is_empty());
    }

    #[test]
    fn interior_grid_face_has_twelve_neighbors() {
        let mesh = grid(4);
        // Lower triangle of cell (1,1).
        let f = 2 * (4 + 1);
        assert_eq!(mesh.face(f), [6, 7, 12]);
        assert_eq!(mesh.face_neighborhood(f).len(), 12);
    }

    #[test]
    fn local_scale_values() {
        let mesh = grid(3);
        assert_close!(
            mesh.local_scale(5).unwrap(),
            (4.0 + 2.0 * 2f64.sqrt()) / 6.0,
            1e-15
        );
        assert_close!(triangle().local_scale(0).unwrap(), 1.0, 1e-15);
        let tet = Mesh::from_arrays(
            &[
                [1.0, 1.0, 1.0],
                [1.0, -1.0, -1.0],
                [-1.0, 1.0, -1.0],
                [-1.0, -1.0, 1.0],
            ],
            &[[0, 1, 2], [0, 3, 1], [0, 2, 3], [1, 3, 2]],
        )
        .unwrap();
        for v in 0..4 {
            assert_close!(tet.local_scale(v).unwrap(), 8f64.sqrt(), 1e-14);
        }
    }

    #[test]
    fn normal_field_normalizes_and_rejects_zero() {
        let field = NormalField::normalized(
            NormalDomain::Vertex,
            vec![Vec3::new(0.0, 0.0, 2.0), Vec3::new(3.0, 4.0, 0.0)],
        )
        .unwrap();
        assert_eq!(field.get(0).unwrap(), Vec3::new(0.0, 0.0, 1.0));
        assert!((field.get(1).unwrap() - Vec3::new(0.6, 0.8, 0.0)).norm() < 1e-15);
        assert!(matches!(
            NormalField::normalized(NormalDomain::Vertex, vec![Vec3::zeros()]),
            Err(Error::ZeroNormal { index: 0 })
        ));
    }

    #[test]
    fn with_vertices_keeps_topology() {
        let mesh = grid(2);
        let moved: Vec<Vec3> = mesh.vertices().iter().map(|p| p * 2.0).collect();
        let other = mesh.with_vertices(moved).unwrap();
        assert!(other.same_topology(&mesh));
        assert_close!(other.mean_edge_length(), 2.0 * mesh.mean_edge_length(), 1e-14);
        assert!(mesh.with_vertices(vec![Vec3::zeros()]).is_err());
    }
}
