//! Synthetic meshes used by the experiments.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::mesh::{Mesh, NormalDomain, NormalField, Vec3};

/// Jitter applied to a collapsed vertex, per coordinate, in mean edge lengths.
pub const COLLAPSE_JITTER: f64 = 0.1;

/// Regular right-triangulated grid in the `z = 0` plane with unit spacing:
/// `(n + 1)^2` vertices and `2 n^2` faces, normals along `+z`.
pub fn grid_mesh(n: usize) -> Result<Mesh> {
    if n == 0 {
        return Err(Error::invalid("n", "grid needs at least one cell"));
    }
    let idx = |i: usize, j: usize| j * (n + 1) + i;
    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            vertices.push(Vec3::new(i as f64, j as f64, 0.0));
        }
    }
    let mut faces = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            faces.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)]);
            faces.push([idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    Mesh::new(vertices, faces)
}

/// Degrades a mesh without touching its topology: a `fraction` of the
/// interior edges (both endpoints off the boundary, no endpoint shared
/// between selected edges) have one endpoint moved onto the other, which is
/// then jittered in the plane of its vertex normal by a Gaussian of
/// [`COLLAPSE_JITTER`] mean edge lengths per coordinate.
pub fn collapse_edges(mesh: &Mesh, fraction: f64, seed: u64) -> Result<Mesh> {
    if !(0.0..1.0).contains(&fraction) {
        return Err(Error::invalid("fraction", "must lie in [0, 1)"));
    }
    if fraction == 0.0 {
        return Ok(mesh.clone());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut candidates: Vec<[usize; 2]> = mesh
        .edges()
        .iter()
        .copied()
        .filter(|&[a, b]| !mesh.is_boundary(a) && !mesh.is_boundary(b))
        .collect();
    let target = (fraction * candidates.len() as f64).round() as usize;
    candidates.shuffle(&mut rng);

    let jitter = Normal::new(0.0, COLLAPSE_JITTER * mesh.mean_edge_length())
        .map_err(|e| Error::invalid("fraction", e.to_string()))?;
    let mut used = vec![false; mesh.n_vertices()];
    let mut vertices = mesh.vertices().to_vec();
    let mut collapsed = 0;
    for [a, b] in candidates {
        if collapsed == target {
            break;
        }
        if used[a] || used[b] {
            continue;
        }
        used[a] = true;
        used[b] = true;
        let (keep, moved) = if rng.random::<bool>() { (a, b) } else { (b, a) };
        let normal = mesh
            .vertex_normal(moved, Default::default())
            .unwrap_or_else(|_| Vec3::z());
        let offset = Vec3::new(
            jitter.sample(&mut rng),
            jitter.sample(&mut rng),
            jitter.sample(&mut rng),
        );
        vertices[moved] = vertices[keep] + offset - offset.dot(&normal) * normal;
        collapsed += 1;
    }
    mesh.with_vertices(vertices)
}

/// Axis-aligned cube centered at the origin, each side split into
/// `subdivisions^2` squares of two triangles, outward oriented.
/// Sixteen subdivisions give 1538 vertices and 3072 faces.
pub fn cube(subdivisions: usize, side: f64) -> Result<Mesh> {
    if subdivisions == 0 {
        return Err(Error::invalid("subdivisions", "must be positive"));
    }
    if !(side > 0.0 && side.is_finite()) {
        return Err(Error::invalid("side", "must be positive and finite"));
    }
    let s = subdivisions as i64;
    let mut index: HashMap<[i64; 3], usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    let mut vertex_at = |key: [i64; 3]| -> usize {
        *index.entry(key).or_insert_with(|| {
            let p = key.map(|k| (k as f64 / s as f64 - 0.5) * side);
            vertices.push(Vec3::new(p[0], p[1], p[2]));
            vertices.len() - 1
        })
    };
    for axis in 0..3 {
        for outward in [false, true] {
            // (u, v, axis) is right-handed; swapping u and v flips the normal.
            let (mut u, mut v) = ((axis + 1) % 3, (axis + 2) % 3);
            if !outward {
                std::mem::swap(&mut u, &mut v);
            }
            let level = if outward { s } else { 0 };
            let key = |i: i64, j: i64| {
                let mut k = [0; 3];
                k[axis] = level;
                k[u] = i;
                k[v] = j;
                k
            };
            for j in 0..s {
                for i in 0..s {
                    let p00 = vertex_at(key(i, j));
                    let p10 = vertex_at(key(i + 1, j));
                    let p11 = vertex_at(key(i + 1, j + 1));
                    let p01 = vertex_at(key(i, j + 1));
                    faces.push([p00, p10, p11]);
                    faces.push([p00, p11, p01]);
                }
            }
        }
    }
    Mesh::new(vertices, faces)
}

const ICOSAHEDRON_FACES: [[usize; 3]; 20] = [
    [0, 11, 5],
    [0, 5, 1],
    [0, 1, 7],
    [0, 7, 10],
    [0, 10, 11],
    [1, 5, 9],
    [5, 11, 4],
    [11, 10, 2],
    [10, 7, 6],
    [7, 1, 8],
    [3, 9, 4],
    [3, 4, 2],
    [3, 2, 6],
    [3, 6, 8],
    [3, 8, 9],
    [4, 9, 5],
    [2, 4, 11],
    [6, 2, 10],
    [8, 6, 7],
    [9, 8, 1],
];

fn icosahedron_vertices() -> Vec<Vec3> {
    let t = (1.0 + 5f64.sqrt()) / 2.0;
    [
        [-1.0, t, 0.0],
        [1.0, t, 0.0],
        [-1.0, -t, 0.0],
        [1.0, -t, 0.0],
        [0.0, -1.0, t],
        [0.0, 1.0, t],
        [0.0, -1.0, -t],
        [0.0, 1.0, -t],
        [t, 0.0, -1.0],
        [t, 0.0, 1.0],
        [-t, 0.0, -1.0],
        [-t, 0.0, 1.0],
    ]
    .iter()
    .map(|p| Vec3::new(p[0], p[1], p[2]).normalize())
    .collect()
}

/// Geodesic sphere: every icosahedron face split into `frequency^2`
/// triangles and projected onto the sphere. `10 f^2 + 2` vertices and
/// `20 f^2` faces, outward oriented.
pub fn icosphere(frequency: usize, radius: f64) -> Result<Mesh> {
    if frequency == 0 {
        return Err(Error::invalid("frequency", "must be positive"));
    }
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::invalid("radius", "must be positive and finite"));
    }
    let base = icosahedron_vertices();
    let f = frequency;
    // A point is keyed by its nonzero barycentric weights on the base
    // corners, sorted by corner, so points on shared edges weld.
    let mut index: HashMap<Vec<(usize, usize)>, usize> = HashMap::new();
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for tri in ICOSAHEDRON_FACES {
        let mut point = |i: usize, j: usize| -> usize {
            let mut key: Vec<(usize, usize)> = [(tri[0], f - i - j), (tri[1], i), (tri[2], j)]
                .into_iter()
                .filter(|&(_, w)| w > 0)
                .collect();
            key.sort_unstable();
            *index.entry(key).or_insert_with(|| {
                let p = (base[tri[0]] * (f - i - j) as f64 + base[tri[1]] * i as f64 + base[tri[2]] * j as f64)
                    .normalize();
                vertices.push(p * radius);
                vertices.len() - 1
            })
        };
        for j in 0..f {
            for i in 0..f - j {
                let a = point(i, j);
                let b = point(i + 1, j);
                let c = point(i, j + 1);
                faces.push([a, b, c]);
                if i + j + 2 <= f {
                    let d = point(i + 1, j + 1);
                    faces.push([b, d, c]);
                }
            }
        }
    }
    Mesh::new(vertices, faces)
}

/// Outward unit normals of a sphere centered at the origin, per vertex.
pub fn sphere_vertex_normals(mesh: &Mesh) -> Result<NormalField> {
    NormalField::normalized(NormalDomain::Vertex, mesh.vertices().to_vec())
}

/// Height of the bump `amplitude sin(pi x / n) sin(pi y / n)` over the
/// `n x n` grid.
pub fn bump_height(x: f64, y: f64, n: usize, amplitude: f64) -> f64 {
    let k = std::f64::consts::PI / n as f64;
    amplitude * (k * x).sin() * (k * y).sin()
}

/// The `n x n` grid lifted onto the bump surface.
pub fn bump_mesh(n: usize, amplitude: f64) -> Result<Mesh> {
    let grid = grid_mesh(n)?;
    let lifted = grid
        .vertices()
        .iter()
        .map(|p| Vec3::new(p.x, p.y, bump_height(p.x, p.y, n, amplitude)))
        .collect();
    grid.with_vertices(lifted)
}

/// Flat `n x n` grid paired with the per-vertex unit normals of the
/// sinusoidal bump `z = bump_height(x, y)`.
pub fn sinusoid_bump(n: usize, amplitude: f64) -> Result<(Mesh, NormalField)> {
    let mesh = grid_mesh(n)?;
    let k = std::f64::consts::PI / n as f64;
    let normals = mesh
        .vertices()
        .iter()
        .map(|p| {
            let hx = amplitude * k * (k * p.x).cos() * (k * p.y).sin();
            let hy = amplitude * k * (k * p.x).sin() * (k * p.y).cos();
            Vec3::new(-hx, -hy, 1.0)
        })
        .collect();
    let normals = NormalField::normalized(NormalDomain::Vertex, normals)?;
    Ok((mesh, normals))
}
