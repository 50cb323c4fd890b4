use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::mesh::{Mesh, Vec3};

/// Displaces every vertex by an independent isotropic Gaussian whose
/// per-coordinate standard deviation is `sigma_rel` times the mesh's mean
/// edge length. Samples are drawn x, y, z per vertex in index order from a
/// ChaCha8 stream seeded with `seed`.
pub fn add_gaussian_noise(mesh: &Mesh, sigma_rel: f64, seed: u64) -> Result<Mesh> {
    if !(sigma_rel >= 0.0 && sigma_rel.is_finite()) {
        return Err(Error::invalid("sigma_rel", "must be finite and non-negative"));
    }
    if sigma_rel == 0.0 {
        return Ok(mesh.clone());
    }
    let normal = Normal::new(0.0, sigma_rel * mesh.mean_edge_length())
        .map_err(|e| Error::invalid("sigma_rel", e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vertices = mesh
        .vertices()
        .iter()
        .map(|p| {
            let d = Vec3::new(normal.sample(&mut rng), normal.sample(&mut rng), normal.sample(&mut rng));
            p + d
        })
        .collect();
    mesh.with_vertices(vertices)
}
