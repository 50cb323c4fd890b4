//! Global mollification of a face-normal field.
//!
//! Minimizes
//!
//! ```text
//! sum_i |m_i - n_i|^2 + lambda_n sum_i sum_{j in N(i)} w_ij^2 |m_j - m_i|^2
//! subject to |m_i| = 1
//! ```
//!
//! by projected gradient descent: each step moves along the tangential part
//! of the gradient and renormalizes every normal. `N(i)` is the set of faces
//! sharing a vertex with face `i`, and `w_ij` is a bilateral weight on normal
//! difference and centroid distance scaled by the area of face `j`.
//!
//! Areas enter the objective divided by the mean face area, so `lambda_n`
//! does not depend on the mesh's units.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mesh::{Mesh, NormalDomain, NormalField, Vec3};
use crate::solver::{nonneg, positive};

#[derive(Debug, Clone, PartialEq)]
pub struct MollifyParams {
    /// Smoothness weight.
    pub lambda_n: f64,
    /// Bandwidth on normal differences (unitless).
    pub sigma1: f64,
    /// Bandwidth on centroid distances, in mean edge lengths.
    pub sigma2: f64,
    pub max_iters: usize,
    /// Stop when every tangential gradient component is at most this.
    pub grad_tol: f64,
    /// Recompute the bilateral weights from the current normals before
    /// every step; otherwise they are frozen at the input normals.
    pub reweight_every_iter: bool,
}

impl Default for MollifyParams {
    fn default() -> Self {
        Self {
            lambda_n: 2.0,
            sigma1: 0.4,
            sigma2: 1.0,
            max_iters: 50,
            grad_tol: 1e-8,
            reweight_every_iter: true,
        }
    }
}

impl MollifyParams {
    pub fn validate(&self) -> Result<()> {
        nonneg("lambda_n", self.lambda_n)?;
        positive("mollify sigma1", self.sigma1)?;
        positive("mollify sigma2", self.sigma2)?;
        positive("mollify grad_tol", self.grad_tol)
    }
}

/// Bilateral weight of neighbor face `j` seen from face `i`:
/// `A_j exp(-|n_j - n_i|^2 / (2 sigma1^2) - |c_j - c_i|^2 / (2 sigma2^2))`
/// with `sigma2` scaled by the mean edge length. Zero-area faces weigh zero.
pub fn mollify_weight(
    mesh: &Mesh,
    i: usize,
    j: usize,
    normals: &NormalField,
    params: &MollifyParams,
) -> Result<f64> {
    check_field(mesh, normals)?;
    if mesh.face_neighborhood(i).binary_search(&j).is_err() {
        return Err(Error::NotAdjacent { face: i, other: j });
    }
    let (Some(ni), Some(nj)) = (normals.get(i), normals.get(j)) else {
        return Ok(0.0);
    };
    if mesh.is_degenerate(j) {
        return Ok(0.0);
    }
    let spatial = spatial_factor(mesh, i, j, params.sigma2 * mesh.mean_edge_length());
    Ok(mesh.face_area(j) * spatial * range_factor(&ni, &nj, params.sigma1))
}

fn spatial_factor(mesh: &Mesh, i: usize, j: usize, sigma: f64) -> f64 {
    let d2 = (mesh.face_centroid(j) - mesh.face_centroid(i)).norm_squared();
    (-d2 / (2.0 * sigma * sigma)).exp()
}

fn range_factor(ni: &Vec3, nj: &Vec3, sigma: f64) -> f64 {
    (-(nj - ni).norm_squared() / (2.0 * sigma * sigma)).exp()
}

fn check_field(mesh: &Mesh, normals: &NormalField) -> Result<()> {
    if normals.domain() != NormalDomain::Face {
        return Err(Error::invalid("normals", "expected a per-face field"));
    }
    if normals.len() != mesh.n_faces() {
        return Err(Error::DimensionMismatch {
            expected: mesh.n_faces(),
            found: normals.len(),
        });
    }
    Ok(())
}

/// Smoothness objective with frozen weights.
#[derive(Debug, Clone)]
pub struct MollifyObjective {
    lambda_n: f64,
    observed: Vec<Vec3>,
    valid: Vec<bool>,
    /// Usable neighbors of every face (valid normal, non-degenerate), ascending.
    neighbors: Vec<Vec<usize>>,
    /// Area-normalized spatial weight per neighbor, fixed by the geometry.
    spatial: Vec<Vec<f64>>,
    sigma1: f64,
    /// Squared weights `w_ij^2` per neighbor.
    w2: Vec<Vec<f64>>,
    /// `w_ij^2 + w_ji^2` per neighbor.
    sym: Vec<Vec<f64>>,
}

impl MollifyObjective {
    /// Sets up the objective for `observed` with weights taken from
    /// `observed` itself.
    pub fn new(mesh: &Mesh, observed: &NormalField, params: &MollifyParams) -> Result<Self> {
        params.validate()?;
        check_field(mesh, observed)?;
        let valid = observed.valid_mask().to_vec();
        let usable: Vec<bool> = (0..mesh.n_faces())
            .map(|f| valid[f] && !mesh.is_degenerate(f))
            .collect();
        let mean_area = mesh.mean_face_area();
        let sigma2 = params.sigma2 * mesh.mean_edge_length();
        let (neighbors, spatial): (Vec<Vec<usize>>, Vec<Vec<f64>>) = (0..mesh.n_faces())
            .into_par_iter()
            .map(|i| {
                if !valid[i] {
                    return (Vec::new(), Vec::new());
                }
                mesh.face_neighborhood(i)
                    .iter()
                    .filter(|&&j| usable[j])
                    .map(|&j| (j, mesh.face_area(j) / mean_area * spatial_factor(mesh, i, j, sigma2)))
                    .unzip()
            })
            .unzip();
        let mut objective = Self {
            lambda_n: params.lambda_n,
            observed: observed.values().to_vec(),
            valid,
            neighbors,
            spatial,
            sigma1: params.sigma1,
            w2: Vec::new(),
            sym: Vec::new(),
        };
        let initial = objective.observed.clone();
        objective.reweight(&initial);
        Ok(objective)
    }

    /// Recomputes the range part of the weights from `normals`.
    pub fn reweight(&mut self, normals: &[Vec3]) {
        let sigma1 = self.sigma1;
        self.w2 = (0..normals.len())
            .into_par_iter()
            .map(|i| {
                self.neighbors[i]
                    .iter()
                    .zip(&self.spatial[i])
                    .map(|(&j, &s)| {
                        let w = s * range_factor(&normals[i], &normals[j], sigma1);
                        w * w
                    })
                    .collect()
            })
            .collect();
        let neighbors = &self.neighbors;
        let w2 = &self.w2;
        self.sym = (0..normals.len())
            .into_par_iter()
            .map(|i| {
                neighbors[i]
                    .iter()
                    .zip(&w2[i])
                    .map(|(&j, &wij)| {
                        // Neighborhoods are symmetric; j's list may still omit
                        // i if i itself is degenerate.
                        let wji = neighbors[j]
                            .binary_search(&i)
                            .map(|k| w2[j][k])
                            .unwrap_or(0.0);
                        wij + wji
                    })
                    .collect()
            })
            .collect();
    }

    pub fn smoothness(&self, normals: &[Vec3]) -> f64 {
        (0..normals.len())
            .map(|i| {
                self.neighbors[i]
                    .iter()
                    .zip(&self.w2[i])
                    .map(|(&j, &w)| w * (normals[j] - normals[i]).norm_squared())
                    .sum::<f64>()
            })
            .sum()
    }

    pub fn cost(&self, normals: &[Vec3]) -> f64 {
        let data: f64 = (0..normals.len())
            .filter(|&i| self.valid[i])
            .map(|i| (normals[i] - self.observed[i]).norm_squared())
            .sum();
        data + self.lambda_n * self.smoothness(normals)
    }

    /// Euclidean gradient of [`MollifyObjective::cost`] with frozen weights.
    pub fn gradient(&self, normals: &[Vec3]) -> Vec<Vec3> {
        (0..normals.len())
            .into_par_iter()
            .map(|k| {
                if !self.valid[k] {
                    return Vec3::zeros();
                }
                let pull = self.neighbors[k]
                    .iter()
                    .zip(&self.sym[k])
                    .fold(Vec3::zeros(), |acc, (&j, &s)| acc + s * (normals[k] - normals[j]));
                2.0 * (normals[k] - self.observed[k]) + 2.0 * self.lambda_n * pull
            })
            .collect()
    }

    /// Gershgorin bound on the Hessian's largest eigenvalue.
    fn curvature_bound(&self) -> f64 {
        let max_row = self
            .sym
            .iter()
            .map(|row| row.iter().sum::<f64>())
            .fold(0.0, f64::max);
        2.0 * (1.0 + 2.0 * self.lambda_n * max_row)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MollifyReport {
    pub iterations: usize,
    pub converged: bool,
    /// Objective (under the weights of that iteration) before the first
    /// step and after every accepted step.
    pub cost_history: Vec<f64>,
    /// Weighted smoothness energy alongside `cost_history`.
    pub smoothness_history: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct Mollified {
    pub normals: NormalField,
    pub report: MollifyReport,
}

/// Smooths a per-face normal field. Flagged entries stay flagged.
pub fn mollify_normals(mesh: &Mesh, normals: &NormalField, params: &MollifyParams) -> Result<Mollified> {
    check_field(mesh, normals)?;
    if normals.values().iter().any(|n| !n.iter().all(|c| c.is_finite())) {
        return Err(Error::NonFinite("face normals"));
    }
    let mut objective = MollifyObjective::new(mesh, normals, params)?;
    let mut current = normals.values().to_vec();
    let mut report = MollifyReport {
        iterations: 0,
        converged: false,
        cost_history: vec![objective.cost(&current)],
        smoothness_history: vec![objective.smoothness(&current)],
    };
    if params.lambda_n == 0.0 {
        report.converged = true;
        return Ok(Mollified {
            normals: normals.clone(),
            report,
        });
    }

    let max_step = 2.0 / objective.curvature_bound();
    let mut step = max_step;
    for iter in 0..params.max_iters {
        if params.reweight_every_iter && iter > 0 {
            objective.reweight(&current);
        }
        let cost = objective.cost(&current);
        let tangent: Vec<Vec3> = objective
            .gradient(&current)
            .iter()
            .zip(&current)
            .map(|(g, n)| g - g.dot(n) * n)
            .collect();
        let slope: f64 = tangent.iter().map(|g| g.norm_squared()).sum();
        if tangent.iter().map(|g| g.amax()).fold(0.0, f64::max) <= params.grad_tol {
            report.converged = true;
            break;
        }

        step = (2.0 * step).min(max_step);
        let accepted = loop {
            let candidate: Vec<Vec3> = current
                .iter()
                .zip(&tangent)
                .zip(&objective.valid)
                .map(|((n, g), &ok)| if ok { (n - step * g).normalize() } else { *n })
                .collect();
            let candidate_cost = objective.cost(&candidate);
            if candidate_cost <= cost - 1e-4 * step * slope {
                break Some((candidate, candidate_cost));
            }
            step *= 0.5;
            if step < 1e-20 * max_step {
                break None;
            }
        };
        let Some((next, next_cost)) = accepted else {
            break;
        };
        current = next;
        report.iterations += 1;
        report.cost_history.push(next_cost);
        report.smoothness_history.push(objective.smoothness(&current));
    }

    let normals = NormalField::with_flags(NormalDomain::Face, current, objective.valid.clone())?;
    Ok(Mollified { normals, report })
}
