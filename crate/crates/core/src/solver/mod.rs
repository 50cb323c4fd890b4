//! Global quadratic vertex optimization: data term, bilateral anisotropic
//! Laplacian and face-fairness penalty.
//!
//! The cost for candidate vertices `x` against observed vertices `v` is
//!
//! ```text
//! C(x) = |x - v|^2 + lambda_v |L x|^2 + eta |K x|^2
//! ```
//!
//! where `L` and `K` are assembled from the current geometry and normal
//! fields and then frozen, which makes `C` exactly quadratic with minimizer
//! `(I + lambda_v L^T L + eta K^T K)^-1 v`. Re-linearization (recomputing
//! weights and solving again) is left to the caller; see
//! [`crate::pipeline`].

mod fairness;
mod laplacian;
mod quadratic;

pub use fairness::{assemble_fairness, fairness_weight, fairness_weights, ring_centroid, FairnessWeights};
pub use laplacian::{assemble_laplacian, laplacian_weight, vertex_laplacian_terms, LaplacianTerm};
pub use quadratic::{cost_and_gradient, solve_vertices, QuadraticProblem, Solution, SolveReport};

use crate::error::{Error, Result};

/// Iterative scheme used to minimize the frozen quadratic cost.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IterativeMethod {
    /// Steepest descent with Armijo backtracking (step halving from 1.0).
    SteepestDescent,
    /// Linear conjugate gradients on the normal equations.
    #[default]
    ConjugateGradient,
}

/// Parameters of the vertex optimization.
///
/// `sigma1` and `sigma2` are in units of the per-vertex local scale.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverParams {
    /// Weight of the anisotropic Laplacian term.
    pub lambda_v: f64,
    /// Weight of the face-fairness term.
    pub eta: f64,
    /// Bandwidth of the normal-offset kernel.
    pub sigma1: f64,
    /// Bandwidth of the spatial kernel.
    pub sigma2: f64,
    /// Flatness offset subtracted from the mean pairwise ring normal dot.
    pub delta: f64,
    pub max_iters: usize,
    /// Gradient tolerance, relative to the mesh's mean edge length.
    pub grad_tol: f64,
    pub method: IterativeMethod,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            lambda_v: 1.0,
            eta: 1.0,
            sigma1: 0.35,
            sigma2: 1.0,
            delta: 0.2,
            max_iters: 2000,
            grad_tol: 1e-6,
            method: IterativeMethod::default(),
        }
    }
}

impl SolverParams {
    pub fn validate(&self) -> Result<()> {
        nonneg("lambda_v", self.lambda_v)?;
        nonneg("eta", self.eta)?;
        positive("sigma1", self.sigma1)?;
        positive("sigma2", self.sigma2)?;
        positive("grad_tol", self.grad_tol)?;
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::invalid("delta", format!("{} is not in (0, 1)", self.delta)));
        }
        Ok(())
    }
}

pub(crate) fn nonneg(name: &'static str, value: f64) -> Result<()> {
    if value.is_finite() && value >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("{value} must be finite and >= 0")))
    }
}

/// Strictly positive; infinity is allowed for bandwidths.
pub(crate) fn positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && !value.is_nan() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("{value} must be > 0")))
    }
}
