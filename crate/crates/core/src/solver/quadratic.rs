use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::mesh::{Mesh, Vec3};
use crate::sparse::{dot, flatten, max_abs, norm_sq, unflatten, SparseBlockOperator};

use super::{IterativeMethod, SolverParams};

/// Frozen quadratic cost `|x - v|^2 + lambda_v |L x|^2 + eta |K x|^2`.
#[derive(Debug, Clone)]
pub struct QuadraticProblem {
    observed: Vec<Vec3>,
    laplacian: SparseBlockOperator,
    laplacian_t: SparseBlockOperator,
    fairness: SparseBlockOperator,
    fairness_t: SparseBlockOperator,
    lambda_v: f64,
    eta: f64,
}

/// Convergence record of one minimization.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    pub converged: bool,
    /// Cost before the first step and after every accepted step.
    pub cost_history: Vec<f64>,
    pub final_cost: f64,
    /// Infinity norm of the gradient at the returned point.
    pub grad_norm_inf: f64,
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub vertices: Vec<Vec3>,
    pub report: SolveReport,
}

impl QuadraticProblem {
    pub fn new(
        observed: Vec<Vec3>,
        laplacian: SparseBlockOperator,
        fairness: SparseBlockOperator,
        lambda_v: f64,
        eta: f64,
    ) -> Result<Self> {
        let n = observed.len();
        for op in [&laplacian, &fairness] {
            if op.n_cols() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: op.n_cols(),
                });
            }
        }
        if !laplacian.is_finite() || !fairness.is_finite() {
            return Err(Error::NonFinite("operator blocks"));
        }
        if !observed.iter().all(|v| v.iter().all(|c| c.is_finite())) {
            return Err(Error::NonFinite("observed vertices"));
        }
        if !(lambda_v.is_finite() && eta.is_finite()) {
            return Err(Error::NonFinite("term weights"));
        }
        Ok(Self {
            observed,
            laplacian_t: laplacian.transpose(),
            laplacian,
            fairness_t: fairness.transpose(),
            fairness,
            lambda_v,
            eta,
        })
    }

    pub fn observed(&self) -> &[Vec3] {
        &self.observed
    }

    fn check_len(&self, x: &[Vec3]) -> Result<()> {
        if x.len() != self.observed.len() {
            return Err(Error::DimensionMismatch {
                expected: self.observed.len(),
                found: x.len(),
            });
        }
        Ok(())
    }

    pub fn cost(&self, x: &[Vec3]) -> Result<f64> {
        self.check_len(x)?;
        let data: f64 = x
            .iter()
            .zip(&self.observed)
            .map(|(a, b)| (a - b).norm_squared())
            .sum();
        let lx = self.laplacian.apply(x)?;
        let kx = self.fairness.apply(x)?;
        Ok(data + self.lambda_v * norm_sq(&lx) + self.eta * norm_sq(&kx))
    }

    /// `(I + lambda_v L^T L + eta K^T K) x`.
    pub fn apply_system(&self, x: &[Vec3]) -> Result<Vec<Vec3>> {
        self.check_len(x)?;
        let ltl = self.laplacian_t.apply(&self.laplacian.apply(x)?)?;
        let ktk = self.fairness_t.apply(&self.fairness.apply(x)?)?;
        Ok(x.iter()
            .zip(ltl.iter().zip(&ktk))
            .map(|(xi, (li, ki))| xi + self.lambda_v * li + self.eta * ki)
            .collect())
    }

    pub fn cost_and_gradient(&self, x: &[Vec3]) -> Result<(f64, Vec<Vec3>)> {
        let ax = self.apply_system(x)?;
        let gradient: Vec<Vec3> = ax
            .iter()
            .zip(&self.observed)
            .map(|(a, v)| 2.0 * (a - v))
            .collect();
        Ok((self.cost(x)?, gradient))
    }

    /// Dense system matrix `I + lambda_v L^T L + eta K^T K`.
    pub fn dense_system(&self) -> DMatrix<f64> {
        let n = 3 * self.observed.len();
        let l = self.laplacian.to_dense();
        let k = self.fairness.to_dense();
        DMatrix::identity(n, n) + self.lambda_v * l.transpose() * l + self.eta * k.transpose() * k
    }

    /// Closed-form minimizer through a dense Cholesky factorization. Cost is
    /// cubic in the vertex count; intended for small meshes.
    pub fn solve_direct(&self) -> Result<Vec<Vec3>> {
        if self.lambda_v == 0.0 && self.eta == 0.0 {
            return Ok(self.observed.clone());
        }
        let cholesky = self
            .dense_system()
            .cholesky()
            .ok_or(Error::NotPositiveDefinite)?;
        Ok(unflatten(&cholesky.solve(&flatten(&self.observed))))
    }

    /// Iterative minimization starting from the observed vertices. Stops
    /// when the gradient's infinity norm drops to `tolerance`.
    pub fn solve_iterative(
        &self,
        method: IterativeMethod,
        max_iters: usize,
        tolerance: f64,
    ) -> Result<Solution> {
        match method {
            IterativeMethod::SteepestDescent => self.steepest_descent(max_iters, tolerance),
            IterativeMethod::ConjugateGradient => self.conjugate_gradient(max_iters, tolerance),
        }
    }

    fn steepest_descent(&self, max_iters: usize, tolerance: f64) -> Result<Solution> {
        const ARMIJO: f64 = 1e-4;
        let mut x = self.observed.clone();
        let (mut cost, mut grad) = self.cost_and_gradient(&x)?;
        let mut history = vec![cost];
        let mut iterations = 0;
        while iterations < max_iters && max_abs(&grad) > tolerance {
            let slope = norm_sq(&grad);
            let mut step = 1.0;
            let accepted = loop {
                let candidate: Vec<Vec3> =
                    x.iter().zip(&grad).map(|(xi, gi)| xi - step * gi).collect();
                let candidate_cost = self.cost(&candidate)?;
                if candidate_cost <= cost - ARMIJO * step * slope {
                    break Some(candidate);
                }
                step *= 0.5;
                if step < 1e-30 {
                    break None;
                }
            };
            let Some(next) = accepted else { break };
            x = next;
            (cost, grad) = self.cost_and_gradient(&x)?;
            history.push(cost);
            iterations += 1;
        }
        let grad_norm_inf = max_abs(&grad);
        Ok(Solution {
            vertices: x,
            report: SolveReport {
                iterations,
                converged: grad_norm_inf <= tolerance,
                cost_history: history,
                final_cost: cost,
                grad_norm_inf,
            },
        })
    }

    fn conjugate_gradient(&self, max_iters: usize, tolerance: f64) -> Result<Solution> {
        let v = &self.observed;
        let vv = norm_sq(v);
        let mut x = v.clone();
        let mut history = vec![self.cost(&x)?];
        let mut iterations = 0;
        // The gradient is 2(Ax - v) = -2r; restart from the true residual
        // whenever the recursive one claims convergence.
        loop {
            let ax = self.apply_system(&x)?;
            let mut r: Vec<Vec3> = v.iter().zip(&ax).map(|(vi, ai)| vi - ai).collect();
            if 2.0 * max_abs(&r) <= tolerance || iterations >= max_iters {
                break;
            }
            let mut p = r.clone();
            let mut rr = norm_sq(&r);
            let restart_at = iterations;
            while iterations < max_iters {
                let ap = self.apply_system(&p)?;
                let curvature = dot(&p, &ap);
                if curvature.is_nan() || curvature <= 0.0 {
                    break;
                }
                let alpha = rr / curvature;
                for ((xi, ri), (pi, api)) in x.iter_mut().zip(r.iter_mut()).zip(p.iter().zip(&ap)) {
                    *xi += alpha * pi;
                    *ri -= alpha * api;
                }
                iterations += 1;
                history.push(vv - dot(&x, v) - dot(&x, &r));
                if 2.0 * max_abs(&r) <= tolerance {
                    break;
                }
                let rr_next = norm_sq(&r);
                let beta = rr_next / rr;
                rr = rr_next;
                for (pi, ri) in p.iter_mut().zip(&r) {
                    *pi = ri + beta * *pi;
                }
            }
            if iterations == restart_at {
                break;
            }
        }
        let (final_cost, grad) = self.cost_and_gradient(&x)?;
        let grad_norm_inf = max_abs(&grad);
        Ok(Solution {
            vertices: x,
            report: SolveReport {
                iterations,
                converged: grad_norm_inf <= tolerance,
                cost_history: history,
                final_cost,
                grad_norm_inf,
            },
        })
    }
}

/// Cost and gradient of the frozen quadratic at `candidate`.
pub fn cost_and_gradient(
    candidate: &[Vec3],
    observed: &[Vec3],
    laplacian: &SparseBlockOperator,
    fairness: &SparseBlockOperator,
    lambda_v: f64,
    eta: f64,
) -> Result<(f64, Vec<Vec3>)> {
    QuadraticProblem::new(
        observed.to_vec(),
        laplacian.clone(),
        fairness.clone(),
        lambda_v,
        eta,
    )?
    .cost_and_gradient(candidate)
}

/// Minimizes the frozen cost iteratively. The gradient tolerance is
/// `params.grad_tol` times the mesh's mean edge length.
pub fn solve_vertices(
    mesh: &Mesh,
    observed: &[Vec3],
    laplacian: &SparseBlockOperator,
    fairness: &SparseBlockOperator,
    params: &SolverParams,
) -> Result<Solution> {
    params.validate()?;
    if observed.len() != mesh.n_vertices() {
        return Err(Error::DimensionMismatch {
            expected: mesh.n_vertices(),
            found: observed.len(),
        });
    }
    let problem = QuadraticProblem::new(
        observed.to_vec(),
        laplacian.clone(),
        fairness.clone(),
        params.lambda_v,
        params.eta,
    )?;
    let tolerance = params.grad_tol * mesh.mean_edge_length().max(f64::MIN_POSITIVE);
    problem.solve_iterative(params.method, params.max_iters, tolerance)
}
