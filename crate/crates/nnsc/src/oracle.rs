//! Independent reference solver for the component subproblem.
//!
//! Holding the basis fixed, the penalized objective is convex in S over
//! the non-negative orthant, so projected gradient descent reaches the
//! global minimum. This module exists to certify the multiplicative
//! update against a second, structurally different route; it is not a
//! production solver.

use crate::densemat::{ElemOp, Matrix};
use crate::error::{Error, Result};

/// Entries at or below this are treated as active (at the boundary) when
/// checking first-order optimality.
const ACTIVE_EPS: f64 = 1e-12;

/// Hard iteration cap before giving up with a residual report.
const MAX_ITERS: usize = 1_000_000;

/// Solves `min 0.5 ||X - A S||^2 + lambda sum(S)` over `S >= 0` by
/// projected gradient descent with a fixed all-0.5 initialization, run
/// until first-order optimality: every entry either sits at the boundary
/// with gradient >= -tol, or has |gradient| <= tol.
pub fn solve_s_reference(x: &Matrix, a: &Matrix, lambda: f64, tol: f64) -> Result<Matrix> {
    if a.rows() != x.rows() {
        return Err(Error::DimensionMismatch {
            op: "solve_s_reference",
            left: a.shape(),
            right: x.shape(),
        });
    }
    if tol <= 0.0 || tol.is_nan() {
        return Err(Error::InvalidParameter { name: "tol", value: tol });
    }
    let at = a.transpose();
    let ata = at.matmul(a)?;
    let atx = at.matmul(x)?;
    // Row-sum bound on the spectral radius of the symmetric non-negative
    // Gram matrix gives a safe constant step size 1/L.
    let lipschitz = (0..ata.rows())
        .map(|i| (0..ata.cols()).map(|j| ata.get(i, j)).sum::<f64>())
        .fold(0.0, f64::max);
    let r = a.cols();
    let n = x.cols();
    if lipschitz <= 0.0 {
        // A is all zeros: the objective reduces to the linear penalty,
        // minimized at S = 0.
        return Ok(Matrix::zeros(r, n));
    }
    let step = 1.0 / lipschitz;
    let mut s = Matrix::from_fn(r, n, |_, _| 0.5);
    let mut residual = f64::INFINITY;
    for _ in 0..MAX_ITERS {
        let grad = ata
            .matmul(&s)?
            .elementwise(&atx, ElemOp::Subtract)?
            .add_scalar(lambda);
        residual = kkt_residual(&s, &grad);
        if residual <= tol {
            return Ok(s);
        }
        s = s
            .elementwise(&grad.scale(step), ElemOp::Subtract)?
            .clamp_nonneg();
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITERS,
        residual,
    })
}

/// Worst first-order violation: for boundary entries only a negative
/// gradient counts, for interior entries any nonzero gradient does.
fn kkt_residual(s: &Matrix, grad: &Matrix) -> f64 {
    s.data()
        .iter()
        .zip(grad.data())
        .map(|(&sv, &gv)| if sv <= ACTIVE_EPS { (-gv).max(0.0) } else { gv.abs() })
        .fold(0.0, f64::max)
}
