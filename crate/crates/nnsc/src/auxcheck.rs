//! Computable form of the convergence-proof apparatus for the component
//! update: the single-column objective F, its gradient, the diagonal
//! curvature matrix K, and the auxiliary function G that majorizes F.
//!
//! The update rule is exactly the minimizer of G, and the proof rests on
//! K - A^T A being positive semidefinite; both facts are checked
//! numerically by the test suites through this module. A small Jacobi
//! eigensolver is included so the semidefiniteness check needs no
//! external linear algebra.

use crate::densemat::Matrix;
use crate::error::{Error, Result};

/// The objective restricted to a single data column: basis, data column,
/// and sparseness weight.
#[derive(Debug, Clone)]
pub struct ColumnSubproblem {
    a: Matrix,
    x: Vec<f64>,
    lambda: f64,
}

impl ColumnSubproblem {
    pub fn new(a: Matrix, x: Vec<f64>, lambda: f64) -> Result<ColumnSubproblem> {
        if x.len() != a.rows() {
            return Err(Error::InvalidShape {
                rows: a.rows(),
                cols: 1,
                len: x.len(),
            });
        }
        if let Some(i) = a.data().iter().position(|&v| v < 0.0) {
            return Err(Error::NegativeEntry {
                row: i / a.cols(),
                col: i % a.cols(),
                value: a.data()[i],
            });
        }
        if let Some(i) = x.iter().position(|&v| v < 0.0) {
            return Err(Error::NegativeEntry { row: i, col: 0, value: x[i] });
        }
        if lambda < 0.0 || lambda.is_nan() {
            return Err(Error::InvalidParameter { name: "lambda", value: lambda });
        }
        Ok(ColumnSubproblem { a, x, lambda })
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Number of components (columns of the basis).
    pub fn dim(&self) -> usize {
        self.a.cols()
    }

    fn check_len(&self, s: &[f64]) -> Result<()> {
        if s.len() != self.dim() {
            return Err(Error::InvalidShape {
                rows: self.dim(),
                cols: 1,
                len: s.len(),
            });
        }
        Ok(())
    }
}

fn mat_vec(a: &Matrix, v: &[f64]) -> Vec<f64> {
    (0..a.rows())
        .map(|i| (0..a.cols()).map(|k| a.get(i, k) * v[k]).sum())
        .collect()
}

fn mat_t_vec(a: &Matrix, v: &[f64]) -> Vec<f64> {
    (0..a.cols())
        .map(|j| (0..a.rows()).map(|i| a.get(i, j) * v[i]).sum())
        .collect()
}

/// F(s) = 0.5 ||x - A s||^2 + lambda sum(s).
pub fn f_col(sp: &ColumnSubproblem, s: &[f64]) -> Result<f64> {
    sp.check_len(s)?;
    let as_ = mat_vec(&sp.a, s);
    let err: f64 = sp
        .x
        .iter()
        .zip(&as_)
        .map(|(xi, ri)| (xi - ri) * (xi - ri))
        .sum();
    Ok(0.5 * err + sp.lambda * s.iter().sum::<f64>())
}

/// Gradient of F: A^T (A s - x) + lambda.
pub fn grad_f(sp: &ColumnSubproblem, s: &[f64]) -> Result<Vec<f64>> {
    sp.check_len(s)?;
    let mut residual = mat_vec(&sp.a, s);
    for (ri, xi) in residual.iter_mut().zip(&sp.x) {
        *ri -= xi;
    }
    let mut grad = mat_t_vec(&sp.a, &residual);
    for g in &mut grad {
        *g += sp.lambda;
    }
    Ok(grad)
}

/// Diagonal of the curvature matrix K at `s_t`:
/// K_ii = ((A^T A s_t)_i + lambda) / s_t_i. Requires s_t strictly
/// positive.
pub fn k_diag(sp: &ColumnSubproblem, s_t: &[f64]) -> Result<Vec<f64>> {
    sp.check_len(s_t)?;
    if let Some(&bad) = s_t.iter().find(|&&v| v <= 0.0) {
        return Err(Error::InvalidParameter { name: "s_t", value: bad });
    }
    let atas = mat_t_vec(&sp.a, &mat_vec(&sp.a, s_t));
    Ok(atas
        .iter()
        .zip(s_t)
        .map(|(num, st)| (num + sp.lambda) / st)
        .collect())
}

/// Auxiliary function
/// G(s, s_t) = F(s_t) + (s - s_t)^T grad F(s_t) + 0.5 (s - s_t)^T K(s_t) (s - s_t).
/// Satisfies G(s, s) = F(s) and G(s, s_t) >= F(s).
pub fn g_aux(sp: &ColumnSubproblem, s: &[f64], s_t: &[f64]) -> Result<f64> {
    sp.check_len(s)?;
    let f_t = f_col(sp, s_t)?;
    let grad = grad_f(sp, s_t)?;
    let k = k_diag(sp, s_t)?;
    let mut linear = 0.0;
    let mut quad = 0.0;
    for i in 0..s.len() {
        let d = s[i] - s_t[i];
        linear += d * grad[i];
        quad += k[i] * d * d;
    }
    Ok(f_t + linear + 0.5 * quad)
}

/// Closed-form minimizer of G(., s_t): s_t - K(s_t)^{-1} grad F(s_t).
/// This is the proof's route to the update rule; the solver computes the
/// same point multiplicatively.
pub fn g_minimizer(sp: &ColumnSubproblem, s_t: &[f64]) -> Result<Vec<f64>> {
    let grad = grad_f(sp, s_t)?;
    let k = k_diag(sp, s_t)?;
    Ok(s_t
        .iter()
        .zip(grad.iter().zip(&k))
        .map(|(st, (g, ki))| st - g / ki)
        .collect())
}

/// K(s_t) - A^T A, the matrix whose positive semidefiniteness carries the
/// convergence proof.
pub fn curvature_gap(sp: &ColumnSubproblem, s_t: &[f64]) -> Result<Matrix> {
    let k = k_diag(sp, s_t)?;
    let ata = sp.a.transpose().matmul(&sp.a)?;
    Ok(Matrix::from_fn(sp.dim(), sp.dim(), |i, j| {
        let d = if i == j { k[i] } else { 0.0 };
        d - ata.get(i, j)
    }))
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, sorted
/// ascending. Intended for the small matrices of the semidefiniteness
/// check; errors if the input is not square or not symmetric.
#[allow(clippy::needless_range_loop)]
pub fn jacobi_eigenvalues(m: &Matrix) -> Result<Vec<f64>> {
    let n = m.rows();
    if m.cols() != n {
        return Err(Error::InvalidShape {
            rows: m.rows(),
            cols: m.cols(),
            len: m.data().len(),
        });
    }
    let scale = m
        .data()
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    for i in 0..n {
        for j in 0..i {
            if (m.get(i, j) - m.get(j, i)).abs() > 1e-9 * scale {
                return Err(Error::NotSymmetric);
            }
        }
    }
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| 0.5 * (m.get(i, j) + m.get(j, i))).collect())
        .collect();
    for _sweep in 0..100 {
        let off_sq: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off_sq <= (1e-15 * scale) * (1e-15 * scale) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() <= 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                let apq = a[p][q];
                let app = a[p][p];
                let aqq = a[q][q];
                a[p][p] = app - t * apq;
                a[q][q] = aqq + t * apq;
                a[p][q] = 0.0;
                a[q][p] = 0.0;
                for i in 0..n {
                    if i == p || i == q {
                        continue;
                    }
                    let aip = a[i][p];
                    let aiq = a[i][q];
                    a[i][p] = c * aip - s * aiq;
                    a[p][i] = a[i][p];
                    a[i][q] = s * aip + c * aiq;
                    a[q][i] = a[i][q];
                }
            }
        }
    }
    let mut eigs: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    eigs.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(eigs)
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(m: &Matrix) -> Result<f64> {
    Ok(jacobi_eigenvalues(m)?[0])
}
