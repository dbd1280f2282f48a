//! Problem and factorization state plus the two objective functions.
//!
//! A [`Problem`] is a non-negative data matrix X together with the
//! sparseness weight lambda. A [`Factorization`] is the paired (A, S)
//! state: X is approximated as A*S with basis vectors in the columns of A
//! and hidden components in the rows of S.

use std::fmt;

use crate::densemat::{ElemOp, Matrix};
use crate::error::{Error, Result};

/// Non-negative data matrix plus sparseness weight.
#[derive(Debug, Clone)]
pub struct Problem {
    x: Matrix,
    lambda: f64,
}

impl Problem {
    /// Rejects negative data entries outright rather than clamping them:
    /// non-negative data is a precondition of the model, and silently
    /// repairing it would hide user error.
    pub fn new(x: Matrix, lambda: f64) -> Result<Problem> {
        for i in 0..x.rows() {
            for j in 0..x.cols() {
                let value = x.get(i, j);
                if value < 0.0 {
                    return Err(Error::NegativeEntry { row: i, col: j, value });
                }
            }
        }
        if lambda < 0.0 || lambda.is_nan() {
            return Err(Error::InvalidParameter {
                name: "lambda",
                value: lambda,
            });
        }
        Ok(Problem { x, lambda })
    }

    pub fn x(&self) -> &Matrix {
        &self.x
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

/// Basis matrix A (m x r) paired with hidden components S (r x n).
#[derive(Debug, Clone)]
pub struct Factorization {
    pub a: Matrix,
    pub s: Matrix,
}

/// Which objective and constraint set applies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Sparsity-penalized objective with unit-norm basis columns.
    Nnsc,
    /// Plain reconstruction objective; lambda ignored, no norm constraint.
    Nmf,
}

/// 0.5 * ||X - A*S||^2 + lambda * sum(S), on raw matrices. The solver
/// evaluates candidate steps through this without building intermediate
/// `Factorization` values.
pub(crate) fn penalized_objective(x: &Matrix, a: &Matrix, s: &Matrix, lambda: f64) -> Result<f64> {
    let reconstruction = a.matmul(s)?;
    let residual = x.elementwise(&reconstruction, ElemOp::Subtract)?;
    Ok(0.5 * residual.frobenius_sq() + lambda * s.sum())
}

/// 0.5 * ||X - A*S||^2 + lambda * sum(S).
pub fn objective_nnsc(p: &Problem, f: &Factorization) -> Result<f64> {
    penalized_objective(&p.x, &f.a, &f.s, p.lambda)
}

/// 0.5 * ||X - A*S||^2, the lambda = 0 special case.
pub fn objective_nmf(p: &Problem, f: &Factorization) -> Result<f64> {
    penalized_objective(&p.x, &f.a, &f.s, 0.0)
}

/// Which factor matrix a violation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorMatrix {
    Basis,
    Components,
}

impl fmt::Display for FactorMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactorMatrix::Basis => write!(f, "A"),
            FactorMatrix::Components => write!(f, "S"),
        }
    }
}

/// A single constraint violation found by [`validate`]. Violations are
/// data, not errors: an invalid state is a legitimate thing to inspect.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// Entry below zero by more than the tolerance.
    Negative {
        matrix: FactorMatrix,
        row: usize,
        col: usize,
        value: f64,
    },
    /// Basis column norm differs from 1 by more than the tolerance.
    ColumnNorm { col: usize, norm: f64 },
    /// Factor shapes do not compose to the data shape.
    Shape {
        a: (usize, usize),
        s: (usize, usize),
        x: (usize, usize),
    },
}

impl Violation {
    /// Magnitude of the violation, for reporting the worst offender.
    pub fn magnitude(&self) -> f64 {
        match self {
            Violation::Negative { value, .. } => -value,
            Violation::ColumnNorm { norm, .. } => (norm - 1.0).abs(),
            Violation::Shape { .. } => f64::INFINITY,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Negative {
                matrix,
                row,
                col,
                value,
            } => write!(f, "{matrix}[{row},{col}] = {value} is negative"),
            Violation::ColumnNorm { col, norm } => {
                write!(f, "column {col} of A has norm {norm}, expected 1")
            }
            Violation::Shape { a, s, x } => write!(
                f,
                "shapes A {}x{}, S {}x{} do not compose to X {}x{}",
                a.0, a.1, s.0, s.1, x.0, x.1
            ),
        }
    }
}

/// Audits a factorization against the mode-applicable constraints.
/// Returns an empty list iff every invariant holds within `tol`.
pub fn validate(p: &Problem, f: &Factorization, mode: Mode, tol: f64) -> Vec<Violation> {
    let mut out = Vec::new();
    if f.a.rows() != p.x.rows() || f.s.cols() != p.x.cols() || f.a.cols() != f.s.rows() {
        out.push(Violation::Shape {
            a: f.a.shape(),
            s: f.s.shape(),
            x: p.x.shape(),
        });
    }
    for (matrix, m) in [
        (FactorMatrix::Basis, &f.a),
        (FactorMatrix::Components, &f.s),
    ] {
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                let value = m.get(i, j);
                if value < -tol {
                    out.push(Violation::Negative {
                        matrix,
                        row: i,
                        col: j,
                        value,
                    });
                }
            }
        }
    }
    if mode == Mode::Nnsc {
        for (col, norm) in f.a.column_norms().into_iter().enumerate() {
            if (norm - 1.0).abs() > tol {
                out.push(Violation::ColumnNorm { col, norm });
            }
        }
    }
    out
}

/// Largest constraint deviation regardless of tolerance; 0 for a state
/// that satisfies every mode-applicable constraint exactly.
pub fn max_violation(f: &Factorization, mode: Mode) -> f64 {
    let mut worst: f64 = 0.0;
    for m in [&f.a, &f.s] {
        let min = m.min_entry();
        if min < 0.0 {
            worst = worst.max(-min);
        }
    }
    if mode == Mode::Nnsc {
        for norm in f.a.column_norms() {
            worst = worst.max((norm - 1.0).abs());
        }
    }
    worst
}
