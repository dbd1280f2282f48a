//! Dense row-major matrix of `f64` with the elementwise and product
//! operations the update rules need.
//!
//! Matrices are immutable values: every operation returns a fresh result
//! and never mutates its inputs, so they are safe to share across threads.
//! Sample vectors are stored as columns of the data matrix.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};

/// Elementwise binary operation selector for [`Matrix::elementwise`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ElemOp {
    Multiply,
    Divide,
    Add,
    Subtract,
}

/// Dense 2-D matrix of finite `f64` values in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    /// Builds a matrix from row-major data. Rejects empty dimensions,
    /// length mismatches, and non-finite entries.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Matrix> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::InvalidShape {
                rows,
                cols,
                len: data.len(),
            });
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite { op: "from_vec" });
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Builds a matrix from a slice of equal-length rows.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Matrix> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::InvalidShape {
                rows: nrows,
                cols: ncols,
                len: rows.iter().map(Vec::len).sum(),
            });
        }
        Matrix::from_vec(nrows, ncols, rows.concat())
    }

    pub fn zeros(rows: usize, cols: usize) -> Matrix {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Matrix {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Matrix with every entry drawn from `f(row, col)`.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Matrix {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        assert!(row < self.rows && col < self.cols, "index out of bounds");
        self.data[row * self.cols + col]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// Copy of column `j` as a vector.
    pub fn column(&self, j: usize) -> Vec<f64> {
        assert!(j < self.cols, "column index out of bounds");
        (0..self.rows).map(|i| self.data[i * self.cols + j]).collect()
    }

    /// Standard matrix product; errors when inner dimensions disagree.
    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                op: "matmul",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let mut data = vec![0.0; self.rows * other.cols];
        for i in 0..self.rows {
            let out = &mut data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let aik = self.data[i * self.cols + k];
                let brow = &other.data[k * other.cols..(k + 1) * other.cols];
                for (o, b) in out.iter_mut().zip(brow) {
                    *o += aik * b;
                }
            }
        }
        Ok(Matrix {
            rows: self.rows,
            cols: other.cols,
            data,
        })
    }

    /// Elementwise combination of two same-shape matrices. Division checks
    /// the result for non-finite values; the caller is expected to guard
    /// denominators beforehand.
    pub fn elementwise(&self, other: &Matrix, op: ElemOp) -> Result<Matrix> {
        if self.shape() != other.shape() {
            return Err(Error::DimensionMismatch {
                op: "elementwise",
                left: self.shape(),
                right: other.shape(),
            });
        }
        let data: Vec<f64> = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| match op {
                ElemOp::Multiply => a * b,
                ElemOp::Divide => a / b,
                ElemOp::Add => a + b,
                ElemOp::Subtract => a - b,
            })
            .collect();
        if op == ElemOp::Divide && !data.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite { op: "elementwise divide" });
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// Adds the scalar `c` to every element.
    pub fn add_scalar(&self, c: f64) -> Matrix {
        self.map(|v| v + c)
    }

    /// Multiplies every element by `k`.
    pub fn scale(&self, k: f64) -> Matrix {
        self.map(|v| v * k)
    }

    pub fn transpose(&self) -> Matrix {
        let mut data = vec![0.0; self.rows * self.cols];
        for i in 0..self.rows {
            for j in 0..self.cols {
                data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        Matrix {
            rows: self.cols,
            cols: self.rows,
            data,
        }
    }

    /// Sum of squared elements.
    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum()
    }

    /// Sum of all elements.
    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    /// Largest element.
    pub fn max_entry(&self) -> f64 {
        self.data.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Smallest element.
    pub fn min_entry(&self) -> f64 {
        self.data.iter().copied().fold(f64::INFINITY, f64::min)
    }

    /// Euclidean norm of each column.
    pub fn column_norms(&self) -> Vec<f64> {
        let mut sq = vec![0.0; self.cols];
        for row in self.data.chunks_exact(self.cols) {
            for (acc, v) in sq.iter_mut().zip(row) {
                *acc += v * v;
            }
        }
        sq.into_iter().map(f64::sqrt).collect()
    }

    /// Rescales every column to unit Euclidean norm. Errors on the first
    /// column whose norm is zero.
    pub fn normalize_columns(&self) -> Result<Matrix> {
        let norms = self.column_norms();
        if let Some(index) = norms.iter().position(|&n| n <= 0.0) {
            return Err(Error::ZeroColumn { index });
        }
        let mut data = self.data.clone();
        for i in 0..self.rows {
            for j in 0..self.cols {
                data[i * self.cols + j] /= norms[j];
            }
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        })
    }

    /// Maps negative entries to zero, leaving the rest unchanged.
    pub fn clamp_nonneg(&self) -> Matrix {
        self.map(|v| if v < 0.0 { 0.0 } else { v })
    }

    fn map(&self, f: impl Fn(f64) -> f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// Serializes as plain numeric CSV: one matrix row per line, no header,
    /// 17 significant digits so values round-trip exactly.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                if j > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{:.16e}", self.data[i * self.cols + j]);
            }
            out.push('\n');
        }
        out
    }

    /// Parses the CSV format written by [`Matrix::to_csv_string`]. Accepts
    /// any plain numeric CSV with a consistent column count.
    pub fn from_csv_str(s: &str) -> Result<Matrix> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (idx, line) in s.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let row: Vec<f64> = line
                .split(',')
                .map(|tok| {
                    tok.trim().parse::<f64>().map_err(|e| Error::Csv {
                        line: idx + 1,
                        message: format!("{tok:?}: {e}"),
                    })
                })
                .collect::<Result<_>>()?;
            if let Some(first) = rows.first() {
                if row.len() != first.len() {
                    return Err(Error::Csv {
                        line: idx + 1,
                        message: format!("expected {} columns, found {}", first.len(), row.len()),
                    });
                }
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::Csv {
                line: 0,
                message: "no data rows".to_string(),
            });
        }
        let nrows = rows.len();
        let ncols = rows[0].len();
        Matrix::from_vec(nrows, ncols, rows.concat()).map_err(|e| match e {
            Error::NonFinite { .. } => Error::Csv {
                line: 0,
                message: "non-finite value in input".to_string(),
            },
            other => other,
        })
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv_string())?;
        Ok(())
    }

    pub fn read_csv(path: impl AsRef<Path>) -> Result<Matrix> {
        let text = std::fs::read_to_string(path)?;
        Matrix::from_csv_str(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;

    fn random_matrix(rng: &mut SeededRng, rows: usize, cols: usize) -> Matrix {
        Matrix::from_fn(rows, cols, |_, _| rng.uniform_in(-1.0, 1.0))
    }

    /// Independent reference product: plain dot-product triple loop.
    fn matmul_oracle(a: &Matrix, b: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(a.rows(), b.cols());
        for i in 0..a.rows() {
            for j in 0..b.cols() {
                let mut acc = 0.0;
                for k in 0..a.cols() {
                    acc += a.get(i, k) * b.get(k, j);
                }
                out.data[i * b.cols() + j] = acc;
            }
        }
        out
    }

    #[test]
    fn matmul_identity_leaves_matrix_unchanged() {
        let m = Matrix::from_vec(2, 2, vec![1.5, -2.0, 3.25, 0.5]).unwrap();
        let id = Matrix::identity(2);
        let prod = id.matmul(&m).unwrap();
        assert_eq!(prod, m);
    }

    #[test]
    fn matmul_hand_checked_2x2() {
        let a = Matrix::from_vec(2, 2, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let b = Matrix::from_vec(2, 1, vec![1.0, 1.0]).unwrap();
        let c = a.matmul(&b).unwrap();
        assert_eq!(c.data(), &[3.0, 7.0]);
    }

    #[test]
    fn matmul_matches_triple_loop_oracle() {
        let mut rng = SeededRng::new(3);
        let a = random_matrix(&mut rng, 5, 4);
        let b = random_matrix(&mut rng, 4, 3);
        let fast = a.matmul(&b).unwrap();
        let slow = matmul_oracle(&a, &b);
        for (x, y) in fast.data().iter().zip(slow.data()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn matmul_dimension_mismatch_names_both_shapes() {
        let a = Matrix::zeros(2, 3);
        let b = Matrix::zeros(2, 3);
        let err = a.matmul(&b).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("2x3") && msg.contains("matmul"), "{msg}");
    }

    #[test]
    fn elementwise_multiply_direct() {
        let a = Matrix::from_vec(1, 2, vec![2.0, 3.0]).unwrap();
        let b = Matrix::from_vec(1, 2, vec![4.0, 5.0]).unwrap();
        let c = a.elementwise(&b, ElemOp::Multiply).unwrap();
        assert_eq!(c.data(), &[8.0, 15.0]);
    }

    #[test]
    fn elementwise_self_division_gives_ones() {
        let m = Matrix::from_vec(2, 2, vec![0.5, 1.25, 3.0, 7.5]).unwrap();
        let q = m.elementwise(&m, ElemOp::Divide).unwrap();
        assert!(q.data().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn elementwise_divide_by_zero_is_an_error() {
        let a = Matrix::from_vec(1, 1, vec![1.0]).unwrap();
        let b = Matrix::from_vec(1, 1, vec![0.0]).unwrap();
        assert!(matches!(
            a.elementwise(&b, ElemOp::Divide),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn elementwise_shape_mismatch_is_an_error() {
        let a = Matrix::zeros(1, 2);
        let b = Matrix::zeros(2, 1);
        assert!(a.elementwise(&b, ElemOp::Add).is_err());
    }

    #[test]
    fn add_scalar_cases() {
        let z = Matrix::zeros(2, 2);
        assert!(z.add_scalar(1.0).data().iter().all(|&v| v == 1.0));
        let m = Matrix::from_vec(1, 2, vec![1.0, 2.0]).unwrap();
        assert_eq!(m.add_scalar(0.0), m);
        assert_eq!(m.add_scalar(0.5).data(), &[1.5, 2.5]);
    }

    #[test]
    fn frobenius_sq_three_four_five() {
        let m = Matrix::from_vec(1, 2, vec![3.0, 4.0]).unwrap();
        assert_eq!(m.frobenius_sq(), 25.0);
    }

    #[test]
    fn normalize_columns_three_four() {
        let m = Matrix::from_vec(2, 1, vec![3.0, 4.0]).unwrap();
        let n = m.normalize_columns().unwrap();
        assert!((n.get(0, 0) - 0.6).abs() < 1e-15);
        assert!((n.get(1, 0) - 0.8).abs() < 1e-15);
    }

    #[test]
    fn normalize_columns_zero_column_names_index() {
        let m = Matrix::from_vec(2, 2, vec![1.0, 0.0, 1.0, 0.0]).unwrap();
        match m.normalize_columns() {
            Err(Error::ZeroColumn { index }) => assert_eq!(index, 1),
            other => panic!("expected ZeroColumn, got {other:?}"),
        }
    }

    #[test]
    fn clamp_nonneg_zeroes_negatives_only() {
        let m = Matrix::from_vec(1, 2, vec![-1.0, 2.0]).unwrap();
        let c = m.clamp_nonneg();
        assert_eq!(c.data(), &[0.0, 2.0]);
    }

    #[test]
    fn from_vec_rejects_bad_input() {
        assert!(Matrix::from_vec(0, 2, vec![]).is_err());
        assert!(Matrix::from_vec(2, 2, vec![1.0; 3]).is_err());
        assert!(Matrix::from_vec(1, 1, vec![f64::NAN]).is_err());
        assert!(Matrix::from_vec(1, 1, vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let mut rng = SeededRng::new(9);
        let m = random_matrix(&mut rng, 4, 3);
        let back = Matrix::from_csv_str(&m.to_csv_string()).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn csv_rejects_ragged_rows() {
        let err = Matrix::from_csv_str("1.0,2.0\n3.0\n").unwrap_err();
        assert!(matches!(err, Error::Csv { line: 2, .. }));
    }

    #[test]
    fn csv_rejects_garbage() {
        assert!(Matrix::from_csv_str("1.0,abc\n").is_err());
        assert!(Matrix::from_csv_str("").is_err());
    }
}
