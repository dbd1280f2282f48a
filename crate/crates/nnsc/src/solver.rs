//! Multiplicative component update, projected-gradient basis update, and
//! the alternating fit drivers for both objectives.
//!
//! The S update rescales every entry by a non-negative factor, so
//! non-negativity is preserved automatically and the penalized objective
//! never increases. The A update is a gradient step followed by clamping
//! to the non-negative orthant and rescaling each column to unit norm;
//! with backtracking on the step size it is also nonincreasing.

use crate::densemat::{ElemOp, Matrix};
use crate::error::{Error, Result};
use crate::model::{max_violation, penalized_objective, Factorization, Mode, Problem};
use crate::rng::SeededRng;

/// Relative slack when deciding whether a candidate basis step decreased
/// the objective; covers floating-point noise near stationary points
/// while staying an order of magnitude under the 1e-12 monotonicity
/// contract on the trace.
const ACCEPT_SLACK: f64 = 1e-13;

/// Maximum step-size halvings per outer iteration before the basis
/// update is skipped.
const MAX_HALVINGS: usize = 20;

/// Consecutive below-tolerance iterations required to declare convergence.
const STABLE_ITERS: usize = 5;

/// Solver knobs. `lambda` and `mode` mirror what drivers put into the
/// [`Problem`] and the choice of fit function; the fit itself reads the
/// sparseness weight from the problem.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    pub mode: Mode,
    pub lambda: f64,
    /// Gradient step size for the basis update.
    pub mu: f64,
    pub max_iters: usize,
    /// Relative objective-change stopping threshold.
    pub tol: f64,
    /// Guard added to every denominator of the multiplicative update.
    pub eps_div: f64,
    pub seed: u64,
    /// Halve `mu` when a basis step increases the objective, grow it 1.2x
    /// (capped at 10x the configured value) after an accepted step.
    pub backtracking: bool,
}

impl SolverConfig {
    pub fn nnsc(lambda: f64) -> SolverConfig {
        SolverConfig {
            mode: Mode::Nnsc,
            lambda,
            mu: 1e-2,
            max_iters: 5000,
            tol: 1e-9,
            eps_div: 1e-12,
            seed: 0,
            backtracking: true,
        }
    }

    pub fn nmf() -> SolverConfig {
        SolverConfig {
            mode: Mode::Nmf,
            ..SolverConfig::nnsc(0.0)
        }
    }

    fn check(&self, r: usize) -> Result<()> {
        if self.lambda < 0.0 || self.lambda.is_nan() {
            return Err(Error::InvalidParameter { name: "lambda", value: self.lambda });
        }
        if self.mu <= 0.0 || self.mu.is_nan() {
            return Err(Error::InvalidParameter { name: "mu", value: self.mu });
        }
        if self.tol <= 0.0 || self.tol.is_nan() {
            return Err(Error::InvalidParameter { name: "tol", value: self.tol });
        }
        if self.eps_div <= 0.0 || self.eps_div.is_nan() {
            return Err(Error::InvalidParameter { name: "eps_div", value: self.eps_div });
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter { name: "max_iters", value: 0.0 });
        }
        if r == 0 {
            return Err(Error::InvalidParameter { name: "r", value: 0.0 });
        }
        Ok(())
    }
}

/// One per-iteration record of a fit run.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub iter: usize,
    pub objective: f64,
    /// Largest constraint deviation after the iteration.
    pub max_violation: f64,
    /// Basis step size used this iteration (0 for multiplicative updates).
    pub mu: f64,
}

/// Per-iteration objective and constraint diagnostics, including the
/// record for the initial state at iteration 0.
#[derive(Debug, Clone)]
pub struct Trace {
    /// Seed the run was initialized with, for reproducibility.
    pub seed: u64,
    pub records: Vec<TraceRecord>,
}

impl Trace {
    /// Number of completed outer iterations.
    pub fn iterations(&self) -> usize {
        self.records.last().map_or(0, |r| r.iter)
    }

    pub fn final_objective(&self) -> f64 {
        self.records.last().map_or(f64::NAN, |r| r.objective)
    }

    /// CSV with header `iter,objective,max_violation,mu`.
    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("iter,objective,max_violation,mu\n");
        for rec in &self.records {
            out.push_str(&format!(
                "{},{:.16e},{:.16e},{:.16e}\n",
                rec.iter, rec.objective, rec.max_violation, rec.mu
            ));
        }
        out
    }

    pub fn write_csv(&self, path: impl AsRef<std::path::Path>) -> Result<()> {
        std::fs::write(path, self.to_csv_string())?;
        Ok(())
    }
}

/// One multiplicative update of the hidden components:
///
/// ```text
/// S <- S .* (A^T X) ./ (A^T A S + lambda + eps_div)
/// ```
///
/// The scalar `lambda + eps_div` is added to every element of the
/// denominator. The penalized objective is nonincreasing under this rule
/// and non-negative S stays non-negative.
pub fn update_s(x: &Matrix, a: &Matrix, s: &Matrix, lambda: f64, eps_div: f64) -> Result<Matrix> {
    let at = a.transpose();
    let numer = at.matmul(x)?;
    let denom = at.matmul(a)?.matmul(s)?.add_scalar(lambda + eps_div);
    let ratio = numer.elementwise(&denom, ElemOp::Divide).map_err(|e| match e {
        Error::NonFinite { .. } => Error::NonFinite { op: "update_s" },
        other => other,
    })?;
    s.elementwise(&ratio, ElemOp::Multiply)
}

/// Reconstruction-error gradient with respect to the basis: (A S - X) S^T.
fn basis_gradient(x: &Matrix, a: &Matrix, s: &Matrix) -> Result<Matrix> {
    a.matmul(s)?
        .elementwise(x, ElemOp::Subtract)?
        .matmul(&s.transpose())
}

/// Gradient step clamped to the non-negative orthant, not yet
/// renormalized.
fn step_and_clamp(a: &Matrix, grad: &Matrix, mu: f64) -> Result<Matrix> {
    Ok(a.elementwise(&grad.scale(mu), ElemOp::Subtract)?.clamp_nonneg())
}

/// Projected gradient step for the basis:
///
/// ```text
/// A' = A - mu (A S - X) S^T,  negatives zeroed,  columns rescaled to unit norm
/// ```
///
/// Errors when a column is entirely zero after clamping; callers shrink
/// `mu` or redraw the column.
pub fn update_a_projected(x: &Matrix, a: &Matrix, s: &Matrix, mu: f64) -> Result<Matrix> {
    step_and_clamp(a, &basis_gradient(x, a, s)?, mu)?.normalize_columns()
}

fn frobenius_dot(a: &Matrix, b: &Matrix) -> f64 {
    a.data().iter().zip(b.data()).map(|(x, y)| x * y).sum()
}

/// Penalized objective as a function of the basis alone, with the
/// S-dependent products precomputed. Used by the backtracking search so
/// that rejected candidates cost only basis-sized products:
/// 0.5 (||X||^2 - 2 <A, X S^T> + <A, A S S^T>) + lambda sum(S).
struct BasisObjective {
    sst: Matrix,
    xst: Matrix,
    xx: f64,
    penalty: f64,
}

impl BasisObjective {
    fn new(x: &Matrix, s: &Matrix, xx: f64, lambda: f64) -> Result<BasisObjective> {
        let st = s.transpose();
        Ok(BasisObjective {
            sst: s.matmul(&st)?,
            xst: x.matmul(&st)?,
            xx,
            penalty: lambda * s.sum(),
        })
    }

    fn eval(&self, a: &Matrix) -> Result<f64> {
        let asst = a.matmul(&self.sst)?;
        Ok(0.5 * (self.xx - 2.0 * frobenius_dot(a, &self.xst) + frobenius_dot(a, &asst))
            + self.penalty)
    }
}

/// Standard multiplicative basis update for the unconstrained-norm
/// objective: `A <- A .* (X S^T) ./ (A S S^T + eps_div)`.
fn update_a_multiplicative(x: &Matrix, a: &Matrix, s: &Matrix, eps_div: f64) -> Result<Matrix> {
    let st = s.transpose();
    let numer = x.matmul(&st)?;
    let denom = a.matmul(&s.matmul(&st)?)?.add_scalar(eps_div);
    let ratio = numer.elementwise(&denom, ElemOp::Divide).map_err(|e| match e {
        Error::NonFinite { .. } => Error::NonFinite { op: "update_a_multiplicative" },
        other => other,
    })?;
    a.elementwise(&ratio, ElemOp::Multiply)
}

/// Strictly positive random matrix with entries in [0.1, 1.1); the floor
/// keeps multiplicative updates away from locked zeros.
fn random_positive(rng: &mut SeededRng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.uniform_in(0.1, 1.1))
}

/// Replaces every zero-norm column with a fresh strictly positive draw.
fn redraw_zero_columns(m: &Matrix, rng: &mut SeededRng) -> Matrix {
    let norms = m.column_norms();
    let fresh: Vec<Option<Vec<f64>>> = norms
        .iter()
        .map(|&n| {
            (n <= 0.0).then(|| (0..m.rows()).map(|_| rng.uniform_in(0.1, 1.1)).collect())
        })
        .collect();
    Matrix::from_fn(m.rows(), m.cols(), |i, j| match &fresh[j] {
        Some(col) => col[i],
        None => m.get(i, j),
    })
}

struct BasisStep {
    a: Matrix,
    mu_used: f64,
    mu_next: f64,
}

/// Basis update with step-size backtracking: halve `mu` while the step
/// increases the objective or collapses a column; keep the basis
/// unchanged when no acceptable step exists. Candidates are exactly
/// `update_a_projected` outputs (the gradient is shared across attempts);
/// their objectives are compared in the precomputed Gram form.
fn basis_step_backtracking(
    x: &Matrix,
    a: &Matrix,
    s: &Matrix,
    objective: &BasisObjective,
    mu_start: f64,
    mu_cap: f64,
) -> Result<BasisStep> {
    let grad = basis_gradient(x, a, s)?;
    let current_obj = objective.eval(a)?;
    let mut mu_try = mu_start;
    for _ in 0..=MAX_HALVINGS {
        match step_and_clamp(a, &grad, mu_try)?.normalize_columns() {
            Ok(candidate) => {
                let obj = objective.eval(&candidate)?;
                if obj <= current_obj + ACCEPT_SLACK * current_obj.abs() {
                    return Ok(BasisStep {
                        a: candidate,
                        mu_used: mu_try,
                        mu_next: (mu_try * 1.2).min(mu_cap),
                    });
                }
            }
            Err(Error::ZeroColumn { .. }) => {}
            Err(e) => return Err(e),
        }
        mu_try /= 2.0;
    }
    Ok(BasisStep {
        a: a.clone(),
        mu_used: 0.0,
        mu_next: mu_try,
    })
}

/// Alternating fit of the sparsity-penalized objective: projected-gradient
/// basis step with the current components, then one multiplicative
/// component update with the new basis. Stops when the relative objective
/// change stays below `cfg.tol` for five consecutive outer iterations, or
/// at `cfg.max_iters`.
pub fn nnsc_fit(p: &Problem, r: usize, cfg: &SolverConfig) -> Result<(Factorization, Trace)> {
    cfg.check(r)?;
    let x = p.x();
    let lambda = p.lambda();
    let mut rng = SeededRng::new(cfg.seed);
    let a = random_positive(&mut rng, x.rows(), r).normalize_columns()?;
    let s = random_positive(&mut rng, r, x.cols());
    let mut fact = Factorization { a, s };
    let mut objective = penalized_objective(x, &fact.a, &fact.s, lambda)?;
    let xx = x.frobenius_sq();
    let mut mu = cfg.mu;
    let mu_cap = cfg.mu * 10.0;
    let mut trace = Trace {
        seed: cfg.seed,
        records: vec![TraceRecord {
            iter: 0,
            objective,
            max_violation: max_violation(&fact, Mode::Nnsc),
            mu,
        }],
    };
    let mut stable = 0;
    for iter in 1..=cfg.max_iters {
        let mu_used;
        if cfg.backtracking {
            let basis_obj = BasisObjective::new(x, &fact.s, xx, lambda)?;
            let step = basis_step_backtracking(x, &fact.a, &fact.s, &basis_obj, mu, mu_cap)?;
            fact.a = step.a;
            mu_used = step.mu_used;
            mu = step.mu_next;
        } else {
            fact.a = match update_a_projected(x, &fact.a, &fact.s, mu) {
                Ok(next) => next,
                Err(Error::ZeroColumn { .. }) => {
                    let grad = basis_gradient(x, &fact.a, &fact.s)?;
                    let clamped = step_and_clamp(&fact.a, &grad, mu)?;
                    redraw_zero_columns(&clamped, &mut rng).normalize_columns()?
                }
                Err(e) => return Err(e),
            };
            mu_used = mu;
        }
        fact.s = update_s(x, &fact.a, &fact.s, lambda, cfg.eps_div)?;
        let new_objective = penalized_objective(x, &fact.a, &fact.s, lambda)?;
        let rel_change =
            (objective - new_objective).abs() / objective.abs().max(f64::MIN_POSITIVE);
        objective = new_objective;
        trace.records.push(TraceRecord {
            iter,
            objective,
            max_violation: max_violation(&fact, Mode::Nnsc),
            mu: mu_used,
        });
        stable = if rel_change < cfg.tol { stable + 1 } else { 0 };
        if stable >= STABLE_ITERS {
            break;
        }
    }
    Ok((fact, trace))
}

/// Baseline fit of the plain reconstruction objective with multiplicative
/// updates for both factors; `lambda` is treated as zero and basis
/// columns are not normalized.
pub fn nmf_fit(p: &Problem, r: usize, cfg: &SolverConfig) -> Result<(Factorization, Trace)> {
    cfg.check(r)?;
    let x = p.x();
    let mut rng = SeededRng::new(cfg.seed);
    let a = random_positive(&mut rng, x.rows(), r);
    let s = random_positive(&mut rng, r, x.cols());
    let mut fact = Factorization { a, s };
    let mut objective = penalized_objective(x, &fact.a, &fact.s, 0.0)?;
    let mut trace = Trace {
        seed: cfg.seed,
        records: vec![TraceRecord {
            iter: 0,
            objective,
            max_violation: max_violation(&fact, Mode::Nmf),
            mu: 0.0,
        }],
    };
    let mut stable = 0;
    for iter in 1..=cfg.max_iters {
        fact.a = update_a_multiplicative(x, &fact.a, &fact.s, cfg.eps_div)?;
        fact.s = update_s(x, &fact.a, &fact.s, 0.0, cfg.eps_div)?;
        let new_objective = penalized_objective(x, &fact.a, &fact.s, 0.0)?;
        let rel_change =
            (objective - new_objective).abs() / objective.abs().max(f64::MIN_POSITIVE);
        objective = new_objective;
        trace.records.push(TraceRecord {
            iter,
            objective,
            max_violation: max_violation(&fact, Mode::Nmf),
            mu: 0.0,
        });
        stable = if rel_change < cfg.tol { stable + 1 } else { 0 };
        if stable >= STABLE_ITERS {
            break;
        }
    }
    Ok((fact, trace))
}
