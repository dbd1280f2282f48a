//! Non-negative sparse coding.
//!
//! Decomposes a non-negative data matrix X as A*S by minimizing
//! `0.5 ||X - A S||^2 + lambda sum(S)` subject to non-negative factors
//! and unit-norm basis columns. The hidden components are optimized with
//! a multiplicative update that provably never increases the objective;
//! the basis is learned by projected gradient descent. A plain
//! multiplicative-update NMF fit (`lambda = 0`, unconstrained norms) is
//! included as the baseline, along with the bars benchmark that
//! separates the two.
//!
//! ```
//! use nnsc::{bars, solver, Problem};
//!
//! let data = bars::generate(&bars::BarsSpec { n_samples: 50, ..Default::default() }).unwrap();
//! let problem = Problem::new(data.x, 1.0).unwrap();
//! let mut cfg = solver::SolverConfig::nnsc(1.0);
//! cfg.max_iters = 200;
//! let (fact, trace) = solver::nnsc_fit(&problem, 10, &cfg).unwrap();
//! assert_eq!(fact.a.shape(), (9, 10));
//! assert!(trace.final_objective().is_finite());
//! ```

pub mod auxcheck;
pub mod bars;
pub mod densemat;
pub mod error;
pub mod model;
pub mod oracle;
pub mod rng;
pub mod solver;

pub use densemat::{ElemOp, Matrix};
pub use error::{Error, Result};
pub use model::{
    objective_nmf, objective_nnsc, validate, Factorization, Mode, Problem, Violation,
};
pub use solver::{nmf_fit, nnsc_fit, SolverConfig, Trace};
