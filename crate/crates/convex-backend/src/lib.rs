//! Conic-program plumbing for the beamforming optimizers.
//!
//! The SCA pipelines emit streams of small convex subproblems: linear
//! objectives under nonnegative-orthant, second-order-cone, and (in
//! joint-rate mode) exponential-cone constraints. This crate owns the
//! program representation, the deterministic rewrites from engineering form
//! (quadratic power bounds, rate-vs-log inequalities) into cone blocks, and
//! the interior-point solves. Positive-semidefinite programs — needed only
//! by the SDR initializer — go to a separate dense Hermitian barrier engine
//! rather than the sparse conic solver.
//!
//! # Complex-to-real convention
//!
//! Complex decision vectors are pre-split by the caller into interleaved
//! real variables `[Re w₁, Im w₁, Re w₂, Im w₂, …]`. Every module in the
//! workspace shares this layout; inner products `h^H w` become two real
//! rows (real and imaginary part) over the interleaved variables.
//!
//! # Example
//!
//! ```
//! use convex_backend::{ConicProgram, Cone, LinearExpr, SolveStatus, Tolerances};
//!
//! // minimize x subject to x ≥ 3.
//! let mut p = ConicProgram::new(1);
//! p.set_objective_term(0, 1.0);
//! p.add_nonneg(LinearExpr::from_terms(vec![(0, 1.0)], -3.0)); // x − 3 ≥ 0
//! let report = p.solve(&Tolerances::default()).unwrap();
//! assert_eq!(report.status, SolveStatus::Optimal);
//! assert!((report.x[0] - 3.0).abs() < 1e-7);
//! ```

pub mod program;
pub mod reformulate;
pub mod sdp;

pub use program::{
    BackendError, Cone, ConicProgram, LinearExpr, SolveReport, SolveStatus, Tolerances,
};
pub use reformulate::{reformulate_log_rate, reformulate_quadratic, QuadTerm};
pub use sdp::{solve_sdp, SdpConstraint, SdpProblem, SdpReport};
