//! Small-scale block semidefinite programming.
//!
//! Solves standard-form conic programs
//!
//! ```text
//! min  <C, X>   s.t.  <A_i, X> = b_i,   X in K
//! ```
//!
//! where `K` is a product of real symmetric PSD blocks. Complex Hermitian
//! blocks are supported through the canonical real embedding
//! `T(M) = [[Re M, -Im M], [Im M, Re M]]`. The solver is a path-following
//! primal-dual interior-point method on the homogeneous self-dual embedding
//! with Nesterov-Todd scaling and a Mehrotra predictor-corrector step, so
//! infeasible problems produce an improving-ray certificate rather than a
//! failure. Everything is dense; the intended regime is blocks of dimension
//! up to a few tens with a few dozen constraint rows.

mod dump;
mod embed;
mod problem;
mod solver;

pub use dump::{dump_problem, dump_solution};
pub use embed::{embed_hermitian, extract_complex, hermitian_eigen, EmbedError};
pub use problem::{BlockKind, BlockSpec, BuildError, Constraint, SdpProblem};
pub use solver::{solve, IterInfo, Residuals, SdpSolution, SolveOptions, SolveStatus};
