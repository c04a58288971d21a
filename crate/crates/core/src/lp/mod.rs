//! Dense linear programming: problem representation, a two-phase simplex
//! solver, and an LP-text dump for cross-checking with external tools.

mod problem;
mod simplex;
mod text;

pub use problem::{LpProblem, LpSolution, LpStatus};
pub use simplex::{check_feasibility, solve, LpSolver, Pricing, SimplexSolver};
pub use text::to_lp_text;

pub(crate) use problem::dot;
