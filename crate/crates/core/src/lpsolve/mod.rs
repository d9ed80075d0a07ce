//! Exact linear programming plus the covering lower bounds used to prune
//! the searches.

mod cover;
pub mod fast;
mod simplex;

pub use cover::{
    greedy_bound, greedy_weights, lemma_bound, relaxation, safe_dual_weights, CoverBound,
    CoverInstance, Incidence,
};
pub use simplex::{
    solve_lp, Constraint, LinearProgram, LpSolution, LpStatus, Relation, VarBound,
};
