//! Linear and mixed-integer solving: a bounded-variable primal simplex
//! core, branch and bound over binaries, and a brute-force oracle.

mod bnb;
mod lp;

pub use bnb::{
    branch_priorities, brute_force_milp, model_to_lp, solve_milp, MilpSolution, MilpStatus, NodeRecord, SolveLimits,
    SolverError,
};
pub use lp::{solve_lp, verify_kkt, LpError, LpProblem, LpSolution, LpStatus, Simplex};
