//! Exact solver for the minimum dominating set problem and its two-part
//! covering generalization.
//!
//! The solver works on a bipartite view of the problem: a part of candidate
//! vertices (`UB`) and a part of vertices still to dominate (`UD`). Around
//! the branch-and-bound core sit LP relaxation lower bounds with an
//! optional multi-program tightening cascade, nine reduction rules with
//! solution reconstruction, a degree-priority branching strategy, a
//! matching-based polynomial base case, plus brute-force oracles, instance
//! generators, and text-format IO for the command-line tools.

pub mod bound;
pub mod branch;
pub mod config;
pub mod gen;
pub mod graph;
pub mod instance;
pub mod io;
pub mod lp;
pub mod matching;
pub mod oracle;
pub mod reduce;
pub mod solve;

pub use config::Config;
pub use graph::Graph;
pub use instance::BipartiteInstance;
pub use solve::{solve_mds, solve_pds, SolveResult, SolveStatus};
