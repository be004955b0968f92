//! Approximation schemes for Max-Min fair allocation and makespan scheduling
//! on inclusion-free convex bipartite graphs.
//!
//! Items (jobs) are totally ordered and every agent (player, machine) is
//! adjacent to an interval of them. A guess `t` is checked by scaling,
//! geometric rounding and a dynamic program over configuration vectors;
//! a binary search over `t` turns the decision procedure into a solver.
//! All arithmetic is exact.

pub mod alignment;
pub mod assignment;
pub mod dp;
pub mod error;
pub mod fixtures;
pub mod generator;
pub mod hall;
pub mod instance;
pub mod io;
pub mod oracle;
pub mod rounding;
pub mod solver;
pub mod value;

pub use solver::{solve, solve_maxmin, solve_minmax, verify, SolveResult, Verdict};

pub use assignment::Assignment;
pub use error::{Error, Result};
pub use instance::{Agent, Canonical, ConvexInstance, Item, Mode, Subgraph};
pub use rounding::{InputVector, RoundedInstance, RoundingScheme};

pub use value::Value;
