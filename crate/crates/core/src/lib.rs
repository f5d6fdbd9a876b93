//! Reinforced Lin-Kernighan-Helsgaun local search.
//!
//! The crate is organised bottom-up:
//!
//! * [`io`] reads TSPLIB and TSPTW text files and writes tours.
//! * [`metric`] holds the distance function, the array-based [`Tour`] and
//!   the machinery that applies sequential k-opt moves.
//! * [`onetree`] computes minimum 1-trees, alpha-nearness values and the
//!   subgradient ascent over node penalties.
//! * [`popmusic`] builds alternative candidate edges from sub-path optimised
//!   tours.
//! * [`candidates`] stores the per-city candidate lists and the Q-table that
//!   orders them.
//! * [`kopt`] is the depth-bounded sequential k-opt search.
//! * [`rl`] contains the rewards, the three Q-update rules and the
//!   strategy controller.
//! * [`solver`] runs the outer iteration loop for the TSP and the TSPTW.
//! * [`harness`] runs experiment matrices and writes gap reports.

pub mod candidates;
pub mod error;
pub mod harness;
pub mod io;
pub mod kopt;
pub mod metric;
pub mod onetree;
pub mod popmusic;
pub mod rl;
pub mod solver;

pub use candidates::{CandidateSets, QTable};
pub use error::{Error, MoveError, ParseError};
pub use metric::{City, Instance, Metric, MoveSequence, Tour};
pub use solver::{Mode, SolutionPair, SolveResult, SolverConfig};
