//! Stable roommates with short preference lists.
//!
//! The crate covers strict instances with lists of length at most `d`
//! (egalitarian stable matchings, exactly and within `(2d+3)/7` for
//! `d in {3,4,5}`), instances with ties (solvability search and most-stable
//! matchings for `d = 2`), and executable gadget reductions from cubic vertex
//! cover and (2,2)-E3-SAT that double as verified instance generators.
//!
//! ```
//! use roommates::{Instance, solver, egal};
//!
//! let inst = Instance::from_lists(vec![vec![2, 4], vec![3, 1], vec![4, 2], vec![1, 3]]).unwrap();
//! let all = solver::enumerate(&inst, solver::DEFAULT_CAP).unwrap();
//! assert_eq!(all.len(), 2);
//! let (best, cost) = egal::egal_exact(&inst).unwrap();
//! assert_eq!(cost, 6);
//! assert_eq!(best.to_string(), "{12, 34}");
//! ```

pub mod cli;
pub mod egal;
pub mod error;
pub mod io;
pub mod model;
pub mod reductions;
mod search;
pub mod solver;
pub mod srti;

pub use error::{Error, Result};
pub use model::{
    blocking_edges, cost, pair_type, rank, validate, AgentId, BlockingReport, Edge, Instance,
    Matching, PairType, Violation,
};
