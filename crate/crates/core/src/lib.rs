//! Metric dimension and its sequential (adaptive) variant on graphs and
//! binary query matrices.
//!
//! A target node is hidden; each query `w` reveals `d(w, target)`. The
//! non-adaptive problem asks for a smallest query set that always pins the
//! target down, the adaptive one for the fewest queries in the worst case
//! when each query may depend on earlier answers. Both are exposed through
//! [`QueryOracle`], so the same code runs on graph distance matrices and on
//! 0/1 matrices.

pub mod er_model;
pub mod error;
pub mod experiments;
pub mod game;
pub mod graph;
pub mod localization;
pub mod matrix;
pub mod oracle;

pub use error::{Error, Result};
pub use graph::{distance_matrix, DistanceMatrix, Graph};
pub use localization::QuerySet;
pub use matrix::BinaryMatrix;
pub use oracle::QueryOracle;
