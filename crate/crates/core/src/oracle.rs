//! The answer table shared by the graph and matrix games.
//!
//! A game has a fixed set of queries and a fixed set of targets; asking query
//! `w` about the hidden target `v` returns a small integer label. For graphs
//! both sets are the node set and the label is the hop distance. For binary
//! matrices the queries are rows, the targets are columns and the label is
//! the matrix entry.

use crate::error::Result;
use crate::graph::DistanceMatrix;

pub trait QueryOracle: Sync {
    fn query_count(&self) -> usize;

    fn target_count(&self) -> usize;

    /// Label returned by query `w` when the target is `v`.
    fn answer(&self, w: usize, v: usize) -> u32;

    /// Exclusive upper bound on labels of a playable oracle.
    fn label_bound(&self) -> usize;

    /// Fails unless every target can eventually be told apart from every
    /// other one, which all games assume.
    fn check_playable(&self) -> Result<()>;
}

impl QueryOracle for DistanceMatrix {
    fn query_count(&self) -> usize {
        self.node_count()
    }

    fn target_count(&self) -> usize {
        self.node_count()
    }

    fn answer(&self, w: usize, v: usize) -> u32 {
        self.get(w, v)
    }

    fn label_bound(&self) -> usize {
        self.max_finite() as usize + 1
    }

    fn check_playable(&self) -> Result<()> {
        self.require_connected()
    }
}
