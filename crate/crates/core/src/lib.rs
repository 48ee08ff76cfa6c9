//! Exact counting, asymptotic approximation and random sampling of integer
//! partitions, with experiments on graphical partitions, dominance
//! comparability and an exponential-sums model for the largest part and the
//! number of parts of a uniform random partition.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod asymptotics;
pub mod count;
pub mod error;
pub mod experiments;
pub mod partition;
pub mod rng;
pub mod sampling;
pub mod stats;
pub mod table;
pub mod tolerance;

pub use error::{Error, Result};
pub use partition::{DegreePairCheck, Partition};
pub use rng::RngStream;
pub use table::{RestrictedCountTable, TableMode};
