//! Exact zero counts in symmetric group character tables, exact partition
//! and t-core counting, and log-space evaluation of the analytic lower
//! bounds for those counts.

pub mod asymptotic;
pub mod character;
pub mod cli;
pub mod counting;
pub mod error;
pub mod exec;
pub mod partition;
pub mod sampling;

pub use error::{Error, Result};
pub use exec::Execution;
pub use partition::Partition;

/// Arbitrary-precision nonnegative count.
pub type BigCount = num_bigint::BigUint;

/// Exact character value.
pub type CharValue = num_bigint::BigInt;
