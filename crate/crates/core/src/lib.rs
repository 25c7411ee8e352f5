//! Discovery of approximate graph entity dependencies in property graphs.
//!
//! The pipeline mines frequent patterns by MNI support, enumerates each
//! pattern's homomorphic matches, and searches for minimal rules `X -> w`
//! whose error over those matches stays within a bound.

pub mod bits;
pub mod deps;
pub mod matcher;
pub mod miner;
pub mod model;
pub mod oracle;
pub mod pipeline;
