//! Verification and simplification of Toffoli+Hadamard circuits through
//! hypergraph-like ZH-diagrams and pure path-sums.

pub mod circuits;
pub mod diagram;
pub mod error;
pub mod numeric;
pub mod oracle;
pub mod pathsum;
pub mod poly;
pub mod random;
pub mod rules;
pub mod selfcheck;
pub mod translate;
pub mod verify;

pub use error::{Error, ParseError, Result};
pub use numeric::{Phase, ScalarFactor};
