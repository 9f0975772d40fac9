//! Rainbow tight Hamilton cycles in k-graph systems: structures, verifiers
//! and exact search at desk scale.

pub mod arith;
pub mod cli;
pub mod connectivity;
pub mod error;
pub mod framework;
pub mod hypergraph;
pub mod instances;
pub mod io;
pub mod lp;
pub mod matching;
pub mod sequential;
pub mod solver;
pub mod vicinity;

pub use error::{Error, Result};
