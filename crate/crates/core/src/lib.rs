//! Exact homomorphism densities and positivity certificates for uniform
//! hypergraphs and their Levi graphs.

pub mod certificates;
pub mod decomposition;
pub mod density;
pub mod error;
pub mod homomorphism;
pub mod oracle;
mod parallel;
pub mod rational;
pub mod structures;

pub use error::{Error, Result};
pub use parallel::THREADS_ENV;
