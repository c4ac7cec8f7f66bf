//! Finite-scale computations with lattices of σ-fields and noise-type
//! Boolean algebras.

pub mod chaos;
pub mod cofinite;
pub mod error;
pub mod finmeas;
pub mod formats;
pub mod gen;
pub mod linalg;
pub mod ntba;
pub mod randsup;
pub mod scalar;
pub mod sigma;
pub mod spectrum;
pub mod suite;
mod unionfind;

/// Library version, recorded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use error::{Error, Result};
pub use finmeas::{ProbSpace, Product, Rv};
pub use linalg::Subspace;
pub use ntba::{AtomSet, Ntba};
pub use scalar::{Mode, Rational, Scalar};
pub use sigma::SigmaField;
