//! Exact-coefficient classical pseudodifferential symbols on `U x R^n`,
//! their cut-off integrals and residues, symbol-valued differential forms,
//! holomorphic families, and the cyclic cochains built from them.

pub mod coeff;
pub mod cochain;
pub mod cutoff;
pub mod error;
pub mod forms;
pub mod holo;
pub mod json;
pub mod quadrature;
pub mod random;
pub mod regint;
pub mod scalar;
pub mod star;
pub mod suite;
pub mod symbol;
pub mod translate;

/// Largest supported base dimension.
pub const MAX_DIM: usize = 3;

pub use coeff::{Coeff, ZJet};
pub use error::{Result, SymError};
pub use scalar::{Order, Scalar};
pub use symbol::{ClassicalSymbol, Homogeneous, Symbol, TermKey};
