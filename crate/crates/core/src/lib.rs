//! Open XXZ Gaudin model with generic non-diagonal boundary terms.
//!
//! Dense tensor-space operators, the six-vertex reflection algebra, Gaudin
//! Hamiltonians, Bethe-ansatz root finding, and determinant representations
//! of partition functions and scalar products, all verified against
//! brute-force oracles at desk scale (N = 2..12 sites).

pub mod bethe;
pub mod error;
pub mod gaudin;
pub mod params;
pub mod sampling;
pub mod scalar;
pub mod tensor;
pub mod vertex;

pub use bethe::{BetheRootSet, Kind};
pub use error::{Error, Result};
pub use params::{ModelParams, Tolerances};
pub use scalar::ScalarProductResult;
pub use tensor::{DenseOperator, StateVector};

/// Complex scalar used throughout: spectral parameters, matrix entries,
/// state amplitudes. All angle-like quantities are radians.
pub type C64 = num_complex::Complex64;
