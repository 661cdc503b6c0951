//! State-vector simulation of hybrid qubit/qumode circuits, with the
//! machinery needed to simulate the lattice sine-Gordon model: trigonometric
//! functions of quadratures compiled to conditional displacements, Trotterized
//! real-time evolution, imaginary-time ground-state preparation and
//! vertex-operator observables.
//!
//! Register layout: qubits come first (qubit 0 is the slowest index), then
//! bosonic modes, each truncated to the same number of Fock levels.

pub mod circuit;
pub mod error;
pub mod fock;
pub mod gates;
pub mod lanczos;
pub mod observables;
pub mod operator;
pub mod qite;
pub mod register;
pub mod sinegordon;
pub mod state;
pub mod trig;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
pub use operator::OperatorMatrix;
pub use register::{FockCutoff, RegisterShape, Subsystem};
pub use state::HybridState;

/// Largest Hilbert-space dimension any routine will allocate.
pub const DIMENSION_GUARD: usize = 200_000;

/// Default lower bound on a post-selection success probability.
pub const POSTSELECTION_FLOOR: f64 = 1e-6;
