//! Multiplicative GHZ correlation functional on three-qubit states, the
//! GHZ-type entanglement indicator obtained by maximising it over
//! orthonormal measurement frames, and a three-qudit version built from
//! Heisenberg–Weyl operators.

pub mod cli;
pub mod correlator;
pub mod error;
pub mod functional;
pub mod linalg;
pub mod optimizer;
pub mod rng;
pub mod states;

pub use correlator::{build_quad, expectations, verify_identities, CorrelationTensor, CorrelatorQuad, StabQuad};
pub use error::{Error, Result};
pub use functional::{eval_i, eval_id, mermin_m3, FunctionalValue, QuditGenPair};
pub use linalg::{ComplexMatrix, Direction, OrthoFrame, C64};
pub use optimizer::{e_ghz, maximize_i, OptimizationResult, OptimizerConfig};
pub use states::{AcinParams, QuantumState};
