//! Statevector simulation of brickwork and staircase Floquet circuits built
//! from one two-qubit gate, with tools for measuring how purity, the
//! entanglement spectrum and OTOCs relax towards their random-state values.
//!
//! The crate is organised bottom up:
//!
//! * [`statevec`]: dense states and gate kernels
//! * [`gates`]: gate families, canonical parameters, dual-unitarity
//! * [`circuits`]: gate layouts per Floquet period and evolution
//! * [`observables`]: spectra, purities, reference laws, fits, OTOCs
//! * [`runner`]: TOML experiments, ensemble averaging and CSV/JSON output

// Index loops read better than iterator chains in the small dense kernels,
// and `!(x <= tol)` is used on purpose so that NaN fails the check.
#![allow(clippy::needless_range_loop, clippy::neg_cmp_op_on_partial_ord)]

pub mod circuits;
pub mod error;
pub mod gates;
pub mod linalg;
pub mod observables;
pub mod runner;
pub mod seed;
pub mod statevec;

pub use circuits::{Boundary, CircuitConfig, CircuitKind, LayerOrder};
pub use error::{Error, Result};
pub use gates::{GateFamily, GateSpec, TwoQubitGate};
pub use seed::Seed;
pub use statevec::{Axis, StateVector};
