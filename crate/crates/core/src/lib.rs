//! Security analysis toolkit for the three-state QKD protocol.
//!
//! The protocol sends `|0_z>`, `|1_z>` for key generation and `|+>` for
//! channel estimation. Its security hinges on bounding the phase error rate
//! `e_p` of the data qubits from two observed bit error rates: `e_b` on the
//! Z-basis check bits and `alpha` on the `|+>` check state.
//!
//! * [`attack`] parameterizes collective attacks by Pauli amplitudes of a
//!   single Kraus element and merges ensembles of elements into one.
//! * [`bound`] computes the exact, approximate and simple upper bounds on `e_p`.
//! * [`keyrate`] turns bounds into single-photon key rates and secure regions.
//! * [`decoy`] models a weak coherent source over fiber and computes decoy-state
//!   key rates and maximal secure distances.
//! * [`sim`] is a Monte Carlo simulator of the prepare-and-measure protocol.

pub mod attack;
pub mod bound;
pub mod decoy;
mod error;
pub mod keyrate;
pub mod optimize;
pub mod sim;

pub use attack::{AttackEnsemble, ErrorRates, KrausCoefficients};
pub use bound::{BoundMethod, BoundResult};
pub use error::{Error, Result};
