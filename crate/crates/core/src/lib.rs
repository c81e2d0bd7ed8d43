//! Weingarten calculus for the orthogonal and unitary groups built on an
//! exact Brauer-diagram engine.
//!
//! The crate computes moment operators `∫ (g|ψ⟩⟨ψ|g†)^⊗t dg` for Haar-random
//! orthogonal and unitary `g`, the trace distance between the real and complex
//! Haar ensembles (numerically, alongside an exact rational upper bound),
//! exact-design constraints for orthogonal orbits, and Monte Carlo estimators
//! that cross-check all of it.

pub mod brauer_linalg;
pub mod designs;
pub mod error;
pub mod exact;
pub mod pairings;
pub mod sampling;
pub mod tensor_rep;
pub mod verify;

pub use error::{Error, Result};
pub use pairings::{enumerate_pairings, CompositionResult, PairPartition, PairingBasis, Permutation};
