//! Quantum nonlocal boxes built from two-qubit-pair observables with three
//! settings and four outcomes per party.
//!
//! The crate reconstructs the sixteen Bell expressions of this scenario,
//! evaluates them on products of Bell states, certifies their local and
//! no-signaling bounds by exhaustive enumeration, checks that each one is
//! a facet of the local polytope, and simulates the entanglement-swapping
//! protocol that distributes the boxes between qubits from independent sources.

pub mod error;
pub mod inequalities;
pub mod observables;
pub mod polytope;
pub mod qla;
pub mod reference;
pub mod sampler;
pub mod states;
pub mod swap;

pub use error::{Error, Result};
pub use inequalities::{beta_behavior, beta_quantum, BellExpression, Behavior, PartyLayout};
pub use observables::{alice_observable, bob_observable, BitMask, FourOutcome, FourOutcomeObservable, Party};
pub use qla::{DensityMatrix, Operator, StateVector, C64};
pub use states::{BellLabel, FourQubitProductLabel};
pub use swap::{ClassMapEntry, RobotOutcome};
pub use sampler::{estimate_beta, sample_events, sort_events, BetaEstimate, EventRecord, RandomStream};
