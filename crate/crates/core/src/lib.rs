//! Numerical laboratory for measurement invasiveness and memory effects in
//! open qubit dynamics.
//!
//! The library simulates protocols of three projective measurements performed
//! at times `0`, `t`, and `t + tau` on a qubit coupled to different kinds of
//! environments, and extracts from the outcome statistics:
//!
//! - the invasiveness distance between three- and two-measurement statistics,
//! - diagonal non-invasiveness (DNI) schemes, where the intermediate
//!   observable commutes with the pre-measurement state,
//! - Leggett-Garg inequality parameters,
//! - Markovianity, superclassicality and discord-generation diagnostics.
//!
//! Modules follow the layering of the problem: [`qmath`] holds dense complex
//! linear algebra and channel primitives, [`measurement`] the qubit
//! observables and state updates, [`models`] the concrete open-system
//! dynamics, and [`protocol`] the measurement-protocol engine built on top.

pub mod measurement;
pub mod models;
pub mod protocol;
pub mod qmath;

mod error;

pub use error::{Error, Result};
