//! Minimum-energy defense of linear networks against modeled attacks.
//!
//! A network `ẋ = A x + H w + B u` is attacked through `H` by signals that
//! follow `ẇ = s w + r` and defended through `B`. The crate builds such
//! systems from graph topologies or grid parameters, computes the defense
//! input that drives the network state to a target at a fixed horizon with
//! the least energy, splits that energy into attacker, Gramian and alignment
//! factors, and sweeps attacker placements.

pub mod control;
pub mod error;
pub mod experiments;
pub mod netgen;
pub mod numkernels;
pub mod powergrid;
pub mod precision;
pub mod scenario;
pub mod seeding;
pub mod simulate;
pub mod sysmodel;

pub use error::{Error, Result};
