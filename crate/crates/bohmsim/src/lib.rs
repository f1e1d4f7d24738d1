//! Bohmian-trajectory toolkit for a coupled two-dimensional anharmonic
//! quantum oscillator.
//!
//! The crate evolves a wavefunction under the time-dependent Schrödinger
//! equation with a split-operator sine-spectral scheme, integrates the
//! guidance-equation trajectories through the evolving field, locates and
//! tracks quantum vortices (nodal points of the wavefunction), and measures
//! sensitivity to initial conditions through the mean log phase-space
//! separation of trajectory pairs.
//!
//! Start with the runnable examples (`cargo run --release -p bohmsim
//! --example <name>`) or the `bohmsim` binary, which drives the same
//! pipelines from plain-text configs with built-in presets.

pub mod chaos;
pub mod config;
pub mod error;
pub mod io;
pub mod model;
pub mod plot;
pub mod run;
pub mod tdse;
pub mod traj;
pub mod vortices;

pub use error::{ChaosError, ModelError, RunError, TdseError, TrajError, VortexError};
pub use model::{GridSpec, PhysParams};
pub use tdse::{SnapshotSeries, WaveField};
