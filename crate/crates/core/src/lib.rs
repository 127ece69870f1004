//! Design-space exploration for quantum-dot spin-qubit architectures.
//!
//! The crate compiles gate-level circuits onto parameterized spin-qubit
//! architectures, scores every compiled circuit with the Estimated Success
//! Probability (ESP), and searches the space of architectures with random
//! sampling, simulated annealing, Bayesian optimization, a genetic
//! algorithm and ant colony optimization.
//!
//! - [`design_space`]: the 13 architecture variables, rule filtering,
//!   enumeration and distance.
//! - [`circuit`]: the gate-list IR, its text format and dependency DAG.
//! - [`compiler`]: placement, routing, constraint-aware scheduling and an
//!   independent verifier.
//! - [`esp`]: the noise configuration and log-domain ESP.
//! - [`optimize`]: the search loop, the five policies and their presets.
//! - [`harness`]: brute-force oracle, relative metrics and reports.

pub mod circuit;
pub mod compiler;
pub mod design_space;
pub mod esp;
pub mod harness;
pub mod optimize;
