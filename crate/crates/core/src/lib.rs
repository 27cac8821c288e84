//! Max-cut solver lab for unit-weight random 3-regular graphs.
//!
//! The library covers the full pipeline of the greedy-enhanced quantum
//! relax-and-round (QRR*) solver and the classical competitor suite it is
//! benchmarked against:
//!
//! * [`graph`] -- instance generation, objective functions, exact oracles.
//! * [`lightcone`] -- light-cone subcircuit extraction and isomorphism dedup.
//! * [`emulator`] -- statevector QAOA emulation, sampling, noise, mitigation.
//! * [`qrr`] -- correlation matrices, eigenvector rounding, QRR/QRR*/RR/GW.
//! * [`classical`] -- simulated annealing, parallel tempering, greedy, rank-2
//!   Burer-Monteiro.
//! * [`compile`] -- hardware-native gate decompositions and swap-network
//!   resource counts.
//! * [`runtime`] -- circuit-duration and cloud-service run-time models plus the
//!   time-to-match benchmark metric.
//! * [`ensemble`] -- multi-instance helpers sharing one isomorphism database.
//!
//! Everything is deterministic given explicit seeds. Data-parallel loops go
//! through [`exec`], which uses rayon when the `parallel` feature (default) is
//! enabled and falls back to sequential iteration otherwise.

pub mod classical;
pub mod compile;
pub mod emulator;
pub mod ensemble;
pub mod error;
pub mod exec;
pub mod graph;
pub mod lightcone;
pub mod qrr;
pub mod report;
pub mod runtime;
pub mod seeds;

mod eigen;

pub use eigen::{commutator_norm, extremal_eigenpairs, RelaxedVector};
pub use error::{Error, Result};
