//! Analysis of two-qubit mixed entangled states as quantum-teleportation
//! resources.
//!
//! The crate builds four families of two-qubit mixed states (Werner, the
//! MJWK maximally entangled mixed states, the Werner derivative, and a
//! GHZ/W-trace mixture), computes entanglement, teleportation and
//! nonlocality metrics two independent ways — from first-principles matrix
//! definitions and from per-family closed forms — and cross-checks the two
//! against each other and against brute-force oracles (sampled fully
//! entangled fraction, hill-climbed CHSH maxima, a density-matrix
//! simulation of the standard teleportation protocol).
//!
//! Modules:
//! - [`numerics`]: small dense complex linear algebra (Jacobi eigensolver,
//!   PSD square root, tensor products).
//! - [`states`]: state construction and validation.
//! - [`metrics`]: family-agnostic metric pipeline plus oracles.
//! - [`closedform`]: per-family analytic formulas and classifiers.
//! - [`telesim`]: operational teleportation-protocol simulator.
//! - [`tables`]: reference-table and curve reproduction.
//! - [`verify`]: the cross-pipeline verification suites.

pub mod closedform;
pub mod error;
pub mod metrics;
pub mod numerics;
pub mod states;
pub mod tables;
pub mod telesim;
pub mod verify;

pub use error::Error;
pub use states::{DensityMatrix, FamilySpec};
