//! Simulation and analysis toolkit for N-way Bragg-scattering four-wave-mixing
//! (BS-FWM) frequency beamsplitters.
//!
//! N weak frequency modes are coupled by N strong pumps in a χ(3) fiber. The
//! crate covers the classical side (dispersion and phase matching, the weak-field
//! transfer matrix, a brute-force coupled-mode integrator) and the quantum side
//! (singles and coincidence statistics for coherent, photon-pair and two-mode
//! squeezed inputs, with a Gaussian/Fock oracle), plus the least-squares pipeline
//! used to turn count data into model parameters.
//!
//! Mode indices are zero-based throughout the Rust API. Configuration files and
//! CSV headers use one-based labels (`g1_1`, `g2_13`, ...).

pub mod cli;
pub mod dispersion;
pub mod error;
pub mod fitting;
pub mod linalg;
pub mod oracle;
pub mod propagation;
pub mod quantum;
pub mod transfer;

pub use error::{Error, Result};

/// Complex scalar used for all field amplitudes and matrix entries.
pub type C64 = num_complex::Complex64;
