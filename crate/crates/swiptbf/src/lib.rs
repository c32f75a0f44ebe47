//! Minimum-power secure beamforming with simultaneous wireless information
//! and power transfer.
//!
//! A multi-antenna transmitter serves one power-splitting desired receiver
//! while `K-1` idle receivers harvest energy and must be treated as potential
//! eavesdroppers. The design variables are the rank-constrained transmit
//! covariance `W = w w^H`, the artificial-noise covariance `V`, and the power
//! splitting ratio `rho`; the objective is total transmit power subject to
//! SINR, secrecy, harvesting, and power-supply constraints.
//!
//! - [`model`]: parameter/channel/solution types and performance formulas.
//! - [`channel`]: Rician Monte Carlo channel synthesis.
//! - [`problems`]: semidefinite encodings of the relaxed and restricted
//!   designs plus null-space baselines.
//! - [`schemes`]: end-to-end solve paths and rank-one extraction.
//! - [`certify`]: dual recovery, KKT residuals, and the rank-one optimality
//!   certificate.
//! - [`oracle`]: brute-force grid reference for small instances.
//! - [`harness`]: parallel Monte Carlo sweeps and CSV emission.
//! - [`io`]: serialization of instances, solutions, and certificates.

pub mod certify;
pub mod channel;
pub mod harness;
pub mod io;
pub mod model;
pub mod oracle;
pub mod problems;
pub mod schemes;
