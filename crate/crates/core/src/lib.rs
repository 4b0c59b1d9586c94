//! Noise recycling for orthogonal channels with Gauss-Markov correlated noise.
//!
//! A decoded channel yields an estimate of its own noise realization,
//! `z_hat = y - x_hat`. When the noise on neighbouring channels is correlated
//! with coefficient `rho`, subtracting `rho * z_hat` from a neighbour's
//! received signal before decoding leaves it with only the innovation part of
//! its noise. This crate provides:
//!
//! * [`channel`]: the Gauss-Markov noise model, BPSK and Eb/N0 handling;
//! * [`codes`]: random linear codes, CRCs and CRC-aided polar codes;
//! * [`grand`]: GRAND, ORBGRAND and SGRANDAB decoders plus an ML oracle;
//! * [`recycling`]: predetermined-order and racing recycling schemes;
//! * [`rate_region`]: the achievable-rate formulas;
//! * [`harness`]: seeded Monte-Carlo BLER experiments and result files.

pub mod channel;
pub mod codes;
pub mod error;
pub mod gf2;
pub mod grand;
pub mod harness;
pub mod rate_region;
pub mod recycling;
pub mod selftest;

pub use error::{Error, Result};
