//! Decoherence of a spin-1/2 particle moving through a Gaussian magnetic
//! noise background.
//!
//! The crate is organised bottom-up:
//!
//! * [`spinalg`]: fixed-size (2×2 / 4×4) complex matrix kernel.
//! * [`relkin`]: rapidity, Lorentz transformation of fields and the
//!   geometry of the boosted noise axis.
//! * [`channel_analytic`]: closed-form single-qubit channel in its
//!   element-wise, operator-sum and dressed forms.
//! * [`channel_oracle`]: exact per-field unitaries averaged by
//!   Gauss–Hermite quadrature or seeded Monte Carlo.
//! * [`channel_analysis`]: Choi matrices, CPTP checks, Kraus extraction.
//! * [`entangle`]: two-qubit concurrence under the common bath.
//! * [`cli`], [`table`], [`verify`]: command-line front end, CSV/JSON
//!   output and the self-check suite.

pub mod channel_analysis;
pub mod channel_analytic;
pub mod channel_oracle;
pub mod cli;
pub mod entangle;
mod error;
pub mod relkin;
pub mod spinalg;
pub mod table;
pub mod verify;

pub use error::{Error, Result};
