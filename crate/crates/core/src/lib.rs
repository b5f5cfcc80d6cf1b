//! Superset-of-support recovery for one-bit compressed sensing.
//!
//! A signal `x` is observed only through `sign(Mx)`. The measurement matrix
//! is split in two: a binary block whose sign outcomes are reinterpreted as
//! group tests and decoded into a small superset of `supp(x)`, and a Gaussian
//! block that BIHT uses to approximate `x` inside that superset.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, parallel runners
//! and the command-line tool live in the `obcs` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod codes;
pub mod construct;
pub mod decode;
mod enumerate;
pub mod error;
pub mod experiment;
pub mod field;
pub mod matrix;
pub mod signal;
pub mod verify;

pub use enumerate::{binomial, EnumCap};
pub use error::{Error, Result};
pub use matrix::{BinaryMatrix, MeasurementMatrix, RealMatrix};
pub use signal::{Sign, SignVector, SignalModel, SparseSignal, SupportSet};
