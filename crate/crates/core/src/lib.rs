//! Vector-valued fractal interpolation functions.
//!
//! The crate is organised around four layers:
//!
//! * [`fif`] builds the iterated function system `{W_k}` from interpolation
//!   data and renders its attractor as a sampled function,
//! * [`measure`] samples the invariant measure carried by the graph,
//! * [`dimension`] estimates box and Hölder-type quantities and evaluates
//!   the function-space membership conditions,
//! * [`fracint`] computes Riemann–Liouville fractional integrals and the
//!   fractal system satisfied by the fractional integral of a FIF.
//!
//! [`cli`] wires these into the `fiflab` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod dimension;
pub mod error;
pub mod fif;
pub mod fracint;
pub mod io;
pub mod measure;
pub mod regression;

pub use error::{FifError, Result};
