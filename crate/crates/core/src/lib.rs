//! Simulation toolkit for time reversal in disordered dipolar spin-1/2 ensembles.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod couplings;
pub mod ensemble;
pub mod error;
pub mod mace;
pub mod protocols;
pub mod quantum;
pub mod results;
pub mod units;

pub use error::{Error, Result};
