//! Verification engine for central-binomial supercongruences.

pub mod arith;
pub mod binom;
pub mod congruence;
pub mod error;
pub mod identity;
pub mod runner;
pub mod selftest;

pub use error::{Error, Result};
