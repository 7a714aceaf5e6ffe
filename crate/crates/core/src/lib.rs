//! Exact and simulated computations around the Borel distribution: finite-window law algebra,
//! size biasing, the Stein-equation coefficient table for Borel approximation, M/G/1 busy-period
//! simulation with Borel approximation error bounds, and Borel tail bounds.

// `!(x > 0.0)` style checks are used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod borel;
pub mod checks;
pub mod cli;
pub mod concentration;
pub mod error;
pub mod lawkit;
pub mod quad;
pub mod queue;
pub mod rng;
pub mod sizebias;
pub mod special;
pub mod stein;
pub mod table;

pub use borel::{BorelParams, Draw};
pub use error::{Error, Result};
pub use lawkit::{TruncatedLaw, TvInterval};
