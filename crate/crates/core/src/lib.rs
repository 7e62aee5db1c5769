//! Rate-splitting multiple access for overloaded multi-antenna downlinks.
//!
//! Closed-form max-min power and rate-split allocation under perfect and
//! imperfect CSIT, the rate bounds behind it, a grid-search reference,
//! Monte Carlo evaluation and SDMA baselines.

// NaN must fail validation, so negated comparisons are intentional.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod allocation;
pub mod benchmarks;
pub mod bounds;
pub mod channel;
pub mod error;
pub mod harness;
pub mod precoders;
pub mod rates;
pub mod search;
pub mod selftest;
pub mod specfun;

pub use error::{Error, Result};
