//! Risk-aware day-ahead market clearing.
//!
//! The crate computes CVaR-based committed power from Monte Carlo load and
//! renewable scenarios, clears the market by merit order (single bus) or along a
//! radial feeder with a uniform line limit, certifies dispatches with KKT residual
//! reports, and settles generator profits under commitment and realization.

pub mod error;
pub mod experiment;
pub mod merit;
pub mod opf;
pub mod radial;
pub mod risk;
pub mod scenario;
pub mod settlement;

pub use error::{Error, Result};
