//! Numerical machinery for generalization bounds in multi-series time-series
//! forecasting: dataset splits, synthetic generators, beta-mixing
//! coefficients, discrepancy estimators, Rademacher complexities, and the
//! bound evaluators that combine them.

pub mod bounds;
pub mod complexity;
pub mod discrepancy;
pub mod error;
pub mod hypotheses;
pub mod linalg;
pub mod mixing;
pub mod optim;
pub mod panel;
pub mod partitions;
pub mod processes;
pub mod rng;
pub mod stats;

pub use error::{CoreError, Result};
pub use panel::{Example, TimeSeriesPanel};
