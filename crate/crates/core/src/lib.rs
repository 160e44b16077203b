//! Simulation benchmark comparing statistical and tree-ensemble one-step
//! forecasters on synthetic nonlinear time series and queueing traces.
//!
//! The crate is organised around the benchmark pipeline:
//!
//! - [`series`]: series container, differencing, MSE/MAPE.
//! - [`dgp`]: the twelve synthetic generators plus jump and random-walk
//!   overlays.
//! - [`queue`]: M/M/c discrete-event simulation sampled as a series.
//! - [`ts`]: naive, ARIMA/SARIMA and a trimmed trigonometric-free
//!   state-space smoother, each with one-step forecasts.
//! - [`ml`]: sliding-window frames, CART trees, random forests and
//!   second-order boosted trees.
//! - [`eval`]: replication runner, ranking and rolling-origin validation.
//! - [`report`]: stable CSV encodings of the evaluation outputs.

pub mod dgp;
pub mod error;
pub mod eval;
pub mod ml;
pub mod queue;
pub mod report;
pub mod seed;
pub mod series;
pub mod ts;

pub use error::{Error, Result};
pub use series::TimeSeries;
