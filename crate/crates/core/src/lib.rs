//! Outage, spectral-efficiency and energy-efficiency analysis of a two-way
//! decode-and-forward relay that powers its broadcast from RF energy harvested
//! out of the users' uplink transmissions and co-channel interference.
//!
//! Both harvesting receivers are covered: power splitting (PSR) and time
//! switching (TSR). [`analytic`] gives the closed forms, [`montecarlo`]
//! simulates the same system at signal level as an independent check, and
//! [`sweep`] drives one-dimensional parameter sweeps into CSV.

// `!(x > 0.0)` is the NaN-rejecting form used by every domain check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod error;
pub mod metrics;
pub mod model;
pub mod montecarlo;
pub mod specfun;
pub mod sweep;

pub use error::{Error, Result};
