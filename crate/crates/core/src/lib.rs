//! Finite-blocklength link adaptation and admission control for periodic
//! URLLC traffic.
//!
//! The crate is layered bottom-up:
//!
//! * [`numerics`]: Gaussian tail `Q`, its inverse, bracketed bisection;
//! * [`fbl_rate`]: capacity, dispersion, fitted M-QAM mutual information and
//!   the normal-approximation rates;
//! * [`mcs`]: MCS tables, practical blocklength, minimum blocklength, SNR
//!   thresholds and threshold-based selection;
//! * [`qos`]: token-bucket/rate-server delay bound and the minimum-bandwidth
//!   admission curve;
//! * [`sim`]: a noise-limited hexagonal multi-cell drop simulator that checks
//!   the admission curve is a lower bound;
//! * [`cli`]: the `urllc` command line front end.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > 0.0)` also rejects NaN

pub mod cli;
pub mod error;
pub mod fbl_rate;
pub mod mcs;
pub mod numerics;
pub mod qos;
pub mod sim;

pub use error::{Error, Result};
pub use fbl_rate::{ChannelPoint, ModulationFit, Snr};
pub use mcs::{McsCatalogue, McsConfig, SnrThreshold, SnrThresholdTable};
pub use numerics::Probability;
pub use qos::{QosConstraint, TrafficSpec};
