//! Config-driven experiment runner for `isac-fbl-core`.
//!
//! Column to figure mapping of the emitted CSV files:
//!
//! - `tradeoff_snr`: rate vs. SNR curves, one per `e_th` (`rate_achi`,
//!   `rate_conv`, `shannon_rate` against `snr_db`).
//! - `tradeoff_surface`: rate over the `(e_th, n)` plane at fixed SNR.
//! - `montecarlo_verify`: analytic vs. simulated LS NMSE.
//! - `crb_sweep`: `crb_value` against `snr_db`, one curve per
//!   `(parameter, variation_value)`.

pub mod config;
pub mod error;
pub mod runner;

pub use config::{load_config, load_config_for, Experiment, RunConfig};
pub use error::{Result, RunError};
pub use runner::{run, run_crb_sweep, run_montecarlo, run_tradeoff, write_output};
