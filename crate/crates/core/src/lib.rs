//! Finite-blocklength communication/sensing tradeoffs for uplink ISAC
//! multiple access.
//!
//! The crate is organised bottom-up:
//!
//! - [`codebook`]: Gaussian random codebook sampling and the maximal
//!   correlation <-> information bits calculus.
//! - [`gram`]: Gram-matrix geometry of the active codewords (eigenvalues,
//!   trace of the inverse, Gershgorin and Neumann diagnostics).
//! - [`ls`]: least-squares channel estimation, the analytic NMSE
//!   decomposition `e_min * G_eta` and a Monte Carlo verifier.
//! - [`tradeoff`]: achievability / converse code-rate bounds under an NMSE
//!   constraint, capped by the ergodic Shannon ceiling.
//! - [`crb`]: Fisher information and Cramer-Rao bound for parameters
//!   embedded in the channel, exploiting the `G* (x) I_m` structure.
//! - [`channel`]: line-of-sight array channel and its AoA / range /
//!   velocity Jacobian.

// negated comparisons below deliberately reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod codebook;
pub mod crb;
mod error;
pub mod gram;
pub mod ls;
pub mod rng;
pub mod tradeoff;

pub use error::{Error, Result};

pub use channel::{build_channel, build_jacobian, finite_difference_jacobian, FdSteps, Parameter, RadioConfig, UserState};
pub use codebook::{
    bits_from_rho, empirical_correlation, rho_max_approx, rho_max_closed, sample_active_codewords,
    ActiveSignal, CodebookSpec, CorrelationReport, EULER_GAMMA,
};
pub use crb::{crb_trace, crb_trace_with, fisher_information, CrbResult, InverseMode, JacobianMatrix};
pub use gram::{
    gershgorin_analytic_bound, gershgorin_min_eig_bound, neumann_trace_approx, summarize_geometry,
    typical_geometry_factor, worst_case_geometry_factor, GeometrySummary,
};
pub use ls::{analytic_nmse, ls_estimate, monte_carlo_nmse, monte_carlo_nmse_fixed_h, LsEstimator, NmseBreakdown, SystemConfig};
pub use tradeoff::{
    achievability_point, converse_point, energy_per_bit, shannon_per_user, tradeoff_sweep, BoundPoint,
    TradeoffPoint,
};

/// Dense complex matrix used throughout the crate.
pub type CMatrix = nalgebra::DMatrix<num_complex::Complex64>;
