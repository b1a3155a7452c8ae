//! Least-squares channel estimation and its NMSE.
//!
//! With `Y = H X + N`, the unbiased LS estimate `H_hat = Y X^H G^-1` has error
//! `N X^H G^-1`, whose NMSE splits as
//!
//! ```text
//! NMSE = e_min * G_eta,   e_min = sigma_n^2 / (n p_bar sigma_H^2),
//!                         G_eta = (n p_bar / k) tr(G^-1).
//! ```
//!
//! [`monte_carlo_nmse`] checks that split by simulation.

use nalgebra::Cholesky;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::codebook::ActiveSignal;
use crate::gram::{hermitian_cholesky, summarize_geometry, GeometrySummary};
use crate::rng::{complex_gaussian_matrix, stream_rng};
use crate::{CMatrix, Error, Result};

/// System parameters shared by the sensing error and the rate bounds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    /// Channel uses.
    pub n: usize,
    /// Active users.
    pub k: usize,
    /// Receive antennas.
    pub m: usize,
    /// Transmit power per channel use (linear).
    pub p_bar: f64,
    /// Noise variance.
    pub sigma_n2: f64,
    /// Variance of each channel entry.
    pub sigma_h2: f64,
}

impl SystemConfig {
    /// Builds a configuration whose transmit SNR `p_bar / sigma_n2` is `snr_db`.
    pub fn with_snr_db(n: usize, k: usize, m: usize, snr_db: f64, sigma_n2: f64, sigma_h2: f64) -> Self {
        Self { n, k, m, p_bar: sigma_n2 * db_to_linear(snr_db), sigma_n2, sigma_h2 }
    }

    /// Transmit-side SNR `p_bar / sigma_n2` (linear).
    pub fn snr(&self) -> f64 {
        self.p_bar / self.sigma_n2
    }

    pub fn snr_db(&self) -> f64 {
        10.0 * self.snr().log10()
    }

    /// Same system at a different transmit SNR (noise variance kept).
    pub fn at_snr_db(&self, snr_db: f64) -> Self {
        Self { p_bar: self.sigma_n2 * db_to_linear(snr_db), ..*self }
    }

    /// Orthogonal-codeword NMSE floor `sigma_n2 / (n p_bar sigma_h2)`.
    pub fn e_min(&self) -> f64 {
        self.sigma_n2 / (self.n as f64 * self.p_bar * self.sigma_h2)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |v: f64| v > 0.0 && v.is_finite();
        if self.n == 0 || self.k == 0 || self.m == 0 {
            return Err(Error::InvalidSpec(format!("n, k, m must be positive: {self:?}")));
        }
        if !(positive(self.p_bar) && positive(self.sigma_n2) && positive(self.sigma_h2)) {
            return Err(Error::InvalidSpec(format!("powers and variances must be positive: {self:?}")));
        }
        Ok(())
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NmseBreakdown {
    pub e_min: f64,
    pub geometry_factor: f64,
    /// `e_min * geometry_factor`.
    pub nmse_analytic: f64,
    pub nmse_empirical: Option<f64>,
    pub trials: Option<usize>,
}

impl NmseBreakdown {
    /// `|empirical - analytic| / analytic`, if a simulation was run.
    pub fn relative_error(&self) -> Option<f64> {
        self.nmse_empirical.map(|e| (e - self.nmse_analytic).abs() / self.nmse_analytic)
    }
}

/// LS estimator for a fixed pilot/codeword matrix, factorised once.
pub struct LsEstimator {
    x: CMatrix,
    chol: Cholesky<Complex64, nalgebra::Dyn>,
}

impl LsEstimator {
    pub fn new(x: &ActiveSignal) -> Result<Self> {
        if !x.ls_identifiable() {
            return Err(Error::DimensionMismatch(format!("k = {} > n = {}", x.k(), x.n())));
        }
        let summary = summarize_geometry(x, 1.0)?;
        Self::from_summary(x, &summary)
    }

    fn from_summary(x: &ActiveSignal, summary: &GeometrySummary) -> Result<Self> {
        let chol = hermitian_cholesky(&summary.gram).ok_or(Error::RankDeficient {
            min_eig: summary.min_eigenvalue(),
            max_eig: summary.max_eigenvalue(),
        })?;
        Ok(Self { x: x.matrix.clone(), chol })
    }

    /// `H_hat = Y X^H G^-1`, computed as `(G^-1 X Y^H)^H`.
    pub fn estimate(&self, y: &CMatrix) -> Result<CMatrix> {
        if y.ncols() != self.x.ncols() {
            return Err(Error::DimensionMismatch(format!(
                "Y has {} columns, X has {}",
                y.ncols(),
                self.x.ncols()
            )));
        }
        let rhs = &self.x * y.adjoint();
        Ok(self.chol.solve(&rhs).adjoint())
    }
}

pub fn ls_estimate(y: &CMatrix, x: &ActiveSignal) -> Result<CMatrix> {
    LsEstimator::new(x)?.estimate(y)
}

pub fn analytic_nmse(cfg: &SystemConfig, summary: &GeometrySummary) -> NmseBreakdown {
    let e_min = cfg.e_min();
    NmseBreakdown {
        e_min,
        geometry_factor: summary.geometry_factor,
        nmse_analytic: e_min * summary.geometry_factor,
        nmse_empirical: None,
        trials: None,
    }
}

/// Simulated NMSE with a fresh `H ~ CN(0, sigma_h2)` and noise every trial.
///
/// Trial `t` draws from stream `t` of `seed`; per-trial error and channel
/// energies are reduced in trial order, so the result does not depend on
/// the rayon worker count. The estimate is `sum ||H_hat - H||^2 / sum ||H||^2`.
pub fn monte_carlo_nmse(cfg: &SystemConfig, x: &ActiveSignal, trials: usize, seed: u64) -> Result<NmseBreakdown> {
    run_monte_carlo(cfg, x, None, trials, seed)
}

/// As [`monte_carlo_nmse`] but with the channel held at `h` in every trial.
pub fn monte_carlo_nmse_fixed_h(
    cfg: &SystemConfig,
    x: &ActiveSignal,
    h: &CMatrix,
    trials: usize,
    seed: u64,
) -> Result<NmseBreakdown> {
    if h.shape() != (cfg.m, cfg.k) {
        return Err(Error::DimensionMismatch(format!("H is {:?}, expected ({}, {})", h.shape(), cfg.m, cfg.k)));
    }
    run_monte_carlo(cfg, x, Some(h), trials, seed)
}

fn run_monte_carlo(
    cfg: &SystemConfig,
    x: &ActiveSignal,
    fixed_h: Option<&CMatrix>,
    trials: usize,
    seed: u64,
) -> Result<NmseBreakdown> {
    cfg.validate()?;
    if trials == 0 {
        return Err(Error::InvalidSpec("trials must be >= 1".into()));
    }
    if x.k() != cfg.k || x.n() != cfg.n {
        return Err(Error::DimensionMismatch(format!(
            "X is {}x{}, config expects {}x{}",
            x.k(),
            x.n(),
            cfg.k,
            cfg.n
        )));
    }
    if !x.ls_identifiable() {
        return Err(Error::DimensionMismatch(format!("k = {} > n = {}", cfg.k, cfg.n)));
    }
    let summary = summarize_geometry(x, cfg.p_bar)?;
    let estimator = LsEstimator::from_summary(x, &summary)?;
    let xm = &x.matrix;

    let per_trial: Vec<(f64, f64)> = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let mut rng = stream_rng(seed, t);
            let h = match fixed_h {
                Some(h) => h.clone(),
                None => complex_gaussian_matrix(&mut rng, cfg.m, cfg.k, cfg.sigma_h2),
            };
            let noise = complex_gaussian_matrix(&mut rng, cfg.m, cfg.n, cfg.sigma_n2);
            let y = &h * xm + noise;
            let h_hat = estimator.estimate(&y).expect("shapes checked above");
            ((h_hat - &h).norm_squared(), h.norm_squared())
        })
        .collect();

    let (err, energy) = per_trial.iter().fold((0.0, 0.0), |(e, h), (de, dh)| (e + de, h + dh));
    let mut out = analytic_nmse(cfg, &summary);
    out.nmse_empirical = Some(err / energy);
    out.trials = Some(trials);
    Ok(out)
}
