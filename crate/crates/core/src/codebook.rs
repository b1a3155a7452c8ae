//! Gaussian random codebook and the correlation <-> bits calculus.
//!
//! A codebook of `2^b` rows with i.i.d. `CN(0, p_bar)` entries is never
//! materialised; only the `k` active rows are drawn. Statistics of the full
//! codebook enter through its maximal pairwise correlation, which for `t`
//! pairs of length-`n` codewords is
//!
//! ```text
//! rho_max = sqrt(ln t / n) + gamma / (2 sqrt(n ln t)),   t = 2^b (2^b - 1) / 2
//!         ~ sqrt(2 b ln 2 / n)                            (2^b >> 1)
//! ```
//!
//! The second form is a bijection in `b`; [`bits_from_rho`] is its inverse.

use std::f64::consts::LN_2;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::rng::{complex_gaussian_matrix, stream_rng};
use crate::{CMatrix, Error, Result};

/// Euler-Mascheroni constant, the default location correction `gamma`.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[derive(Debug, Clone, PartialEq)]
pub struct CodebookSpec {
    /// Channel uses (codeword length).
    pub n: usize,
    /// Information bits per user. Real-valued; floored only when the
    /// codebook size has to be checked against `k`.
    pub b: f64,
    /// Active users.
    pub k: usize,
    /// Average transmit power per channel use (linear).
    pub p_bar: f64,
    pub seed: u64,
}

impl CodebookSpec {
    pub fn new(n: usize, b: f64, k: usize, p_bar: f64, seed: u64) -> Self {
        Self { n, b, k, p_bar, seed }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidSpec("n must be >= 1".into()));
        }
        if self.k == 0 {
            return Err(Error::InvalidSpec("k must be >= 1".into()));
        }
        if !(self.p_bar > 0.0 && self.p_bar.is_finite()) {
            return Err(Error::InvalidSpec(format!("p_bar must be positive, got {}", self.p_bar)));
        }
        if !(self.b > 0.0) {
            return Err(Error::InvalidSpec(format!("b must be positive, got {}", self.b)));
        }
        // 2^floor(b) codewords must hold k distinct active rows.
        let whole_bits = self.b.floor();
        if whole_bits < 64.0 && (self.k as f64) > 2f64.powf(whole_bits) {
            return Err(Error::InvalidSpec(format!(
                "k = {} exceeds codebook size 2^{}",
                self.k, whole_bits as u32
            )));
        }
        Ok(())
    }
}

/// The `k x n` matrix `X` of active codewords, one row per user.
#[derive(Debug, Clone, PartialEq)]
pub struct ActiveSignal {
    pub matrix: CMatrix,
}

impl ActiveSignal {
    pub fn new(matrix: CMatrix) -> Self {
        Self { matrix }
    }

    /// Active users.
    pub fn k(&self) -> usize {
        self.matrix.nrows()
    }

    /// Channel uses.
    pub fn n(&self) -> usize {
        self.matrix.ncols()
    }

    /// Whether the LS estimator can possibly be applied (`k <= n`).
    pub fn ls_identifiable(&self) -> bool {
        self.k() <= self.n()
    }

    /// `k` mutually orthogonal rows of a scaled DFT matrix, each with energy
    /// `n * p_bar`, so that `X X^H = n p_bar I`.
    pub fn orthogonal(k: usize, n: usize, p_bar: f64) -> Result<Self> {
        if k == 0 || k > n {
            return Err(Error::InvalidSpec(format!("orthogonal rows need 1 <= k <= n, got k = {k}, n = {n}")));
        }
        let amp = p_bar.sqrt();
        let matrix = DMatrix::from_fn(k, n, |i, t| {
            let phase = -2.0 * std::f64::consts::PI * ((i * t) % n) as f64 / n as f64;
            Complex64::from_polar(amp, phase)
        });
        Ok(Self { matrix })
    }

    /// Mean of `|x_ij|^2` over all entries.
    pub fn mean_power(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm_sqr()).sum::<f64>() / self.matrix.len() as f64
    }
}

/// Off-diagonal correlation structure of `G = n p_bar (I + Delta)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport {
    /// Hermitian `k x k` matrix with an exactly zero diagonal.
    pub delta: CMatrix,
    pub rho_max_empirical: f64,
}

/// Draws the `k` active rows of the Gaussian codebook described by `spec`.
///
/// Deterministic in `spec.seed`. `k > n` is allowed here (the matrix is
/// well defined) but such a signal cannot feed the LS estimator; see
/// [`ActiveSignal::ls_identifiable`].
pub fn sample_active_codewords(spec: &CodebookSpec) -> Result<ActiveSignal> {
    spec.validate()?;
    if spec.k > spec.n {
        log::warn!("k = {} > n = {}: the sampled signal is not LS-identifiable", spec.k, spec.n);
    }
    let mut rng = stream_rng(spec.seed, 0);
    Ok(ActiveSignal::new(complex_gaussian_matrix(&mut rng, spec.k, spec.n, spec.p_bar)))
}

/// `ln t` with `t = 2^b (2^b - 1) / 2`, evaluated without forming `2^b`.
fn ln_pair_count(b: f64) -> f64 {
    // ln t = (2b - 1) ln 2 + ln(1 - 2^-b)
    (2.0 * b - 1.0) * LN_2 + (-(-b * LN_2).exp()).ln_1p()
}

/// Maximal codeword correlation of a `2^b`-row Gaussian codebook of length
/// `n`, with location correction `gamma`.
pub fn rho_max_closed(b: f64, n: usize, gamma: f64) -> Result<f64> {
    let ln_t = ln_pair_count(b);
    if !(ln_t > 0.0) {
        return Err(Error::DegenerateCodebook { b, ln_t });
    }
    let n = n as f64;
    Ok((ln_t / n).sqrt() + gamma / (2.0 * (n * ln_t).sqrt()))
}

/// Large-codebook form `sqrt(2 b ln 2 / n)`.
pub fn rho_max_approx(b: f64, n: usize) -> f64 {
    (2.0 * b * LN_2 / n as f64).sqrt()
}

/// Inverse of [`rho_max_approx`] in `b`: the number of bits whose codebook
/// has maximal correlation `rho`.
pub fn bits_from_rho(rho: f64, n: usize) -> f64 {
    n as f64 * rho * rho / (2.0 * LN_2)
}

/// `Delta = X X^H / (n p_bar) - I` with its diagonal set to zero, normalised
/// by the nominal row energy rather than the realised one.
pub fn empirical_correlation(x: &ActiveSignal, p_bar: f64) -> Result<CorrelationReport> {
    if x.k() < 2 {
        return Err(Error::SingleUser);
    }
    let gram = &x.matrix * x.matrix.adjoint();
    let delta = delta_from_gram(&gram, x.n(), p_bar);
    let rho_max_empirical = max_off_diagonal_abs(&delta);
    Ok(CorrelationReport { delta, rho_max_empirical })
}

pub(crate) fn delta_from_gram(gram: &CMatrix, n: usize, p_bar: f64) -> CMatrix {
    let k = gram.nrows();
    let scale = 1.0 / (n as f64 * p_bar);
    let mut delta = CMatrix::zeros(k, k);
    for i in 0..k {
        for j in (i + 1)..k {
            let v = gram[(i, j)] * scale;
            delta[(i, j)] = v;
            delta[(j, i)] = v.conj();
        }
    }
    delta
}

fn max_off_diagonal_abs(delta: &CMatrix) -> f64 {
    let k = delta.nrows();
    let mut best = 0.0f64;
    for i in 0..k {
        for j in (i + 1)..k {
            best = best.max(delta[(i, j)].norm());
        }
    }
    best
}
