//! Geometry of the active codewords through their Gram matrix `G = X X^H`.
//!
//! The LS sensing error is `e_min * G_eta` with geometry factor
//! `G_eta = (n p_bar / k) tr(G^-1)`. This module evaluates `G_eta` exactly
//! and through its two surrogates:
//!
//! - worst case: Gershgorin puts `l_min >= n p_bar (1 - (k-1) rho_max)`,
//!   giving `G_eta <= 1 / (1 - (k-1) rho_max)`;
//! - typical case: a second-order Neumann expansion of `(I + Delta)^-1`
//!   gives `tr(G^-1) ~ (k + ||Delta||_F^2) / (n p_bar)`, i.e.
//!   `G_eta ~ 1 + (k-1) rho_max^2`.

use nalgebra::{Cholesky, DMatrix, Dyn};
use num_complex::Complex64;

use crate::codebook::{delta_from_gram, ActiveSignal};
use crate::{CMatrix, Error, Result};

/// Refuse LS-dependent outputs when `l_min / l_max` falls to this level.
pub const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct GeometrySummary {
    /// Hermitian `k x k` Gram matrix `X X^H`.
    pub gram: CMatrix,
    /// Eigenvalues of `gram`, ascending.
    pub eigenvalues: Vec<f64>,
    /// `tr(G^-1)`, from Cholesky solves.
    pub trace_inverse: f64,
    /// `(n p_bar / k) tr(G^-1)`.
    pub geometry_factor: f64,
    /// Gershgorin lower bound on the smallest eigenvalue.
    pub gershgorin_lower: f64,
    /// `k + ||Delta||_F^2`, the Neumann surrogate of `n p_bar tr(G^-1)`.
    pub neumann_trace: f64,
    pub n: usize,
    pub p_bar: f64,
}

impl GeometrySummary {
    pub fn k(&self) -> usize {
        self.gram.nrows()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max_eigenvalue(&self) -> f64 {
        *self.eigenvalues.last().unwrap()
    }

    /// Normalised correlation matrix `Delta` (zero diagonal).
    pub fn delta(&self) -> CMatrix {
        delta_from_gram(&self.gram, self.n, self.p_bar)
    }
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn hermitian_eigenvalues(h: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = h.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    ev
}

/// `X X^H` with the diagonal made exactly real and the matrix exactly Hermitian.
pub fn gram_matrix(x: &ActiveSignal) -> CMatrix {
    let mut g = &x.matrix * x.matrix.adjoint();
    let k = g.nrows();
    for i in 0..k {
        g[(i, i)] = Complex64::new(g[(i, i)].re, 0.0);
        for j in (i + 1)..k {
            g[(j, i)] = g[(i, j)].conj();
        }
    }
    g
}

/// Cholesky factor of a Hermitian positive definite matrix.
///
/// nalgebra's complex factorisation takes complex square roots of the
/// pivots and so accepts indefinite input; a pivot that is not real and
/// positive is rejected here.
pub fn hermitian_cholesky(h: &CMatrix) -> Option<Cholesky<Complex64, Dyn>> {
    let chol = h.clone().cholesky()?;
    let l = chol.l_dirty();
    let ok = (0..l.nrows()).all(|i| {
        let d = l[(i, i)];
        d.re > 0.0 && d.im.abs() <= 1e-12 * d.re
    });
    ok.then_some(chol)
}

/// `tr(G^-1)` via a Cholesky factorisation and solves against `I`.
pub fn trace_inverse_cholesky(gram: &CMatrix) -> Result<f64> {
    let k = gram.nrows();
    let chol = hermitian_cholesky(gram).ok_or(Error::SingularGram)?;
    let inv = chol.solve(&DMatrix::<Complex64>::identity(k, k));
    Ok((0..k).map(|i| inv[(i, i)].re).sum())
}

pub fn summarize_geometry(x: &ActiveSignal, p_bar: f64) -> Result<GeometrySummary> {
    let (k, n) = (x.k(), x.n());
    if k > n {
        return Err(Error::DimensionMismatch(format!("k = {k} > n = {n}: Gram matrix is singular")));
    }
    let gram = gram_matrix(x);
    let eigenvalues = hermitian_eigenvalues(&gram);
    let (min_eig, max_eig) = (eigenvalues[0], eigenvalues[k - 1]);
    if !(min_eig > RANK_TOLERANCE * max_eig) {
        return Err(Error::RankDeficient { min_eig, max_eig });
    }
    let trace_inverse = trace_inverse_cholesky(&gram).map_err(|_| Error::RankDeficient { min_eig, max_eig })?;
    let geometry_factor = n as f64 * p_bar / k as f64 * trace_inverse;

    let delta = delta_from_gram(&gram, n, p_bar);
    let neumann_trace = k as f64 + delta.iter().map(|z| z.norm_sqr()).sum::<f64>();

    let mut summary = GeometrySummary {
        gram,
        eigenvalues,
        trace_inverse,
        geometry_factor,
        gershgorin_lower: 0.0,
        neumann_trace,
        n,
        p_bar,
    };
    summary.gershgorin_lower = gershgorin_min_eig_bound(&summary);
    if summary.geometry_factor < 1.0 - 1e-9 {
        log::debug!("geometry factor {} < 1 (row energies differ from n p_bar)", summary.geometry_factor);
    }
    Ok(summary)
}

/// Gershgorin lower bound `min_i (G_ii - sum_{j != i} |G_ij|)` on the
/// smallest eigenvalue of the realised Gram matrix.
///
/// When every row carries the nominal energy (`G_ii = n p_bar`) this is
/// `n p_bar (1 - max_i sum_{j != i} |Delta_ij|)`.
pub fn gershgorin_min_eig_bound(summary: &GeometrySummary) -> f64 {
    let g = &summary.gram;
    let k = g.nrows();
    (0..k)
        .map(|i| {
            let radius: f64 = (0..k).filter(|&j| j != i).map(|j| g[(i, j)].norm()).sum();
            g[(i, i)].re - radius
        })
        .fold(f64::INFINITY, f64::min)
}

/// Worst-case form `n p_bar (1 - (k-1) rho_max)`, all pairs at `rho_max`.
pub fn gershgorin_analytic_bound(n: usize, p_bar: f64, k: usize, rho_max: f64) -> f64 {
    n as f64 * p_bar * (1.0 - (k as f64 - 1.0) * rho_max)
}

/// `1 / (1 - (k-1) rho_max)`.
pub fn worst_case_geometry_factor(k: usize, rho_max: f64) -> Result<f64> {
    let load = (k as f64 - 1.0) * rho_max;
    if load >= 1.0 {
        return Err(Error::WorstCaseSingular(load));
    }
    Ok(1.0 / (1.0 - load))
}

/// `1 + (k-1) rho_max^2`.
pub fn typical_geometry_factor(k: usize, rho_max: f64) -> f64 {
    1.0 + (k as f64 - 1.0) * rho_max * rho_max
}

/// Largest eigenvalue magnitude of `Delta`.
pub fn delta_spectral_radius(summary: &GeometrySummary) -> f64 {
    hermitian_eigenvalues(&summary.delta())
        .into_iter()
        .fold(0.0, |acc, l| acc.max(l.abs()))
}

/// Second-order Neumann approximation `(k + ||Delta||_F^2) / (n p_bar)` of
/// `tr(G^-1)`.
///
/// `Delta` is rebuilt from `summary.gram` with the given `p_bar` and `n`.
pub fn neumann_trace_approx(summary: &GeometrySummary, p_bar: f64, n: usize) -> Result<f64> {
    let delta = delta_from_gram(&summary.gram, n, p_bar);
    let radius = hermitian_eigenvalues(&delta).into_iter().fold(0.0f64, |acc, l| acc.max(l.abs()));
    if radius >= 1.0 {
        return Err(Error::NeumannDiverges(radius));
    }
    let k = summary.k() as f64;
    let energy: f64 = delta.iter().map(|z| z.norm_sqr()).sum();
    Ok((k + energy) / (n as f64 * p_bar))
}

/// Rescales each row of `x` to energy exactly `n * p_bar`.
pub fn normalize_row_energy(x: &ActiveSignal, p_bar: f64) -> ActiveSignal {
    let target = (x.n() as f64 * p_bar).sqrt();
    let mut m = x.matrix.clone();
    for mut row in m.row_iter_mut() {
        let norm = row.norm();
        if norm > 0.0 {
            row *= Complex64::new(target / norm, 0.0);
        }
    }
    ActiveSignal::new(m)
}
