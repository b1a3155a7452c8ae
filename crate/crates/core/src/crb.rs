//! Cramer-Rao bound for parameters embedded in the channel.
//!
//! The LS error `E_h = vec(N X^H G^-1)` (column stacking, one length-`m`
//! block per user) has covariance `C_h = sigma_n^2 ((G*)^-1 (x) I_m)`, so
//!
//! ```text
//! F = 2 Re{J^H C_h^-1 J} = (2 / sigma_n^2) Re{J^H (G* (x) I_m) J}
//! ```
//!
//! and `E||P_hat - P||^2 >= tr(F^-1)`. Because `J` is block diagonal across
//! users, the `(a, b)` user block of `F` is
//! `(2 / sigma_n^2) Re{conj(G_ab) J_a^H J_b}`; the `mk x mk` Kronecker
//! product is never formed.

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::gram::hermitian_cholesky;
use crate::{CMatrix, Error, Result};

/// Relative eigenvalue cutoff below which the FIM counts as singular.
pub const FIM_CUTOFF: f64 = 1e-12;

/// Jacobian of `vec(H)` with respect to the sensing parameters.
///
/// User `i` contributes an `m x q_i` block occupying rows `i*m..(i+1)*m` of
/// the dense `mk x q` matrix and zeros elsewhere.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobianMatrix {
    pub blocks: Vec<CMatrix>,
}

impl JacobianMatrix {
    pub fn new(blocks: Vec<CMatrix>) -> Result<Self> {
        let m = blocks.first().map(|b| b.nrows()).unwrap_or(0);
        if blocks.iter().any(|b| b.nrows() != m) {
            return Err(Error::DimensionMismatch("all Jacobian blocks need the same row count".into()));
        }
        Ok(Self { blocks })
    }

    pub fn users(&self) -> usize {
        self.blocks.len()
    }

    pub fn antennas(&self) -> usize {
        self.blocks.first().map(|b| b.nrows()).unwrap_or(0)
    }

    /// Total parameter count `q`.
    pub fn parameters(&self) -> usize {
        self.blocks.iter().map(|b| b.ncols()).sum()
    }

    fn offsets(&self) -> Vec<usize> {
        self.blocks
            .iter()
            .scan(0, |acc, b| {
                let start = *acc;
                *acc += b.ncols();
                Some(start)
            })
            .collect()
    }

    /// Keeps only the given columns of every user block, in the given order.
    pub fn select_columns(&self, columns: &[usize]) -> Result<Self> {
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                if let Some(&c) = columns.iter().find(|&&c| c >= b.ncols()) {
                    return Err(Error::DimensionMismatch(format!("column {c} out of range for block with {}", b.ncols())));
                }
                Ok(b.select_columns(columns))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(blocks)
    }

    /// Materialised `mk x q` matrix.
    pub fn to_dense(&self) -> CMatrix {
        let m = self.antennas();
        let mut out = CMatrix::zeros(m * self.users(), self.parameters());
        for ((i, b), off) in self.blocks.iter().enumerate().zip(self.offsets()) {
            out.view_mut((i * m, off), (m, b.ncols())).copy_from(b);
        }
        out
    }

    /// Euclidean norm of column `col` of user `user`'s block.
    pub fn column_norm(&self, user: usize, col: usize) -> f64 {
        self.blocks[user].column(col).norm()
    }
}

#[derive(Debug, Clone)]
pub struct CrbResult {
    /// Real symmetric `q x q` Fisher information.
    pub fim: DMatrix<f64>,
    /// Sum of the per-parameter bounds, `tr(F^-1)`.
    pub crb_trace: f64,
    /// Diagonal of `F^-1`.
    pub per_parameter: Vec<f64>,
}

/// How [`crb_trace_with`] treats an ill-conditioned FIM.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InverseMode {
    /// Fail with [`Error::SingularFim`].
    #[default]
    Strict,
    /// Moore-Penrose pseudo-inverse, dropping eigenvalues below the cutoff.
    Pseudo,
}

pub fn fisher_information(j: &JacobianMatrix, gram: &CMatrix, sigma_n2: f64) -> Result<DMatrix<f64>> {
    let k = j.users();
    if gram.shape() != (k, k) {
        return Err(Error::DimensionMismatch(format!("Gram is {:?}, Jacobian has {k} users", gram.shape())));
    }
    if hermitian_cholesky(gram).is_none() {
        return Err(Error::SingularGram);
    }
    let q = j.parameters();
    let offsets = j.offsets();
    let scale = 2.0 / sigma_n2;

    // upper user blocks (a <= b), one row of blocks per task
    let rows: Vec<Vec<DMatrix<f64>>> = (0..k)
        .into_par_iter()
        .map(|a| {
            let ja_h = j.blocks[a].adjoint();
            (a..k)
                .map(|b| {
                    let cross = &ja_h * &j.blocks[b] * gram[(a, b)].conj();
                    cross.map(|z| z.re * scale)
                })
                .collect()
        })
        .collect();

    let mut fim = DMatrix::<f64>::zeros(q, q);
    for (a, row) in rows.iter().enumerate() {
        for (db, block) in row.iter().enumerate() {
            let b = a + db;
            fim.view_mut((offsets[a], offsets[b]), block.shape()).copy_from(block);
            if a != b {
                fim.view_mut((offsets[b], offsets[a]), (block.ncols(), block.nrows()))
                    .copy_from(&block.transpose());
            }
        }
    }
    Ok(fim)
}

pub fn crb_trace(j: &JacobianMatrix, gram: &CMatrix, sigma_n2: f64) -> Result<CrbResult> {
    crb_trace_with(j, gram, sigma_n2, InverseMode::Strict)
}

/// `tr(F^-1) = (sigma_n^2 / 2) tr((Re{J^H (G* (x) I_m) J})^-1)`.
pub fn crb_trace_with(j: &JacobianMatrix, gram: &CMatrix, sigma_n2: f64, mode: InverseMode) -> Result<CrbResult> {
    let fim = fisher_information(j, gram, sigma_n2)?;
    let q = fim.nrows();
    let eig = fim.clone().symmetric_eigen();
    let max = eig.eigenvalues.iter().fold(0.0f64, |acc, &l| acc.max(l));
    let min = eig.eigenvalues.iter().fold(f64::INFINITY, |acc, &l| acc.min(l));
    let ratio = if max > 0.0 { min / max } else { 0.0 };
    if mode == InverseMode::Strict && !(ratio > FIM_CUTOFF) {
        return Err(Error::SingularFim { ratio });
    }
    let inv_eigs: Vec<f64> = eig
        .eigenvalues
        .iter()
        .map(|&l| if l > FIM_CUTOFF * max { 1.0 / l } else { 0.0 })
        .collect();
    let v = &eig.eigenvectors;
    let per_parameter: Vec<f64> = (0..q)
        .map(|p| (0..q).map(|c| v[(p, c)] * v[(p, c)] * inv_eigs[c]).sum())
        .collect();
    Ok(CrbResult { crb_trace: per_parameter.iter().sum(), per_parameter, fim })
}
