use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid codebook specification: {0}")]
    InvalidSpec(String),

    /// `t = 2^b (2^b - 1) / 2 <= 1`, so `ln t` is not positive.
    #[error("degenerate codebook: b = {b} gives ln t = {ln_t} <= 0")]
    DegenerateCodebook { b: f64, ln_t: f64 },

    #[error("correlation undefined for a single active user")]
    SingleUser,

    #[error("Gram matrix is rank deficient (l_min = {min_eig:e}, l_max = {max_eig:e})")]
    RankDeficient { min_eig: f64, max_eig: f64 },

    #[error("worst-case Gram may be singular: (k - 1) * rho_max = {0} >= 1")]
    WorstCaseSingular(f64),

    #[error("Neumann series diverges: spectral radius of Delta = {0} >= 1")]
    NeumannDiverges(f64),

    #[error("Gram matrix is not positive definite")]
    SingularGram,

    #[error("Fisher information is singular (l_min / l_max = {ratio:e})")]
    SingularFim { ratio: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

impl Error {
    /// True for failures caused by the numerics of a well-formed input
    /// (as opposed to an invalid argument).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::RankDeficient { .. }
                | Error::SingularGram
                | Error::SingularFim { .. }
                | Error::NeumannDiverges(_)
                | Error::WorstCaseSingular(_)
                | Error::DegenerateCodebook { .. }
        )
    }
}
