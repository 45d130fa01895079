//! Crate-wide error type.  Variants correspond to the distinct failure
//! modes of the numerical layer; functions that can fail return
//! [`crate::Result`].

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A precondition on a plain argument was violated (non-finite input,
    /// empty grid, out-of-range parameter, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The endpoint interval of a sup-event query lies in none of the
    /// four regions covered by the closed-form bound.
    #[error(
        "unsupported region: barrier {barrier}, interval [{lower}, {upper}] \
         is outside the four covered endpoint regions"
    )]
    UnsupportedRegion {
        barrier: f64,
        lower: f64,
        upper: f64,
    },

    /// A perpetuity ∫₀^∞ e^{dℓ(σ_u)} du with ℓ(α) ≤ 0 does not converge.
    #[error("divergent functional: form evaluates to {value} at the drift, expected > 0")]
    DivergentFunctional { value: f64 },

    /// A Gaussian kernel's covariance failed its Cholesky factorization
    /// (degenerate clocks, zero horizon, non-positive-definite input).
    #[error("singular kernel: {0}")]
    SingularKernel(String),

    /// The nilpotent part is abelian (all structure maps zero), so there is
    /// no finite nilpotency degree k₀ and the k₀-dependent bounds are void.
    #[error("degenerate group: {0}")]
    DegenerateGroup(String),

    /// No (C, D) pair on the search grid dominates every calibration sample.
    #[error("fit failure: no constant C ≤ 2^40 dominates the samples for any grid D")]
    FitFailure,

    /// The A-component drift is not in the positive Weyl chamber, so the
    /// Poisson kernel of the sub-Laplacian does not exist.
    #[error("divergent drift: {0}")]
    DivergentDrift(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
