use thiserror::Error;

/// Errors raised by the disc-defect computations.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("function does not vanish at sigma = 1 (|f(1)| = {value:e}, tolerance {tolerance:e})")]
    NotVanishingAtOne { value: f64, tolerance: f64 },

    #[error("function comes too close to zero on the circle (min |f| = {min:e}, max |f| = {max:e})")]
    NearZeroOnCircle { min: f64, max: f64 },

    #[error("precondition violated: {0}")]
    PreconditionViolated(String),

    #[error("disc boundary is not attached to the manifold (max |rho(phi)| = {max_residual:e})")]
    NotAttached { max_residual: f64 },

    #[error("conormal frame loses rank along the disc (min relative singular value {min_singular:e})")]
    RankDeficientFrame { min_singular: f64 },

    #[error("kernel dimension is ambiguous: no spectral gap of {required:e} (best gap {best_gap:e})")]
    Ambiguous { required: f64, best_gap: f64 },

    #[error("fixed-point iteration did not converge after {iterations} iterations (last update {last_update:e})")]
    NoConvergence { iterations: usize, last_update: f64 },

    #[error("contraction estimate fails: lambda = {lambda:e}, |T| = {operator_norm:e}")]
    ContractionViolated { lambda: f64, operator_norm: f64 },

    #[error("holomorphic extension is degenerate (min |det| = {min_det:e})")]
    DegenerateExtension { min_det: f64 },

    #[error("matrix G is singular on the circle")]
    SingularG,

    #[error("the coordinate block A(sigma) is degenerate on the circle (min |det| = {min_det:e})")]
    DegenerateA { min_det: f64 },

    #[error("the disc has defect {found}, expected 1")]
    DefectNotOne { found: usize },

    #[error("construction check failed: {0}")]
    ConstructionCheckFailed(String),

    #[error("invalid manifold specification: {0}")]
    InvalidSpec(String),

    #[error("disc point lies in the deleted set of the manifold")]
    DeletedSet,
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NotVanishingAtOne { .. } => "not_vanishing_at_one",
            Error::NearZeroOnCircle { .. } => "near_zero_on_circle",
            Error::PreconditionViolated(_) => "precondition_violated",
            Error::NotAttached { .. } => "not_attached",
            Error::RankDeficientFrame { .. } => "rank_deficient_frame",
            Error::Ambiguous { .. } => "ambiguous",
            Error::NoConvergence { .. } => "no_convergence",
            Error::ContractionViolated { .. } => "contraction_violated",
            Error::DegenerateExtension { .. } => "degenerate_extension",
            Error::SingularG => "singular_g",
            Error::DegenerateA { .. } => "degenerate_a",
            Error::DefectNotOne { .. } => "defect_not_one",
            Error::ConstructionCheckFailed(_) => "construction_check_failed",
            Error::InvalidSpec(_) => "invalid_spec",
            Error::DeletedSet => "deleted_set",
        }
    }
}
