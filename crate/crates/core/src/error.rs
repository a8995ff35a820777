use thiserror::Error;

use crate::ground_state::GroundStateSolution;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("profiles are sampled on different grids")]
    GridMismatch,

    #[error("expected {expected} values, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("non-finite value at index {0}")]
    NonFinite(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("sector {ell} operator is not weighted-symmetric (defect {defect:e})")]
    QuadratureUnstable { ell: usize, defect: f64 },

    #[error("profile is identically zero")]
    ZeroProfile,

    #[error("no convergence after {iterations} iterations, best residual {residual:e}")]
    NotConverged {
        iterations: usize,
        residual: f64,
        best: Box<GroundStateSolution>,
    },

    #[error("iterate collapsed to zero at iteration {iteration}")]
    CollapsedToZero { iteration: usize },

    #[error("input solution is not converged")]
    NotConvergedInput,

    #[error("cannot rescale: V(0) = {v0} does not exceed the eigenvalue {lambda}")]
    RescaleImpossible { v0: f64, lambda: f64 },

    #[error("dense eigensolver failed: {0}")]
    EigensolverFailure(String),

    #[error("ℓ=1 sector required by nondegeneracy check (l_max = {l_max})")]
    InsufficientSectors { l_max: usize },

    #[error("profile is not canonically rescaled: V(0) - λ = {defect}")]
    NotRescaled { defect: f64 },

    #[error("profiles coincide to within {distance:e}")]
    Coincide { distance: f64 },

    #[error("difference has constant sign on the whole grid")]
    NoCrossing,

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid value for {field}: {bound}")]
    Validation { field: String, bound: String },

    #[error("malformed file {path}: {message}")]
    Format { path: String, message: String },

    #[error("config hash mismatch: expected {expected}, found {found}")]
    HashMismatch { expected: String, found: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
