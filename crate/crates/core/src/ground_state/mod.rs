//! Ground state of `√(−Δ)Q − (|x|⁻¹ ∗ Q²)Q = −Q` and its qualitative checks.

mod quality;
mod solver;

pub use quality::{
    verify_profile, verify_qualitative, DecayReport, FourierReport, QualityReport, SpectralTail,
    DECAY_SLOPE_RANGE, RESOLVED_MARGIN, TAIL_MIN_R_SQUARED, TAIL_WINDOW_DROP,
};
pub use solver::{
    cross_validate, mass_constant, max_pairwise_distance, residual, solve_ground_state, GroundStateSolution, Init,
    SolverConfig,
};
