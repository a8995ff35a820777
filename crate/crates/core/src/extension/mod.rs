//! Harmonic extension to the halfspace `{(x, t) : t > 0}` and the quadratic form
//! `A_u[ψ] = ∬ |∇_{x,t} ψ|² dx dt + ∫ (Φ_u − 1) ψ(x, 0)² dx`.
//!
//! For a canonically rescaled solution `u` the extension `U = P_t ∗ u`
//! satisfies `−∂_t U + (Φ_u − 1) U = 0` on the boundary, so integrating by
//! parts gives `A_u[U] = 0`. All fields here are axisymmetric and live on a
//! radial grid in `r` times a uniform grid in `t`.
//!
//! # Discretization
//!
//! Gradients are one-sided differences on the staggered grid: radial
//! differences at `r_j + h/2` (with `ψ = 0` at `r_max`, trapezoid in `t`),
//! time differences at `t_k + τ/2`. The `H¹` norm adds the trapezoid `L²`
//! mass. `ε(h, τ)` is measured as `|A_u[U]| / ‖U‖²_{H¹}`.
//!
//! # Crossings
//!
//! Two distinct positive solutions must cross at a first radius `R`. The
//! difference `W = (U − V) 1_Ω` of their extensions, with `Ω` the component of
//! `{U > V}` touching the boundary ball `{r < R}`, would make
//! `A_u[W] + A_v[W] = −2 ∫_{r<R} f W(·,0)` negative, where
//! `f = (Φ_u − Φ_v)(u + v)/2`. Here `Ω` is realized as the 4-connected grid
//! component seeded from the boundary nodes with `r_j < R`.

mod crossing;
mod field;
mod form;

pub use crossing::{
    contradiction_functional, contradiction_identity, first_crossing, ContradictionReport, ContradictionStatus,
    Crossing, OmegaDiagnostics, AGREEMENT_TOLERANCE, COINCIDE_TOLERANCE, NEAR_SOLUTION_RESIDUAL,
};
pub use field::{extension_energy_tail, extension_t_derivative, poisson_extend, HalfspaceField, TGrid};
pub use form::{
    continuum_form, extension_budget, form_minimize, form_minimize_with, h1_norm_squared, interior_bumps,
    quadratic_form, quadratic_form_with, structured_basis, BasisElement, FormBudget, FormMinimum, FormReport,
    DEFAULT_BASIS_SIZE,
};
