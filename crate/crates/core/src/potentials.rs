//! Hartree potential of a radial density and the canonical rescaling.
//!
//! For radial `u` Newton's theorem gives
//! `V_u(r) = ∫ |u(y)|² / max(r, |y|) dy`, with `V_u(0) = ∫ |u(y)|² / |y| dy`,
//! and the shifted potential `Φ_u = V_u(0) − V_u` is nonnegative and
//! nondecreasing.
//!
//! # Rescaling
//!
//! If `u` solves `√(−Δ)u + λu = V_u u` then `u_μ(x) = μ^{3/2} u(μx)` solves the
//! same equation with eigenvalue `μλ`, and `V_{u_μ}(0) = μ V_u(0)`. Requiring
//! `V_{u_μ}(0) − μλ = 1` forces `μ = 1 / (V_u(0) − λ)`. With this choice the
//! harmonic extension of `u_μ` has boundary coefficient `Φ − 1`. The value of
//! `μ` is reconstructed from matching coefficients rather than quoted.

use crate::coulomb;
use crate::error::{Error, Result};
use crate::radial::{mass, RadialProfile};

/// Tolerance on `V(0) − λ − 1` accepted as canonically rescaled.
pub const RESCALE_TOLERANCE: f64 = 1e-4;

#[derive(Clone, Debug)]
pub struct PotentialPair {
    v: RadialProfile,
    v0: f64,
    phi: RadialProfile,
    mass: f64,
}

impl PotentialPair {
    /// `V_u` at the grid nodes.
    pub fn v(&self) -> &RadialProfile {
        &self.v
    }

    /// `V_u(0)`.
    pub fn v0(&self) -> f64 {
        self.v0
    }

    /// `Φ_u = V_u(0) − V_u`.
    pub fn phi(&self) -> &RadialProfile {
        &self.phi
    }

    /// Mass of the density that generated the potential.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Exterior Coulomb tail `mass / r`, exact beyond the support of `u²`.
    pub fn tail(&self, r: f64) -> f64 {
        self.mass / r
    }
}

pub fn newton_potential(u: &RadialProfile) -> PotentialPair {
    let grid = u.grid();
    let density: Vec<f64> = u.values().iter().map(|v| v * v).collect();
    let v = coulomb::apply(0, grid, &density);
    let v0 = coulomb::origin_value(grid, &density);
    let phi = v.iter().map(|v| v0 - v).collect();
    PotentialPair {
        v: RadialProfile::from_raw(grid, v),
        v0,
        phi: RadialProfile::from_raw(grid, phi),
        mass: mass(u),
    }
}

/// `I_ℓ[g](r) = 4π/(2ℓ+1) ∫ min(r,s)^ℓ / max(r,s)^{ℓ+1} g(s) s² ds` by cumulative sums.
///
/// `ℓ = 0` with `g = u²` is `V_u`.
pub fn multipole_potential(ell: usize, g: &RadialProfile) -> RadialProfile {
    RadialProfile::from_raw(g.grid(), coulomb::apply(ell, g.grid(), g.values()))
}

/// `μ^{3/2} u(μ r)` on the grid of `u`, by band-limited interpolation.
pub fn scale_profile(u: &RadialProfile, mu: f64) -> Result<RadialProfile> {
    if !(mu.is_finite() && mu > 0.0) {
        return Err(Error::InvalidArgument(format!("scale factor must be positive, got {mu}")));
    }
    let points: Vec<f64> = u.grid().nodes().iter().map(|r| mu * r).collect();
    let factor = mu.powf(1.5);
    let values = u.interpolate(&points).into_iter().map(|v| factor * v).collect();
    Ok(RadialProfile::from_raw(u.grid(), values))
}

/// `μ = 1 / (V(0) − λ)`.
pub fn rescale_factor(v0: f64, lambda: f64) -> Result<f64> {
    if v0 <= lambda {
        return Err(Error::RescaleImpossible { v0, lambda });
    }
    Ok(1.0 / (v0 - lambda))
}

/// A profile with eigenvalue `λ` satisfying `V(0) − λ = 1`.
#[derive(Clone, Debug)]
pub struct RescaledProfile {
    profile: RadialProfile,
    potential: PotentialPair,
    lambda: f64,
    mu: f64,
}

impl RescaledProfile {
    /// Accepts `profile` as already rescaled for eigenvalue `lambda`.
    pub fn new(profile: RadialProfile, lambda: f64) -> Result<Self> {
        let potential = newton_potential(&profile);
        let defect = potential.v0() - lambda - 1.0;
        if !(defect.abs() <= RESCALE_TOLERANCE) {
            return Err(Error::NotRescaled { defect });
        }
        Ok(Self { profile, potential, lambda, mu: 1.0 })
    }

    pub fn profile(&self) -> &RadialProfile {
        &self.profile
    }

    pub fn potential(&self) -> &PotentialPair {
        &self.potential
    }

    /// Eigenvalue after rescaling.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Scale factor applied to the input.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// `Φ − 1` at the grid nodes.
    pub fn boundary_coefficient(&self) -> Vec<f64> {
        self.potential.phi().values().iter().map(|p| p - 1.0).collect()
    }
}

/// Rescales a solution with eigenvalue `lambda` so that `V(0) − λ_μ = 1`.
pub fn canonical_rescale(u: &RadialProfile, lambda: f64) -> Result<RescaledProfile> {
    let pot = newton_potential(u);
    let mu = rescale_factor(pot.v0(), lambda)?;
    let scaled = scale_profile(u, mu)?;
    let mut out = RescaledProfile::new(scaled, mu * lambda)?;
    out.mu = mu;
    Ok(out)
}
