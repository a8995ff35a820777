use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::radial::{RadialGrid, RadialProfile, SpectralProfile};
use crate::transform::{forward_transform, inverse_transform};

/// Uniform grid `t_k = k τ`, `k = 0..m`, on `[0, t_max]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TGrid {
    m: usize,
    t_max: f64,
}

impl TGrid {
    pub fn new(m: usize, t_max: f64) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidArgument(format!("t-grid needs at least 2 nodes, got {m}")));
        }
        if !(t_max.is_finite() && t_max > 0.0) {
            return Err(Error::InvalidArgument(format!("t_max must be positive, got {t_max}")));
        }
        Ok(Self { m, t_max })
    }

    /// `m = n/2` nodes up to `t_max = r_max/2`.
    pub fn default_for(grid: &RadialGrid) -> Self {
        Self { m: (grid.n() / 2).max(2), t_max: grid.r_max() / 2.0 }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    pub fn tau(&self) -> f64 {
        self.t_max / (self.m - 1) as f64
    }

    pub fn node(&self, k: usize) -> f64 {
        k as f64 * self.tau()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.m).map(|k| self.node(k)).collect()
    }

    /// Trapezoid weight of slice `k`.
    pub fn weight(&self, k: usize) -> f64 {
        if k == 0 || k + 1 == self.m {
            0.5 * self.tau()
        } else {
            self.tau()
        }
    }
}

/// Axisymmetric field `ψ(r_j, t_k)` on the truncated halfspace.
///
/// Stored slice by slice: `values[k * n + j] = ψ(r_j, t_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfspaceField {
    rgrid: RadialGrid,
    tgrid: TGrid,
    values: Vec<f64>,
}

impl HalfspaceField {
    pub fn new(rgrid: &RadialGrid, tgrid: TGrid, values: Vec<f64>) -> Result<Self> {
        let expected = rgrid.n() * tgrid.m();
        if values.len() != expected {
            return Err(Error::ShapeMismatch { expected, got: values.len() });
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Self { rgrid: rgrid.clone(), tgrid, values })
    }

    pub fn zeros(rgrid: &RadialGrid, tgrid: TGrid) -> Self {
        Self { rgrid: rgrid.clone(), tgrid, values: vec![0.0; rgrid.n() * tgrid.m()] }
    }

    pub fn from_fn(rgrid: &RadialGrid, tgrid: TGrid, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        let mut values = Vec::with_capacity(rgrid.n() * tgrid.m());
        for k in 0..tgrid.m() {
            let t = tgrid.node(k);
            values.extend(rgrid.nodes().iter().map(|&r| f(r, t)));
        }
        Self::new(rgrid, tgrid, values)
    }

    pub(crate) fn from_raw(rgrid: &RadialGrid, tgrid: TGrid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), rgrid.n() * tgrid.m());
        Self { rgrid: rgrid.clone(), tgrid, values }
    }

    pub fn rgrid(&self) -> &RadialGrid {
        &self.rgrid
    }

    pub fn tgrid(&self) -> TGrid {
        self.tgrid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, j: usize, k: usize) -> f64 {
        self.values[k * self.rgrid.n() + j]
    }

    pub fn slice(&self, k: usize) -> &[f64] {
        let n = self.rgrid.n();
        &self.values[k * n..(k + 1) * n]
    }

    /// Boundary trace `ψ(·, 0)`.
    pub fn trace(&self) -> RadialProfile {
        RadialProfile::from_raw(&self.rgrid, self.slice(0).to_vec())
    }

    pub fn check_same(&self, other: &HalfspaceField) -> Result<()> {
        self.rgrid.check_same(&other.rgrid)?;
        if self.tgrid != other.tgrid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// `alpha * self + beta * other`.
    pub fn combine(&self, alpha: f64, other: &HalfspaceField, beta: f64) -> Result<Self> {
        self.check_same(other)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| alpha * a + beta * b).collect();
        Ok(Self::from_raw(&self.rgrid, self.tgrid, values))
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Largest `|ψ_rr + (2/r)ψ_r + ψ_tt|` over interior nodes, by centered differences.
    pub fn harmonicity_defect(&self) -> f64 {
        let n = self.rgrid.n();
        let h = self.rgrid.h();
        let tau = self.tgrid.tau();
        let r = self.rgrid.nodes();
        let mut worst = 0.0_f64;
        for k in 1..self.tgrid.m() - 1 {
            for j in 1..n - 1 {
                let c = self.get(j, k);
                let (w, e) = (self.get(j - 1, k), self.get(j + 1, k));
                let (s, nn) = (self.get(j, k - 1), self.get(j, k + 1));
                let lap = (e - 2.0 * c + w) / (h * h) + (e - w) / (h * r[j]) + (nn - 2.0 * c + s) / (tau * tau);
                worst = worst.max(lap.abs());
            }
        }
        worst
    }
}

/// Spectral extension `U(·,t) = P_t ∗ u`, kept in frequency space.
pub(crate) struct Extension {
    spec: SpectralProfile,
}

impl Extension {
    pub(crate) fn new(u: &RadialProfile) -> Self {
        Self { spec: forward_transform(u) }
    }

    pub(crate) fn slice(&self, t: f64) -> Vec<f64> {
        inverse_transform(&self.spec.clone().scaled_by(|p| (-t * p).exp())).into_values()
    }
}

/// Harmonic extension of `u` to the halfspace via the multiplier `e^{−tρ}`.
pub fn poisson_extend(u: &RadialProfile, tgrid: TGrid) -> HalfspaceField {
    let grid = u.grid();
    let ext = Extension::new(u);
    let mut values = Vec::with_capacity(grid.n() * tgrid.m());
    values.extend_from_slice(u.values());
    for k in 1..tgrid.m() {
        values.extend(ext.slice(tgrid.node(k)));
    }
    HalfspaceField::from_raw(grid, tgrid, values)
}

/// `∂_t U(·, t)`, exact in the spectral discretization.
pub fn extension_t_derivative(u: &RadialProfile, t: f64) -> RadialProfile {
    inverse_transform(&forward_transform(u).scaled_by(|p| -p * (-t * p).exp()))
}

/// Dirichlet energy of `U = P_t ∗ u` over `t > t_max`, from the spectrum of `u`.
///
/// At height `t` the slice energy is `∫ 2|ξ|² e^{−2t|ξ|} |û|² dξ/(2π)³`, so the
/// tail equals `∫ |ξ| e^{−2 t_max |ξ|} |û|² dξ/(2π)³`.
pub fn extension_energy_tail(u: &RadialProfile, t_max: f64) -> f64 {
    let spec = forward_transform(u);
    let d = PI / u.grid().r_max();
    spec.frequencies()
        .iter()
        .zip(spec.values())
        .map(|(p, f)| p.powi(3) * (-2.0 * t_max * p).exp() * f * f)
        .sum::<f64>()
        * d
        / (2.0 * PI * PI)
}
