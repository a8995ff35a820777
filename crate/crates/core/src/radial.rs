//! Uniform radial grids and the profiles sampled on them.
//!
//! A grid with `n` interior nodes on `(0, r_max)` places `r_j = j h` with
//! `h = r_max / (n + 1)`. Profiles are understood to vanish at `r_max`, and
//! `r f(r)` is treated as odd about the origin, so the natural basis is the
//! sine series `r f(r) = Σ_k c_k sin(ρ_k r)` with `ρ_k = k π / r_max`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};

struct GridData {
    n: usize,
    r_max: f64,
    h: f64,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    frequencies: Vec<f64>,
    fft: Arc<dyn Fft<f64>>,
}

/// Uniform radial grid. Cloning is cheap and clones share one FFT plan.
#[derive(Clone)]
pub struct RadialGrid(Arc<GridData>);

impl RadialGrid {
    pub fn new(n: usize, r_max: f64) -> Result<Self> {
        if n < 4 {
            return Err(Error::InvalidArgument(format!("grid needs at least 4 nodes, got {n}")));
        }
        if !(r_max.is_finite() && r_max > 0.0) {
            return Err(Error::InvalidArgument(format!("r_max must be positive, got {r_max}")));
        }
        let h = r_max / (n + 1) as f64;
        let nodes: Vec<f64> = (1..=n).map(|j| j as f64 * h).collect();
        let weights = nodes.iter().map(|r| 4.0 * PI * r * r * h).collect();
        let frequencies = (1..=n).map(|k| k as f64 * PI / r_max).collect();
        let fft = FftPlanner::new().plan_fft_forward(2 * (n + 1));
        Ok(Self(Arc::new(GridData { n, r_max, h, nodes, weights, frequencies, fft })))
    }

    pub fn n(&self) -> usize {
        self.0.n
    }

    pub fn r_max(&self) -> f64 {
        self.0.r_max
    }

    pub fn h(&self) -> f64 {
        self.0.h
    }

    pub fn nodes(&self) -> &[f64] {
        &self.0.nodes
    }

    /// Quadrature weights `4π r_j² h` for `∫ f(r) 4π r² dr`.
    pub fn weights(&self) -> &[f64] {
        &self.0.weights
    }

    /// Dual frequencies `ρ_k = k π / r_max`, `k = 1..=n`.
    pub fn frequencies(&self) -> &[f64] {
        &self.0.frequencies
    }

    pub fn same_as(&self, other: &RadialGrid) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || (self.n() == other.n() && self.r_max() == other.r_max())
    }

    pub(crate) fn check_same(&self, other: &RadialGrid) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Unnormalized DST-I: `S_k = Σ_j x_j sin(π j k / (n+1))`.
    pub(crate) fn dst(&self, x: &[f64]) -> Vec<f64> {
        let n = self.n();
        debug_assert_eq!(x.len(), n);
        let m = 2 * (n + 1);
        let mut buf = vec![Complex::new(0.0, 0.0); m];
        for (j, &v) in x.iter().enumerate() {
            buf[j + 1].re = v;
            buf[m - 1 - j].re = -v;
        }
        self.0.fft.process(&mut buf);
        buf[1..=n].iter().map(|c| -0.5 * c.im).collect()
    }

    /// Interior cosine sums `C_j = Σ_k a_k cos(π j k / (n+1))`.
    pub(crate) fn dct_interior(&self, a: &[f64]) -> Vec<f64> {
        let n = self.n();
        debug_assert_eq!(a.len(), n);
        let m = 2 * (n + 1);
        let mut buf = vec![Complex::new(0.0, 0.0); m];
        for (k, &v) in a.iter().enumerate() {
            buf[k + 1].re = v;
            buf[m - 1 - k].re = v;
        }
        self.0.fft.process(&mut buf);
        buf[1..=n].iter().map(|c| 0.5 * c.re).collect()
    }
}

impl PartialEq for RadialGrid {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

impl fmt::Debug for RadialGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialGrid")
            .field("n", &self.n())
            .field("r_max", &self.r_max())
            .finish()
    }
}

fn check_values(expected: usize, values: &[f64]) -> Result<()> {
    if values.len() != expected {
        return Err(Error::ShapeMismatch { expected, got: values.len() });
    }
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    Ok(())
}

/// Radial function sampled at the nodes of a [`RadialGrid`].
#[derive(Clone, Debug, PartialEq)]
pub struct RadialProfile {
    grid: RadialGrid,
    values: Vec<f64>,
}

impl RadialProfile {
    pub fn new(grid: &RadialGrid, values: Vec<f64>) -> Result<Self> {
        check_values(grid.n(), &values)?;
        Ok(Self { grid: grid.clone(), values })
    }

    pub fn from_fn(grid: &RadialGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.nodes().iter().map(|&r| f(r)).collect())
    }

    pub fn zeros(grid: &RadialGrid) -> Self {
        Self { grid: grid.clone(), values: vec![0.0; grid.n()] }
    }

    /// Constructor for values produced by finite arithmetic on valid profiles.
    pub(crate) fn from_raw(grid: &RadialGrid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.n());
        Self { grid: grid.clone(), values }
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scaled(&self, alpha: f64) -> Self {
        Self::from_raw(&self.grid, self.values.iter().map(|v| alpha * v).collect())
    }

    pub fn map(&self, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = self.grid.nodes().iter().zip(&self.values).map(|(&r, &v)| f(r, v)).collect();
        Self::from_raw(&self.grid, values)
    }

    /// `alpha * self + beta * other`.
    pub fn combine(&self, alpha: f64, other: &RadialProfile, beta: f64) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| alpha * a + beta * b).collect();
        Ok(Self::from_raw(&self.grid, values))
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn norm(&self) -> f64 {
        mass(self).sqrt()
    }

    /// Coefficients `c_k` of the sine series `r f(r) = Σ c_k sin(ρ_k r)`.
    pub fn sine_coefficients(&self) -> Vec<f64> {
        let rf: Vec<f64> = self.grid.nodes().iter().zip(&self.values).map(|(r, v)| r * v).collect();
        let scale = 2.0 / (self.grid.n() + 1) as f64;
        self.grid.dst(&rf).into_iter().map(|s| s * scale).collect()
    }

    /// Band-limited interpolation at arbitrary radii. Returns 0 beyond `r_max`.
    pub fn interpolate(&self, points: &[f64]) -> Vec<f64> {
        let coeffs = self.sine_coefficients();
        points.iter().map(|&r| eval_sine_series(&coeffs, self.grid.r_max(), r)).collect()
    }

    pub fn eval(&self, r: f64) -> f64 {
        self.interpolate(&[r])[0]
    }
}

/// Value of `Σ c_k sin(k π r / R) / r`, continued to `r = 0` by its limit.
pub(crate) fn eval_sine_series(coeffs: &[f64], r_max: f64, r: f64) -> f64 {
    if r >= r_max {
        return 0.0;
    }
    let r = r.abs();
    let base = PI / r_max;
    if r == 0.0 {
        return coeffs.iter().enumerate().map(|(k, c)| c * (k + 1) as f64 * base).sum();
    }
    let theta = base * r;
    let mut sum = 0.0;
    for (k, c) in coeffs.iter().enumerate() {
        sum += c * ((k + 1) as f64 * theta).sin();
    }
    sum / r
}

/// Radial Fourier transform sampled at the dual frequencies of a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralProfile {
    grid: RadialGrid,
    values: Vec<f64>,
}

impl SpectralProfile {
    pub fn new(grid: &RadialGrid, values: Vec<f64>) -> Result<Self> {
        check_values(grid.n(), &values)?;
        Ok(Self { grid: grid.clone(), values })
    }

    pub(crate) fn from_raw(grid: &RadialGrid, values: Vec<f64>) -> Self {
        Self { grid: grid.clone(), values }
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn frequencies(&self) -> &[f64] {
        self.grid.frequencies()
    }

    /// Pointwise product with the multiplier `m(ρ)`.
    pub fn scaled_by(mut self, m: impl Fn(f64) -> f64) -> Self {
        for (v, &p) in self.values.iter_mut().zip(self.grid.frequencies()) {
            *v *= m(p);
        }
        self
    }

    /// `∫ |F(ξ)|² dξ` by the rectangle rule in `ρ`.
    pub fn frequency_mass(&self) -> f64 {
        let d = PI / self.grid.r_max();
        self.frequencies().iter().zip(&self.values).map(|(p, v)| 4.0 * PI * p * p * d * v * v).sum()
    }
}

/// Weighted inner product `Σ w_j f_j g_j`.
pub fn inner_product(f: &RadialProfile, g: &RadialProfile) -> Result<f64> {
    f.grid.check_same(&g.grid)?;
    Ok(dot_weighted(f.grid.weights(), &f.values, &g.values))
}

pub fn mass(f: &RadialProfile) -> f64 {
    dot_weighted(f.grid.weights(), &f.values, &f.values)
}

pub(crate) fn dot_weighted(w: &[f64], a: &[f64], b: &[f64]) -> f64 {
    w.iter().zip(a).zip(b).map(|((w, a), b)| w * a * b).sum()
}

/// Sup-norm distance between two profiles, interpolating the finer one onto
/// the coarser nodes when the grids differ.
pub fn sup_distance(a: &RadialProfile, b: &RadialProfile) -> f64 {
    if a.grid.same_as(&b.grid) {
        return a.values.iter().zip(&b.values).fold(0.0, |m, (x, y)| m.max((x - y).abs()));
    }
    let (coarse, fine) = if a.grid.h() >= b.grid.h() { (a, b) } else { (b, a) };
    let coarse_nodes: Vec<f64> =
        coarse.grid.nodes().iter().copied().filter(|&r| r < fine.grid.r_max()).collect();
    let fine_vals = fine.interpolate(&coarse_nodes);
    coarse.values.iter().zip(&fine_vals).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nodes_and_frequencies() {
        let g = RadialGrid::new(7, 4.0).unwrap();
        assert_eq!(g.h(), 0.5);
        assert_eq!(g.nodes()[0], 0.5);
        assert_eq!(g.nodes()[6], 3.5);
        assert!((g.frequencies()[0] - PI / 4.0).abs() < 1e-15);
        assert!(g.nodes().windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn rejects_bad_grids_and_values() {
        assert!(RadialGrid::new(2, 1.0).is_err());
        assert!(RadialGrid::new(16, -1.0).is_err());
        let g = RadialGrid::new(8, 1.0).unwrap();
        assert!(matches!(RadialProfile::new(&g, vec![0.0; 7]), Err(Error::ShapeMismatch { .. })));
        let mut v = vec![0.0; 8];
        v[3] = f64::NAN;
        assert!(matches!(RadialProfile::new(&g, v), Err(Error::NonFinite(3))));
    }

    #[test]
    fn dst_matches_direct_sum() {
        let g = RadialGrid::new(13, 3.0).unwrap();
        let x: Vec<f64> = (0..13).map(|j| ((j * j) as f64 * 0.37).sin()).collect();
        let s = g.dst(&x);
        for k in 1..=13 {
            let direct: f64 = (1..=13).map(|j| x[j - 1] * (PI * (j * k) as f64 / 14.0).sin()).sum();
            assert!((s[k - 1] - direct).abs() < 1e-12);
        }
        let c = g.dct_interior(&x);
        for j in 1..=13 {
            let direct: f64 = (1..=13).map(|k| x[k - 1] * (PI * (j * k) as f64 / 14.0).cos()).sum();
            assert!((c[j - 1] - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn mass_of_exponential() {
        let g = RadialGrid::new(4096, 40.0).unwrap();
        let f = RadialProfile::from_fn(&g, |r| (-r).exp()).unwrap();
        assert!((mass(&f) / PI - 1.0).abs() < 1e-8);
        assert_eq!(mass(&RadialProfile::zeros(&g)), 0.0);
    }

    #[test]
    fn grid_mismatch_is_reported() {
        let a = RadialProfile::zeros(&RadialGrid::new(8, 1.0).unwrap());
        let b = RadialProfile::zeros(&RadialGrid::new(9, 1.0).unwrap());
        assert!(matches!(inner_product(&a, &b), Err(Error::GridMismatch)));
    }

    #[test]
    fn interpolation_reproduces_nodes() {
        let g = RadialGrid::new(256, 40.0).unwrap();
        let f = RadialProfile::from_fn(&g, |r| (-r * r / 4.0).exp()).unwrap();
        let back = f.interpolate(g.nodes());
        for (a, b) in back.iter().zip(f.values()) {
            assert!((a - b).abs() < 1e-13);
        }
        assert!((f.eval(0.0) - 1.0).abs() < 1e-12);
        assert!((f.eval(1.2345) - (-1.2345f64 * 1.2345 / 4.0).exp()).abs() < 1e-12);
        assert_eq!(f.eval(41.0), 0.0);
    }
}
