//! The linearized operator `L₊` at the ground state, sector by sector.
//!
//! `L₊ξ = √(−Δ)ξ + ξ − V_Q ξ − 2Q (|x|⁻¹ ∗ (Qξ))`. On `ξ = f(r) Y_ℓm` every
//! term preserves the sector, and the radial part acts on `f` as
//!
//! - `√(−Δ)`: `(2/π) ∫ ρ³ j_ℓ(ρr) j_ℓ(ρs) f(s) s² ds dρ`, truncated to the grid
//!   frequencies;
//! - the direct term: multiplication by `V_Q`;
//! - the exchange term: `−2 Q(r) I_ℓ[Q f](r)` with the multipole kernel
//!   `4π/(2ℓ+1) min(r,s)^ℓ / max(r,s)^{ℓ+1}`.
//!
//! All matrices are symmetric in the weighted inner product `Σ w_j a_j b_j`.
//!
//! # Two exact identities
//!
//! Translations give `L₊ ∂ᵢQ = 0`, and `∂ᵢQ = Q'(r) xᵢ/r` lives in `ℓ = 1`
//! with radial part `Q'`. Differentiating the scaling family
//! `Q_μ = μ^{3/2} Q(μ·)`, which solves the equation with eigenvalue `μ`,
//! at `μ = 1` gives `L₊ S = −Q` with `S = (3/2)Q + rQ'` in `ℓ = 0`.
//!
//! # Spectra
//!
//! Eigenpairs come from Rayleigh-Ritz on the Fourier-Bessel basis
//! `j_ℓ(α_{ℓ,k} r / r_max)`, `k ≤ n/2`, where `α_{ℓ,k}` are the zeros of `j_ℓ`.
//! The raw nodal matrix carries spurious modes near the top of the
//! frequency band in sectors `ℓ ≥ 2`; the band-limited basis removes them.

use faer::linalg::triangular_solve::{solve_lower_triangular_in_place, solve_upper_triangular_in_place};
use faer::{Mat, Par, Side};
use serde::{Deserialize, Serialize};

use crate::bessel::{spherical_jn, spherical_jn_zeros};
use crate::coulomb;
use crate::error::{Error, Result};
use crate::ground_state::GroundStateSolution;
use crate::potentials::newton_potential;
use crate::radial::{dot_weighted, RadialGrid, RadialProfile};
use crate::transform::radial_derivative;

/// Largest weighted symmetry defect accepted after assembly.
pub const SYMMETRY_TOLERANCE: f64 = 1e-8;
pub const OVERLAP_THRESHOLD: f64 = 0.999;
/// Nonzero eigenvalues must clear the zero-mode tolerance by this factor.
pub const GAP_FACTOR: f64 = 10.0;
/// ... and the measured zero-mode magnitude by this factor.
pub const ZERO_MODE_GAP_FACTOR: f64 = 50.0;
/// Ceiling of the zero-mode tolerance relative to the Ritz spectral scale.
pub const ZERO_SCALE_FRACTION: f64 = 1e-6;
/// Allowed movement of the lowest eigenvalues under one refinement.
pub const EIGENVALUE_DRIFT: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    SqrtLaplacian,
    LPlus,
}

/// Radial part of an operator in the sector `ℓ`, as a dense nodal matrix.
#[derive(Clone, Debug)]
pub struct SectorOperator {
    ell: usize,
    matrix: Mat<f64>,
    grid: RadialGrid,
    kind: OperatorKind,
}

impl SectorOperator {
    pub fn ell(&self) -> usize {
        self.ell
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn matrix(&self) -> &Mat<f64> {
        &self.matrix
    }

    pub fn apply(&self, f: &RadialProfile) -> Result<RadialProfile> {
        self.grid.check_same(f.grid())?;
        let n = self.grid.n();
        let v = f.values();
        let out = (0..n)
            .map(|i| (0..n).map(|j| self.matrix[(i, j)] * v[j]).sum())
            .collect();
        Ok(RadialProfile::from_raw(&self.grid, out))
    }

    /// `max |w_i A_ij − w_j A_ji| / max |w_i A_ij|`.
    pub fn symmetry_defect(&self) -> f64 {
        symmetry_defect(&self.matrix, self.grid.weights())
    }
}

fn symmetry_defect(a: &Mat<f64>, w: &[f64]) -> f64 {
    let n = a.nrows();
    let (mut defect, mut size) = (0.0_f64, 0.0_f64);
    for i in 0..n {
        for j in 0..n {
            let wa = w[i] * a[(i, j)];
            size = size.max(wa.abs());
            if j > i {
                defect = defect.max((wa - w[j] * a[(j, i)]).abs());
            }
        }
    }
    if size == 0.0 {
        0.0
    } else {
        defect / size
    }
}

fn checked(ell: usize, matrix: Mat<f64>, grid: &RadialGrid, kind: OperatorKind) -> Result<SectorOperator> {
    let defect = symmetry_defect(&matrix, grid.weights());
    if !(defect <= SYMMETRY_TOLERANCE) {
        return Err(Error::QuadratureUnstable { ell, defect });
    }
    Ok(SectorOperator { ell, matrix, grid: grid.clone(), kind })
}

fn sqrt_laplacian_matrix(ell: usize, grid: &RadialGrid) -> Mat<f64> {
    let n = grid.n();
    let r = grid.nodes();
    let rho = grid.frequencies();
    let h = grid.h();
    let c = Mat::from_fn(n, n, |i, k| spherical_jn(ell, rho[k] * r[i]) * rho[k].powf(1.5));
    let s = &c * c.transpose();
    let pref = 2.0 / grid.r_max();
    Mat::from_fn(n, n, |i, j| pref * 0.5 * (s[(i, j)] + s[(j, i)]) * r[j] * r[j] * h)
}

pub fn sqrt_laplacian_sector(ell: usize, grid: &RadialGrid) -> Result<SectorOperator> {
    checked(ell, sqrt_laplacian_matrix(ell, grid), grid, OperatorKind::SqrtLaplacian)
}

/// `L₊` in sector `ℓ` linearized at a converged ground state.
pub fn assemble_l_plus(ell: usize, sol: &GroundStateSolution) -> Result<SectorOperator> {
    if !sol.converged {
        return Err(Error::NotConvergedInput);
    }
    assemble_l_plus_at(ell, &sol.q, sol.eigenvalue)
}

/// `√(−Δ) + λ − V_u − 2u I_ℓ[u ·]` for an arbitrary profile `u`.
pub fn assemble_l_plus_at(ell: usize, u: &RadialProfile, lambda: f64) -> Result<SectorOperator> {
    let grid = u.grid();
    let n = grid.n();
    let v = newton_potential(u);
    let mut m = sqrt_laplacian_matrix(ell, grid) - exchange_matrix(ell, u);
    for j in 0..n {
        m[(j, j)] += lambda - v.v().values()[j];
    }
    checked(ell, m, grid, OperatorKind::LPlus)
}

/// Matrix of `f ↦ 2u I_ℓ[u f]`.
pub fn exchange_matrix(ell: usize, u: &RadialProfile) -> Mat<f64> {
    let q = u.values();
    let k = coulomb::matrix(ell, u.grid());
    Mat::from_fn(q.len(), q.len(), |i, j| 2.0 * q[i] * k[(i, j)] * q[j])
}

/// Radial part `Q'` of the translation modes.
pub fn translation_mode(q: &RadialProfile) -> RadialProfile {
    radial_derivative(q)
}

/// Generator `(3/2)Q + rQ'` of the scaling family.
pub fn scaling_mode(q: &RadialProfile) -> RadialProfile {
    let dq = radial_derivative(q);
    let values = q
        .values()
        .iter()
        .zip(dq.values())
        .zip(q.grid().nodes())
        .map(|((q, d), r)| 1.5 * q + r * d)
        .collect();
    RadialProfile::from_raw(q.grid(), values)
}

fn weighted_norm(f: &RadialProfile) -> f64 {
    dot_weighted(f.grid().weights(), f.values(), f.values()).sqrt()
}

/// `|⟨a, b⟩| / (‖a‖ ‖b‖)` in the weighted inner product.
pub fn overlap(a: &RadialProfile, b: &RadialProfile) -> Result<f64> {
    a.grid().check_same(b.grid())?;
    let w = a.grid().weights();
    let den = weighted_norm(a) * weighted_norm(b);
    if den == 0.0 {
        return Err(Error::ZeroProfile);
    }
    Ok((dot_weighted(w, a.values(), b.values()).abs() / den).min(1.0))
}

#[derive(Clone, Debug)]
pub struct SpectrumReport {
    pub ell: usize,
    /// Lowest eigenvalues, ascending.
    pub eigenvalues: Vec<f64>,
    /// Eigenvectors with unit weighted norm.
    pub eigenvectors: Vec<RadialProfile>,
    /// `min |λ|` over the reported eigenvalues.
    pub zero_gap: f64,
    /// Overlap of each eigenvector with `Q'`, filled in for `ℓ = 1`.
    pub zero_mode_overlap: Option<Vec<f64>>,
    /// Largest `|λ|` over the whole Ritz space.
    pub scale: f64,
    pub basis_size: usize,
}

impl SpectrumReport {
    /// Index of the eigenvalue closest to zero.
    pub fn zero_index(&self) -> usize {
        let mut best = 0;
        for (i, e) in self.eigenvalues.iter().enumerate() {
            if e.abs() < self.eigenvalues[best].abs() {
                best = i;
            }
        }
        best
    }

    /// Distance to zero of the spectrum with the eigenvalue at `skip` removed.
    pub fn gap_excluding(&self, skip: usize) -> f64 {
        self.eigenvalues
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != skip)
            .fold(f64::INFINITY, |m, (_, e)| m.min(e.abs()))
    }
}

/// Default Ritz basis size for a grid with `n` nodes.
pub fn default_basis_size(n: usize) -> usize {
    n / 2
}

/// Lowest `k` eigenpairs with the default basis size.
pub fn spectrum(op: &SectorOperator, k: usize) -> Result<SpectrumReport> {
    spectrum_with_basis(op, k, default_basis_size(op.grid.n()))
}

pub fn spectrum_with_basis(op: &SectorOperator, k: usize, basis_size: usize) -> Result<SpectrumReport> {
    let grid = &op.grid;
    let n = grid.n();
    if basis_size == 0 || basis_size > n {
        return Err(Error::InvalidArgument(format!("basis size {basis_size} outside 1..={n}")));
    }
    if k == 0 || k > basis_size {
        return Err(Error::InvalidArgument(format!("k = {k} outside 1..={basis_size}")));
    }
    let r = grid.nodes();
    let w = grid.weights();
    let big_r = grid.r_max();
    let alphas = spherical_jn_zeros(op.ell, basis_size);
    let b = Mat::from_fn(n, basis_size, |i, k| spherical_jn(op.ell, alphas[k] * r[i] / big_r));
    let wb = Mat::from_fn(n, basis_size, |i, k| w[i] * b[(i, k)]);

    let gram = wb.transpose() * &b;
    let gram = Mat::from_fn(basis_size, basis_size, |i, j| 0.5 * (gram[(i, j)] + gram[(j, i)]));
    let chol = gram
        .llt(Side::Lower)
        .map_err(|e| Error::EigensolverFailure(format!("Ritz basis Gram matrix: {e:?}")))?;
    let l = chol.L();

    let lb = &op.matrix * &b;
    let mut h = wb.transpose() * &lb;
    solve_lower_triangular_in_place(l, h.as_mut(), Par::Seq);
    let mut h = h.transpose().to_owned();
    solve_lower_triangular_in_place(l, h.as_mut(), Par::Seq);
    let h = Mat::from_fn(basis_size, basis_size, |i, j| 0.5 * (h[(i, j)] + h[(j, i)]));

    let eig = h
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::EigensolverFailure(format!("{e:?}")))?;
    let s = eig.S().column_vector();
    let mut order: Vec<usize> = (0..basis_size).collect();
    order.sort_by(|&a, &b| s[a].total_cmp(&s[b]));
    let values: Vec<f64> = order.iter().map(|&i| s[i]).collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::EigensolverFailure("non-finite eigenvalue".into()));
    }
    let scale = values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));

    let u = eig.U();
    let mut y = Mat::from_fn(basis_size, k, |i, c| u[(i, order[c])]);
    solve_upper_triangular_in_place(l.transpose(), y.as_mut(), Par::Seq);
    let x = &b * &y;
    let eigenvectors: Vec<RadialProfile> = (0..k)
        .map(|c| {
            let col: Vec<f64> = (0..n).map(|i| x[(i, c)]).collect();
            let norm = dot_weighted(w, &col, &col).sqrt();
            let sign = if col.iter().fold(0.0, |a: f64, v| if v.abs() > a.abs() { *v } else { a }) < 0.0 {
                -1.0
            } else {
                1.0
            };
            RadialProfile::from_raw(grid, col.into_iter().map(|v| sign * v / norm).collect())
        })
        .collect();

    let eigenvalues = values[..k].to_vec();
    let zero_gap = eigenvalues.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    Ok(SpectrumReport {
        ell: op.ell,
        eigenvalues,
        eigenvectors,
        zero_gap,
        zero_mode_overlap: None,
        scale,
        basis_size,
    })
}

/// Per-sector findings on one grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorSummary {
    pub ell: usize,
    pub eigenvalues: Vec<f64>,
    /// Distance of the spectrum to zero, excluding the translation mode in `ℓ = 1`.
    pub gap: f64,
    pub symmetry_defect: f64,
    pub scale: f64,
}

/// Findings on one grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFindings {
    pub n: usize,
    pub r_max: f64,
    /// `‖L₊Q'‖ / ‖Q'‖` in the `ℓ = 1` sector.
    pub translation_residual: f64,
    /// `‖L₊S + Q‖ / ‖Q‖` in the `ℓ = 0` sector.
    pub scaling_residual: f64,
    pub zero_tolerance: f64,
    /// Eigenvalue of smallest magnitude in `ℓ = 1`.
    pub zero_mode: f64,
    pub zero_mode_overlap: f64,
    pub sectors: Vec<SectorSummary>,
    pub zero_mode_found: bool,
    pub gaps_clear: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NondegeneracyReport {
    pub l_max: usize,
    pub coarse: GridFindings,
    pub fine: GridFindings,
    /// The translation residual shrinks under refinement.
    pub tolerance_shrinks: bool,
    /// No sector gap drops by more than the drift allowance.
    pub gaps_stable: bool,
    /// Largest movement of the lowest three eigenvalues of any sector.
    pub eigenvalue_drift: f64,
    pub passed: bool,
}

/// Every sector operator and spectrum on one grid.
pub struct SectorAnalysis {
    pub findings: GridFindings,
    pub spectra: Vec<SpectrumReport>,
}

/// Sector spectra for `ℓ = 0..=l_max` at the profile `q` with eigenvalue `lambda`.
pub fn analyze_sectors(q: &RadialProfile, lambda: f64, l_max: usize, k: usize) -> Result<SectorAnalysis> {
    if l_max < 1 {
        return Err(Error::InsufficientSectors { l_max });
    }
    let grid = q.grid();
    let dq = translation_mode(q);
    let s = scaling_mode(q);
    let mut spectra = Vec::with_capacity(l_max + 1);
    let mut defects = Vec::with_capacity(l_max + 1);
    let (mut translation_residual, mut scaling_residual) = (f64::NAN, f64::NAN);
    for ell in 0..=l_max {
        let op = assemble_l_plus_at(ell, q, lambda)?;
        if ell == 0 {
            let ls = op.apply(&s)?.combine(1.0, q, 1.0)?;
            scaling_residual = weighted_norm(&ls) / weighted_norm(q);
        }
        if ell == 1 {
            translation_residual = weighted_norm(&op.apply(&dq)?) / weighted_norm(&dq);
        }
        let mut spec = spectrum(&op, k)?;
        if ell == 1 {
            let ov = spec.eigenvectors.iter().map(|e| overlap(e, &dq)).collect::<Result<Vec<_>>>()?;
            spec.zero_mode_overlap = Some(ov);
        }
        defects.push(op.symmetry_defect());
        spectra.push(spec);
    }

    let scale = spectra.iter().fold(0.0_f64, |m, s| m.max(s.scale));
    let zero_tolerance = (GAP_FACTOR * translation_residual).min(ZERO_SCALE_FRACTION * scale);
    let l1 = &spectra[1];
    let zi = l1.zero_index();
    let zero_mode = l1.eigenvalues[zi];
    let zero_mode_overlap = l1.zero_mode_overlap.as_ref().map_or(0.0, |o| o[zi]);
    let sectors: Vec<SectorSummary> = spectra
        .iter()
        .zip(&defects)
        .map(|(sp, d)| SectorSummary {
            ell: sp.ell,
            eigenvalues: sp.eigenvalues.clone(),
            gap: if sp.ell == 1 { sp.gap_excluding(zi) } else { sp.zero_gap },
            symmetry_defect: *d,
            scale: sp.scale,
        })
        .collect();
    let zero_mode_found = zero_mode.abs() <= zero_tolerance && zero_mode_overlap >= OVERLAP_THRESHOLD;
    let gaps_clear = sectors
        .iter()
        .all(|s| s.gap >= GAP_FACTOR * zero_tolerance && s.gap >= ZERO_MODE_GAP_FACTOR * zero_mode.abs());
    Ok(SectorAnalysis {
        findings: GridFindings {
            n: grid.n(),
            r_max: grid.r_max(),
            translation_residual,
            scaling_residual,
            zero_tolerance,
            zero_mode,
            zero_mode_overlap,
            sectors,
            zero_mode_found,
            gaps_clear,
        },
        spectra,
    })
}

/// Compares findings on a grid pair `(n, 2n)`.
pub fn compare_refinement(l_max: usize, coarse: GridFindings, fine: GridFindings) -> NondegeneracyReport {
    let tolerance_shrinks = fine.translation_residual < coarse.translation_residual;
    let mut drift = 0.0_f64;
    let mut gaps_stable = true;
    for (c, f) in coarse.sectors.iter().zip(&fine.sectors) {
        for (a, b) in c.eigenvalues.iter().zip(&f.eigenvalues).take(3) {
            drift = drift.max((a - b).abs());
        }
        if f.gap < c.gap - EIGENVALUE_DRIFT {
            gaps_stable = false;
        }
    }
    let passed = coarse.zero_mode_found
        && coarse.gaps_clear
        && fine.zero_mode_found
        && fine.gaps_clear
        && tolerance_shrinks
        && gaps_stable
        && drift <= EIGENVALUE_DRIFT;
    NondegeneracyReport { l_max, coarse, fine, tolerance_shrinks, gaps_stable, eigenvalue_drift: drift, passed }
}

/// Nondegeneracy of `L₊` from ground states on a grid and its refinement.
pub fn nondegeneracy_check(
    coarse: &GroundStateSolution,
    fine: &GroundStateSolution,
    l_max: usize,
    k: usize,
) -> Result<NondegeneracyReport> {
    if !(coarse.converged && fine.converged) {
        return Err(Error::NotConvergedInput);
    }
    nondegeneracy_check_profiles(&coarse.q, &fine.q, coarse.eigenvalue, l_max, k)
}

/// Same as [`nondegeneracy_check`] for arbitrary profiles, e.g. a negative control.
pub fn nondegeneracy_check_profiles(
    coarse: &RadialProfile,
    fine: &RadialProfile,
    lambda: f64,
    l_max: usize,
    k: usize,
) -> Result<NondegeneracyReport> {
    let a = analyze_sectors(coarse, lambda, l_max, k)?;
    let b = analyze_sectors(fine, lambda, l_max, k)?;
    Ok(compare_refinement(l_max, a.findings, b.findings))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sector_zero_matches_half_laplacian() {
        let g = RadialGrid::new(256, 40.0).unwrap();
        let f = RadialProfile::from_fn(&g, |r| (-r * r / 2.0).exp()).unwrap();
        let op = sqrt_laplacian_sector(0, &g).unwrap();
        let a = op.apply(&f).unwrap();
        let b = crate::transform::apply_half_laplacian(&f);
        for (x, y) in a.values().iter().zip(b.values()) {
            assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn sector_one_on_poisson_gradient() {
        // radial part of ∇P₁ and of ∇(√(−Δ)P₁)
        let g = RadialGrid::new(512, 60.0).unwrap();
        let f = RadialProfile::from_fn(&g, |r| -4.0 * r / (PI * PI * (1.0 + r * r).powi(3))).unwrap();
        let want = RadialProfile::from_fn(&g, |r| {
            (-2.0 * r * (1.0 + r * r) - 6.0 * r * (3.0 - r * r)) / (PI * PI * (1.0 + r * r).powi(4))
        })
        .unwrap();
        let op = sqrt_laplacian_sector(1, &g).unwrap();
        let err = op.apply(&f).unwrap().combine(1.0, &want, -1.0).unwrap();
        assert!(weighted_norm(&err) / weighted_norm(&want) < 1e-4);
    }

    #[test]
    fn free_operator_is_positive() {
        let g = RadialGrid::new(128, 20.0).unwrap();
        for ell in 0..3 {
            let op = sqrt_laplacian_sector(ell, &g).unwrap();
            assert!(op.symmetry_defect() <= SYMMETRY_TOLERANCE);
            let sp = spectrum(&op, 4).unwrap();
            assert!(sp.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
            assert!(sp.eigenvalues[0] >= -1e-10);
            if ell == 0 {
                assert!((sp.eigenvalues[0] - PI / g.r_max()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn eigenvectors_are_weighted_orthonormal() {
        let g = RadialGrid::new(128, 20.0).unwrap();
        let op = sqrt_laplacian_sector(1, &g).unwrap();
        let sp = spectrum(&op, 3).unwrap();
        for (i, a) in sp.eigenvectors.iter().enumerate() {
            for (j, b) in sp.eigenvectors.iter().enumerate() {
                let ip = dot_weighted(g.weights(), a.values(), b.values());
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ip - want).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn missing_dipole_sector_is_rejected() {
        let g = RadialGrid::new(64, 10.0).unwrap();
        let q = RadialProfile::from_fn(&g, |r| (-r).exp()).unwrap();
        assert!(matches!(analyze_sectors(&q, 1.0, 0, 3), Err(Error::InsufficientSectors { l_max: 0 })));
    }
}
