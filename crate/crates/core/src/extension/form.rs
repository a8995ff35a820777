use faer::{Mat, Side};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::field::{Extension, HalfspaceField, TGrid};
use crate::error::{Error, Result};
use crate::potentials::RescaledProfile;
use crate::radial::{RadialGrid, RadialProfile};
use crate::transform::apply_half_laplacian;

/// Split value of `A_u[ψ] = ∬ |∇ψ|² + ∫ (Φ_u − 1) ψ(·,0)²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormReport {
    pub value: f64,
    pub dirichlet_part: f64,
    pub boundary_part: f64,
    pub radial_part: f64,
    pub time_part: f64,
}

/// Accumulates the discrete bilinear forms slice by slice.
///
/// Radial differences sit on the staggered nodes `r_j + h/2` with `ψ = 0` at
/// `r_max`; time differences sit between consecutive slices.
struct Accumulator<'a> {
    grid: &'a RadialGrid,
    tgrid: TGrid,
    radial_weights: Vec<f64>,
}

impl<'a> Accumulator<'a> {
    fn new(grid: &'a RadialGrid, tgrid: TGrid) -> Self {
        let h = grid.h();
        let radial_weights =
            grid.nodes().iter().map(|r| 4.0 * std::f64::consts::PI * (r + 0.5 * h).powi(2) / h).collect();
        Self { grid, tgrid, radial_weights }
    }

    fn radial(&self, k: usize, a: &[f64], b: &[f64]) -> f64 {
        let n = a.len();
        let mut s = 0.0;
        for j in 0..n {
            let (an, bn) = if j + 1 < n { (a[j + 1], b[j + 1]) } else { (0.0, 0.0) };
            s += self.radial_weights[j] * (an - a[j]) * (bn - b[j]);
        }
        self.tgrid.weight(k) * s
    }

    fn time(&self, a0: &[f64], a1: &[f64], b0: &[f64], b1: &[f64]) -> f64 {
        let w = self.grid.weights();
        let mut s = 0.0;
        for j in 0..a0.len() {
            s += w[j] * (a1[j] - a0[j]) * (b1[j] - b0[j]);
        }
        s / self.tgrid.tau()
    }

    fn mass(&self, k: usize, a: &[f64], b: &[f64]) -> f64 {
        let w = self.grid.weights();
        self.tgrid.weight(k) * a.iter().zip(b).zip(w).map(|((a, b), w)| a * b * w).sum::<f64>()
    }
}

fn boundary(grid: &RadialGrid, coefficient: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let w = grid.weights();
    (0..a.len()).map(|j| coefficient[j] * w[j] * a[j] * b[j]).sum()
}

/// `A[ψ]` with an explicit boundary coefficient, e.g. `Φ_u − 1`.
pub fn quadratic_form_with(coefficient: &RadialProfile, psi: &HalfspaceField) -> Result<FormReport> {
    coefficient.grid().check_same(psi.rgrid())?;
    let grid = psi.rgrid();
    let tgrid = psi.tgrid();
    let acc = Accumulator::new(grid, tgrid);
    let mut radial_part = 0.0;
    let mut time_part = 0.0;
    for k in 0..tgrid.m() {
        let s = psi.slice(k);
        radial_part += acc.radial(k, s, s);
        if k + 1 < tgrid.m() {
            let next = psi.slice(k + 1);
            time_part += acc.time(s, next, s, next);
        }
    }
    let dirichlet_part = radial_part + time_part;
    let boundary_part = boundary(grid, coefficient.values(), psi.slice(0), psi.slice(0));
    Ok(FormReport { value: dirichlet_part + boundary_part, dirichlet_part, boundary_part, radial_part, time_part })
}

/// `A_u[ψ]` for a canonically rescaled `u`, whose boundary coefficient is `Φ_u − 1`.
pub fn quadratic_form(u: &RescaledProfile, psi: &HalfspaceField) -> Result<FormReport> {
    let coefficient = RadialProfile::from_raw(u.profile().grid(), u.boundary_coefficient());
    quadratic_form_with(&coefficient, psi)
}

/// Discrete `‖ψ‖²_{H¹}`: Dirichlet energy plus trapezoid `L²` mass.
pub fn h1_norm_squared(psi: &HalfspaceField) -> f64 {
    let acc = Accumulator::new(psi.rgrid(), psi.tgrid());
    let tg = psi.tgrid();
    let mut total = 0.0;
    for k in 0..tg.m() {
        let s = psi.slice(k);
        total += acc.radial(k, s, s) + acc.mass(k, s, s);
        if k + 1 < tg.m() {
            let next = psi.slice(k + 1);
            total += acc.time(s, next, s, next);
        }
    }
    total
}

/// `A_u[U]` of the exact extension, by the spectral route
/// `⟨u, √(−Δ)u⟩ + ⟨(Φ_u − 1)u, u⟩`.
///
/// Vanishes when `u` solves the rescaled equation, up to the solver residual.
pub fn continuum_form(u: &RescaledProfile) -> f64 {
    let p = u.profile();
    let w = p.grid().weights();
    let half = apply_half_laplacian(p);
    let coefficient = u.boundary_coefficient();
    p.values()
        .iter()
        .zip(half.values())
        .zip(&coefficient)
        .zip(w)
        .map(|(((v, s), c), w)| w * v * (s + c * v))
        .sum()
}

/// Error budget of the discrete form at the extension, in Rayleigh-quotient units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormBudget {
    pub form: FormReport,
    pub h1_norm_squared: f64,
    /// [`continuum_form`] of the same profile.
    pub continuum_value: f64,
    /// `A_h[U] / ‖U‖²_{H¹}`.
    pub normalized_value: f64,
    /// `|A_h[U] − A[U]| / ‖U‖²_{H¹}`: quadrature and `t`-truncation error.
    pub discretization: f64,
    /// `|A[U]| / ‖U‖²_{H¹}`: what the solver residual leaves of the exact zero.
    pub continuum_defect: f64,
    /// `ε(h, τ) = discretization + continuum_defect`.
    pub epsilon: f64,
}

/// Discrete `A_u[U]` on `tgrid` with its error budget.
pub fn extension_budget(u: &RescaledProfile, tgrid: TGrid) -> Result<FormBudget> {
    let ext = super::field::poisson_extend(u.profile(), tgrid);
    let form = quadratic_form(u, &ext)?;
    let norm = h1_norm_squared(&ext);
    let continuum_value = continuum_form(u);
    let discretization = (form.value - continuum_value).abs() / norm;
    let continuum_defect = continuum_value.abs() / norm;
    Ok(FormBudget {
        form,
        h1_norm_squared: norm,
        continuum_value,
        normalized_value: form.value / norm,
        discretization,
        continuum_defect,
        epsilon: discretization + continuum_defect,
    })
}

/// One trial field of the minimization basis, generated slice by slice.
#[derive(Clone, Debug)]
pub enum BasisElement {
    /// The harmonic extension of the trace `u`.
    Extension,
    /// `exp(−((r − r0)² + t²)/s²)`, nonzero on the boundary.
    BoundaryGaussian { r0: f64, s: f64 },
    /// `(1 − d²)²` for `d² = ((r − r0)² + (t − t0)²)/radius² < 1`; zero trace when `t0 > radius`.
    InteriorBump { r0: f64, t0: f64, radius: f64 },
    /// Sum of unit-width Gaussian blobs `a·exp(−((r − rc)² + (t − tc)²)/2)`.
    Noise { blobs: Vec<(f64, f64, f64)> },
    Field(HalfspaceField),
}

impl BasisElement {
    fn slice(&self, ext: &Extension, grid: &RadialGrid, tgrid: TGrid, k: usize, trace: &[f64]) -> Vec<f64> {
        let t = tgrid.node(k);
        let r = grid.nodes();
        match self {
            BasisElement::Extension => {
                if k == 0 {
                    trace.to_vec()
                } else {
                    ext.slice(t)
                }
            }
            BasisElement::BoundaryGaussian { r0, s } => {
                r.iter().map(|r| (-((r - r0).powi(2) + t * t) / (s * s)).exp()).collect()
            }
            BasisElement::InteriorBump { r0, t0, radius } => r
                .iter()
                .map(|r| {
                    let d2 = ((r - r0).powi(2) + (t - t0).powi(2)) / (radius * radius);
                    if d2 < 1.0 {
                        (1.0 - d2).powi(2)
                    } else {
                        0.0
                    }
                })
                .collect(),
            BasisElement::Noise { blobs } => r
                .iter()
                .map(|r| blobs.iter().map(|(rc, tc, a)| a * (-((r - rc).powi(2) + (t - tc).powi(2)) / 2.0).exp()).sum())
                .collect(),
            BasisElement::Field(f) => f.slice(k).to_vec(),
        }
    }
}

pub const DEFAULT_BASIS_SIZE: usize = 21;

/// Zero-trace bumps used as the interior-only control basis.
pub fn interior_bumps() -> Vec<BasisElement> {
    let mut out = Vec::new();
    for r0 in [0.5, 2.0, 5.0] {
        for t0 in [2.0, 5.0] {
            out.push(BasisElement::InteriorBump { r0, t0, radius: 1.5 });
        }
    }
    out
}

/// The extension, boundary Gaussians, interior bumps, then seeded noise fields up to `size`.
pub fn structured_basis(size: usize, seed: u64) -> Vec<BasisElement> {
    let mut out = vec![BasisElement::Extension];
    for r0 in [0.0, 1.0, 2.0, 4.0, 7.0] {
        for s in [1.0, 3.0] {
            out.push(BasisElement::BoundaryGaussian { r0, s });
        }
    }
    out.extend(interior_bumps());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < size {
        let blobs = (0..6)
            .map(|_| (rng.random_range(0.0..8.0), rng.random_range(0.0..8.0), rng.random_range(-1.0..1.0)))
            .collect();
        out.push(BasisElement::Noise { blobs });
    }
    out.truncate(size);
    out
}

#[derive(Clone, Debug)]
pub struct FormMinimum {
    /// Smallest generalized eigenvalue of `A` against the `H¹` Gram matrix.
    pub min_quotient: f64,
    /// All Rayleigh quotients, ascending.
    pub quotients: Vec<f64>,
    pub minimizer: HalfspaceField,
    /// Coefficients of the minimizer in the basis.
    pub coefficients: Vec<f64>,
    /// `H¹`-normalized correlation of the minimizer with the extension, if it is in the basis.
    pub extension_correlation: Option<f64>,
    /// `A[U] / ‖U‖²_{H¹}` if the extension is in the basis.
    pub extension_quotient: Option<f64>,
}

/// Minimizes `A_u[ψ] / ‖ψ‖²_{H¹}` over the structured basis of the given size.
pub fn form_minimize(u: &RescaledProfile, tgrid: TGrid, basis_size: usize, seed: u64) -> Result<FormMinimum> {
    form_minimize_with(u, tgrid, &structured_basis(basis_size, seed))
}

pub fn form_minimize_with(u: &RescaledProfile, tgrid: TGrid, basis: &[BasisElement]) -> Result<FormMinimum> {
    let coefficient = RadialProfile::from_raw(u.profile().grid(), u.boundary_coefficient());
    minimize_with_coefficient(u.profile(), &coefficient, tgrid, basis)
}

pub(crate) fn minimize_with_coefficient(
    u: &RadialProfile,
    coefficient: &RadialProfile,
    tgrid: TGrid,
    basis: &[BasisElement],
) -> Result<FormMinimum> {
    let grid = u.grid();
    grid.check_same(coefficient.grid())?;
    let size = basis.len();
    if size == 0 {
        return Err(Error::InvalidArgument("empty minimization basis".into()));
    }
    for b in basis {
        if let BasisElement::Field(f) = b {
            grid.check_same(f.rgrid())?;
            if f.tgrid() != tgrid {
                return Err(Error::GridMismatch);
            }
        }
    }
    let ext = Extension::new(u);
    let acc = Accumulator::new(grid, tgrid);
    let mut a = Mat::<f64>::zeros(size, size);
    let mut g = Mat::<f64>::zeros(size, size);
    let slices = |k: usize| -> Vec<Vec<f64>> { basis.iter().map(|b| b.slice(&ext, grid, tgrid, k, u.values())).collect() };

    let mut current = slices(0);
    for i in 0..size {
        for j in i..size {
            a[(i, j)] += boundary(grid, coefficient.values(), &current[i], &current[j]);
        }
    }
    for k in 0..tgrid.m() {
        let next = if k + 1 < tgrid.m() { Some(slices(k + 1)) } else { None };
        for i in 0..size {
            for j in i..size {
                let mut d = acc.radial(k, &current[i], &current[j]);
                if let Some(nx) = &next {
                    d += acc.time(&current[i], &nx[i], &current[j], &nx[j]);
                }
                a[(i, j)] += d;
                g[(i, j)] += d + acc.mass(k, &current[i], &current[j]);
            }
        }
        if let Some(nx) = next {
            current = nx;
        }
    }
    for i in 0..size {
        for j in 0..i {
            a[(i, j)] = a[(j, i)];
            g[(i, j)] = g[(j, i)];
        }
    }

    let chol = g
        .llt(Side::Lower)
        .map_err(|e| Error::EigensolverFailure(format!("basis Gram matrix is not positive definite: {e:?}")))?;
    let l = chol.L();
    let mut h = a.clone();
    faer::linalg::triangular_solve::solve_lower_triangular_in_place(l, h.as_mut(), faer::Par::Seq);
    let mut h = h.transpose().to_owned();
    faer::linalg::triangular_solve::solve_lower_triangular_in_place(l, h.as_mut(), faer::Par::Seq);
    let h = Mat::from_fn(size, size, |i, j| 0.5 * (h[(i, j)] + h[(j, i)]));
    let eig = h.self_adjoint_eigen(Side::Lower).map_err(|e| Error::EigensolverFailure(format!("{e:?}")))?;
    let s = eig.S().column_vector();
    let mut order: Vec<usize> = (0..size).collect();
    order.sort_by(|&x, &y| s[x].total_cmp(&s[y]));
    let quotients: Vec<f64> = order.iter().map(|&i| s[i]).collect();
    let mut y = Mat::from_fn(size, 1, |i, _| eig.U()[(i, order[0])]);
    faer::linalg::triangular_solve::solve_upper_triangular_in_place(l.transpose(), y.as_mut(), faer::Par::Seq);
    let mut c: Vec<f64> = (0..size).map(|i| y[(i, 0)]).collect();

    let ext_index = basis.iter().position(|b| matches!(b, BasisElement::Extension));
    if let Some(e) = ext_index {
        if c[e] < 0.0 {
            c.iter_mut().for_each(|x| *x = -*x);
        }
    }
    let gc: Vec<f64> = (0..size).map(|i| (0..size).map(|j| g[(i, j)] * c[j]).sum()).collect();
    let cgc: f64 = c.iter().zip(&gc).map(|(a, b)| a * b).sum();
    let extension_correlation = ext_index.map(|e| gc[e].abs() / (cgc * g[(e, e)]).sqrt());
    let extension_quotient = ext_index.map(|e| a[(e, e)] / g[(e, e)]);

    let mut values = Vec::with_capacity(grid.n() * tgrid.m());
    for k in 0..tgrid.m() {
        let parts = slices(k);
        values.extend((0..grid.n()).map(|j| parts.iter().zip(&c).map(|(p, c)| c * p[j]).sum::<f64>()));
    }
    Ok(FormMinimum {
        min_quotient: quotients[0],
        quotients,
        minimizer: HalfspaceField::from_raw(grid, tgrid, values),
        coefficients: c,
        extension_correlation,
        extension_quotient,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_trace_field_has_no_boundary_part() {
        let g = RadialGrid::new(128, 16.0).unwrap();
        let tg = TGrid::new(64, 4.0).unwrap();
        let psi = HalfspaceField::from_fn(&g, tg, |r, t| {
            if (1.0..=2.0).contains(&t) {
                ((t - 1.0) * (2.0 - t)).powi(2) * (-r * r).exp()
            } else {
                0.0
            }
        })
        .unwrap();
        let coef = RadialProfile::from_fn(&g, |r| r - 3.0).unwrap();
        let rep = quadratic_form_with(&coef, &psi).unwrap();
        assert_eq!(rep.boundary_part, 0.0);
        assert!(rep.dirichlet_part > 0.0);
        assert_eq!(rep.value, rep.dirichlet_part + rep.boundary_part);
    }

    #[test]
    fn separable_energy_matches_closed_form() {
        // ψ = e^{−r²} e^{−t}: ∬|∇ψ|² = (∫|∇e^{−r²}|² dx)/2 + (∫ e^{−2r²} dx)/2
        let g = RadialGrid::new(1024, 12.0).unwrap();
        let tg = TGrid::new(2048, 30.0).unwrap();
        let psi = HalfspaceField::from_fn(&g, tg, |r, t| (-r * r - t).exp()).unwrap();
        let pi = std::f64::consts::PI;
        let m = (pi / 2.0).powf(1.5);
        let grad = 3.0 * m;
        let want = 0.5 * grad + 0.5 * m;
        let zero = RadialProfile::zeros(&g);
        let got = quadratic_form_with(&zero, &psi).unwrap().value;
        assert!((got / want - 1.0).abs() < 1e-4, "{got} vs {want}");
    }

    #[test]
    fn basis_sizes() {
        assert_eq!(structured_basis(21, 0).len(), 21);
        assert_eq!(structured_basis(5, 0).len(), 5);
        assert!(matches!(structured_basis(21, 0)[0], BasisElement::Extension));
        assert_eq!(interior_bumps().len(), 6);
    }
}
