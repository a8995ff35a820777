//! Multipole quadrature for the Coulomb kernel in a spherical-harmonic sector.
//!
//! For a density `g(s) Y_ℓm` the potential has radial part
//! `I_ℓ[g](r) = 4π/(2ℓ+1) ∫ min(r,s)^ℓ / max(r,s)^{ℓ+1} g(s) s² ds`.
//! The kernel has a derivative jump at `s = r`, so the trapezoid rule on the
//! grid carries Euler-Maclaurin corrections at the diagonal node:
//!
//! `I_ℓ[g]_i = trapezoid − (4π h²/12) g_i + (4π h⁴/720) (D_ℓ g)_i`,
//! `D_ℓ g = 3 (r² g')' / r² + ℓ(ℓ+1) g / r²`,
//!
//! with `D_ℓ` discretized in conservative form. The same rule is exposed as
//! an O(n) cumulative sum and as a dense matrix.

use std::f64::consts::PI;

use faer::Mat;

use crate::radial::RadialGrid;

fn ghost(ell: usize, g: &[f64]) -> f64 {
    if ell == 0 {
        g[0]
    } else {
        0.0
    }
}

fn stencil_apply(ell: usize, grid: &RadialGrid, g: &[f64]) -> Vec<f64> {
    let n = grid.n();
    let h = grid.h();
    let angular = (ell * (ell + 1)) as f64;
    (0..n)
        .map(|i| {
            let r = grid.nodes()[i];
            let left = if i == 0 { ghost(ell, g) } else { g[i - 1] };
            let right = if i + 1 == n { 0.0 } else { g[i + 1] };
            let rp = (r + 0.5 * h).powi(2);
            let rm = (r - 0.5 * h).powi(2);
            let flux = rp * (right - g[i]) - rm * (g[i] - left);
            3.0 * flux / (h * h * r * r) + angular * g[i] / (r * r)
        })
        .collect()
}

/// `I_ℓ[g]` at every node in O(n).
pub(crate) fn apply(ell: usize, grid: &RadialGrid, g: &[f64]) -> Vec<f64> {
    let n = grid.n();
    let h = grid.h();
    let r = grid.nodes();
    let l = ell as i32;
    let pref = 4.0 * PI / (2 * ell + 1) as f64;

    let mut inner = vec![0.0; n];
    let mut acc = 0.0;
    for j in 0..n {
        acc += r[j].powi(l + 2) * h * g[j];
        inner[j] = acc;
    }
    let mut outer = vec![0.0; n];
    let mut acc = 0.0;
    for j in (0..n).rev() {
        outer[j] = acc;
        acc += r[j].powi(1 - l) * h * g[j];
    }

    let d = stencil_apply(ell, grid, g);
    let c2 = 4.0 * PI * h * h / 12.0;
    let c4 = 4.0 * PI * h.powi(4) / 720.0;
    (0..n)
        .map(|i| {
            let trap = pref * (inner[i] / r[i].powi(l + 1) + r[i].powi(l) * outer[i]);
            trap - c2 * g[i] + c4 * d[i]
        })
        .collect()
}

/// Dense matrix of the same rule: `apply(ell, grid, g) = matrix(ell, grid) · g`.
pub(crate) fn matrix(ell: usize, grid: &RadialGrid) -> Mat<f64> {
    let n = grid.n();
    let h = grid.h();
    let r = grid.nodes();
    let l = ell as i32;
    let pref = 4.0 * PI / (2 * ell + 1) as f64;
    let c2 = 4.0 * PI * h * h / 12.0;
    let c4 = 4.0 * PI * h.powi(4) / 720.0;
    let mut m = Mat::from_fn(n, n, |i, j| {
        let (lo, hi) = if r[i] < r[j] { (r[i], r[j]) } else { (r[j], r[i]) };
        pref * lo.powi(l) / hi.powi(l + 1) * r[j] * r[j] * h
    });
    let angular = (ell * (ell + 1)) as f64;
    for i in 0..n {
        let ri = r[i];
        let s = 3.0 / (h * h * ri * ri);
        let rp = (ri + 0.5 * h).powi(2);
        let rm = (ri - 0.5 * h).powi(2);
        let mut diag = -(rp + rm) * s + angular / (ri * ri);
        if i == 0 && ell == 0 {
            diag += rm * s;
        }
        m[(i, i)] += -c2 + c4 * diag;
        if i + 1 < n {
            m[(i, i + 1)] += c4 * rp * s;
        }
        if i > 0 {
            m[(i, i - 1)] += c4 * rm * s;
        }
    }
    m
}

/// `∫ g(s) 4π s ds`, the monopole potential at the origin.
///
/// The integrand `s g(s)` is odd for even `g`, so only odd-derivative
/// endpoint terms at `s = 0` survive; `g(0)`, `g''(0)` and `g''''(0)` come from
/// an even quartic through the first three nodes.
pub(crate) fn origin_value(grid: &RadialGrid, g: &[f64]) -> f64 {
    let h = grid.h();
    let trap: f64 = grid.weights().iter().zip(g).zip(grid.nodes()).map(|((w, g), r)| w * g / r).sum();
    let (g1, g2, g3) = (g[0], g[1], g[2]);
    let a = 1.5 * g1 - 0.6 * g2 + 0.1 * g3;
    let b = (-13.0 / 24.0 * g1 + 2.0 / 3.0 * g2 - 0.125 * g3) / (h * h);
    let c = (g1 / 24.0 - g2 / 15.0 + g3 / 40.0) / h.powi(4);
    let h2 = h * h;
    trap + 4.0 * PI * (h2 / 12.0 * a - h2 * h2 / 120.0 * b + h2 * h2 * h2 / 252.0 * c)
}
