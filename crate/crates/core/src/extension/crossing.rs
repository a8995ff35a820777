use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::field::{poisson_extend, HalfspaceField, TGrid};
use super::form::quadratic_form_with;
use crate::error::{Error, Result};
use crate::ground_state::residual;
use crate::potentials::{newton_potential, RescaledProfile};
use crate::radial::{sup_distance, RadialProfile};
use crate::transform::apply_half_laplacian;

/// Profiles closer than this fraction of `‖u‖_∞` are treated as one.
pub const COINCIDE_TOLERANCE: f64 = 1e-9;
/// Relative agreement required between the two evaluations of the functional.
pub const AGREEMENT_TOLERANCE: f64 = 1e-3;
/// Relative residual below which an input counts as a near-solution.
pub const NEAR_SOLUTION_RESIDUAL: f64 = 1e-4;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Crossing {
    pub radius: f64,
    /// Last node before the crossing.
    pub index: usize,
    /// Whether the first argument is the larger one on `(0, radius)`.
    pub first_above: bool,
}

fn lagrange_root(xs: &[f64], ys: &[f64], mut lo: f64, mut hi: f64) -> f64 {
    let p = |x: f64| -> f64 {
        let mut s = 0.0;
        for (i, (xi, yi)) in xs.iter().zip(ys).enumerate() {
            let mut l = 1.0;
            for (j, xj) in xs.iter().enumerate() {
                if i != j {
                    l *= (x - xj) / (xi - xj);
                }
            }
            s += yi * l;
        }
        s
    };
    let mut plo = p(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let pm = p(mid);
        if pm == 0.0 {
            return mid;
        }
        if (pm > 0.0) == (plo > 0.0) {
            lo = mid;
            plo = pm;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Smallest radius where `u − v` changes sign.
///
/// The sign change is bracketed between nodes and the root is refined on a
/// six-point interpolant of `u − v` around the bracket.
pub fn first_crossing(u: &RadialProfile, v: &RadialProfile) -> Result<Crossing> {
    u.grid().check_same(v.grid())?;
    let d: Vec<f64> = u.values().iter().zip(v.values()).map(|(a, b)| a - b).collect();
    let scale = u.sup_norm();
    let distance = d.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    if distance <= COINCIDE_TOLERANCE * scale {
        return Err(Error::Coincide { distance });
    }
    let r = u.grid().nodes();
    let start = d.iter().position(|x| *x != 0.0).ok_or(Error::Coincide { distance })?;
    let first_above = d[start] > 0.0;
    for i in start..d.len() - 1 {
        if d[i + 1] == 0.0 {
            return Ok(Crossing { radius: r[i + 1], index: i + 1, first_above });
        }
        if (d[i + 1] > 0.0) != first_above {
            let lo = i.saturating_sub(2).min(d.len().saturating_sub(6));
            let hi = (lo + 6).min(d.len());
            let radius = lagrange_root(&r[lo..hi], &d[lo..hi], r[i], r[i + 1]);
            return Ok(Crossing { radius, index: i, first_above });
        }
    }
    Err(Error::NoCrossing)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ContradictionStatus {
    /// The inputs agree to within the coincidence tolerance.
    Coincide,
    Evaluated,
    /// Negative functional for two near-solutions.
    ConsistencyAlarm,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaDiagnostics {
    pub cells: usize,
    pub boundary_cells: usize,
    pub max_radius: f64,
    pub max_height: f64,
    /// Ω reaches the truncation at `r_max` or `t_max`.
    pub touches_truncation: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ContradictionReport {
    pub status: ContradictionStatus,
    pub distance: f64,
    pub crossing: Option<Crossing>,
    /// The arguments were swapped so that the first one is larger inside the crossing.
    pub swapped: bool,
    /// `A_u[W] + A_v[W]` from the volume form.
    pub volume_value: f64,
    /// `−2 Σ_{r < R} f W(·,0) w` with `f = (Φ_u − Φ_v)(u + v)/2`.
    pub boundary_value: f64,
    /// `2 Σ_{r < R} w W(·,0) √(−Δ)(u − v) + Σ (Φ_u + Φ_v − 2) w W(·,0)²`.
    pub green_value: f64,
    pub relative_disagreement: f64,
    pub agree: bool,
    pub near_solutions: bool,
    pub omega: Option<OmegaDiagnostics>,
}

impl ContradictionReport {
    fn coincide(distance: f64) -> Self {
        Self {
            status: ContradictionStatus::Coincide,
            distance,
            crossing: None,
            swapped: false,
            volume_value: 0.0,
            boundary_value: 0.0,
            green_value: 0.0,
            relative_disagreement: 0.0,
            agree: true,
            near_solutions: false,
            omega: None,
        }
    }
}

/// Connected component of `{U > V}` reached from boundary nodes with `r < R`.
fn flood_fill(diff: &HalfspaceField, radius: f64) -> Vec<bool> {
    let n = diff.rgrid().n();
    let m = diff.tgrid().m();
    let r = diff.rgrid().nodes();
    let positive = |j: usize, k: usize| diff.get(j, k) > 0.0;
    let mut inside = vec![false; n * m];
    let mut queue = VecDeque::new();
    for j in 0..n {
        if r[j] < radius && positive(j, 0) {
            inside[j] = true;
            queue.push_back((j, 0));
        }
    }
    while let Some((j, k)) = queue.pop_front() {
        let mut visit = |jj: usize, kk: usize| {
            if !inside[kk * n + jj] && positive(jj, kk) {
                inside[kk * n + jj] = true;
                queue.push_back((jj, kk));
            }
        };
        if j > 0 {
            visit(j - 1, k);
        }
        if j + 1 < n {
            visit(j + 1, k);
        }
        if k > 0 {
            visit(j, k - 1);
        }
        if k + 1 < m {
            visit(j, k + 1);
        }
    }
    inside
}

/// Evaluates the truncated-difference functional for any pair of positive profiles.
///
/// Each profile supplies the boundary coefficient `Φ − 1` of its own form.
pub fn contradiction_identity(u: &RadialProfile, v: &RadialProfile, tgrid: TGrid) -> Result<ContradictionReport> {
    let crossing = match first_crossing(u, v) {
        Err(Error::Coincide { distance }) => return Ok(ContradictionReport::coincide(distance)),
        other => other?,
    };
    let distance = sup_distance(u, v);
    let swapped = !crossing.first_above;
    let (u, v) = if swapped { (v, u) } else { (u, v) };
    let grid = u.grid();
    let n = grid.n();
    let m = tgrid.m();
    let big_u = poisson_extend(u, tgrid);
    let big_v = poisson_extend(v, tgrid);
    let diff = big_u.combine(1.0, &big_v, -1.0)?;
    let inside = flood_fill(&diff, crossing.radius);
    let w_values: Vec<f64> = diff.values().iter().zip(&inside).map(|(d, i)| if *i { *d } else { 0.0 }).collect();
    let w_field = HalfspaceField::from_raw(grid, tgrid, w_values);

    let pu = newton_potential(u);
    let pv = newton_potential(v);
    let coef_u = pu.phi().map(|_, p| p - 1.0);
    let coef_v = pv.phi().map(|_, p| p - 1.0);
    let volume_value = quadratic_form_with(&coef_u, &w_field)?.value + quadratic_form_with(&coef_v, &w_field)?.value;

    let r = grid.nodes();
    let wts = grid.weights();
    let w0 = w_field.slice(0);
    let (phu, phv) = (pu.phi().values(), pv.phi().values());
    let (uv, vv) = (u.values(), v.values());
    let ball = |j: usize| r[j] < crossing.radius;
    let boundary_value = -2.0
        * (0..n)
            .filter(|&j| ball(j))
            .map(|j| 0.5 * (phu[j] - phv[j]) * (uv[j] + vv[j]) * w0[j] * wts[j])
            .sum::<f64>();
    let dn = apply_half_laplacian(&u.combine(1.0, v, -1.0)?);
    let green_value = 2.0 * (0..n).filter(|&j| ball(j)).map(|j| wts[j] * w0[j] * dn.values()[j]).sum::<f64>()
        + (0..n).map(|j| (phu[j] + phv[j] - 2.0) * wts[j] * w0[j] * w0[j]).sum::<f64>();

    let relative_disagreement = (volume_value - boundary_value).abs() / boundary_value.abs().max(f64::MIN_POSITIVE);
    let h = grid.h();
    let tau = tgrid.tau();
    let mut omega = OmegaDiagnostics {
        cells: 0,
        boundary_cells: 0,
        max_radius: 0.0,
        max_height: 0.0,
        touches_truncation: false,
    };
    for k in 0..m {
        for j in 0..n {
            if inside[k * n + j] {
                omega.cells += 1;
                if k == 0 {
                    omega.boundary_cells += 1;
                }
                omega.max_radius = omega.max_radius.max((j + 1) as f64 * h);
                omega.max_height = omega.max_height.max(k as f64 * tau);
                if j + 1 == n || k + 1 == m {
                    omega.touches_truncation = true;
                }
            }
        }
    }
    Ok(ContradictionReport {
        status: ContradictionStatus::Evaluated,
        distance,
        crossing: Some(crossing),
        swapped,
        volume_value,
        boundary_value,
        green_value,
        relative_disagreement,
        agree: relative_disagreement <= AGREEMENT_TOLERANCE,
        near_solutions: false,
        omega: Some(omega),
    })
}

/// The functional for two canonically rescaled profiles.
///
/// A negative value for two near-solutions would contradict the
/// nonnegativity of the form and raises [`ContradictionStatus::ConsistencyAlarm`].
pub fn contradiction_functional(
    u: &RescaledProfile,
    v: &RescaledProfile,
    tgrid: TGrid,
) -> Result<ContradictionReport> {
    let mut report = contradiction_identity(u.profile(), v.profile(), tgrid)?;
    if report.status == ContradictionStatus::Coincide {
        return Ok(report);
    }
    let ru = residual(u.profile(), u.lambda())?;
    let rv = residual(v.profile(), v.lambda())?;
    report.near_solutions = ru <= NEAR_SOLUTION_RESIDUAL && rv <= NEAR_SOLUTION_RESIDUAL;
    if report.near_solutions && report.volume_value < 0.0 {
        report.status = ContradictionStatus::ConsistencyAlarm;
    }
    Ok(report)
}
