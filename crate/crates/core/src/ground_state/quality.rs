use serde::{Deserialize, Serialize};

use super::GroundStateSolution;
use crate::error::{Error, Result};
use crate::fit::{linear_fit, LineFit};
use crate::radial::RadialProfile;
use crate::transform::forward_transform;

pub const DECAY_SLOPE_RANGE: [f64; 2] = [-4.5, -3.5];
pub const TAIL_MIN_R_SQUARED: f64 = 0.99;
/// The tail fit runs from where `Q̂` drops below `1e-2·Q̂(ρ₁)` to where it drops below `1e-8·Q̂(ρ₁)`.
pub const TAIL_WINDOW_DROP: [f64; 2] = [1e-2, 1e-8];
/// Frequencies whose fitted `Q̂` exceeds this multiple of the noise floor count as resolved.
pub const RESOLVED_MARGIN: f64 = 1e2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub window: [f64; 2],
    pub fit: Option<LineFit>,
    pub in_range: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierReport {
    /// Largest `|Q̂|` over the top quarter of frequencies.
    pub noise_floor: f64,
    pub resolved_frequency: f64,
    pub resolved_nodes: usize,
    pub positive_in_band: bool,
    pub nonincreasing_in_band: bool,
    pub all_nodes_positive: bool,
    pub all_nodes_nonincreasing: bool,
    pub first_nonpositive: Option<usize>,
    pub first_increase: Option<usize>,
}

/// Exponential fit `log Q̂ ≈ slope·ρ + intercept`, a proxy for analyticity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralTail {
    pub window: [f64; 2],
    pub fit: LineFit,
    pub analyticity_radius: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub n: usize,
    pub r_max: f64,
    pub positive: bool,
    pub min_value: f64,
    pub strictly_decreasing: bool,
    pub max_forward_difference: f64,
    pub first_monotonicity_violation: Option<usize>,
    pub decay: DecayReport,
    pub fourier: FourierReport,
    pub spectral_tail: Option<SpectralTail>,
    pub tail_ok: bool,
    pub passed: bool,
}

pub fn verify_qualitative(sol: &GroundStateSolution) -> Result<QualityReport> {
    if !sol.converged {
        return Err(Error::NotConvergedInput);
    }
    Ok(verify_profile(&sol.q))
}

/// Qualitative checks on any profile, without a convergence precondition.
pub fn verify_profile(q: &RadialProfile) -> QualityReport {
    let grid = q.grid();
    let v = q.values();

    let min_value = v.iter().copied().fold(f64::INFINITY, f64::min);
    let diffs: Vec<f64> = v.windows(2).map(|w| w[1] - w[0]).collect();
    let max_forward_difference = diffs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let first_monotonicity_violation = diffs.iter().position(|d| *d >= 0.0);

    let window = [grid.r_max() / 4.0, grid.r_max() / 2.0];
    let (xs, ys): (Vec<f64>, Vec<f64>) = grid
        .nodes()
        .iter()
        .zip(v)
        .filter(|(r, _)| **r >= window[0] && **r <= window[1])
        .map(|(r, q)| (r.ln(), q.ln()))
        .unzip();
    let decay_fit = if ys.iter().all(|y| y.is_finite()) { linear_fit(&xs, &ys) } else { None };
    let decay_in_range =
        decay_fit.is_some_and(|f| f.slope >= DECAY_SLOPE_RANGE[0] && f.slope <= DECAY_SLOPE_RANGE[1]);

    let spec = forward_transform(q);
    let qhat = spec.values();
    let rho = spec.frequencies();
    let n = qhat.len();

    let spectral_tail = tail_fit(rho, qhat);
    let tail_ok = spectral_tail
        .as_ref()
        .is_some_and(|t| t.fit.slope < 0.0 && t.fit.r_squared >= TAIL_MIN_R_SQUARED);

    let noise_floor = qhat[3 * n / 4..].iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    let resolved_frequency = match &spectral_tail {
        Some(t) if t.fit.slope < 0.0 && noise_floor > 0.0 => {
            ((RESOLVED_MARGIN * noise_floor).ln() - t.fit.intercept) / t.fit.slope
        }
        Some(_) => rho[n - 1],
        None => 0.0,
    }
    .min(rho[n - 1]);
    let resolved_nodes = rho.iter().take_while(|p| **p <= resolved_frequency).count();

    let first_nonpositive = qhat.iter().position(|x| *x <= 0.0);
    let first_increase = qhat.windows(2).position(|w| w[1] > w[0]);
    let band = &qhat[..resolved_nodes];
    let positive_in_band = resolved_nodes > 0 && band.iter().all(|x| *x > 0.0);
    let nonincreasing_in_band = band.windows(2).all(|w| w[1] <= w[0]);

    let fourier = FourierReport {
        noise_floor,
        resolved_frequency,
        resolved_nodes,
        positive_in_band,
        nonincreasing_in_band,
        all_nodes_positive: first_nonpositive.is_none(),
        all_nodes_nonincreasing: first_increase.is_none(),
        first_nonpositive,
        first_increase,
    };

    let positive = min_value > 0.0;
    let strictly_decreasing = first_monotonicity_violation.is_none();
    let passed = positive
        && strictly_decreasing
        && decay_in_range
        && fourier.positive_in_band
        && fourier.nonincreasing_in_band
        && tail_ok;

    QualityReport {
        n: grid.n(),
        r_max: grid.r_max(),
        positive,
        min_value,
        strictly_decreasing,
        max_forward_difference,
        first_monotonicity_violation,
        decay: DecayReport { window, fit: decay_fit, in_range: decay_in_range },
        fourier,
        spectral_tail,
        tail_ok,
        passed,
    }
}

fn tail_fit(rho: &[f64], qhat: &[f64]) -> Option<SpectralTail> {
    let peak = qhat[0];
    if peak <= 0.0 {
        return None;
    }
    let lo = qhat.iter().position(|x| *x < TAIL_WINDOW_DROP[0] * peak)?;
    let hi = qhat[lo..]
        .iter()
        .position(|x| *x < TAIL_WINDOW_DROP[1] * peak)
        .map_or(qhat.len(), |i| lo + i);
    if hi - lo < 8 {
        return None;
    }
    let ys: Vec<f64> = qhat[lo..hi].iter().map(|x| x.ln()).collect();
    if ys.iter().any(|y| !y.is_finite()) {
        return None;
    }
    let fit = linear_fit(&rho[lo..hi], &ys)?;
    Some(SpectralTail { window: [rho[lo], rho[hi - 1]], analyticity_radius: -1.0 / fit.slope, fit })
}
