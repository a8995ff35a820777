//! Two-column CSV series for plotting.

use std::fs;
use std::path::Path;

use super::pipeline::PipelineState;
use super::record::two_column_csv;
use crate::error::Result;
use crate::fit::LineFit;
use crate::ground_state::{verify_profile, GroundStateSolution};
use crate::transform::forward_transform;

/// Number of bins in the Rayleigh-quotient histogram.
pub const HISTOGRAM_BINS: usize = 10;

fn write(dir: &Path, name: &str, header: &str, xs: &[f64], ys: &[f64]) -> Result<()> {
    fs::write(dir.join(name), two_column_csv(header, xs, ys))?;
    Ok(())
}

fn fit_endpoints(fit: &LineFit, window: [f64; 2]) -> (Vec<f64>, Vec<f64>) {
    (window.to_vec(), window.iter().map(|x| fit.eval(*x)).collect())
}

/// Counts of `values` in equal-width bins; returns bin centers and counts.
pub fn histogram(values: &[f64], bins: usize) -> (Vec<f64>, Vec<f64>) {
    if values.is_empty() || bins == 0 {
        return (Vec::new(), Vec::new());
    }
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo { (hi - lo) / bins as f64 } else { 1.0 };
    let mut counts = vec![0.0; bins];
    for v in values {
        let i = (((v - lo) / width) as usize).min(bins - 1);
        counts[i] += 1.0;
    }
    let centers = (0..bins).map(|i| lo + (i as f64 + 0.5) * width).collect();
    (centers, counts)
}

/// Writes every available series into `dir`.
pub fn emit_plot_data(solution: &GroundStateSolution, reports: &PipelineState, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    let q = &solution.q;
    let r = q.grid().nodes();
    write(dir, "q_profile.csv", "r,Q", r, q.values())?;

    let quality = verify_profile(q);
    let (lx, ly): (Vec<f64>, Vec<f64>) =
        r.iter().zip(q.values()).filter(|(_, v)| **v > 0.0).map(|(r, v)| (r.ln(), v.ln())).unzip();
    write(dir, "q_loglog.csv", "log_r,log_Q", &lx, &ly)?;
    if let Some(fit) = &quality.decay.fit {
        let (x, y) = fit_endpoints(fit, [quality.decay.window[0].ln(), quality.decay.window[1].ln()]);
        write(dir, "q_loglog_fit.csv", "log_r,log_Q", &x, &y)?;
    }

    let spec = forward_transform(q);
    write(dir, "q_fourier.csv", "rho,Qhat", spec.frequencies(), spec.values())?;
    let (px, py): (Vec<f64>, Vec<f64>) = spec
        .frequencies()
        .iter()
        .zip(spec.values())
        .filter(|(_, v)| **v > 0.0)
        .map(|(p, v)| (*p, v.ln()))
        .unzip();
    write(dir, "q_fourier_log.csv", "rho,log_Qhat", &px, &py)?;
    if let Some(tail) = &quality.spectral_tail {
        let (x, y) = fit_endpoints(&tail.fit, tail.window);
        write(dir, "q_fourier_log_fit.csv", "rho,log_Qhat", &x, &y)?;
    }

    write(dir, "potential_v.csv", "r,V", r, solution.potential.v().values())?;
    write(dir, "potential_phi.csv", "r,Phi", r, solution.potential.phi().values())?;

    if let Some(nd) = &reports.nondegeneracy {
        for s in &nd.coarse.sectors {
            let idx: Vec<f64> = (0..s.eigenvalues.len()).map(|i| i as f64).collect();
            write(dir, &format!("ladder_l{}.csv", s.ell), "index,eigenvalue", &idx, &s.eigenvalues)?;
        }
    }
    if let Some(ext) = &reports.extension {
        let (c, n) = histogram(&ext.quotients, HISTOGRAM_BINS);
        write(dir, "rayleigh_histogram.csv", "quotient,count", &c, &n)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn histogram_counts_everything() {
        let (c, n) = histogram(&[0.0, 0.1, 0.5, 1.0], 2);
        assert_eq!(c, vec![0.25, 0.75]);
        assert_eq!(n, vec![2.0, 2.0]);
        let (_, n) = histogram(&[3.0, 3.0], 4);
        assert_eq!(n.iter().sum::<f64>(), 2.0);
    }
}
