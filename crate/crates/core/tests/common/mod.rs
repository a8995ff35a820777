//! Direct O(n²) quadratures shared by the oracle tests and the acceptance run.
#![allow(dead_code)]

use std::f64::consts::PI;

use bosonstar::{RadialGrid, RadialProfile};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_profile(grid: &RadialGrid, rng: &mut ChaCha8Rng) -> RadialProfile {
    let bumps: Vec<(f64, f64, f64)> = (0..3)
        .map(|_| (rng.random_range(-1.0..1.0), rng.random_range(0.0..5.0), rng.random_range(0.5..2.0)))
        .collect();
    RadialProfile::from_fn(grid, |r| bumps.iter().map(|(a, c, w)| a * (-((r - c) / w).powi(2)).exp()).sum()).unwrap()
}

// Euler-Maclaurin diagonal correction operator, written out node by node.
fn correction(ell: usize, grid: &RadialGrid, g: &[f64], i: usize) -> f64 {
    let h = grid.h();
    let r = grid.nodes()[i];
    let n = g.len();
    let left = match i {
        0 if ell == 0 => g[0],
        0 => 0.0,
        _ => g[i - 1],
    };
    let right = if i + 1 < n { g[i + 1] } else { 0.0 };
    let d = 3.0 * ((r + h / 2.0).powi(2) * (right - g[i]) - (r - h / 2.0).powi(2) * (g[i] - left)) / (h * h * r * r)
        + (ell * (ell + 1)) as f64 * g[i] / (r * r);
    -4.0 * PI * h * h / 12.0 * g[i] + 4.0 * PI * h.powi(4) / 720.0 * d
}

pub fn direct_multipole(ell: usize, grid: &RadialGrid, g: &[f64]) -> Vec<f64> {
    let r = grid.nodes();
    let h = grid.h();
    let l = ell as i32;
    (0..g.len())
        .map(|i| {
            let mut s = 0.0;
            for j in 0..g.len() {
                let (lo, hi) = if r[i] < r[j] { (r[i], r[j]) } else { (r[j], r[i]) };
                s += 4.0 * PI / (2 * ell + 1) as f64 * lo.powi(l) / hi.powi(l + 1) * g[j] * r[j] * r[j] * h;
            }
            s + correction(ell, grid, g, i)
        })
        .collect()
}

pub fn relative_sup(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
    a.iter().zip(b).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs())) / scale
}
