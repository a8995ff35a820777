//! `√(−Δ)` on the Poisson kernel `P₁(r) = 1/(π²(1 + r²)²)`, whose image is
//! `(3 − r²)/(π²(1 + r²)³)`, and its transform `e^{−ρ}` on `ρ ≤ 5`.
//!
//! `cargo run --example poisson_kernel -- [r_max]`

use std::f64::consts::PI;
use std::time::Instant;

use bosonstar::transform::{apply_half_laplacian, forward_transform};
use bosonstar::{RadialGrid, RadialProfile};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let r_max: f64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(200.0);
    println!("{:>6} {:>12} {:>14} {:>10}", "n", "L2 error", "Phat - e^-rho", "seconds");
    for n in [512, 1024, 2048, 4096, 8192] {
        let grid = RadialGrid::new(n, r_max)?;
        let p = RadialProfile::from_fn(&grid, |r| 1.0 / (PI * PI * (1.0 + r * r).powi(2)))?;
        let exact = RadialProfile::from_fn(&grid, |r| (3.0 - r * r) / (PI * PI * (1.0 + r * r).powi(3)))?;
        let start = Instant::now();
        let got = apply_half_laplacian(&p);
        let secs = start.elapsed().as_secs_f64();
        let diff = got.combine(1.0, &exact, -1.0)?;
        let spec = forward_transform(&p);
        let hat = spec
            .frequencies()
            .iter()
            .zip(spec.values())
            .filter(|(rho, _)| **rho <= 5.0)
            .fold(0.0_f64, |m, (rho, v)| m.max((v - (-rho).exp()).abs()));
        println!("{n:>6} {:>12.3e} {hat:>14.3e} {secs:>10.4}", diff.norm() / exact.norm());
    }
    Ok(())
}
