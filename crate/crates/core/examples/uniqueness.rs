//! Ground states from several initial guesses, compared pairwise.
//!
//! `cargo run --example uniqueness -- [n]`

use bosonstar::ground_state::{max_pairwise_distance, solve_ground_state, Init, SolverConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(1024);
    let inits = [
        Init::Gaussian { width: 1.0 },
        Init::Gaussian { width: 0.3 },
        Init::Gaussian { width: 3.0 },
        Init::Exponential { rate: 0.5 },
        Init::Ball { radius: 1.0 },
    ];
    let mut runs = Vec::new();
    for init in inits {
        let cfg = SolverConfig { seed: 3, perturbation: 0.1, ..SolverConfig::default() }.with_init(init.clone()).with_grid(n, 200.0);
        let sol = solve_ground_state(&cfg)?;
        println!("{:<18} {:>4} iterations, residual {:.2e}, mass {:.9}", init.to_string(), sol.iterations, sol.residual, sol.mass);
        runs.push(sol);
    }
    println!("max pairwise sup distance {:.3e}", max_pairwise_distance(&runs));
    Ok(())
}
