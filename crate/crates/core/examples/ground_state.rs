//! Solves for the ground state and prints its qualitative report.
//!
//! `cargo run --example ground_state -- [n] [r_max]`

use bosonstar::ground_state::{solve_ground_state, verify_qualitative, SolverConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n = args.next().map(|s| s.parse()).transpose()?.unwrap_or(2048);
    let r_max = args.next().map(|s| s.parse()).transpose()?.unwrap_or(200.0);
    let cfg = SolverConfig::default().with_grid(n, r_max);
    let sol = solve_ground_state(&cfg)?;
    println!("iterations   {}", sol.iterations);
    println!("residual     {:.3e}", sol.residual);
    println!("mass         {:.9}", sol.mass);
    println!("Q(0)~        {:.9}", sol.q.eval(0.0));
    println!("V_Q(0)       {:.9}", sol.potential.v0());
    let report = verify_qualitative(&sol)?;
    if let Some(fit) = report.decay.fit {
        println!("decay slope  {:.4} on r in {:?}", fit.slope, report.decay.window);
    }
    if let Some(tail) = &report.spectral_tail {
        println!("Q^ tail      slope {:.4}, r2 {:.5}", tail.fit.slope, tail.fit.r_squared);
    }
    println!("resolved     rho <= {:.2} ({} nodes)", report.fourier.resolved_frequency, report.fourier.resolved_nodes);
    println!("noise floor  {:.2e}", report.fourier.noise_floor);
    println!("passed       {}", report.passed);
    Ok(())
}
