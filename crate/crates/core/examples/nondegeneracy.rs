//! Sector spectra of `L₊` at the ground state on a grid and its refinement.
//!
//! `cargo run --example nondegeneracy -- [n] [l_max]`

use std::time::Instant;

use bosonstar::ground_state::{solve_ground_state, SolverConfig};
use bosonstar::linearization::nondegeneracy_check;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(2048);
    let l_max: usize = args.next().map(|s| s.parse()).transpose()?.unwrap_or(3);
    let start = Instant::now();
    let coarse = solve_ground_state(&SolverConfig::default().with_grid(n, 200.0))?;
    let fine = solve_ground_state(&SolverConfig::default().with_grid(2 * n, 200.0))?;
    let report = nondegeneracy_check(&coarse, &fine, l_max, 5)?;
    for f in [&report.coarse, &report.fine] {
        println!("n = {}", f.n);
        println!("  |L+ Q'|/|Q'|      {:.3e}", f.translation_residual);
        println!("  |L+ S + Q|/|Q|    {:.3e}", f.scaling_residual);
        println!("  zero tolerance    {:.3e}", f.zero_tolerance);
        println!("  zero mode         {:.3e} (overlap {:.6})", f.zero_mode, f.zero_mode_overlap);
        for s in &f.sectors {
            let ev: Vec<String> = s.eigenvalues.iter().map(|e| format!("{e:+.6}")).collect();
            println!("  l={} gap {:.4e} scale {:.2} sym {:.1e}  [{}]", s.ell, s.gap, s.scale, s.symmetry_defect, ev.join(", "));
        }
    }
    println!("drift {:.2e}, passed {}", report.eigenvalue_drift, report.passed);
    println!("elapsed {:.1?}", start.elapsed());
    Ok(())
}
