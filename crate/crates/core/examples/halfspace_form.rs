//! The quadratic form `A_u` on the extension of the rescaled ground state.
//!
//! `cargo run --example halfspace_form -- [n]`

use bosonstar::extension::{
    extension_budget, extension_energy_tail, form_minimize, form_minimize_with, interior_bumps, TGrid,
    DEFAULT_BASIS_SIZE,
};
use bosonstar::ground_state::{solve_ground_state, SolverConfig};
use bosonstar::potentials::canonical_rescale;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let n: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(2048);
    for n in [n, 2 * n] {
        let sol = solve_ground_state(&SolverConfig::default().with_grid(n, 200.0))?;
        let u = canonical_rescale(&sol.q, sol.eigenvalue)?;
        let tgrid = TGrid::default_for(sol.grid());
        let budget = extension_budget(&u, tgrid)?;
        let form = budget.form;
        println!("n = {n}, m = {}, mu = {:.6}", tgrid.m(), u.mu());
        println!("  A_u[U]           {:+.4e} (dirichlet {:.6}, boundary {:+.6})", form.value, form.dirichlet_part, form.boundary_part);
        println!("  A_u[U] / |U|^2   {:+.4e}", budget.normalized_value);
        println!("  continuum value  {:+.4e}", budget.continuum_value);
        println!("  eps(h, tau)      {:.4e} (discretization {:.4e})", budget.epsilon, budget.discretization);
        println!("  energy tail      {:.3e}", extension_energy_tail(u.profile(), tgrid.t_max()));
        let min = form_minimize(&u, tgrid, DEFAULT_BASIS_SIZE, 0)?;
        println!(
            "  min quotient     {:+.4e} (correlation with U {:.6})",
            min.min_quotient,
            min.extension_correlation.unwrap_or(f64::NAN)
        );
        let bumps = form_minimize_with(&u, tgrid, &interior_bumps())?;
        println!("  interior only    {:+.4e}", bumps.min_quotient);
    }
    Ok(())
}
