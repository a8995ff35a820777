//! First crossing and the truncated-difference functional.
//!
//! `cargo run --example crossing`

use bosonstar::extension::{contradiction_functional, contradiction_identity, first_crossing, TGrid};
use bosonstar::ground_state::{solve_ground_state, Init, SolverConfig};
use bosonstar::potentials::canonical_rescale;
use bosonstar::{RadialGrid, RadialProfile};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let grid = RadialGrid::new(2048, 200.0)?;
    let tgrid = TGrid::default_for(&grid);
    let u = RadialProfile::from_fn(&grid, |r| 2.0 * (-r).exp())?;
    let v = RadialProfile::from_fn(&grid, |r| (-r / 2.0).exp())?;
    let c = first_crossing(&u, &v)?;
    println!("crossing R = {:.9} (2 ln 2 = {:.9})", c.radius, 2.0 * 2f64.ln());
    let rep = contradiction_identity(&u, &v, tgrid)?;
    println!("A_u[W] + A_v[W]  {:+.6}", rep.volume_value);
    println!("-2 int f W       {:+.6}", rep.boundary_value);
    println!("Green identity   {:+.6}", rep.green_value);
    println!("disagreement     {:.3e}", rep.relative_disagreement);
    if let Some(o) = &rep.omega {
        println!("Omega            {} cells, r <= {:.3}, t <= {:.3}", o.cells, o.max_radius, o.max_height);
    }

    let a = solve_ground_state(&SolverConfig::default().with_init(Init::Gaussian { width: 1.0 }).with_grid(2048, 200.0))?;
    let b = solve_ground_state(&SolverConfig::default().with_init(Init::Exponential { rate: 0.5 }).with_grid(2048, 200.0))?;
    let (ra, rb) = (canonical_rescale(&a.q, 1.0)?, canonical_rescale(&b.q, 1.0)?);
    let rep = contradiction_functional(&ra, &rb, tgrid)?;
    println!("two solver runs  {:?} (distance {:.2e})", rep.status, rep.distance);
    Ok(())
}
