use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::potentials::{newton_potential, PotentialPair};
use crate::radial::{dot_weighted, mass, sup_distance, RadialGrid, RadialProfile};
use crate::transform::{apply_multiplier, forward_transform, inverse_transform};

/// Initial guess for the fixed-point iteration.
#[derive(Clone, Debug, PartialEq)]
pub enum Init {
    Gaussian { width: f64 },
    Exponential { rate: f64 },
    Ball { radius: f64 },
    Custom(RadialProfile),
}

impl Init {
    pub fn profile(&self, grid: &RadialGrid) -> Result<RadialProfile> {
        match self {
            Init::Gaussian { width } => RadialProfile::from_fn(grid, |r| (-(r / width).powi(2)).exp()),
            Init::Exponential { rate } => RadialProfile::from_fn(grid, |r| (-rate * r).exp()),
            Init::Ball { radius } => RadialProfile::from_fn(grid, |r| if r <= *radius { 1.0 } else { 0.0 }),
            Init::Custom(p) => {
                grid.check_same(p.grid())?;
                Ok(p.clone())
            }
        }
    }

    fn validate(&self) -> Result<()> {
        let (name, value) = match self {
            Init::Gaussian { width } => ("width", *width),
            Init::Exponential { rate } => ("rate", *rate),
            Init::Ball { radius } => ("radius", *radius),
            Init::Custom(_) => return Ok(()),
        };
        if value.is_finite() && value > 0.0 {
            Ok(())
        } else {
            Err(Error::Validation { field: format!("solver.init.{name}"), bound: "must be > 0".into() })
        }
    }
}

impl fmt::Display for Init {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Init::Gaussian { width } => write!(f, "gaussian({width:?})"),
            Init::Exponential { rate } => write!(f, "exponential({rate:?})"),
            Init::Ball { radius } => write!(f, "ball({radius:?})"),
            Init::Custom(_) => write!(f, "custom"),
        }
    }
}

impl FromStr for Init {
    type Err = String;

    /// Parses `gaussian(w)`, `exponential(a)`, `ball` or `ball(R)`.
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let s = s.trim();
        let (name, arg) = match s.find('(') {
            Some(i) if s.ends_with(')') => (&s[..i], Some(&s[i + 1..s.len() - 1])),
            Some(_) => return Err(format!("unbalanced parentheses in {s:?}")),
            None => (s, None),
        };
        let value = arg
            .map(|a| a.trim().parse::<f64>().map_err(|e| format!("bad parameter in {s:?}: {e}")))
            .transpose()?;
        match (name.trim(), value) {
            ("gaussian", v) => Ok(Init::Gaussian { width: v.unwrap_or(1.0) }),
            ("exponential", v) => Ok(Init::Exponential { rate: v.unwrap_or(1.0) }),
            ("ball", v) => Ok(Init::Ball { radius: v.unwrap_or(1.0) }),
            (other, _) => Err(format!("unknown init {other:?}")),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub init: Init,
    pub tol: f64,
    pub max_iter: usize,
    pub relaxation: f64,
    pub n: usize,
    pub r_max: f64,
    pub seed: u64,
    /// Relative amplitude of a seeded smooth perturbation of the initial guess.
    pub perturbation: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            init: Init::Gaussian { width: 1.0 },
            tol: 1e-10,
            max_iter: 5000,
            relaxation: 1.0,
            n: 2048,
            r_max: 200.0,
            seed: 0,
            perturbation: 0.0,
        }
    }
}

impl SolverConfig {
    pub fn with_init(mut self, init: Init) -> Self {
        self.init = init;
        self
    }

    pub fn with_grid(mut self, n: usize, r_max: f64) -> Self {
        self.n = n;
        self.r_max = r_max;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, bound: &str| Err(Error::Validation { field: field.into(), bound: bound.into() });
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return bad("solver.tol", "must be > 0");
        }
        if self.max_iter == 0 {
            return bad("solver.max_iter", "must be >= 1");
        }
        if !(self.relaxation > 0.0 && self.relaxation <= 1.0) {
            return bad("solver.relaxation", "must lie in (0, 1]");
        }
        if !(self.perturbation.is_finite() && self.perturbation >= 0.0) {
            return bad("solver.perturbation", "must be >= 0");
        }
        self.init.validate()
    }

    pub fn grid(&self) -> Result<RadialGrid> {
        RadialGrid::new(self.n, self.r_max)
    }

    fn initial_profile(&self, grid: &RadialGrid) -> Result<RadialProfile> {
        let base = self.init.profile(grid)?;
        if self.perturbation == 0.0 {
            return Ok(base);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let bumps: Vec<(f64, f64, f64)> = (0..4)
            .map(|_| (rng.random_range(0.0..5.0), rng.random_range(0.5..2.0), rng.random_range(-1.0..1.0)))
            .collect();
        let amp = self.perturbation;
        Ok(base.map(|r, v| {
            let noise: f64 = bumps.iter().map(|(c, s, a)| a * (-((r - c) / s).powi(2)).exp()).sum();
            v * (1.0 + amp * noise)
        }))
    }
}

#[derive(Clone, Debug)]
pub struct GroundStateSolution {
    pub q: RadialProfile,
    /// Eigenvalue `λ` in `√(−Δ)Q + λQ = V_Q Q`; the solver fixes `λ = 1`.
    pub eigenvalue: f64,
    pub mass: f64,
    pub residual: f64,
    pub iterations: usize,
    pub potential: PotentialPair,
    pub converged: bool,
}

impl GroundStateSolution {
    pub fn grid(&self) -> &RadialGrid {
        self.q.grid()
    }
}

fn weighted_norm(grid: &RadialGrid, v: &[f64]) -> f64 {
    dot_weighted(grid.weights(), v, v).sqrt()
}

fn residual_with(u: &RadialProfile, lambda: f64, pot: &PotentialPair) -> Result<f64> {
    let grid = u.grid();
    let norm = weighted_norm(grid, u.values());
    if norm == 0.0 {
        return Err(Error::ZeroProfile);
    }
    let half = apply_multiplier(u, |p| p);
    let r: Vec<f64> = half
        .values()
        .iter()
        .zip(u.values())
        .zip(pot.v().values())
        .map(|((hu, u), v)| hu + lambda * u - v * u)
        .collect();
    Ok(weighted_norm(grid, &r) / norm)
}

/// Relative residual `‖√(−Δ)u + λu − V_u u‖ / ‖u‖`.
pub fn residual(u: &RadialProfile, lambda: f64) -> Result<f64> {
    residual_with(u, lambda, &newton_potential(u))
}

/// Spectral renormalization for `√(−Δ)Q + Q = V_Q Q`.
///
/// Each step maps `u` to `γ (√(−Δ) + 1)⁻¹ (V_u u)` with
/// `γ = (⟨u, (√(−Δ)+1)u⟩ / ⟨u, V_u u⟩)^{3/2}` and takes absolute values.
pub fn solve_ground_state(cfg: &SolverConfig) -> Result<GroundStateSolution> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let w = grid.weights();
    let mut u = cfg.initial_profile(&grid)?;
    if u.values().iter().all(|v| *v == 0.0) {
        return Err(Error::ZeroProfile);
    }

    let mut best: Option<(f64, RadialProfile, PotentialPair)> = None;
    for iteration in 0..=cfg.max_iter {
        let pot = newton_potential(&u);
        let spec = forward_transform(&u);
        let half = inverse_transform(&spec.clone().scaled_by(|p| p));
        let norm = weighted_norm(&grid, u.values());
        let vu: Vec<f64> = u.values().iter().zip(pot.v().values()).map(|(u, v)| u * v).collect();
        let res_vec: Vec<f64> =
            half.values().iter().zip(u.values()).zip(&vu).map(|((h, u), vu)| h + u - vu).collect();
        let res = weighted_norm(&grid, &res_vec) / norm;

        if best.as_ref().is_none_or(|(b, _, _)| res < *b) {
            best = Some((res, u.clone(), pot.clone()));
        }
        if res <= cfg.tol {
            return Ok(GroundStateSolution {
                mass: mass(&u),
                q: u,
                eigenvalue: 1.0,
                residual: res,
                iterations: iteration,
                potential: pot,
                converged: true,
            });
        }
        if iteration == cfg.max_iter {
            break;
        }

        let num: f64 = dot_weighted(w, u.values(), half.values()) + norm * norm;
        let den: f64 = dot_weighted(w, u.values(), &vu);
        let gamma = (num / den).powf(1.5);
        let next = inverse_transform(
            &forward_transform(&RadialProfile::from_raw(&grid, vu)).scaled_by(|p| 1.0 / (p + 1.0)),
        );
        let omega = cfg.relaxation;
        let values: Vec<f64> = u
            .values()
            .iter()
            .zip(next.values())
            .map(|(old, new)| ((1.0 - omega) * old + omega * gamma * new).abs())
            .collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::CollapsedToZero { iteration: iteration + 1 });
        }
        u = RadialProfile::from_raw(&grid, values);
        if mass(&u) < 1e-12 {
            return Err(Error::CollapsedToZero { iteration: iteration + 1 });
        }
    }

    let (res, q, potential) = best.expect("at least one iterate");
    Err(Error::NotConverged {
        iterations: cfg.max_iter,
        residual: res,
        best: Box::new(GroundStateSolution {
            mass: mass(&q),
            q,
            eigenvalue: 1.0,
            residual: res,
            iterations: cfg.max_iter,
            potential,
            converged: false,
        }),
    })
}

/// Largest pairwise sup-norm distance between solutions.
pub fn max_pairwise_distance(solutions: &[GroundStateSolution]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, a) in solutions.iter().enumerate() {
        for b in &solutions[i + 1..] {
            d = d.max(sup_distance(&a.q, &b.q));
        }
    }
    d
}

/// Solves every configuration and returns the largest pairwise distance.
pub fn cross_validate(cfgs: &[SolverConfig]) -> Result<f64> {
    if cfgs.len() < 2 {
        return Err(Error::InvalidArgument("cross validation needs at least two configurations".into()));
    }
    let solutions = cfgs.iter().map(solve_ground_state).collect::<Result<Vec<_>>>()?;
    Ok(max_pairwise_distance(&solutions))
}

/// `‖Q‖₂²` under the normalization `λ = 1`.
pub fn mass_constant(sol: &GroundStateSolution) -> Result<f64> {
    if !sol.converged {
        return Err(Error::NotConvergedInput);
    }
    Ok(sol.mass)
}
