//! Stages `solve → verify → linearize → extend → report` writing one artifact directory.
//!
//! | exit code | meaning |
//! |---|---|
//! | 0 | every requested stage ran and passed |
//! | 2 | invalid configuration |
//! | 3 | file system error |
//! | 10 | solve did not converge |
//! | 11 | qualitative verification failed |
//! | 12 | linearization failed, including `l_max < 1` |
//! | 13 | extension diagnostics failed |
//! | 14 | report emission failed |

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::config::RunConfig;
use super::plot::emit_plot_data;
use super::record::{save_profile_with, two_column_csv, write_json, ProfileMetadata, ProfileRecord, TOOL_VERSION};
use crate::error::{Error, Result};
use crate::extension::{
    contradiction_functional, contradiction_identity, extension_budget, form_minimize, form_minimize_with,
    interior_bumps, ContradictionReport, ContradictionStatus, FormBudget,
};
use crate::ground_state::{
    max_pairwise_distance, solve_ground_state, verify_qualitative, GroundStateSolution, Init, QualityReport,
};
use crate::linearization::{nondegeneracy_check, NondegeneracyReport};
use crate::potentials::{canonical_rescale, scale_profile};
use crate::radial::{mass, RadialProfile};
use crate::transform::forward_transform;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Largest relative mass difference accepted between the grid pair.
pub const MASS_REFINEMENT_TOLERANCE: f64 = 1e-3;
/// Largest sup distance accepted between solutions from different initial guesses.
pub const UNIQUENESS_TOLERANCE: f64 = 1e-6;
/// Largest relative mass change accepted along the scaling family.
pub const SCALING_MASS_TOLERANCE: f64 = 1e-8;
pub const CORRELATION_THRESHOLD: f64 = 0.999;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Solve,
    Verify,
    Linearize,
    Extend,
    Report,
}

impl Stage {
    pub const ALL: [Stage; 5] = [Stage::Solve, Stage::Verify, Stage::Linearize, Stage::Extend, Stage::Report];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Solve => "solve",
            Stage::Verify => "verify",
            Stage::Linearize => "linearize",
            Stage::Extend => "extend",
            Stage::Report => "report",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Stage::Solve => 10,
            Stage::Verify => 11,
            Stage::Linearize => 12,
            Stage::Extend => 13,
            Stage::Report => 14,
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Stage::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| format!("unknown stage {s:?}; expected one of solve, verify, linearize, extend, report"))
    }
}

/// A value on a grid and its refinement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Refined {
    pub value: f64,
    pub refined_value: f64,
    /// `|refined_value − value|`.
    pub error_bar: f64,
    pub grid_pair: [usize; 2],
}

impl Refined {
    fn new(value: f64, refined_value: f64, grid_pair: [usize; 2]) -> Self {
        Self { value, refined_value, error_bar: (refined_value - value).abs(), grid_pair }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub n: usize,
    pub r_max: f64,
    pub init: String,
    pub iterations: usize,
    pub residual: f64,
    pub eigenvalue: f64,
    pub mass: f64,
    pub v0: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniquenessSummary {
    pub n: usize,
    pub inits: Vec<String>,
    pub residuals: Vec<f64>,
    pub all_positive_decreasing: bool,
    pub max_pairwise_distance: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QualitySummary {
    pub grid_pair: [usize; 2],
    pub solution: SolveSummary,
    pub mass_constant: Refined,
    pub mass_relative_difference: f64,
    /// Largest relative mass change of `μ^{3/2} Q(μ·)` over the tested `μ`.
    pub scaling_mass_defect: f64,
    pub scaling_factors: Vec<f64>,
    pub decay_slope: Option<Refined>,
    pub fourier_tail_slope: Option<Refined>,
    pub uniqueness: UniquenessSummary,
    pub coarse: QualityReport,
    pub fine: QualityReport,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtensionGridSummary {
    pub n: usize,
    pub m: usize,
    pub t_max: f64,
    pub mu: f64,
    pub budget: FormBudget,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtensionSummary {
    pub grid_pair: [usize; 2],
    pub coarse: ExtensionGridSummary,
    pub fine: ExtensionGridSummary,
    pub epsilon_ratio: f64,
    pub basis_size: usize,
    pub min_quotient: f64,
    pub quotients: Vec<f64>,
    pub minimizer_correlation: f64,
    pub interior_min_quotient: f64,
    /// Functional on two independent solver outputs.
    pub solver_pair: ContradictionReport,
    /// Functional on the non-solution pair `2e^{−r}`, `e^{−r/2}`; `Ω` is the flood-fill realization.
    pub synthetic_pair: ContradictionReport,
    pub passed: bool,
}

/// Results carried between stages.
#[derive(Default)]
pub struct PipelineState {
    pub solution: Option<GroundStateSolution>,
    pub refined: Option<GroundStateSolution>,
    pub quality: Option<QualitySummary>,
    pub nondegeneracy: Option<NondegeneracyReport>,
    pub extension: Option<ExtensionSummary>,
}

#[derive(Debug)]
pub struct PipelineOutcome {
    pub exit_code: i32,
    pub directory: PathBuf,
    /// Stages that ran and passed.
    pub completed: Vec<Stage>,
    /// Stages that failed, in order; the exit code belongs to the first.
    pub failures: Vec<(Stage, String)>,
}

enum StageError {
    /// A computation failed; only a failed solve stops the run.
    Failed(String),
    /// A verification did not pass; later stages can still run.
    Check(String),
    Io(String),
}

impl From<Error> for StageError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(io) => StageError::Io(io.to_string()),
            other => StageError::Failed(other.to_string()),
        }
    }
}

type StageResult = std::result::Result<(), StageError>;

struct Runner<'a> {
    cfg: &'a RunConfig,
    dir: PathBuf,
    state: PipelineState,
}

fn check<T>(cond: bool, value: T, message: impl FnOnce() -> String) -> std::result::Result<T, StageError> {
    if cond {
        Ok(value)
    } else {
        Err(StageError::Check(message()))
    }
}

impl Runner<'_> {
    fn solution(&self) -> &GroundStateSolution {
        self.state.solution.as_ref().expect("solve stage ran")
    }

    fn refined(&mut self) -> Result<&GroundStateSolution> {
        if self.state.refined.is_none() {
            let cfg = self.cfg.solver_config().with_grid(2 * self.cfg.grid.n, self.cfg.grid.r_max);
            self.state.refined = Some(solve_ground_state(&cfg)?);
        }
        Ok(self.state.refined.as_ref().expect("just set"))
    }

    fn solve(&mut self) -> StageResult {
        let sol = solve_ground_state(&self.cfg.solver_config())?;
        let grid = sol.grid().clone();
        let hash = self.cfg.config_hash();
        let metadata = ProfileMetadata {
            kind: "ground_state".into(),
            n: grid.n(),
            r_max: grid.r_max(),
            eigenvalue: sol.eigenvalue,
            mass: sol.mass,
            residual: sol.residual,
            tool_version: TOOL_VERSION.into(),
            config_hash: hash,
        };
        let record = ProfileRecord { profile: sol.q.clone(), metadata };
        if self.cfg.wants("csv") {
            save_profile_with(&record, &self.dir.join("q_profile.csv"), self.cfg.wants("json"))?;
            let spec = forward_transform(&sol.q);
            fs::write(self.dir.join("q_fourier.csv"), two_column_csv("rho,value", spec.frequencies(), spec.values()))
                .map_err(Error::from)?;
            let mut text = String::from("r,V,Phi\n");
            for ((r, v), p) in grid.nodes().iter().zip(sol.potential.v().values()).zip(sol.potential.phi().values()) {
                text.push_str(&format!("{r:e},{v:e},{p:e}\n"));
            }
            fs::write(self.dir.join("potentials.csv"), text).map_err(Error::from)?;
        } else if self.cfg.wants("json") {
            write_json(&self.dir.join("q_profile.json"), &record.metadata)?;
        }
        self.state.solution = Some(sol);
        Ok(())
    }

    fn verify(&mut self) -> StageResult {
        let n = self.cfg.grid.n;
        self.refined()?;
        let sol = self.solution();
        let fine = self.state.refined.as_ref().expect("refined solve");
        let coarse_q = verify_qualitative(sol)?;
        let fine_q = verify_qualitative(fine)?;
        let grid_pair = [n, 2 * n];

        let mut inits = vec![self.cfg.solver.init.clone()];
        for extra in [
            Init::Gaussian { width: 0.3 },
            Init::Gaussian { width: 3.0 },
            Init::Exponential { rate: 0.5 },
            Init::Ball { radius: 1.0 },
        ] {
            if !inits.contains(&extra) {
                inits.push(extra);
            }
        }
        let mut runs = vec![sol.clone()];
        for init in &inits[1..] {
            runs.push(solve_ground_state(&self.cfg.solver_config().with_init(init.clone()))?);
        }
        let all_positive_decreasing = runs.iter().all(|r| {
            let v = r.q.values();
            v.iter().all(|x| *x > 0.0) && v.windows(2).all(|w| w[1] < w[0])
        });
        let distance = max_pairwise_distance(&runs);
        let uniqueness = UniquenessSummary {
            n,
            inits: inits.iter().map(|i| i.to_string()).collect(),
            residuals: runs.iter().map(|r| r.residual).collect(),
            all_positive_decreasing,
            max_pairwise_distance: distance,
            tolerance: UNIQUENESS_TOLERANCE,
            passed: all_positive_decreasing && distance <= UNIQUENESS_TOLERANCE,
        };

        let scaling_factors = vec![1.5, 2.0];
        let mut scaling_mass_defect = 0.0_f64;
        for mu in &scaling_factors {
            let scaled = scale_profile(&sol.q, *mu)?;
            scaling_mass_defect = scaling_mass_defect.max((mass(&scaled) / sol.mass - 1.0).abs());
        }

        let mass_constant = Refined::new(sol.mass, fine.mass, grid_pair);
        let mass_relative_difference = mass_constant.error_bar / fine.mass;
        let decay_slope = match (&coarse_q.decay.fit, &fine_q.decay.fit) {
            (Some(a), Some(b)) => Some(Refined::new(a.slope, b.slope, grid_pair)),
            _ => None,
        };
        let fourier_tail_slope = match (&coarse_q.spectral_tail, &fine_q.spectral_tail) {
            (Some(a), Some(b)) => Some(Refined::new(a.fit.slope, b.fit.slope, grid_pair)),
            _ => None,
        };
        let passed = coarse_q.passed
            && fine_q.passed
            && uniqueness.passed
            && mass_relative_difference <= MASS_REFINEMENT_TOLERANCE
            && scaling_mass_defect <= SCALING_MASS_TOLERANCE;
        let summary = QualitySummary {
            grid_pair,
            solution: SolveSummary {
                n,
                r_max: self.cfg.grid.r_max,
                init: self.cfg.solver.init.to_string(),
                iterations: sol.iterations,
                residual: sol.residual,
                eigenvalue: sol.eigenvalue,
                mass: sol.mass,
                v0: sol.potential.v0(),
            },
            mass_constant,
            mass_relative_difference,
            scaling_mass_defect,
            scaling_factors,
            decay_slope,
            fourier_tail_slope,
            uniqueness,
            coarse: coarse_q,
            fine: fine_q,
            passed,
        };
        write_json(&self.dir.join("quality_report.json"), &summary)?;
        self.state.quality = Some(summary);
        check(passed, (), || "qualitative verification failed; see quality_report.json".into())
    }

    fn linearize(&mut self) -> StageResult {
        let l_max = self.cfg.linearization.l_max;
        if l_max < 1 {
            return Err(StageError::Failed(Error::InsufficientSectors { l_max }.to_string()));
        }
        self.refined()?;
        let fine = self.state.refined.as_ref().expect("refined solve");
        let report = nondegeneracy_check(self.solution(), fine, l_max, self.cfg.linearization.k_eigs)?;
        for s in &report.coarse.sectors {
            let idx: Vec<f64> = (0..s.eigenvalues.len()).map(|i| i as f64).collect();
            fs::write(self.dir.join(format!("spectrum_l{}.csv", s.ell)), two_column_csv("index,eigenvalue", &idx, &s.eigenvalues))
                .map_err(Error::from)?;
        }
        write_json(&self.dir.join("linearization_report.json"), &report)?;
        let passed = report.passed;
        self.state.nondegeneracy = Some(report);
        check(passed, (), || "nondegeneracy check failed; see linearization_report.json".into())
    }

    fn extension_at(&self, sol: &GroundStateSolution) -> Result<ExtensionGridSummary> {
        let u = canonical_rescale(&sol.q, sol.eigenvalue)?;
        let tgrid = self.cfg.tgrid_for(sol.grid().n())?;
        let budget = extension_budget(&u, tgrid)?;
        Ok(ExtensionGridSummary { n: sol.grid().n(), m: tgrid.m(), t_max: tgrid.t_max(), mu: u.mu(), budget })
    }

    fn extend(&mut self) -> StageResult {
        self.refined()?;
        let sol = self.solution().clone();
        let fine_sol = self.state.refined.clone().expect("refined solve");
        let coarse = self.extension_at(&sol)?;
        let fine = self.extension_at(&fine_sol)?;
        let u = canonical_rescale(&sol.q, sol.eigenvalue)?;
        let tgrid = self.cfg.tgrid_for(sol.grid().n())?;
        let basis_size = self.cfg.extension.basis_size;
        let min = form_minimize(&u, tgrid, basis_size, self.cfg.solver.seed)?;
        let interior = form_minimize_with(&u, tgrid, &interior_bumps())?;

        let other_init = match self.cfg.solver.init {
            Init::Exponential { .. } => Init::Gaussian { width: 1.0 },
            _ => Init::Exponential { rate: 0.5 },
        };
        let other = solve_ground_state(&self.cfg.solver_config().with_init(other_init))?;
        let v = canonical_rescale(&other.q, other.eigenvalue)?;
        let solver_pair = contradiction_functional(&u, &v, tgrid)?;
        let grid = sol.grid();
        let a = RadialProfile::from_fn(grid, |r| 2.0 * (-r).exp())?;
        let b = RadialProfile::from_fn(grid, |r| (-r / 2.0).exp())?;
        let synthetic_pair = contradiction_identity(&a, &b, tgrid)?;

        let epsilon_ratio = coarse.budget.epsilon / fine.budget.epsilon;
        let correlation = min.extension_correlation.unwrap_or(0.0);
        let passed = coarse.budget.normalized_value.abs() <= coarse.budget.epsilon
            && epsilon_ratio >= 2.0
            && min.min_quotient >= -coarse.budget.epsilon
            && (min.extension_correlation.is_none() || correlation >= CORRELATION_THRESHOLD)
            && interior.min_quotient > 0.0
            && solver_pair.status != ContradictionStatus::ConsistencyAlarm;
        let summary = ExtensionSummary {
            grid_pair: [coarse.n, fine.n],
            coarse,
            fine,
            epsilon_ratio,
            basis_size,
            min_quotient: min.min_quotient,
            quotients: min.quotients,
            minimizer_correlation: correlation,
            interior_min_quotient: interior.min_quotient,
            solver_pair,
            synthetic_pair,
            passed,
        };
        write_json(&self.dir.join("extension_report.json"), &summary)?;
        self.state.extension = Some(summary);
        check(passed, (), || "extension diagnostics failed; see extension_report.json".into())
    }

    fn report(&mut self) -> StageResult {
        emit_plot_data(self.solution(), &self.state, &self.dir.join("plotdata")).map_err(|e| match e {
            Error::Io(io) => StageError::Failed(io.to_string()),
            other => StageError::Failed(other.to_string()),
        })
    }
}

/// Runs every stage up to and including `until` into the configured output directory.
pub fn run_pipeline(cfg: &RunConfig, until: Stage) -> PipelineOutcome {
    run_pipeline_with_state(cfg, until).0
}

/// As [`run_pipeline`], also returning the in-memory results.
pub fn run_pipeline_with_state(cfg: &RunConfig, until: Stage) -> (PipelineOutcome, PipelineState) {
    let dir = PathBuf::from(&cfg.output.directory);
    let mut outcome = PipelineOutcome { exit_code: EXIT_OK, directory: dir.clone(), completed: Vec::new(), failures: Vec::new() };
    if let Err(e) = cfg.validate() {
        outcome.exit_code = EXIT_CONFIG;
        outcome.failures.push((Stage::Solve, e.to_string()));
        return (outcome, PipelineState::default());
    }
    if let Err(e) = fs::create_dir_all(&dir) {
        outcome.exit_code = EXIT_IO;
        outcome.failures.push((Stage::Solve, format!("{}: {e}", dir.display())));
        return (outcome, PipelineState::default());
    }
    let mut runner = Runner { cfg, dir, state: PipelineState::default() };
    for stage in Stage::ALL.into_iter().filter(|s| *s <= until) {
        let result = match stage {
            Stage::Solve => runner.solve(),
            Stage::Verify => runner.verify(),
            Stage::Linearize => runner.linearize(),
            Stage::Extend => runner.extend(),
            Stage::Report => runner.report(),
        };
        let (code, msg, stop) = match result {
            Ok(()) => {
                outcome.completed.push(stage);
                continue;
            }
            Err(StageError::Check(msg)) => (stage.exit_code(), msg, false),
            Err(StageError::Failed(msg)) => (stage.exit_code(), msg, stage == Stage::Solve),
            Err(StageError::Io(msg)) => (EXIT_IO, msg, true),
        };
        if outcome.exit_code == EXIT_OK {
            outcome.exit_code = code;
        }
        outcome.failures.push((stage, msg));
        if stop {
            break;
        }
    }
    (outcome, runner.state)
}

/// Lists the files under `dir`, relative and sorted.
pub fn list_artifacts(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in fs::read_dir(&d)? {
            let path = entry?.path();
            if path.is_dir() {
                stack.push(path);
            } else {
                out.push(path.strip_prefix(dir).unwrap_or(&path).to_path_buf());
            }
        }
    }
    out.sort();
    Ok(out)
}
