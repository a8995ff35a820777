//! Run configuration: dotted-key `key = value` text with `#` comments.
//!
//! ```text
//! grid.n = 2048
//! grid.r_max = 200.0
//! solver.init = "gaussian(1.0)"
//! linearization.l_max = 3
//! ```
//!
//! Absent keys take their defaults, unknown keys are rejected, and every
//! numeric field is range-checked.

use std::fmt::Write as _;
use std::path::Path;

use serde::Deserialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::extension::TGrid;
use crate::ground_state::{Init, SolverConfig};
use crate::radial::RadialGrid;

pub const GRID_N_RANGE: (i64, i64) = (16, 16384);
pub const L_MAX_RANGE: (i64, i64) = (0, 8);
pub const KNOWN_FORMATS: [&str; 2] = ["csv", "json"];

#[derive(Clone, Debug, PartialEq)]
pub struct GridSection {
    pub n: usize,
    pub r_max: f64,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct TGridSection {
    /// Defaults to `grid.n / 2`.
    pub m: Option<usize>,
    /// Defaults to `grid.r_max / 2`.
    pub t_max: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverSection {
    pub init: Init,
    pub tol: f64,
    pub max_iter: usize,
    pub relaxation: f64,
    pub seed: u64,
    pub perturbation: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinearizationSection {
    pub l_max: usize,
    pub k_eigs: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExtensionSection {
    pub basis_size: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputSection {
    pub directory: String,
    pub formats: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub grid: GridSection,
    pub tgrid: TGridSection,
    pub solver: SolverSection,
    pub linearization: LinearizationSection,
    pub extension: ExtensionSection,
    pub output: OutputSection,
}

impl Default for RunConfig {
    fn default() -> Self {
        let s = SolverConfig::default();
        Self {
            grid: GridSection { n: s.n, r_max: s.r_max },
            tgrid: TGridSection::default(),
            solver: SolverSection {
                init: s.init,
                tol: s.tol,
                max_iter: s.max_iter,
                relaxation: s.relaxation,
                seed: s.seed,
                perturbation: s.perturbation,
            },
            linearization: LinearizationSection { l_max: 3, k_eigs: 5 },
            extension: ExtensionSection { basis_size: crate::extension::DEFAULT_BASIS_SIZE },
            output: OutputSection { directory: "artifacts".into(), formats: vec!["csv".into(), "json".into()] },
        }
    }
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    grid: Option<RawGrid>,
    tgrid: Option<RawTGrid>,
    solver: Option<RawSolver>,
    linearization: Option<RawLinearization>,
    extension: Option<RawExtension>,
    output: Option<RawOutput>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    n: Option<i64>,
    r_max: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTGrid {
    m: Option<i64>,
    t_max: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSolver {
    init: Option<String>,
    tol: Option<f64>,
    max_iter: Option<i64>,
    relaxation: Option<f64>,
    seed: Option<i64>,
    perturbation: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLinearization {
    l_max: Option<i64>,
    k_eigs: Option<i64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawExtension {
    basis_size: Option<i64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    directory: Option<String>,
    formats: Option<Vec<String>>,
}

fn invalid(field: &str, bound: impl Into<String>) -> Error {
    Error::Validation { field: field.into(), bound: bound.into() }
}

fn int_in(field: &str, v: i64, lo: i64, hi: i64) -> Result<usize> {
    if v < lo || v > hi {
        return Err(invalid(field, format!("must lie in {lo}..={hi}, got {v}")));
    }
    Ok(v as usize)
}

fn positive(field: &str, v: f64) -> Result<f64> {
    if !(v.is_finite() && v > 0.0) {
        return Err(invalid(field, format!("must be a finite number > 0, got {v}")));
    }
    Ok(v)
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map_or(before.chars().count(), |i| before[i + 1..].chars().count()) + 1;
    (line, column)
}

impl RunConfig {
    pub fn from_str_checked(text: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| {
            let (line, column) = e.span().map_or((1, 1), |s| line_column(text, s.start));
            Error::Parse { line, column, message: e.message().trim().to_string() }
        })?;
        let mut cfg = RunConfig::default();
        if let Some(g) = raw.grid {
            if let Some(n) = g.n {
                cfg.grid.n = int_in("grid.n", n, GRID_N_RANGE.0, GRID_N_RANGE.1)?;
            }
            if let Some(r) = g.r_max {
                cfg.grid.r_max = positive("grid.r_max", r)?;
            }
        }
        if let Some(t) = raw.tgrid {
            if let Some(m) = t.m {
                cfg.tgrid.m = Some(int_in("tgrid.m", m, 2, 1 << 16)?);
            }
            if let Some(x) = t.t_max {
                cfg.tgrid.t_max = Some(positive("tgrid.t_max", x)?);
            }
        }
        if let Some(s) = raw.solver {
            if let Some(init) = s.init {
                cfg.solver.init = init.parse().map_err(|e: String| invalid("solver.init", e))?;
            }
            if let Some(tol) = s.tol {
                cfg.solver.tol = positive("solver.tol", tol)?;
            }
            if let Some(it) = s.max_iter {
                cfg.solver.max_iter = int_in("solver.max_iter", it, 1, 1_000_000)?;
            }
            if let Some(w) = s.relaxation {
                cfg.solver.relaxation = w;
            }
            if let Some(seed) = s.seed {
                cfg.solver.seed = int_in("solver.seed", seed, 0, i64::MAX)? as u64;
            }
            if let Some(p) = s.perturbation {
                cfg.solver.perturbation = p;
            }
        }
        if let Some(l) = raw.linearization {
            if let Some(v) = l.l_max {
                cfg.linearization.l_max = int_in("linearization.l_max", v, L_MAX_RANGE.0, L_MAX_RANGE.1)?;
            }
            if let Some(v) = l.k_eigs {
                cfg.linearization.k_eigs = int_in("linearization.k_eigs", v, 1, 64)?;
            }
        }
        if let Some(x) = raw.extension {
            if let Some(v) = x.basis_size {
                cfg.extension.basis_size = int_in("extension.basis_size", v, 1, 64)?;
            }
        }
        if let Some(o) = raw.output {
            if let Some(d) = o.directory {
                cfg.output.directory = d;
            }
            if let Some(f) = o.formats {
                cfg.output.formats = f;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Cross-field and range checks, also run after command-line overrides.
    pub fn validate(&self) -> Result<()> {
        int_in("grid.n", self.grid.n as i64, GRID_N_RANGE.0, GRID_N_RANGE.1)?;
        positive("grid.r_max", self.grid.r_max)?;
        if let Some(m) = self.tgrid.m {
            int_in("tgrid.m", m as i64, 2, 1 << 16)?;
        }
        if let Some(t) = self.tgrid.t_max {
            positive("tgrid.t_max", t)?;
        }
        self.solver_config().validate()?;
        int_in("linearization.l_max", self.linearization.l_max as i64, L_MAX_RANGE.0, L_MAX_RANGE.1)?;
        let basis = self.grid.n as i64 / 2;
        int_in("linearization.k_eigs", self.linearization.k_eigs as i64, 1, basis.min(64))?;
        int_in("extension.basis_size", self.extension.basis_size as i64, 1, 64)?;
        if self.output.directory.trim().is_empty() {
            return Err(invalid("output.directory", "must not be empty"));
        }
        if self.output.formats.is_empty() {
            return Err(invalid("output.formats", "must list at least one format"));
        }
        if let Some(f) = self.output.formats.iter().find(|f| !KNOWN_FORMATS.contains(&f.as_str())) {
            return Err(invalid("output.formats", format!("unknown format {f:?}; expected one of {KNOWN_FORMATS:?}")));
        }
        Ok(())
    }

    pub fn solver_config(&self) -> SolverConfig {
        SolverConfig {
            init: self.solver.init.clone(),
            tol: self.solver.tol,
            max_iter: self.solver.max_iter,
            relaxation: self.solver.relaxation,
            n: self.grid.n,
            r_max: self.grid.r_max,
            seed: self.solver.seed,
            perturbation: self.solver.perturbation,
        }
    }

    pub fn radial_grid(&self) -> Result<RadialGrid> {
        RadialGrid::new(self.grid.n, self.grid.r_max)
    }

    /// The t-grid for a radial grid with `n` nodes, scaling an explicit `m` with `n / grid.n`.
    pub fn tgrid_for(&self, n: usize) -> Result<TGrid> {
        let m = self.tgrid.m.map_or(n / 2, |m| m * n / self.grid.n);
        TGrid::new(m.max(2), self.tgrid.t_max.unwrap_or(self.grid.r_max / 2.0))
    }

    pub fn wants(&self, format: &str) -> bool {
        self.output.formats.iter().any(|f| f == format)
    }

    /// Canonical text: every key, fixed order, full-precision numbers.
    pub fn serialize(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "grid.n = {}", self.grid.n);
        let _ = writeln!(s, "grid.r_max = {:?}", self.grid.r_max);
        if let Some(m) = self.tgrid.m {
            let _ = writeln!(s, "tgrid.m = {m}");
        }
        if let Some(t) = self.tgrid.t_max {
            let _ = writeln!(s, "tgrid.t_max = {t:?}");
        }
        let _ = writeln!(s, "solver.init = {:?}", self.solver.init.to_string());
        let _ = writeln!(s, "solver.tol = {:?}", self.solver.tol);
        let _ = writeln!(s, "solver.max_iter = {}", self.solver.max_iter);
        let _ = writeln!(s, "solver.relaxation = {:?}", self.solver.relaxation);
        let _ = writeln!(s, "solver.seed = {}", self.solver.seed);
        let _ = writeln!(s, "solver.perturbation = {:?}", self.solver.perturbation);
        let _ = writeln!(s, "linearization.l_max = {}", self.linearization.l_max);
        let _ = writeln!(s, "linearization.k_eigs = {}", self.linearization.k_eigs);
        let _ = writeln!(s, "extension.basis_size = {}", self.extension.basis_size);
        let _ = writeln!(s, "output.directory = {:?}", self.output.directory);
        let formats: Vec<String> = self.output.formats.iter().map(|f| format!("{f:?}")).collect();
        let _ = writeln!(s, "output.formats = [{}]", formats.join(", "));
        s
    }

    /// SHA-256 of the canonical text without `output.directory`.
    pub fn config_hash(&self) -> String {
        let text: String = self
            .serialize()
            .lines()
            .filter(|l| !l.starts_with("output.directory"))
            .map(|l| format!("{l}\n"))
            .collect();
        Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}

pub fn parse_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    RunConfig::from_str_checked(&text)
}

/// Canonical form of configuration text.
pub fn normalize(text: &str) -> Result<String> {
    Ok(RunConfig::from_str_checked(text)?.serialize())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_text_gives_defaults() {
        let cfg = RunConfig::from_str_checked("").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!((cfg.grid.n, cfg.grid.r_max, cfg.solver.tol, cfg.linearization.l_max), (2048, 200.0, 1e-10, 3));
    }

    #[test]
    fn negative_grid_size_names_the_field() {
        match RunConfig::from_str_checked("grid.n = -5") {
            Err(Error::Validation { field, .. }) => assert_eq!(field, "grid.n"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parse_errors_carry_positions() {
        match RunConfig::from_str_checked("# header\ngrid.n = 64\nsolver.tol = = 3\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(matches!(RunConfig::from_str_checked("grid.size = 3"), Err(Error::Parse { .. })));
    }

    #[test]
    fn canonical_text_is_a_fixed_point() {
        let text = "# comment\nsolver.init = \"ball(2)\"\ngrid.n = 512\ntgrid.m = 100\noutput.formats = [\"csv\"]\n";
        let once = normalize(text).unwrap();
        assert_eq!(normalize(&once).unwrap(), once);
        assert_eq!(RunConfig::from_str_checked(&once).unwrap(), RunConfig::from_str_checked(text).unwrap());
    }

    #[test]
    fn hash_ignores_output_directory() {
        let a = RunConfig::default();
        let mut b = a.clone();
        b.output.directory = "elsewhere".into();
        assert_eq!(a.config_hash(), b.config_hash());
        b.solver.seed = 7;
        assert_ne!(a.config_hash(), b.config_hash());
        assert_eq!(a.config_hash().len(), 64);
    }
}
