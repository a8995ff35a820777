use std::fs;

use bosonstar::io::pipeline::list_artifacts;
use bosonstar::io::{
    load_profile, normalize, parse_config, run_pipeline, save_profile, LoadWarning, ProfileMetadata, ProfileRecord,
    RunConfig, Stage,
};
use bosonstar::{Error, RadialGrid, RadialProfile};

fn record() -> ProfileRecord {
    let grid = RadialGrid::new(64, 10.0).unwrap();
    let profile = RadialProfile::from_fn(&grid, |r| (1.0 + r * r).powf(-2.0) / 3.0).unwrap();
    ProfileRecord {
        profile,
        metadata: ProfileMetadata {
            kind: "test".into(),
            n: 64,
            r_max: 10.0,
            eigenvalue: 1.0,
            mass: 0.1,
            residual: 1e-12,
            tool_version: bosonstar::io::record::TOOL_VERSION.into(),
            config_hash: "abc".into(),
        },
    }
}

fn small_config(dir: &std::path::Path) -> RunConfig {
    let text = format!("grid.n = 256\ngrid.r_max = 60\noutput.directory = {:?}\n", dir.display().to_string());
    RunConfig::from_str_checked(&text).unwrap()
}

#[test]
fn profile_round_trip_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("q.csv");
    let rec = record();
    save_profile(&rec, &path).unwrap();
    let loaded = load_profile(&path, Some("abc")).unwrap();
    assert!(loaded.warnings.is_empty());
    let back = loaded.strict().unwrap();
    for (a, b) in rec.profile.values().iter().zip(back.profile.values()) {
        assert_eq!(a.to_bits(), b.to_bits());
    }
    assert_eq!(back.metadata, rec.metadata);
}

#[test]
fn truncated_profile_is_a_format_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("q.csv");
    save_profile(&record(), &path).unwrap();
    let text = fs::read_to_string(&path).unwrap();
    let keep: Vec<&str> = text.lines().take(40).collect();
    fs::write(&path, keep.join("\n")).unwrap();
    assert!(matches!(load_profile(&path, None), Err(Error::Format { .. })));

    fs::write(&path, text.replacen("r,value", "x,y", 1)).unwrap();
    assert!(matches!(load_profile(&path, None), Err(Error::Format { .. })));
}

#[test]
fn edited_hash_warns() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("q.csv");
    save_profile(&record(), &path).unwrap();
    let json = dir.path().join("q.json");
    let edited = fs::read_to_string(&json).unwrap().replace("\"abc\"", "\"abd\"");
    fs::write(&json, edited).unwrap();
    let loaded = load_profile(&path, Some("abc")).unwrap();
    assert_eq!(loaded.warnings, vec![LoadWarning::HashMismatch { expected: "abc".into(), found: "abd".into() }]);
    assert!(matches!(loaded.strict(), Err(Error::HashMismatch { .. })));
}

#[test]
fn config_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.conf");
    fs::write(&path, "").unwrap();
    let cfg = parse_config(&path).unwrap();
    assert_eq!((cfg.grid.n, cfg.grid.r_max, cfg.solver.tol, cfg.linearization.l_max), (2048, 200.0, 1e-10, 3));

    fs::write(&path, "grid.n = -5\n").unwrap();
    match parse_config(&path) {
        Err(Error::Validation { field, .. }) => assert_eq!(field, "grid.n"),
        other => panic!("expected a validation error, got {other:?}"),
    }
    fs::write(&path, "grid.bogus = 1\n").unwrap();
    assert!(parse_config(&path).is_err());

    let full = "# full\ngrid.n = 512\ngrid.r_max = 80\ntgrid.m = 200\nsolver.init = \"ball(2.0)\"\nsolver.seed = 7\n\
                linearization.l_max = 2\nextension.basis_size = 9\noutput.formats = [\"csv\"]\n";
    fs::write(&path, full).unwrap();
    let cfg = parse_config(&path).unwrap();
    assert_eq!(cfg.serialize(), normalize(full).unwrap());
    assert_eq!(normalize(&cfg.serialize()).unwrap(), cfg.serialize());
    assert!(parse_config(&dir.path().join("missing.conf")).is_err());
}

#[test]
fn pipeline_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let oa = run_pipeline(&small_config(a.path()), Stage::Report);
    let ob = run_pipeline(&small_config(b.path()), Stage::Report);
    assert_eq!(oa.exit_code, ob.exit_code);
    let fa = list_artifacts(a.path()).unwrap();
    let fb = list_artifacts(b.path()).unwrap();
    assert_eq!(fa, fb);
    assert!(fa.len() > 10, "{fa:?}");
    for rel in &fa {
        let x = fs::read(a.path().join(rel)).unwrap();
        let y = fs::read(b.path().join(rel)).unwrap();
        assert!(x == y, "{} differs", rel.display());
    }
}

#[test]
fn solve_stage_writes_only_solve_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_pipeline(&small_config(dir.path()), Stage::Solve);
    assert_eq!(out.exit_code, 0);
    let files: Vec<String> =
        list_artifacts(dir.path()).unwrap().iter().map(|p| p.display().to_string()).collect();
    assert_eq!(files, ["potentials.csv", "q_fourier.csv", "q_profile.csv", "q_profile.json"]);
    let rows = fs::read_to_string(dir.path().join("q_profile.csv")).unwrap().lines().count();
    assert_eq!(rows, 257);
}

#[test]
fn missing_dipole_sector_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_config(dir.path());
    cfg.linearization.l_max = 0;
    let out = run_pipeline(&cfg, Stage::Linearize);
    assert_ne!(out.exit_code, 0);
    let (_, msg) = out.failures.iter().find(|(s, _)| *s == Stage::Linearize).unwrap();
    assert!(msg.contains("ℓ=1 sector required by nondegeneracy check"), "{msg}");
}

#[test]
fn invalid_config_exits_with_config_code() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_config(dir.path());
    cfg.grid.n = 3;
    let out = run_pipeline(&cfg, Stage::Report);
    assert_eq!(out.exit_code, bosonstar::io::pipeline::EXIT_CONFIG);
}
