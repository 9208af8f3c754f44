use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command as Process;

use clap::Parser;
use kicktop_cli::{run, RunConfig, Sidecar};

fn config(args: &str, out: &Path) -> RunConfig {
    let mut argv = vec!["kicktop".to_string()];
    argv.extend(args.split_whitespace().map(String::from));
    argv.extend(["--out".to_string(), out.display().to_string()]);
    RunConfig::try_parse_from(argv).unwrap()
}

/// Small instances of every pipeline.
const SMALL: &[&str] = &[
    "spectrum-sweep --j 3 --alpha-start 0 --alpha-stop 4 --alpha-count 9",
    "dos --j 5 --alpha 0.5 --grid-size 256",
    "dos --j 5 --alpha 0.5 --grid-size 256 --n-terms 110",
    "reconstruct --j 3 --alpha 1 --beta 0.2 --levels 3",
    "gap-scan --j 3 --beta 0.5 --alpha-start 0 --alpha-stop 3 --alpha-count 31",
    "singularity-probe --j 2 --n-points 21",
    "phase-portrait --alpha 0.2,6 --ic-grid 2x2 --n-kicks 20 --dt 0.01",
    "classical-limit --spins 5,10,20",
];

fn csv_files(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .collect();
    v.sort();
    v
}

fn assert_same_csvs(a: &Path, b: &Path) {
    let (fa, fb) = (csv_files(a), csv_files(b));
    assert_eq!(fa.len(), fb.len());
    assert!(!fa.is_empty());
    for (x, y) in fa.iter().zip(&fb) {
        assert_eq!(x.file_name(), y.file_name());
        assert!(fs::read(x).unwrap() == fs::read(y).unwrap(), "{} differs", x.display());
    }
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    for (k, args) in SMALL.iter().enumerate() {
        let a = tmp.path().join(format!("{k}a"));
        let b = tmp.path().join(format!("{k}b"));
        run(&config(args, &a)).unwrap();
        run(&config(&format!("{args} --jobs 3"), &b)).unwrap();
        assert_same_csvs(&a, &b);
    }
}

#[test]
fn sidecars_replay_their_runs() {
    let tmp = tempfile::tempdir().unwrap();
    for (k, args) in SMALL.iter().enumerate() {
        let first = tmp.path().join(format!("{k}"));
        let files = run(&config(args, &first)).unwrap();
        for csv in &files {
            let side = Sidecar::read(&csv.with_extension("json")).unwrap();
            assert_eq!(side.file, csv.file_name().unwrap().to_str().unwrap());
            assert_eq!(side.version, env!("CARGO_PKG_VERSION"));
            assert!(side.wall_time_s >= 0.0);
            let mut replay = side.config.clone();
            assert_eq!(replay, config(args, &first));
            replay.out = tmp.path().join(format!("{k}-replay"));
            run(&replay).unwrap();
            assert_eq!(fs::read(csv).unwrap(), fs::read(replay.out.join(&side.file)).unwrap());
        }
    }
}

#[test]
fn csv_headers_name_every_column() {
    let tmp = tempfile::tempdir().unwrap();
    let files = run(&config("spectrum-sweep --j 2 --alpha-start 0 --alpha-stop 1 --alpha-count 3", tmp.path())).unwrap();
    let text = fs::read_to_string(&files[0]).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(header.len(), 1 + 5 + 5);
    assert_eq!((header[0], header[1], header[6]), ("alpha", "exact_0", "effective_0"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r.split(',').count() == header.len()));
    let alpha: f64 = rows[1].split(',').next().unwrap().parse().unwrap();
    assert_eq!(alpha, 0.5);

    let files = run(&config("dos --j 5 --grid-size 256", &tmp.path().join("dos"))).unwrap();
    let text = fs::read_to_string(&files[0]).unwrap();
    assert!(text.starts_with("angle,rho_exact,rho_effective\n"));
    assert_eq!(text.lines().count(), 257);
}

fn exit_code(args: &[&str]) -> i32 {
    let tmp = tempfile::tempdir().unwrap();
    Process::new(env!("CARGO_BIN_EXE_kicktop"))
        .args(args)
        .arg("--out")
        .arg(tmp.path())
        .output()
        .unwrap()
        .status
        .code()
        .unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(exit_code(&["classical-limit", "--spins", "4,8"]), 0);
    assert_eq!(exit_code(&["no-such-pipeline"]), 2);
    assert_eq!(exit_code(&["dos", "--sigma-frac", "abc"]), 2);
    assert_eq!(exit_code(&["dos", "--sigma-frac", "0"]), 2);
    assert_eq!(exit_code(&["dos", "--j", "0.7"]), 2);
    // l = 0 has no resonance: a numeric failure in the spectral module
    assert_eq!(exit_code(&["singularity-probe", "--j", "2", "--l", "0"]), 1);
}

#[test]
fn numeric_failure_names_module_and_parameters() {
    let tmp = tempfile::tempdir().unwrap();
    let err = run(&config("singularity-probe --j 2 --l 0", tmp.path())).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("spectral") && msg.contains("singularity-probe") && msg.contains("l=0"), "{msg}");
    assert_eq!(err.exit_code(), 1);
}
