use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use amulab::models::IndexReport;
use amulab::spectrum::SyntheticSpectrum;
use amulab::tuples::OperatorTuple;
use amulab::verify::{commuting_oracle, AcceptanceReport};

const FIXTURE_POINTS: [[f64; 2]; 2] = [[0.3, -0.2], [-0.6, 0.5]];

fn amulab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_amulab")).current_dir(dir).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn gen_fixture(dir: &Path) {
    let o = amulab(dir, &["gen", "commuting", "--point", "0.3,-0.2", "--point", "-0.6,0.5", "--dim", "4", "-o", "comm.json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn commuting_spectrum_matches_golden_csv() {
    let dir = tempfile::tempdir().unwrap();
    gen_fixture(dir.path());
    let o = amulab(dir.path(), &["spectrum", "--tuple", "comm.json", "--M", "1.5", "--eta", "0.2", "-o", "spec.json", "--csv", "spec.csv"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("accepted 10 of 349"));
    let golden = fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/commuting_spectrum.csv")).unwrap();
    assert_eq!(fs::read_to_string(dir.path().join("spec.csv")).unwrap(), golden);
}

#[test]
fn golden_csv_agrees_with_joint_eigenvalue_oracle() {
    let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/commuting_spectrum.csv");
    let mut reader = csv::Reader::from_path(golden).unwrap();
    let indices: Vec<usize> = reader.records().map(|r| r.unwrap()[0].parse().unwrap()).collect();
    let points: Vec<Vec<f64>> = FIXTURE_POINTS.iter().map(|p| p.to_vec()).collect();
    assert_eq!(indices, commuting_oracle(&points, 1.5, 0.2).unwrap());
}

#[test]
fn pipeline_outputs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    gen_fixture(dir.path());
    for out in ["a.json", "b.json"] {
        let o = amulab(dir.path(), &["spectrum", "--tuple", "comm.json", "--M", "1.5", "--eta", "0.2", "--variant", "spherical", "-o", out]);
        assert_eq!(code(&o), 0);
    }
    assert_eq!(fs::read(dir.path().join("a.json")).unwrap(), fs::read(dir.path().join("b.json")).unwrap());
    let s: SyntheticSpectrum = serde_json::from_slice(&fs::read(dir.path().join("a.json")).unwrap()).unwrap();
    assert!(!s.is_empty());
}

#[test]
fn amu_scan_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    gen_fixture(dir.path());
    let o = amulab(dir.path(), &["spectrum", "--tuple", "comm.json", "--M", "1.5", "--eta", "0.2", "-o", "spec.json"]);
    assert_eq!(code(&o), 0);
    let pass = amulab(dir.path(), &["amu", "--tuple", "comm.json", "--spectrum", "spec.json", "--epsilon", "0.2", "-o", "w.json", "--csv", "w.csv"]);
    assert_eq!(code(&pass), 0);
    assert!(dir.path().join("w.csv").exists());
    let fail = amulab(dir.path(), &["amu", "--tuple", "comm.json", "--spectrum", "spec.json", "--epsilon", "0", "-o", "w0.json"]);
    assert_eq!(code(&fail), 1);
    let single = amulab(dir.path(), &["amu", "--tuple", "comm.json", "--lambda", "0.3,-0.2", "--epsilon", "1e-6", "-o", "one.json"]);
    assert_eq!(code(&single), 0);
    let mismatch = amulab(dir.path(), &["amu", "--tuple", "comm.json", "--lambda", "0.3", "--epsilon", "0.1"]);
    assert_eq!(code(&mismatch), 2);
}

#[test]
fn hermite_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&amulab(dir.path(), &["gen", "hermite", "--N", "64", "--hbar", "0.01", "-o", "h.json"])), 0);
    let t: OperatorTuple = serde_json::from_slice(&fs::read(dir.path().join("h.json")).unwrap()).unwrap();
    assert_eq!((t.n(), t.dim(), t.interior_dim()), (2, 64, Some(63)));
    assert_eq!(code(&amulab(dir.path(), &["spectrum", "--tuple", "h.json", "--M", "2", "--eta", "0.2", "-o", "s.json"])), 0);
    let s: SyntheticSpectrum = serde_json::from_slice(&fs::read(dir.path().join("s.json")).unwrap()).unwrap();
    assert!(!s.is_empty());
    let o = amulab(dir.path(), &["amu", "--tuple", "h.json", "--lambda", "0,0", "--epsilon", "0.3"]);
    assert_eq!(code(&o), 0);
    for kind in ["bounded", "tilde", "bar"] {
        assert_eq!(code(&amulab(dir.path(), &["transform", "--tuple", "h.json", "--kind", kind, "-o", "t.json"])), 0);
    }
    assert_eq!(code(&amulab(dir.path(), &["transform", "--tuple", "h.json", "--kind", "reparam", "--s", "0.1", "-o", "r.json"])), 0);
    let r: OperatorTuple = serde_json::from_slice(&fs::read(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(r.n(), 2);
    assert_eq!(code(&amulab(dir.path(), &["transform", "--tuple", "h.json", "--kind", "reparam", "-o", "r2.json"])), 2);
}

#[test]
fn spin_generation() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&amulab(dir.path(), &["gen", "spin", "--j", "1", "--hbar", "0.1", "-o", "s.json"])), 0);
    let t: OperatorTuple = serde_json::from_slice(&fs::read(dir.path().join("s.json")).unwrap()).unwrap();
    assert_eq!((t.n(), t.dim()), (3, 3));
    fs::write(dir.path().join("d.json"), r#"{"kind":"angular_momentum","j":1.5,"hbar":0.1}"#).unwrap();
    assert_eq!(code(&amulab(dir.path(), &["gen", "descriptor", "d.json", "-o", "d_out.json"])), 0);
}

#[test]
fn validation_errors_exit_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    gen_fixture(dir.path());
    assert_eq!(code(&amulab(dir.path(), &["gen", "spin", "--j", "0.3", "--hbar", "0.1", "-o", "bad.json"])), 2);
    assert!(!dir.path().join("bad.json").exists());
    assert_eq!(code(&amulab(dir.path(), &["spectrum", "--tuple", "comm.json", "--M", "1.5", "--eta", "1.5", "-o", "s.json"])), 2);
    assert!(!dir.path().join("s.json").exists());
    assert_eq!(code(&amulab(dir.path(), &["spectrum", "--tuple", "comm.json", "--M", "0.5", "--eta", "0.2", "-o", "s.json"])), 2);
    assert_eq!(code(&amulab(dir.path(), &["gen", "hermite", "--N", "4", "--hbar", "0.1", "-o", "h.json"])), 2);
    assert_eq!(code(&amulab(dir.path(), &["bogus"])), 2);
}

#[test]
fn io_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&amulab(dir.path(), &["spectrum", "--tuple", "missing.json", "--M", "1.5", "--eta", "0.2", "-o", "s.json"])), 3);
    fs::write(dir.path().join("broken.json"), "{\"label\": \"x\", \"n\": 1").unwrap();
    assert_eq!(code(&amulab(dir.path(), &["spectrum", "--tuple", "broken.json", "--M", "1.5", "--eta", "0.2", "-o", "s.json"])), 3);
    assert_eq!(code(&amulab(dir.path(), &["--config", "nope.toml", "verify", "--only", "7"])), 3);
}

#[test]
fn index_signs_and_inconclusive() {
    let dir = tempfile::tempdir().unwrap();
    for (hbar, want) in [("0.1", 1), ("-0.1", -1)] {
        let o = amulab(dir.path(), &["index", "--N", "64", "--hbar", hbar, "-o", "i.json"]);
        assert_eq!(code(&o), 0);
        let r: IndexReport = serde_json::from_slice(&fs::read(dir.path().join("i.json")).unwrap()).unwrap();
        assert_eq!(r.index, Some(want));
    }
    let o = amulab(dir.path(), &["index", "--N", "64", "--hbar", "0.1", "--ratio", "1.5"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).contains("\"status\": \"inconclusive\""));
}

#[test]
fn verify_subset_with_config() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("v.toml"), "only = [7, 8]\n[tolerances]\neig_tol = 1e-10\n").unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_amulab"))
        .current_dir(dir.path())
        .env("AMULAB_THREADS", "1")
        .args(["--config", "v.toml", "verify", "--report", "r.json", "--csv", "r.csv"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("[PASS]")).count(), 2);
    let r: AcceptanceReport = serde_json::from_slice(&fs::read(dir.path().join("r.json")).unwrap()).unwrap();
    assert_eq!(r.criteria.iter().map(|c| c.criterion).collect::<Vec<_>>(), vec![7, 8]);
    assert!(fs::read_to_string(dir.path().join("r.csv")).unwrap().starts_with("criterion,name,status,margin,seeds_failed,runtime_ms"));
}

#[test]
fn verify_corrupted_tuple_file_writes_no_report() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad.json"), "{\"label\":\"x\",\"n\":1,\"dim\":2,\"ops\":[]}").unwrap();
    fs::write(dir.path().join("v.toml"), "only = [1]\ntuple_files = [\"bad.json\"]\n").unwrap();
    let o = amulab(dir.path(), &["--config", "v.toml", "verify", "--report", "r.json"]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("bad.json"));
    assert!(!dir.path().join("r.json").exists());
    assert!(!String::from_utf8_lossy(&o.stdout).contains("criterion"));
}
