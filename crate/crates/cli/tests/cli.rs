use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fracsync_cli::{Experiment, ExperimentConfig};
use sha2::{Digest, Sha256};

const ALL: [Experiment; 10] = [
    Experiment::GenerateFbm,
    Experiment::Fou,
    Experiment::Equivalence,
    Experiment::Contraction,
    Experiment::Pullback,
    Experiment::SyncSweep,
    Experiment::AveragedSweep,
    Experiment::EigenComparison,
    Experiment::CaseMultiplicative,
    Experiment::CaseMixed,
];

fn configs_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn fracsync(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracsync"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env_remove("FRACSYNC_OUT")
        .output()
        .unwrap()
}

fn schema() -> jsonschema::Validator {
    let text = std::fs::read_to_string(configs_dir().join("config.schema.json")).unwrap();
    jsonschema::validator_for(&serde_json::from_str(&text).unwrap()).unwrap()
}

fn manifest(dir: &Path) -> serde_json::Value {
    serde_json::from_slice(&std::fs::read(dir.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn presets_and_smoke_conform_to_schema() {
    let v = schema();
    for e in ALL {
        let json = serde_json::to_value(ExperimentConfig::preset(e)).unwrap();
        assert!(v.is_valid(&json), "{}: {:?}", e.name(), v.iter_errors(&json).map(|e| e.to_string()).collect::<Vec<_>>());
    }
    let smoke: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(configs_dir().join("smoke.json")).unwrap()).unwrap();
    assert!(v.is_valid(&smoke));
}

#[test]
fn schema_and_loader_reject_the_same_mistakes() {
    let v = schema();
    let bad = [
        r#"{"experiment":"fou"}"#,
        r#"{"experiment":"nope","grid":{"t0":0,"t1":1,"n":4}}"#,
        r#"{"experiment":"fou","grid":{"t0":0,"t1":1,"n":4},"extra":1}"#,
        r#"{"experiment":"fou","grid":{"t0":0,"t1":1,"n":0}}"#,
        r#"{"experiment":"fou","grid":{"t0":0,"t1":1,"n":4},"hurst":{"h1":0.5}}"#,
        r#"{"experiment":"fou","grid":{"t0":0,"t1":1,"n":4},"hurst":{"h1":1.0}}"#,
        r#"{"experiment":"sync-sweep","grid":{"t0":0,"t1":1,"n":4},"kappas":[0]}"#,
        r#"{"experiment":"fou","grid":{"t0":0,"t1":1,"n":4},"noise":{"channel1":{"kind":"linear","a":0,"b":[1]}}}"#,
        r#"{"experiment":"fou","grid":{"t0":0,"t1":1,"n":4},"drift":{"f":{"kind":"quartic"}}}"#,
        r#"{"experiment":"fou","grid":{"t0":0,"t1":1,"n":4},"fou":{"nu":-1}}"#,
    ];
    for text in bad {
        let json: serde_json::Value = serde_json::from_str(text).unwrap();
        assert!(!v.is_valid(&json), "schema accepted {text}");
        assert!(ExperimentConfig::from_json(text).is_err(), "loader accepted {text}");
    }
}

#[test]
fn smoke_passes_and_manifest_hashes_match() {
    let dir = tempfile::tempdir().unwrap();
    let smoke = configs_dir().join("smoke.json");
    let out = fracsync(&["run", smoke.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let m = manifest(dir.path());
    assert_eq!(m["all_pass"], true);
    let files = m["files"].as_array().unwrap();
    assert!(files.len() >= 3);
    for f in files {
        let bytes = std::fs::read(dir.path().join(f["file"].as_str().unwrap())).unwrap();
        assert_eq!(f["bytes"].as_u64().unwrap(), bytes.len() as u64);
        assert_eq!(f["sha256"].as_str().unwrap(), hex::encode(Sha256::digest(&bytes)));
    }
}

#[test]
fn reruns_are_byte_identical_across_thread_counts() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["eigen-comparison", "--n", "512", "--trials", "6", "--seed", "11"];
    let ra = fracsync(&[&args[..], &["--threads", "1"]].concat(), a.path());
    let rb = fracsync(&[&args[..], &["--threads", "3"]].concat(), b.path());
    assert_eq!(ra.status.code(), rb.status.code());
    assert_eq!(std::fs::read(a.path().join("manifest.json")).unwrap(), std::fs::read(b.path().join("manifest.json")).unwrap());
    for f in manifest(a.path())["files"].as_array().unwrap() {
        let name = f["file"].as_str().unwrap();
        assert_eq!(std::fs::read(a.path().join(name)).unwrap(), std::fs::read(b.path().join(name)).unwrap(), "{name}");
    }
}

#[test]
fn config_errors_exit_2_with_field_path() {
    let dir = tempfile::tempdir().unwrap();
    let out = fracsync(&["fou", "--h1", "0.4"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("hurst.h1"));

    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"experiment":"fou","grid":{"t0":0,"t1":1,"n":8},"kappas":[2,1]}"#).unwrap();
    let out = fracsync(&["run", cfg.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("kappas"));
    assert!(!dir.path().join("manifest.json").exists());
}

#[test]
fn failing_verdict_exits_1_and_still_writes_artifacts() {
    // Two nearly equal coupling strengths cannot shrink the gap tenfold.
    let dir = tempfile::tempdir().unwrap();
    let out = fracsync(&["sync-sweep", "--n", "1024", "--kappas", "1,1.1", "--trials", "4"], dir.path());
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL sync-sweep/gap"));
    let m = manifest(dir.path());
    assert_eq!(m["all_pass"], false);
    assert!(!m["files"].as_array().unwrap().is_empty());
}

#[test]
fn every_experiment_writes_finite_csv_rows() {
    let small: [(&str, &[&str]); 10] = [
        ("generate-fbm", &["--n", "64", "--trials", "50"]),
        ("fou", &["--t1", "10", "--n", "1000", "--trials", "3"]),
        ("equivalence", &["--n", "256", "--trials", "3"]),
        ("contraction", &["--t1", "5", "--n", "1280", "--trials", "3"]),
        ("pullback", &["--n", "1280", "--trials", "2", "--start-times=-2,-4"]),
        ("sync-sweep", &["--n", "512", "--trials", "3"]),
        ("averaged-sweep", &["--n", "512", "--trials", "3"]),
        ("eigen-comparison", &["--n", "512", "--trials", "3"]),
        ("case-multiplicative", &["--n", "512", "--trials", "3"]),
        ("case-mixed", &["--n", "512", "--trials", "3"]),
    ];
    for (cmd, extra) in small {
        let dir = tempfile::tempdir().unwrap();
        let out = fracsync(&[&[cmd][..], extra].concat(), dir.path());
        assert!(matches!(out.status.code(), Some(0 | 1)), "{cmd}: {}", String::from_utf8_lossy(&out.stderr));
        let mut csvs = 0;
        for f in manifest(dir.path())["files"].as_array().unwrap() {
            let name = f["file"].as_str().unwrap();
            assert!(name.starts_with(cmd), "{name}");
            if !name.ends_with(".csv") {
                continue;
            }
            csvs += 1;
            let text = std::fs::read_to_string(dir.path().join(name)).unwrap();
            let mut lines = text.lines();
            let width = lines.next().unwrap().split(',').count();
            for line in lines {
                let cells: Vec<&str> = line.split(',').collect();
                assert_eq!(cells.len(), width, "{name}");
                for c in cells {
                    let v: f64 = c.parse().unwrap_or_else(|_| panic!("{name}: `{c}`"));
                    assert!(v.is_finite() || v == f64::INFINITY, "{name}: {c}");
                }
            }
        }
        assert!(csvs > 0, "{cmd} wrote no tables");
    }
}

#[test]
fn out_dir_falls_back_to_env() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_fracsync"))
        .args(["generate-fbm", "--n", "16", "--trials", "20"])
        .env("FRACSYNC_OUT", dir.path())
        .output()
        .unwrap();
    assert!(out.status.code().is_some());
    assert!(dir.path().join("manifest.json").exists());
}
