use serde_json::Value;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn rvm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rvm")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn scenarios() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

const EMPTY: &str = r#"
mode = "2d"
seed = 1
dt = 0.1
t_end = 0.5

[grid]
n = [8, 8]
len = [6.283185307179586, 6.283185307179586]

[diagnostics]
history_every = 1
"#;

const SMALL: &str = r#"
mode = "2.5d"
seed = 9
dt = 0.05
t_end = 0.5

[grid]
n = [16, 16]
len = [6.283185307179586, 6.283185307179586]

[plasma]
kind = "sampled"
count = 2000
charge = 0.5
space = { kind = "cosine", amplitude = 0.2, mode = [1, 1] }
momentum = { kind = "polynomial", epsilon = 0.5, scale = 0.2 }
shear = { amplitude = [0.0, 0.1, 0.3], mode = [1, 0] }

[fields]
kind = "poisson"

[diagnostics]
every = 2
tracers = 5
history_every = 5
"#;

fn simulate(dir: &Path, text: &str, extra: &[&str]) -> (Output, PathBuf) {
    let cfg = dir.join("scenario.toml");
    std::fs::write(&cfg, text).unwrap();
    let out = dir.join("run");
    let mut args = vec!["simulate", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    (rvm(&args), out)
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(dir.join("manifest.json")).unwrap()).unwrap()
}

fn listed_files(root: &Path, dir: &Path, acc: &mut Vec<String>) {
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            listed_files(root, &p, acc);
        } else {
            acc.push(p.strip_prefix(root).unwrap().to_str().unwrap().replace('\\', "/"));
        }
    }
}

#[test]
fn empty_scenario_writes_zero_diagnostics_and_a_complete_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let (o, run) = simulate(tmp.path(), EMPTY, &[]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(run.join("diagnostics.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    for line in lines {
        for (h, v) in header.iter().zip(line.split(',')) {
            if *h != "step" && *h != "time" {
                assert_eq!(v.parse::<f64>().unwrap(), 0.0, "{h}");
            }
        }
    }
    let m = manifest(&run);
    assert_eq!(m["status"], "complete");
    let config = std::fs::read(run.join("config.toml")).unwrap();
    use sha2::Digest;
    assert_eq!(m["config_hash"], format!("{:x}", sha2::Sha256::digest(&config)));
    // every output except the manifest itself is listed, with its hash
    let mut on_disk = Vec::new();
    listed_files(&run, &run, &mut on_disk);
    on_disk.retain(|p| p != "manifest.json");
    on_disk.sort();
    let mut listed: Vec<String> = m["files"].as_array().unwrap().iter().map(|f| f["path"].as_str().unwrap().to_string()).collect();
    listed.sort();
    assert_eq!(on_disk, listed);
    for f in m["files"].as_array().unwrap() {
        let bytes = std::fs::read(run.join(f["path"].as_str().unwrap())).unwrap();
        assert_eq!(f["sha256"], format!("{:x}", sha2::Sha256::digest(&bytes)));
    }
}

#[test]
fn simulate_is_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let (oa, ra) = simulate(a.path(), SMALL, &[]);
    let (ob, rb) = simulate(b.path(), SMALL, &[]);
    assert_eq!((code(&oa), code(&ob)), (0, 0));
    for f in ["diagnostics.csv", "summary.json", "config.toml", "snapshots/final.particles", "history/frame_00002.fields"] {
        assert_eq!(std::fs::read(ra.join(f)).unwrap(), std::fs::read(rb.join(f)).unwrap(), "{f}");
    }
    let (ma, mb) = (manifest(&ra), manifest(&rb));
    assert_eq!(ma["files"], mb["files"]);
    assert_eq!(ma["config_hash"], mb["config_hash"]);
}

#[test]
fn overrides_change_the_canonical_config() {
    let tmp = tempfile::tempdir().unwrap();
    let (o, run) = simulate(tmp.path(), SMALL, &["--seed", "5", "--dt", "0.025", "--grid", "8x8"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let cfg = std::fs::read_to_string(run.join("config.toml")).unwrap();
    assert!(cfg.contains("seed = 5") && cfg.contains("dt = 0.025") && cfg.contains("n = [8, 8]"), "{cfg}");
    assert_eq!(manifest(&run)["seed"], 5);
}

#[test]
fn configuration_errors_exit_two_and_missing_inputs_three() {
    let tmp = tempfile::tempdir().unwrap();
    let (o, _) = simulate(tmp.path(), &EMPTY.replace("[diagnostics]", "[diagnostics]\nevery_other = 2"), &[]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("diagnostics.every_other"));
    let (o, _) = simulate(tmp.path(), EMPTY, &["--dt", "5.0"]);
    assert_eq!(code(&o), 2, "{}", String::from_utf8_lossy(&o.stderr));
    let (o, _) = simulate(tmp.path(), EMPTY, &["--grid", "8by8"]);
    assert_eq!(code(&o), 2);
    let o = rvm(&["simulate", tmp.path().join("nope.toml").to_str().unwrap(), "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(code(&o), 3);
}

#[test]
fn verify_emits_json_records() {
    let o = rvm(&["verify", "identities", "--seed", "1", "--count", "100000"]);
    assert_eq!(code(&o), 0);
    let recs: Vec<Value> = String::from_utf8(o.stdout).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(recs.len(), 3);
    for r in &recs {
        assert_eq!(r["samples"], 100000);
        assert_eq!(r["pass"], true);
        assert!(r["max_ratio"].as_f64().unwrap() < 1e-12);
    }
    assert!(String::from_utf8(o.stderr).unwrap().contains("max ratio"));
    let g = rvm(&["verify", "geometry", "--count", "20000"]);
    assert_eq!(code(&g), 0);
    assert_eq!(String::from_utf8(g.stdout).unwrap().lines().count(), 6);
    assert_eq!(code(&rvm(&["verify", "everything"])), 2);
    assert_eq!(code(&rvm(&["verify", "identities", "--count", "0"])), 2);
}

#[test]
fn strichartz_check_exit_codes() {
    let o = rvm(&["strichartz-check", "336/19", "32/5", "112/81", "96/79", "--dual"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8(o.stdout).unwrap().contains("31/84"));
    let o = rvm(&["strichartz-check", "2", "2", "2", "2"]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8(o.stdout).unwrap().contains("violated: 1/q1 + 2/r1 = 1/q2' + 2/r2' - 2"));
    assert_eq!(code(&rvm(&["strichartz-check", "a", "2", "2", "2"])), 2);
}

#[test]
fn fields_compare_on_a_zero_run() {
    let tmp = tempfile::tempdir().unwrap();
    let (o, run) = simulate(tmp.path(), EMPTY, &[]);
    assert_eq!(code(&o), 0);
    let probes = tmp.path().join("probes.json");
    std::fs::write(&probes, "[[0.5, 1.0, 2.0], [0.2, 3.0, 3.0], [7.0, 0.0, 0.0]]").unwrap();
    let o = rvm(&["fields-compare", run.to_str().unwrap(), "--probes", probes.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rep: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(rep["summary"]["evaluated"], 2);
    assert_eq!(rep["summary"]["failed"], 1);
    assert_eq!(rep["summary"]["relative_l2_error"], 0.0);
    for p in &rep["probes"].as_array().unwrap()[..2] {
        for key in ["total", "grid", "k_t", "k_s1", "k_s2", "data_term"] {
            assert!(p[key].as_array().unwrap().iter().all(|v| v.as_f64() == Some(0.0)), "{key}: {p}");
        }
    }
    assert!(rep["probes"][2]["error"].as_str().unwrap().contains("outside"));
    assert!(String::from_utf8_lossy(&o.stderr).contains("warning"));
    let missing = rvm(&["fields-compare", tmp.path().to_str().unwrap(), "--probes", probes.to_str().unwrap()]);
    assert_eq!(code(&missing), 3);
}

#[test]
fn fields_compare_on_the_golden_run() {
    let tmp = tempfile::tempdir().unwrap();
    let run = tmp.path().join("run");
    let scn = scenarios().join("golden_zero_field.toml");
    assert_eq!(code(&rvm(&["simulate", scn.to_str().unwrap(), "--out", run.to_str().unwrap()])), 0);
    let probes = tmp.path().join("probes.json");
    let list: Vec<[f64; 3]> = (0..20).map(|i| [2.0, 0.3 + 0.29 * i as f64, (1.1 + 0.77 * i as f64) % 6.28]).collect();
    std::fs::write(&probes, serde_json::to_string(&list).unwrap()).unwrap();
    let report = tmp.path().join("report.json");
    let o = rvm(&["fields-compare", run.to_str().unwrap(), "--probes", probes.to_str().unwrap(), "--out", report.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let rep: Value = serde_json::from_slice(&std::fs::read(&report).unwrap()).unwrap();
    assert_eq!(rep["summary"]["evaluated"], 20);
    let err = rep["summary"]["relative_l2_error"].as_f64().unwrap();
    assert!(err > 0.0 && err < 0.05, "{err}");
}
