use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn dret(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dret")).args(args).env_remove("DRET_THREADS").output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn meta(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("meta.json")).unwrap()).unwrap()
}

fn csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    (header, rows)
}

/// Every file below `dir` with its path relative to `dir`.
fn dir_contents(dir: &Path) -> Vec<(String, Vec<u8>)> {
    fn walk(root: &Path, dir: &Path, out: &mut Vec<(String, Vec<u8>)>) {
        for e in fs::read_dir(dir).unwrap() {
            let path = e.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                let name = path.strip_prefix(root).unwrap().to_string_lossy().into_owned();
                out.push((name, fs::read(&path).unwrap()));
            }
        }
    }
    let mut v = Vec::new();
    walk(dir, dir, &mut v);
    v.sort();
    v
}

const SMALL_CONFIG: &str = r#"{
  "version": 1,
  "regime": "closed",
  "sites": { "energy_offsets": [2.0, 0.0], "reference_site": 2, "couplings": [[0, 1], [1, 0]] },
  "mode": { "frequency": 1.0, "site_couplings": [1.0, 2.0] },
  "time": { "tmax": 5.0, "dt_out": 0.05 },
  "wigner": { "points": 41 }
}"#;

#[test]
fn list_names_every_preset() {
    let out = dret(&["list"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let names: Vec<&str> = text.lines().map(|l| l.split_whitespace().next().unwrap()).collect();
    assert_eq!(names, dret::scenarios::PRESET_NAMES.to_vec());
}

#[test]
fn resonant_dimer_swaps_completely() {
    let dir = tempfile::tempdir().unwrap();
    let out = dret(&["run", "--scenario", "fig1a", "--tmax", "4", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let (header, rows) = csv(&dir.path().join("populations.csv"));
    assert_eq!(header, ["t", "P_1", "P_2"]);
    assert_eq!(rows.len(), 81);
    let peak = rows.iter().map(|r| r[2]).fold(0.0, f64::max);
    assert!(peak > 0.999, "{peak}");
    for r in &rows {
        assert!((r[2] - r[0].sin().powi(2)).abs() < 1e-6);
    }
    let m = meta(dir.path());
    assert_eq!(m["status"], "ok");
    assert_eq!(m["config"]["name"], "fig1a");
}

#[test]
fn single_thread_reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let out = dret(&[
            "run", "--scenario", "fig1b", "--tmax", "3", "--wigner-frames", "2", "--threads", "1", "--emit-plots",
            "--out", d.path().to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0);
    }
    assert_eq!(dir_contents(a.path()), dir_contents(b.path()));
}

#[test]
fn replay_reproduces_a_run() {
    let first = tempfile::tempdir().unwrap();
    let second = tempfile::tempdir().unwrap();
    assert_eq!(code(&dret(&["run", "--scenario", "fig8b", "--tmax", "2", "--heom-cutoff", "4", "--out", first.path().to_str().unwrap()])), 0);
    let meta_path = first.path().join("meta.json");
    assert_eq!(code(&dret(&["run", "--replay", meta_path.to_str().unwrap(), "--out", second.path().to_str().unwrap()])), 0);
    assert_eq!(dir_contents(first.path()), dir_contents(second.path()));
    assert!(first.path().join("sweep.csv").exists());
}

#[test]
fn wigner_frames_are_normalized() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, SMALL_CONFIG).unwrap();
    let out_dir = dir.path().join("out");
    let out = dret(&[
        "run", "--config", cfg.to_str().unwrap(), "--wigner-frames", "100", "--out", out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let files = fs::read_dir(&out_dir).unwrap().filter(|e| e.as_ref().unwrap().file_name().to_string_lossy().starts_with("wigner_")).count();
    assert_eq!(files, 100);
    let m = meta(&out_dir);
    let tol = m["wigner"]["normalization_tolerance"].as_f64().unwrap();
    let frames = m["wigner"]["frames"].as_array().unwrap();
    assert_eq!(frames.len(), 100);
    for f in frames {
        assert!((f["normalization"].as_f64().unwrap() - 1.0).abs() < tol);
    }
    let (header, rows) = csv(&out_dir.join("wigner_0000.csv"));
    assert_eq!(header, ["Q", "P", "W"]);
    assert_eq!(rows.len(), 41 * 41);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = out_dir.to_str().unwrap();

    let r = dret(&["run", "--scenario", "fig9z", "--out", out]);
    assert_eq!(code(&r), 2);
    assert!(String::from_utf8_lossy(&r.stderr).contains("fig9z"));
    assert_eq!(code(&dret(&["run"])), 2);
    assert_eq!(code(&dret(&["frobnicate"])), 2);

    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{ \"version\": 1,\n  \"regime\": \"closed\",\n  oops }").unwrap();
    let r = dret(&["run", "--config", bad.to_str().unwrap(), "--out", out]);
    assert_eq!(code(&r), 3);
    assert!(String::from_utf8_lossy(&r.stderr).contains("line 3"));
    assert_eq!(meta(&out_dir)["status"], "error");

    let r = dret(&["run", "--scenario", "fig1a", "--tmax", "1", "--wigner-frames", "500", "--out", out]);
    assert_eq!(code(&r), 3);

    let r = dret(&["run", "--scenario", "fig1a", "--tmax=-1", "--out", out]);
    assert_eq!(code(&r), 3);

    let capped = dir.path().join("capped.json");
    let text = r#"{
      "version": 1, "regime": "closed",
      "sites": { "energy_offsets": [0.0, 3.0, 1.0], "reference_site": 1,
                 "couplings": [[0, 1, 0], [1, 0, 1], [0, 1, 0]] },
      "mode": { "frequency": 1.0, "site_couplings": [2.11, 2.80, 2.56] },
      "numerics": { "fock_cap": 40 }
    }"#;
    fs::write(&capped, text).unwrap();
    let r = dret(&["run", "--config", capped.to_str().unwrap(), "--out", out]);
    assert_eq!(code(&r), 4, "{}", String::from_utf8_lossy(&r.stderr));
    let m = meta(&out_dir);
    assert_eq!(m["status"], "error");

    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let r = dret(&["run", "--scenario", "fig1a", "--tmax", "1", "--out", blocker.join("sub").to_str().unwrap()]);
    assert_eq!(code(&r), 1);
}
