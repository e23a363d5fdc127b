use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn xtunnel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xtunnel")).args(args).output().expect("spawn xtunnel")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn run_in(dir: &Path, config: &str) -> Output {
    xtunnel(&["run", "--config", config, "--out-dir", dir.join("out").to_str().unwrap()])
}

const SPECTRUM: &str = "scenario = spectrum\nspectrum.potential = box\ngrid.n = 400\nspectrum.levels = 4\n";

#[test]
fn lists_every_scenario() {
    let out = xtunnel(&["list-scenarios"]);
    assert!(out.status.success());
    let names: Vec<String> = String::from_utf8(out.stdout).unwrap().lines().map(str::to_owned).collect();
    assert_eq!(
        names,
        ["spectrum", "tunneling-scan", "exchange-scan", "hf-mix", "exact-compare", "strong-coupling", "coherence", "wide-b"]
    );
}

#[test]
fn validate_accepts_the_reference_configs() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for e in fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        let out = xtunnel(&["validate", "--config", p.to_str().unwrap()]);
        assert!(out.status.success(), "{}: {}", p.display(), String::from_utf8_lossy(&out.stderr));
        n += 1;
    }
    assert!(n >= 10);
}

#[test]
fn config_errors_exit_2_without_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    for (name, text) in [
        ("unknown.conf", "scenario = spectrum\ngrid.nn = 10\n"),
        ("scenario.conf", "scenario = quantum-foam\n"),
        ("type.conf", "scenario = spectrum\ngrid.n = many\n"),
        ("missing.conf", "grid.n = 100\n"),
    ] {
        let cfg = write_config(tmp.path(), name, text);
        assert_eq!(xtunnel(&["validate", "--config", &cfg]).status.code(), Some(2), "{name}");
        let out = run_in(tmp.path(), &cfg);
        assert_eq!(out.status.code(), Some(2), "{name}");
        assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
        assert!(!tmp.path().join("out").exists(), "{name} wrote outputs");
    }
    assert_eq!(xtunnel(&["run", "--config", "/nonexistent/x.conf"]).status.code(), Some(2));
}

#[test]
fn spectrum_writes_csv_and_json() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "s.conf", SPECTRUM);
    let out = run_in(tmp.path(), &cfg);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(tmp.path().join("out/spectrum_levels.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,energy,reference,deviation");
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("1,") && lines[1].contains('e'));
    assert!(!csv.contains('\r'));

    let json: serde_json::Value = serde_json::from_slice(&fs::read(tmp.path().join("out/spectrum.json")).unwrap()).unwrap();
    assert_eq!(json["scenario"], "spectrum");
    assert_eq!(json["status"], "ok");
    assert!(json["error"].is_null());
    assert_eq!(json["params"]["grid.n"], 400);
    assert!(json["results"]["max_relative_deviation"].as_f64().unwrap() < 1e-3);
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "s.conf", SPECTRUM);
    let read = |d: &str| {
        let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(tmp.path().join(d))
            .unwrap()
            .map(|e| {
                let e = e.unwrap();
                (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
            })
            .collect();
        files.sort();
        files
    };
    for d in ["a", "b"] {
        let out = xtunnel(&["run", "--config", &cfg, "--out-dir", tmp.path().join(d).to_str().unwrap()]);
        assert!(out.status.success());
    }
    assert_eq!(read("a"), read("b"));
}

#[test]
fn a_failed_scan_row_exits_3_and_is_recorded() {
    let tmp = tempfile::tempdir().unwrap();
    // wells this close merge into one and have no ground doublet
    let cfg = write_config(tmp.path(), "x.conf", "scenario = exchange-scan\nkernel.lambda = 1e-3\ngrid.h = 0.05\nscan.values = 1.5, 6\n");
    let out = run_in(tmp.path(), &cfg);
    assert_eq!(out.status.code(), Some(3));
    let json: serde_json::Value =
        serde_json::from_slice(&fs::read(tmp.path().join("out/exchange-scan.json")).unwrap()).unwrap();
    assert_eq!(json["status"], "partial");
    assert_eq!(json["results"]["row_errors"][0]["kind"], "NotADoublet");
    let csv = fs::read_to_string(tmp.path().join("out/exchange-scan_exchange.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);
    assert!(csv.lines().any(|l| l.starts_with("1.50000000000e0,,")));
}
