use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use proptest::prelude::*;
use upb_cli::config::Experiment;
use upb_cli::output::{sha256_hex, Table};

fn upb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_upb")).args(args).output().expect("spawn upb")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("cfg.toml");
    fs::write(&p, body).unwrap();
    p
}

#[test]
fn list_experiments_names_every_fixture() {
    let out = upb(&["list-experiments"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for e in Experiment::ALL {
        assert!(text.contains(e.id()), "{} missing", e.id());
        assert!(fixture(&format!("{}.toml", e.id())).exists(), "no fixture for {}", e.id());
    }
}

#[test]
fn every_fixture_validates() {
    for e in Experiment::ALL {
        let p = fixture(&format!("{}.toml", e.id()));
        let out = upb(&["validate", p.to_str().unwrap()]);
        assert!(out.status.success(), "{}: {}", e.id(), String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn invalid_configs_exit_with_code_one() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("experiment = \"fig3-maps\"\n[system]\nkappa = 0.0\n", "system.kappa"),
        ("experiment = \"fig9-cascaded\"\n[system]\nu = 0.01\nf2 = 0.01\n[bath]\ncascade_efficiency = 1.5\n", "cascade_efficiency"),
        ("experiment = \"fig5-g2tau-vs-U\"\n[sweep]\nu_values = []\n", "empty"),
        ("experiment = \"fig5-g2tau-vs-U\"\ncutoff = 30\n", "hard limit"),
        ("experiment = \"fig3-maps\"\n[system]\nkapa = 1.0\n", "kapa"),
    ];
    for (body, needle) in cases {
        let p = write_config(dir.path(), body);
        for cmd in ["validate", "run"] {
            let out = upb(&[cmd, p.to_str().unwrap()]);
            assert_eq!(out.status.code(), Some(1), "{cmd} accepted {body}");
            let err = String::from_utf8_lossy(&out.stderr);
            assert!(err.contains(needle), "{cmd}: {err}");
        }
    }
    let out = upb(&["validate", "/nonexistent/config.toml"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn cutoff_override_is_checked() {
    let p = fixture("fig9-cascaded.toml");
    let out = upb(&["validate", p.to_str().unwrap(), "--cutoff", "25"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn cascaded_fixture_echoes_chi() {
    let p = fixture("fig9-cascaded.toml");
    let out = upb(&["validate", p.to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("OK "));
    assert!(text.contains("χ = √(ηκ₁κ₂) = 1.000000e0"), "{text}");
}

#[test]
fn solver_failures_map_to_exit_code_two() {
    let e = upb_cli::CliError::Solver(upb_core::Error::param("f1", "test"));
    assert_eq!(e.exit_code(), 2);
}

#[test]
fn run_writes_tables_and_checksummed_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("fig7");
    let p = fixture("fig7-optimal-squeeze.toml");
    let out = upb(&["run", p.to_str().unwrap(), "--resolution", "low", "--workers", "1", "--out", out_dir.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(out_dir.join("fig7-optimal-squeeze-manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["reduced_resolution"], true);
    assert_eq!(manifest["basis"]["cutoff_limit"], 24);
    let artifacts = manifest["artifacts"].as_array().unwrap();
    assert!(!artifacts.is_empty());
    for a in artifacts {
        let file = a["file"].as_str().unwrap();
        let bytes = fs::read(out_dir.join(file)).unwrap();
        assert_eq!(sha256_hex(&bytes), a["sha256"].as_str().unwrap(), "{file}");
        let text = String::from_utf8(bytes).unwrap();
        let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
        assert!(header.contains('['), "header without units: {header}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn csv_round_trips_numbers(values in prop::collection::vec(prop::num::f64::ANY, 1..20)) {
        let mut t = Table::new("t", &["x [1]"]);
        for &v in &values {
            t.push(vec![v.into()]);
        }
        let bytes = t.to_csv_bytes();
        let text = String::from_utf8(bytes).unwrap();
        let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
        prop_assert_eq!(rows.len(), values.len());
        for (row, &v) in rows.iter().zip(&values) {
            let back: f64 = if *row == "NaN" { f64::NAN } else { row.parse().unwrap() };
            prop_assert!(back == v || (back.is_nan() && v.is_nan()), "{} -> {}", v, row);
        }
    }

    #[test]
    fn failed_rows_keep_the_column_count(reason in "[a-z \n,\"]{0,40}", k in 0usize..3) {
        let mut t = Table::with_reasons("t", &["a [1]", "b [1]", "c [1]"]);
        t.push(vec![1.0.into(), 2.0.into(), 3.0.into()]);
        t.push_failed(vec![0.5.into(); k], reason);
        let bytes = t.to_csv_bytes();
        let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(&bytes[..]);
        let records: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
        prop_assert_eq!(records.len(), 2);
        prop_assert!(records.iter().all(|r| r.len() == 4));
        prop_assert_eq!(&records[1][2], "NaN");
        prop_assert_eq!(t.failed_rows(), 1);
    }
}
