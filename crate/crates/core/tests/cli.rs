use std::path::Path;
use std::process::{Command, Output};

use entbound::cli::StateFile;
use entbound::states::rho_alpha;
use tempfile::TempDir;

fn entbound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_entbound"))
        .args(args)
        .env_remove("ENTBOUND_SOLVER_TOL")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn bell(dir: &TempDir) -> String {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    write(
        dir,
        "bell.json",
        &format!(
            r#"{{"name": "bell", "dims": [2, 2], "vector": [[{s}, 0], [0, 0], [0, 0], [{s}, 0]]}}"#
        ),
    )
}

fn field(line: &str, key: &str) -> f64 {
    let prefix = format!("{key}=");
    line.split_whitespace()
        .find_map(|w| w.strip_prefix(&prefix))
        .unwrap_or_else(|| panic!("no {key} in {line}"))
        .parse()
        .unwrap()
}

fn measure_line<'a>(text: &'a str, name: &str) -> &'a str {
    text.lines()
        .find(|l| l.split_whitespace().next() == Some(name))
        .unwrap_or_else(|| panic!("no {name} line in\n{text}"))
}

fn read_csv(path: &Path) -> Vec<Vec<f64>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn bell_state_is_one_ebit() {
    let dir = TempDir::new().unwrap();
    let out = entbound(&["compute", "--state", &bell(&dir), "--measures", "en,ew"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    for m in ["en", "ew"] {
        let line = measure_line(&text, m);
        assert!((field(line, "value_log2") - 1.0).abs() < 1e-6, "{line}");
        for key in ["primal", "dual", "gap", "iterations"] {
            field(line, key);
        }
    }
}

#[test]
fn rho_alpha_half_from_file() {
    let dir = TempDir::new().unwrap();
    let doc = StateFile::from_state("rho", &rho_alpha(0.5).unwrap()).to_json();
    let path = write(&dir, "rho.json", &doc);
    let out = entbound(&["compute", "--state", &path, "--measures", "ew,en"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = stdout(&out);
    let ew = field(measure_line(&text, "ew"), "value_log2");
    let en = field(measure_line(&text, "en"), "value_log2");
    assert!((ew - 0.58496).abs() < 1e-5, "{ew}");
    assert!((en - 0.73697).abs() < 1e-5, "{en}");
}

#[test]
fn json_output_carries_every_field() {
    let dir = TempDir::new().unwrap();
    let out = entbound(&[
        "compute",
        "--state",
        &bell(&dir),
        "--measures",
        "ew,fgamma:k=2",
        "--format",
        "json",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["state"], "bell");
    let results = v["results"].as_array().unwrap();
    assert_eq!(results.len(), 2);
    assert_eq!(results[1]["measure"], "fgamma:k=2");
    assert!((results[1]["value"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    for key in [
        "value_log2",
        "primal_value",
        "dual_value",
        "gap",
        "iterations",
    ] {
        assert!(results[0].get(key).is_some(), "missing {key}");
    }
}

#[test]
fn non_hermitian_matrix_exits_3() {
    let dir = TempDir::new().unwrap();
    let path = write(
        &dir,
        "bad.json",
        r#"{"dims": [1, 2], "matrix": [[[0.5, 0], [0.3, 0]], [[0, 0], [0.5, 0]]]}"#,
    );
    let out = entbound(&["compute", "--state", &path, "--measures", "en"]);
    assert_eq!(out.status.code(), Some(3));
    let err = stderr(&out);
    assert_eq!(err.lines().next(), Some("ERROR 3: invalid-state"));
    assert!(err.contains("Hermitian"), "{err}");
}

#[test]
fn malformed_file_exits_2_with_position() {
    let dir = TempDir::new().unwrap();
    let path = write(
        &dir,
        "broken.json",
        "{\n  \"dims\": [2, 2],\n  \"vector\": [\n",
    );
    let out = entbound(&["compute", "--state", &path, "--measures", "en"]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert_eq!(err.lines().next(), Some("ERROR 2: parse"));
    assert!(err.contains("broken.json:"), "{err}");
}

#[test]
fn usage_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let bell = bell(&dir);
    for args in [
        vec!["compute", "--state", &bell, "--measures", "entropy"],
        vec!["compute", "--state", &bell, "--measures", "fgamma:k=0.5"],
        vec!["verify", "--suite", "everything"],
        vec!["frobnicate"],
    ] {
        let out = entbound(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(stderr(&out).starts_with("ERROR 2: "), "{args:?}");
    }
}

#[test]
fn solver_failure_exits_4() {
    let dir = TempDir::new().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_entbound"))
        .args(["compute", "--state", &bell(&dir), "--measures", "ew"])
        .env("ENTBOUND_SOLVER_TOL", "1e-300")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4), "{}", stderr(&out));
    assert!(stderr(&out).starts_with("ERROR 4: solver"));
}

#[test]
fn sigma_r_sweep_separates_ew_from_en() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("fig.csv");
    let out = entbound(&[
        "sweep",
        "--family",
        "sigma_r",
        "--from",
        "0.1",
        "--to",
        "0.9",
        "--steps",
        "9",
        "--measures",
        "ew,en",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("param,ew,en\n"));
    let rows = read_csv(&csv);
    assert_eq!(rows.len(), 9);
    for r in rows {
        assert!(r[1] < r[2], "{r:?}");
    }
}

#[test]
fn rho_alpha_sweep_matches_negativity_formula() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("en.csv");
    let out = entbound(&[
        "sweep",
        "--family",
        "rho_alpha",
        "--from",
        "0",
        "--to",
        "0.5",
        "--steps",
        "11",
        "--measures",
        "en",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let rows = read_csv(&csv);
    assert_eq!(rows.len(), 11);
    assert_eq!(rows[0][0], 1e-6);
    for r in rows {
        let a = r[0];
        let expected = (1.0 + 4.0 / 3.0 * (a * (1.0 - a)).sqrt()).log2();
        assert!((r[1] - expected).abs() < 1e-6, "{r:?}");
    }
}

#[test]
fn sweep_output_is_byte_stable_and_two_steps_give_two_rows() {
    let dir = TempDir::new().unwrap();
    let run = |name: &str| {
        let p = dir.path().join(name);
        let out = entbound(&[
            "sweep",
            "--family",
            "sigma_r",
            "--from",
            "0.2",
            "--to",
            "0.8",
            "--steps",
            "2",
            "--measures",
            "en,ew,witness",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
        std::fs::read(p).unwrap()
    };
    let a = run("a.csv");
    assert_eq!(a, run("b.csv"));
    let text = String::from_utf8(a).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(!text.contains('\r'));
}

#[test]
fn sweep_rejects_bad_ranges() {
    let dir = TempDir::new().unwrap();
    let p = dir.path().join("x.csv");
    let out = entbound(&[
        "sweep",
        "--family",
        "rho_alpha",
        "--from",
        "0.1",
        "--to",
        "0.9",
        "--steps",
        "3",
        "--measures",
        "en",
        "--out",
        p.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!p.exists());
}

#[test]
fn verify_known_values_suite() {
    let out = entbound(&["verify", "--suite", "paper-values"]);
    assert!(out.status.success(), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("PASS paper-values/ew(rho_alpha(0.5))=log2(3/2)"));
    assert!(text.lines().all(|l| !l.starts_with("FAIL")));
}

#[test]
fn verify_all_aggregates_suites() {
    let out = entbound(&["verify", "--suite", "all"]);
    assert!(out.status.success(), "{}", stdout(&out));
    let text = stdout(&out);
    for suite in [
        "paper-values",
        "duality",
        "additivity",
        "monotonicity",
        "sandwich",
    ] {
        assert!(text.contains(&format!("PASS {suite}/")), "{suite}");
    }
}
