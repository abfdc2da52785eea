use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn qsteer(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsteer"))
        .args(args)
        .env("RUST_LOG", "error")
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

const TWO_SERIES: &str = r#"
name = "small"
[fixed.sluice]
f = "75 MHz"

[[series]]
label = "coupling"
axis = "coupling_g"
grid = [0.05, 0.07, 0.1]

[[series]]
label = "phase"
axis = "phase_phi"
grid = ["0.4 pi", "0.6 pi"]
set = { sluice = { g = 0.1 } }
"#;

const TWO_SERIES_SWAPPED: &str = r#"
name = "small"
[fixed.sluice]
f = "75 MHz"

[[series]]
label = "phase"
axis = "phase_phi"
grid = ["0.4 pi", "0.6 pi"]
set = { sluice = { g = 0.1 } }

[[series]]
label = "coupling"
axis = "coupling_g"
grid = [0.05, 0.07, 0.1]
"#;

fn data_lines(path: &Path) -> Vec<String> {
    fs::read_to_string(path).unwrap().lines().skip(1).map(str::to_string).collect()
}

#[test]
fn one_row_per_grid_point_in_grid_order() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.toml", TWO_SERIES);
    let out = dir.path().join("out");
    let o = qsteer(&["sweep", &cfg, "--out-dir", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = data_lines(&out.join("coupling.csv"));
    assert_eq!(rows.len(), 3);
    for (i, r) in rows.iter().enumerate() {
        assert!(r.starts_with(&format!("coupling,{i},")), "{r}");
        assert!(r.contains(",ok,"), "{r}");
    }
    assert_eq!(data_lines(&out.join("phase.csv")).len(), 2);
    let manifest: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["series"].as_array().unwrap().len(), 2);
    assert_eq!(manifest["series"][0]["rows"], 3);
}

#[test]
fn empty_grid_writes_header_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "run.toml",
        "name = \"e\"\n[[series]]\nlabel = \"none\"\naxis = \"coupling_g\"\ngrid = []\n",
    );
    let out = dir.path().join("out");
    let o = qsteer(&["sweep", &cfg, "--out-dir", out.to_str().unwrap()]);
    assert!(o.status.success());
    let text = fs::read_to_string(out.join("none.csv")).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("series,index,g,"));
    assert!(out.join("manifest.json").exists());
}

fn read_all(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    v.sort();
    v
}

#[test]
fn rerun_from_manifest_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.toml", TWO_SERIES);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert!(qsteer(&["sweep", &cfg, "--out-dir", a.to_str().unwrap()]).status.success());
    let m = a.join("manifest.json");
    assert!(qsteer(&["sweep", m.to_str().unwrap(), "--out-dir", b.to_str().unwrap()]).status.success());
    assert_eq!(read_all(&a), read_all(&b));
}

#[test]
fn results_do_not_depend_on_workers_or_series_order() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.toml", TWO_SERIES);
    let swapped = write(dir.path(), "swapped.toml", TWO_SERIES_SWAPPED);
    let one = dir.path().join("one");
    let many = dir.path().join("many");
    let sw = dir.path().join("sw");
    assert!(qsteer(&["--workers", "1", "sweep", &cfg, "--out-dir", one.to_str().unwrap()]).status.success());
    assert!(qsteer(&["--workers", "4", "sweep", &cfg, "--out-dir", many.to_str().unwrap()]).status.success());
    assert!(qsteer(&["sweep", &swapped, "--out-dir", sw.to_str().unwrap()]).status.success());
    assert_eq!(read_all(&one), read_all(&many));
    for f in ["coupling.csv", "phase.csv"] {
        assert_eq!(fs::read(one.join(f)).unwrap(), fs::read(sw.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn json_tables() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "run.toml", TWO_SERIES);
    let out = dir.path().join("out");
    assert!(qsteer(&["sweep", &cfg, "--out-dir", out.to_str().unwrap(), "--format", "json"]).status.success());
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("phase.json")).unwrap()).unwrap();
    assert_eq!(doc["axis"], "phase_phi");
    assert_eq!(doc["rows"].as_array().unwrap().len(), 2);
    assert!(doc["rows"][0]["q_avg"].as_f64().unwrap() < 0.0);
}

#[test]
fn failed_point_exits_two_and_is_marked() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "run.toml",
        "name = \"f\"\n[fixed.integrator]\nrel_tol = 1e-300\nabs_tol = 1e-300\n\
         [[series]]\nlabel = \"g\"\naxis = \"coupling_g\"\ngrid = [0.05]\n",
    );
    let out = dir.path().join("out");
    let o = qsteer(&["sweep", &cfg, "--out-dir", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let rows = data_lines(&out.join("g.csv"));
    assert!(rows[0].contains(",failed,") && rows[0].contains("NaN"), "{}", rows[0]);
}

#[test]
fn configuration_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad_unit = write(
        dir.path(),
        "bad.toml",
        "name = \"b\"\n[fixed.sluice]\nf = \"10 K\"\n[[series]]\nlabel = \"g\"\naxis = \"coupling_g\"\ngrid = [0.01]\n",
    );
    let unordered = write(
        dir.path(),
        "order.toml",
        "name = \"b\"\n[[series]]\nlabel = \"g\"\naxis = \"coupling_g\"\ngrid = [0.02, 0.01]\n",
    );
    for cfg in [bad_unit.as_str(), unordered.as_str(), "/nonexistent/run.toml"] {
        assert_eq!(qsteer(&["sweep", cfg, "--out-dir", dir.path().to_str().unwrap()]).status.code(), Some(1));
    }
    assert_eq!(qsteer(&["preset", "fig9"]).status.code(), Some(1));
}

#[test]
fn preset_config_prints_and_parses() {
    let o = qsteer(&["preset", "fig2a", "--print-config"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let run = qsteer_cli::config::RunConfig::from_toml_str(&text, "fig2a").unwrap();
    assert_eq!(run.resolve().unwrap().len(), 4);
}

#[test]
fn oracle_and_check_subcommands() {
    let o = qsteer(&["oracle", "ideal-charge"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["q_avg"].as_f64().unwrap() + 1.0).abs() < 0.1);
    let o = qsteer(&["oracle", "delta-q-secular-state", "--preset", "fig5", "--series", "secular", "--at", "0.05"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = qsteer(&["check", "--cases", "300"]);
    assert!(o.status.success());
    assert!(String::from_utf8(o.stdout).unwrap().contains("differs (info)"));
}
