use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn creutz(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_creutz")).current_dir(dir).args(args).output().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

const SPECTRUM: &str = r#"
quantity = "spectrum"
output_path = "spectrum.csv"

[base_params]
j_amp = 0.625
eta_a = 0.0
eta_b = 0.0
delta = 0.5
n_cells = 11
"#;

#[test]
fn list_recipes_succeeds() {
    let dir = tempfile::tempdir().unwrap();
    let o = creutz(dir.path(), &["list-recipes"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("fig5a"));
    assert!(text.contains("[DERIVED]"));
}

#[test]
fn spectrum_writes_data_and_sidecars() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.toml"), SPECTRUM).unwrap();
    let o = creutz(dir.path(), &["spectrum", "--config", "c.toml", "--out", "res", "--threads", "2", "--seedless"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for f in ["spectrum.csv", "spectrum.json", "spectrum_pbc.csv", "spectrum_pbc.json"] {
        assert!(dir.path().join("res").join(f).exists(), "{f}");
    }
}

#[test]
fn diagnose_prints_json() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.toml"), SPECTRUM).unwrap();
    let o = creutz(dir.path(), &["diagnose", "--config", "c.toml"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["z2"].is_number());
    assert!(dir.path().join("out/diagnose.json").exists());
}

#[test]
fn unknown_key_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.toml"), SPECTRUM.replace("n_cells = 11", "n_cells = 11\nwidth = 2")).unwrap();
    let o = creutz(dir.path(), &["spectrum", "--config", "c.toml"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("width"), "{}", stderr(&o));
}

#[test]
fn missing_config_and_bad_flags_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(creutz(dir.path(), &["spectrum"]).status.code(), Some(1));
    assert_eq!(creutz(dir.path(), &["--seedless=true", "list-recipes"]).status.code(), Some(1));
    assert_eq!(creutz(dir.path(), &["recipe", "fig99"]).status.code(), Some(1));
}

#[test]
fn phase_rejects_non_grid_quantity() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("c.toml"), SPECTRUM).unwrap();
    let o = creutz(dir.path(), &["phase", "--config", "c.toml"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn modes_outside_supported_regimes_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let generic = SPECTRUM.replace("eta_a = 0.0\neta_b = 0.0", "eta_a = 0.3\neta_b = 0.7");
    fs::write(dir.path().join("c.toml"), generic).unwrap();
    let o = creutz(dir.path(), &["modes", "--config", "c.toml"]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn recipe_runs() {
    let dir = tempfile::tempdir().unwrap();
    let o = creutz(dir.path(), &["recipe", "fig6b", "--out", "figs"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(fs::read_dir(dir.path().join("figs")).unwrap().count() >= 2);
}
