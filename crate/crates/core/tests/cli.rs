use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use eitm::report::CsvTable;

fn eitm(args: &[&str], env_out: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_eitm"));
    cmd.args(args).env_remove("EITM_OUT");
    if let Some(dir) = env_out {
        cmd.env("EITM_OUT", dir);
    }
    cmd.output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn table(dir: &Path, name: &str) -> CsvTable {
    CsvTable::parse(&fs::read_to_string(dir.join(format!("{name}.csv"))).unwrap()).unwrap()
}

#[test]
fn fig2a_csv_columns() {
    let dir = tempfile::tempdir().unwrap();
    let o = eitm(&["run", "--preset", "fig2a", "--out", dir.path().to_str().unwrap()], None);
    assert!(o.status.success(), "{}", stderr(&o));
    let t = table(dir.path(), "fig2a");
    assert_eq!(
        t.columns,
        ["omega_dc", "qfi_omegas", "hss_omegas", "chi3_abs", "qfi_omegas_norm", "hss_omegas_norm", "chi3_abs_norm"]
    );
    assert_eq!(t.rows.len(), 501);
    assert!(dir.path().join("fig2a.features.txt").exists());
    assert!(dir.path().join("fig2a.coincidence.txt").exists());
}

#[test]
fn points_override() {
    let dir = tempfile::tempdir().unwrap();
    let o = eitm(&["run", "--preset", "fig2a", "--points", "11", "--out", dir.path().to_str().unwrap()], None);
    assert!(o.status.success(), "{}", stderr(&o));
    let t = table(dir.path(), "fig2a");
    assert_eq!(t.rows.len(), 11);
    assert_eq!(t.columns.len(), 7);
}

#[test]
fn range_damping_and_quantity_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let o = eitm(
        &[
            "run", "--preset", "fig7c", "--points", "21", "--range", "3.5:4.5", "--damping", "off",
            "--quantities", "hss_omega,chi1_re", "--tol-cells", "3", "--out", dir.path().to_str().unwrap(),
        ],
        None,
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let t = table(dir.path(), "fig7c");
    assert_eq!(t.columns, ["omega_dc", "hss_omega", "chi1_re", "hss_omega_norm", "chi1_re_norm"]);
    assert_eq!(t.meta("damping"), Some("off"));
    assert_eq!(t.rows[0][0], Some(3.5));
    assert_eq!(t.rows[20][0], Some(4.5));
}

#[test]
fn missing_output_directory_is_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("absent");
    let o = eitm(&["run", "--preset", "fig2a", "--points", "11", "--out", missing.to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(stderr(&o).trim_end().lines().count(), 1, "{}", stderr(&o));
    assert!(!missing.exists());
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn invalid_config_is_exit_2() {
    let o = eitm(&["run", "--preset", "fig99"], None);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr(&o).trim_end().lines().count(), 1);

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("both.cfg");
    fs::write(&cfg, "preset = fig2a\nomega = 3\n").unwrap();
    let o = eitm(&["run", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(2));

    let o = eitm(&["run", "--preset", "fig2a", "--range", "2:1"], None);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn everything_masked_is_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("masked.cfg");
    let text = eitm::presets::source("fig5a").unwrap().to_string() + "pole_threshold = 1e9\n";
    fs::write(&cfg, text.replace("name = fig5a", "name = masked")).unwrap();
    let o = eitm(&["run", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()], None);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(!dir.path().join("masked.csv").exists());
}

#[test]
fn inline_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("custom.cfg");
    fs::write(
        &cfg,
        "model = three-level\nswept = omega\nrange = 8:10\npoints = 21\nquantities = chi1_re\n\
         omega_da = 20\nomega_dc = 2\nomega_s = 2.5\nomega = 9\nrabi = 0.001\nrabi_s = 10\n",
    )
    .unwrap();
    let o = eitm(&["run", "--config", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()], None);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(table(dir.path(), "custom").rows.len(), 21);
}

#[test]
fn output_directory_precedence() {
    let env_dir = tempfile::tempdir().unwrap();
    let flag_dir = tempfile::tempdir().unwrap();
    let o = eitm(&["run", "--preset", "fig5a", "--points", "11"], Some(env_dir.path()));
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(env_dir.path().join("fig5a.csv").exists());

    let o = eitm(
        &["run", "--preset", "fig5b", "--points", "11", "--out", flag_dir.path().to_str().unwrap()],
        Some(env_dir.path()),
    );
    assert!(o.status.success());
    assert!(flag_dir.path().join("fig5b.csv").exists());
    assert!(!env_dir.path().join("fig5b.csv").exists());
}

#[test]
fn output_is_byte_identical_across_runs() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = eitm(&["run", "--preset", "fig6c", "--out", d.path().to_str().unwrap()], None);
        assert!(o.status.success());
    }
    for f in ["fig6c.csv", "fig6c.features.txt", "fig6c.coincidence.txt"] {
        assert_eq!(fs::read(a.path().join(f)).unwrap(), fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}

#[test]
fn precision_flag() {
    let dir = tempfile::tempdir().unwrap();
    let o = eitm(
        &["run", "--preset", "fig2a", "--points", "3", "--precision", "12", "--out", dir.path().to_str().unwrap()],
        None,
    );
    assert!(o.status.success());
    let text = fs::read_to_string(dir.path().join("fig2a.csv")).unwrap();
    let last = text.lines().last().unwrap();
    assert!(last.starts_with("1.50000000000e0,"), "{last}");
}

fn data_rows(listing: &str) -> Vec<&str> {
    listing.lines().skip(1).collect()
}

#[test]
fn list_presets() {
    let o = eitm(&["list-presets"], None);
    assert!(o.status.success());
    let all = stdout(&o);
    assert!(data_rows(&all).len() >= 17);
    assert!(all.contains("fig6pa") && all.contains("Fig. 6'(a)"));
    assert!(all.contains("omega_da (fig7a)"));

    let flag = eitm(&["--list-presets"], None);
    assert_eq!(stdout(&flag), all);
}

#[test]
fn list_presets_by_model() {
    let o = eitm(&["list-presets", "--model", "three-level"], None);
    assert!(o.status.success());
    let rows = data_rows(&stdout(&o)).into_iter().map(str::to_owned).collect::<Vec<_>>();
    assert_eq!(rows.len(), 13);
    for r in &rows {
        assert!(["fig5", "fig6", "fig7"].iter().any(|p| r.starts_with(p)), "{r}");
    }
}

#[test]
fn list_presets_empty_match() {
    let o = eitm(&["list-presets", "--match", "nothing-like-this"], None);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "");
}
