use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use posdiff::families::{FamilyKind, FamilySpec};
use posdiff::opalg::OperatorDoc;
use posdiff::pipeline::Verification;
use posdiff::{DiffOp, Window};
use tempfile::TempDir;

fn posdiff(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_posdiff"))
        .args(args)
        .arg("--output")
        .arg(dir)
        .env_remove("POSDIFF_PRECISION")
        .output()
        .expect("spawn posdiff")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn reports(dir: &Path, prefix: &str) -> Vec<PathBuf> {
    let mut found: Vec<_> = fs::read_dir(dir)
        .map(|rd| rd.filter_map(|e| e.ok().map(|e| e.path())).collect())
        .unwrap_or_default();
    found.retain(|p| {
        let name = p.file_name().unwrap().to_string_lossy();
        name.starts_with(prefix) && name.ends_with(".jsonl")
    });
    found.sort();
    found
}

fn lines(path: &Path) -> Vec<String> {
    fs::read_to_string(path).unwrap().lines().map(str::to_owned).collect()
}

const GEOM: &[&str] = &["verify", "--family", "geom", "--g", "1", "--a", "2", "--beta", "1", "--window", "-8,8"];

#[test]
fn passing_verification_exits_zero_and_writes_one_record() {
    let dir = TempDir::new().unwrap();
    let out = posdiff(dir.path(), GEOM);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let files = reports(dir.path(), "verify-");
    assert_eq!(files.len(), 1);
    let record: serde_json::Value = serde_json::from_str(&lines(&files[0])[0]).unwrap();
    assert_eq!(record["command"], "verify");
    assert_eq!(record["passed"], true);
    assert_eq!(record["config"]["precision_bits"], 113);
    assert_eq!(record["config"]["window"], serde_json::json!([-8, 8]));
}

#[test]
fn existing_report_is_reused_unless_rerun() {
    let dir = TempDir::new().unwrap();
    assert_eq!(code(&posdiff(dir.path(), GEOM)), 0);
    let again = posdiff(dir.path(), GEOM);
    assert_eq!(code(&again), 0);
    assert!(String::from_utf8_lossy(&again.stdout).contains("existing"));
    let file = &reports(dir.path(), "verify-")[0];
    assert_eq!(lines(file).len(), 1);

    let mut rerun = GEOM.to_vec();
    rerun.push("--rerun");
    assert_eq!(code(&posdiff(dir.path(), &rerun)), 0);
    let recorded = lines(file);
    assert_eq!(recorded.len(), 2);
    assert_eq!(recorded[0], recorded[1]);
}

#[test]
fn report_name_ignores_the_output_directory() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    assert_eq!(code(&posdiff(a.path(), GEOM)), 0);
    assert_eq!(code(&posdiff(b.path(), GEOM)), 0);
    let (ra, rb) = (&reports(a.path(), "verify-")[0], &reports(b.path(), "verify-")[0]);
    assert_eq!(ra.file_name(), rb.file_name());
    let strip = |p: &Path| {
        let mut v: serde_json::Value = serde_json::from_str(&lines(p)[0]).unwrap();
        v["config"]["output_path"] = serde_json::Value::Null;
        v
    };
    assert_eq!(strip(ra), strip(rb));
}

#[test]
fn failed_check_exits_one_and_is_recorded() {
    let dir = TempDir::new().unwrap();
    let out = posdiff(dir.path(), &["verify", "--family", "trig", "--g", "1", "--r1", "1", "--window", "-8,8", "--tolerance", "1e-40"]);
    assert_eq!(code(&out), 1);
    let file = &reports(dir.path(), "verify-")[0];
    let record: serde_json::Value = serde_json::from_str(&lines(file)[0]).unwrap();
    assert_eq!(record["passed"], false);
}

#[test]
fn usage_errors_exit_two_without_a_report() {
    let dir = TempDir::new().unwrap();
    let cases: &[&[&str]] = &[
        &["verify", "--family", "trig", "--g", "0", "--r1", "1"],
        &["verify", "--family", "trig", "--g", "1"],
        &["verify", "--family", "poly", "--g", "1", "--a2", "0"],
        &["verify", "--family", "nosuch"],
        &["verify", "--family", "geom", "--a", "2", "--beta", "1", "--window", "5,-5"],
        &["verify", "--family", "geom", "--a", "2", "--beta", "1", "--precision", "40"],
        &["verify", "--family", "geom", "--a", "2"],
        &["lame", "--eps", "0.05"],
        &["frobnicate"],
    ];
    for args in cases {
        let out = posdiff(dir.path(), args);
        assert_eq!(code(&out), 2, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    assert!(reports(dir.path(), "").is_empty());
}

#[test]
fn help_exits_zero() {
    let dir = TempDir::new().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_posdiff")).arg("--help").current_dir(dir.path()).output().unwrap();
    assert_eq!(code(&out), 0);
}

#[test]
fn config_file_supplies_family_and_precision() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(
        &cfg,
        r#"{"precision_bits": 160, "window": [-6, 6], "family": {"kind": "geom", "g": 1, "params": {"a": "2", "beta": "1"}}}"#,
    )
    .unwrap();
    let out = posdiff(dir.path(), &["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let record: serde_json::Value = serde_json::from_str(&lines(&reports(dir.path(), "verify-")[0])[0]).unwrap();
    assert_eq!(record["config"]["precision_bits"], 160);
    assert_eq!(record["config"]["window"], serde_json::json!([-6, 6]));

    fs::write(&cfg, r#"{"family_name": "geom"}"#).unwrap();
    assert_eq!(code(&posdiff(dir.path(), &["verify", "--config", cfg.to_str().unwrap()])), 2);
}

#[test]
fn precision_comes_from_the_environment_unless_flagged() {
    let dir = TempDir::new().unwrap();
    let run = |env: &str, extra: &[&str]| {
        Command::new(env!("CARGO_BIN_EXE_posdiff"))
            .args(GEOM)
            .args(extra)
            .arg("--output")
            .arg(dir.path())
            .env("POSDIFF_PRECISION", env)
            .output()
            .unwrap()
    };
    assert_eq!(code(&run("128", &[])), 0);
    assert_eq!(code(&run("128", &["--precision", "200"])), 0);
    assert_eq!(code(&run("lots", &[])), 2);
    let bits: Vec<_> = reports(dir.path(), "verify-")
        .iter()
        .map(|p| serde_json::from_str::<serde_json::Value>(&lines(p)[0]).unwrap()["config"]["precision_bits"].clone())
        .collect();
    assert_eq!(bits.len(), 2);
    assert!(bits.contains(&serde_json::json!(128)));
    assert!(bits.contains(&serde_json::json!(200)));
}

#[test]
fn partner_writes_the_operator_json() {
    let dir = TempDir::new().unwrap();
    let out = posdiff(dir.path(), &["partner", "--family", "geom", "--g", "1", "--a", "2", "--beta", "1", "--window", "-6,6"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let report = &reports(dir.path(), "partner-")[0];
    let record: serde_json::Value = serde_json::from_str(&lines(report)[0]).unwrap();
    let name = record["result"]["attachments"][0].as_str().unwrap();
    let doc: OperatorDoc = serde_json::from_str(&fs::read_to_string(dir.path().join(name)).unwrap()).unwrap();
    assert_eq!(doc.order, 3);
    let op = DiffOp::from_doc(&doc).unwrap();

    let window = Window::new(-6, 6).unwrap();
    let v = Verification::run(&FamilySpec::new(FamilyKind::Geom, 1).with("a", 2.into()).with("beta", 1.into()), window, 1e-9).unwrap();
    let expected = v.partner.restrict(window).unwrap();
    assert!(op.sub(&expected).unwrap().sup_norm() <= 1e-25);
}
