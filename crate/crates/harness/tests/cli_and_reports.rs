use std::fs;
use std::process::Command;

use dyadic_harness::config::{InequalityConfig, SharpnessConfig};
use dyadic_harness::{emit_report, run, ExperimentSpec, Format, HarnessError, SuiteConfig};

fn small_inequality() -> SuiteConfig {
    SuiteConfig::Inequality(InequalityConfig {
        instances: 40,
        ..Default::default()
    })
}

#[test]
fn seeds_change_rows_but_not_shape() {
    let a = run(&ExperimentSpec {
        seed: 1,
        config: small_inequality(),
    })
    .unwrap();
    let b = run(&ExperimentSpec {
        seed: 2,
        config: small_inequality(),
    })
    .unwrap();
    assert_eq!(a.rows.len(), b.rows.len());
    assert_ne!(a.csv_bytes(), b.csv_bytes());
    assert_eq!(a.provenance.config_sha256, b.provenance.config_sha256);
    assert_eq!(a.provenance.seed, 1);
}

#[test]
fn emit_writes_requested_formats() {
    let dir = tempfile::tempdir().unwrap();
    let spec = ExperimentSpec {
        seed: 0,
        config: SuiteConfig::Sharpness(SharpnessConfig {
            a_grid: vec![0.5, 0.3],
            target: 0.5,
            ..Default::default()
        }),
    };
    let report = run(&spec).unwrap();
    let written = emit_report(&report, dir.path(), None).unwrap();
    let names: Vec<_> = written
        .iter()
        .map(|p| p.file_name().unwrap().to_str().unwrap().to_string())
        .collect();
    assert_eq!(
        names,
        ["sharpness.csv", "sharpness_plot.csv", "sharpness.json"]
    );
    let plot = fs::read_to_string(dir.path().join("sharpness_plot.csv")).unwrap();
    assert!(plot.starts_with("a,m_a,lower_analytic,lower_concrete,upper,ratio\n"));
    assert_eq!(plot.lines().count(), 3);
    let back: dyadic_harness::ExperimentReport =
        serde_json::from_slice(&fs::read(dir.path().join("sharpness.json")).unwrap()).unwrap();
    assert_eq!(back.rows, report.rows);

    let only_json = tempfile::tempdir().unwrap();
    let written = emit_report(&report, only_json.path(), Some(Format::Json)).unwrap();
    assert_eq!(written.len(), 1);
}

#[test]
fn emit_reports_the_failing_path() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let report = run(&ExperimentSpec {
        seed: 0,
        config: small_inequality(),
    })
    .unwrap();
    let err = emit_report(&report, &blocker.join("sub"), None).unwrap_err();
    assert!(matches!(err, HarnessError::Io { .. }));
    assert!(err.to_string().contains("sub"), "{err}");
}

#[test]
fn invalid_config_is_rejected_before_running() {
    let spec = ExperimentSpec {
        seed: 0,
        config: SuiteConfig::Inequality(InequalityConfig {
            tol: -1.0,
            ..Default::default()
        }),
    };
    assert!(matches!(run(&spec), Err(HarnessError::Config(_))));
}

#[test]
fn cli_exit_codes_follow_the_report() {
    let bin = env!("CARGO_BIN_EXE_dyadic");
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.json");
    fs::write(&config, r#"{"a_grid": [0.5, 0.2], "target": 0.9}"#).unwrap();
    let out = dir.path().join("out");
    let ok = Command::new(bin)
        .args([
            "extremal-sweep",
            "--seed",
            "3",
            "--jobs",
            "2",
            "--format",
            "csv",
        ])
        .arg("--config")
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(
        ok.status.success(),
        "{}",
        String::from_utf8_lossy(&ok.stdout)
    );
    assert!(out.join("sharpness.csv").exists());
    assert!(!out.join("sharpness.json").exists());

    // The first grid point only reaches about 0.85.
    fs::write(&config, r#"{"a_grid": [0.5], "target": 0.99}"#).unwrap();
    let fail = Command::new(bin)
        .arg("extremal-sweep")
        .arg("--config")
        .arg(&config)
        .output()
        .unwrap();
    assert_eq!(fail.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&fail.stdout).contains("FAIL"));

    fs::write(&config, r#"{"a_grid": [1.5]}"#).unwrap();
    let bad = Command::new(bin)
        .arg("extremal-sweep")
        .arg("--config")
        .arg(&config)
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn shipped_configs_parse() {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/configs");
    let pairs = [
        ("inequality.json", dyadic_harness::Suite::Inequality),
        ("sharpness.json", dyadic_harness::Suite::Sharpness),
        ("bellman.json", dyadic_harness::Suite::Bellman),
        ("delta.json", dyadic_harness::Suite::Delta),
        ("triple_norm.json", dyadic_harness::Suite::TripleNorm),
        ("lorentz.json", dyadic_harness::Suite::Lorentz),
        ("allocation.json", dyadic_harness::Suite::Allocation),
    ];
    for (file, suite) in pairs {
        let text = fs::read_to_string(format!("{dir}/{file}")).unwrap();
        let config = SuiteConfig::from_json(suite, &text).unwrap();
        config.validate().unwrap();
        assert_eq!(
            config,
            SuiteConfig::default_for(suite),
            "{file} should spell out the defaults"
        );
    }
}
