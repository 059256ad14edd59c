use std::path::Path;
use std::process::{Command, Output};

use proptest::prelude::*;
use qfim_cli::config::{Control, Format, Mode, Probe, Scenario};
use qfim_cli::RunConfig;
use serde_json::Value;

fn qfim(dir: &Path, config: Option<&str>, args: &[&str]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_qfim"));
    if let Some(text) = config {
        let path = dir.join("run.json");
        std::fs::write(&path, text).unwrap();
        cmd.arg("--config").arg(path);
    }
    cmd.args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn report_defaults_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = qfim(dir.path(), None, &["report"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["dim"], 3);
    assert_eq!(v["qfim"].as_array().unwrap().len(), 9);
}

#[test]
fn invalid_configs_exit_two_with_code() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (r#"{"n": 0}"#, "report", "E_SEGMENTS"),
        (r#"{"t": 0}"#, "report", "E_TIME"),
        (r#"{"t": -1.5}"#, "curves", "E_TIME"),
        (r#"{"probe": {"pure": [1, 1, 0]}}"#, "report", "E_BLOCH"),
        (r#"{"n_values": []}"#, "sweep-alpha", "E_GRID"),
        (r#"{"alpha_points": 0}"#, "sweep-alpha", "E_GRID"),
        (
            r#"{"scenario": "generic", "columns": [[1,0,0],[0,1,0],[0,0,1],[1,1,1]], "point": [0,0,0,0]}"#,
            "report",
            "E_DIM",
        ),
        (r#"{"b": -1}"#, "report", "E_FIELD"),
        (r#"{"bogus": 1}"#, "report", "E_PARSE"),
        ("not json", "verify", "E_PARSE"),
    ];
    for (config, sub, code) in cases {
        let out = qfim(dir.path(), Some(config), &[sub]);
        assert_eq!(out.status.code(), Some(2), "{config}");
        assert!(stderr(&out).contains(code), "{config}: {}", stderr(&out));
        assert!(stdout(&out).is_empty());
    }
}

#[test]
fn missing_config_file_exits_two() {
    let out = Command::new(env!("CARGO_BIN_EXE_qfim"))
        .args(["--config", "/nonexistent/run.json", "report"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("E_IO"));
}

#[test]
fn verify_passes_and_fails_on_zero_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let ok = qfim(dir.path(), None, &["verify", "--samples", "40"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stdout(&ok));
    let bad = qfim(
        dir.path(),
        Some(r#"{"tolerance_scale": 0}"#),
        &["verify", "--samples", "40"],
    );
    assert_eq!(bad.status.code(), Some(1));
    assert!(stdout(&bad).contains("FAIL"));
}

#[test]
fn outputs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        vec!["verify", "--seed", "7", "--samples", "30"],
        vec!["sweep-alpha"],
        vec!["curves"],
        vec!["report"],
    ] {
        let a = qfim(dir.path(), None, &args);
        let b = qfim(dir.path(), None, &args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("sweep.csv");
    let out = qfim(
        dir.path(),
        None,
        &["sweep-alpha", "--out", target.to_str().unwrap()],
    );
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).is_empty());
    let text = std::fs::read_to_string(target).unwrap();
    assert!(text.starts_with("N,alpha,uncontrolled_max,controlled_limit,gap\n"));
    assert!(!text.contains('\r'));
}

#[test]
fn non_finite_values_are_strings_in_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = qfim(
        dir.path(),
        Some(r#"{"theta": 0, "n_max": 3, "format": "json"}"#),
        &["curves"],
    );
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    for row in rows {
        assert_eq!(row["dphi"], Value::String("inf".into()));
        assert!(row["dB"].is_number());
    }
}

fn finite() -> impl Strategy<Value = f64> {
    -1e6..1e6f64
}

fn arb_config() -> impl Strategy<Value = RunConfig> {
    let probe = prop_oneof![
        Just(Probe::Entangled),
        [finite(), finite(), finite()].prop_map(Probe::Pure),
    ];
    let control = prop_oneof![
        Just(Control::None),
        prop::collection::vec(finite(), 0..4).prop_map(Control::OptimalNegation),
        [finite(), finite(), finite()].prop_map(Control::Custom),
    ];
    (
        (
            prop_oneof![Just(Scenario::Generic), Just(Scenario::Magnetometry)],
            finite(),
            finite(),
            finite(),
            [finite(), finite(), finite()],
            prop::collection::vec([finite(), finite(), finite()], 0..4),
            prop::collection::vec(finite(), 0..4),
        ),
        (
            finite(),
            any::<u64>(),
            prop::collection::vec(any::<u64>(), 0..5),
            any::<u64>(),
            probe,
            control,
            prop_oneof![Just(Mode::Merged), Just(Mode::SegmentProduct)],
        ),
        (
            0usize..10_000,
            finite(),
            finite(),
            prop_oneof![
                Just(None),
                Just(Some(Format::Csv)),
                Just(Some(Format::Json))
            ],
            any::<u64>(),
            0usize..100_000,
            finite(),
        ),
    )
        .prop_map(
            |(
                (scenario, b, theta, phi, base, columns, point),
                (t, n, n_values, n_max, probe, control, composition_mode),
                (alpha_points, x_norm, dx_norm, format, seed, samples, tolerance_scale),
            )| RunConfig {
                scenario,
                b,
                theta,
                phi,
                base,
                columns,
                point,
                t,
                n,
                n_values,
                n_max,
                probe,
                control,
                composition_mode,
                alpha_points,
                x_norm,
                dx_norm,
                format,
                seed,
                samples,
                tolerance_scale,
            },
        )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn config_round_trips(cfg in arb_config()) {
        let text = cfg.to_json();
        let back = RunConfig::from_json(&text).unwrap();
        prop_assert_eq!(&back, &cfg);
        prop_assert_eq!(back.to_json(), text);
    }
}
