use std::process::{Command, Output};

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_radial-kahler"))
        .args(args)
        .env_remove("RADIAL_KAHLER_PRECISION_BITS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn gh_eval_prints_the_exact_table_entry() {
    let o = cli(&[
        "gh-eval",
        "--family",
        "epsilon:1:1:2",
        "--x",
        "3/4",
        "--hmax",
        "7",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v[7]["h"], 7);
    assert_eq!(v[7]["value"], "-12294367331/2373046875");
    assert_eq!(v[7]["sign"], "negative");
    assert_eq!(v[7]["backend"], "exact-rational");
    for key in [
        "family",
        "x",
        "h",
        "value",
        "sign",
        "backend",
        "precision_bits",
    ] {
        assert!(v[0].get(key).is_some(), "missing {key}");
    }
}

#[test]
fn output_is_byte_identical_across_runs() {
    let args = ["lu-coeffs", "--family", "epsilon:-1:1:2", "--x", "3/2"];
    assert_eq!(cli(&args).stdout, cli(&args).stdout);
    let args = [
        "reproduce-paper",
        "--item",
        "table-n2-h7",
        "--item",
        "simanca-embedding",
    ];
    assert_eq!(cli(&args).stdout, cli(&args).stdout);
}

#[test]
fn simanca_coefficients_vanish() {
    let o = cli(&["lu-coeffs", "--family", "simanca", "--dim", "2", "--x", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    for key in ["a2", "a3", "rho"] {
        let status = v[key]["status"].as_str().unwrap();
        assert!(
            status == "zero" || status == "zero-within-tolerance",
            "{key}: {status}"
        );
    }
    for key in [
        "R2",
        "Ric2",
        "DRho2",
        "sigma3Ric",
        "divdivRhoRic",
        "laplapRho",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn flat_scan_finds_nothing() {
    let o = cli(&[
        "scan", "--family", "flat", "--x-grid", "1/2:3:5", "--hmax", "6",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["hits"].as_array().unwrap().len(), 0);
    assert_eq!(v["points"], 6);
}

#[test]
fn resolvability_reports_the_obstruction() {
    let o = cli(&[
        "resolvability",
        "--family",
        "epsilon:-1:1:2",
        "--x",
        "101/100",
        "--lmax",
        "1",
        "--hmax",
        "4",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"]["kind"], "obstructed");
    assert_eq!(v["first_negative"]["l"], 0);
    assert_eq!(v["first_negative"]["h"], 3);
}

#[test]
fn csv_has_decimals_only() {
    let o = cli(&[
        "gh-eval",
        "--family",
        "epsilon:1:1:2",
        "--x",
        "3/4",
        "--hmax",
        "2",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("family,x,h,value,sign,backend,precision_bits")
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3);
    assert!(rows[2].contains(",0.75,2,"), "{}", rows[2]);
    assert!(!rows[2].contains("61/45"));
}

#[test]
fn table_format_aligns_columns() {
    let o = cli(&["embedding-check", "--format", "table"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("max_degree"));
    assert!(lines[1].starts_with("----------"));
    assert!(lines[2].contains("65"));
}

#[test]
fn ricci_flat_check_separates_families() {
    let o = cli(&[
        "ricci-flat-check",
        "--family",
        "epsilon:1:1:3",
        "--x",
        "1/2,1,2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["ricci_flat"], true);
    let o = cli(&["ricci-flat-check", "--family", "simanca", "--x", "1"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["ricci_flat"], false);
}

#[test]
fn usage_errors_exit_64() {
    let o = cli(&[
        "gh-eval",
        "--family",
        "epsilon:-1:1:2",
        "--x",
        "1",
        "--hmax",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&o.stderr).contains("x > 1"));
    assert_eq!(
        cli(&["gh-eval", "--family", "nope", "--x", "1", "--hmax", "3"])
            .status
            .code(),
        Some(64)
    );
    assert_eq!(cli(&["no-such-command"]).status.code(), Some(64));
    assert_eq!(
        cli(&["reproduce-paper", "--item", "bogus"]).status.code(),
        Some(64)
    );
    assert_eq!(
        cli(&[
            "lu-coeffs",
            "--family",
            "simanca",
            "--x",
            "1",
            "--jet-order",
            "2"
        ])
        .status
        .code(),
        Some(64)
    );
}

#[test]
fn exact_flag_refuses_big_floats() {
    // x = 2 needs (5/4)^(1/2) for n = 2, which the exact backend holds.
    let o = cli(&[
        "--exact",
        "gh-eval",
        "--family",
        "epsilon:1:1:2",
        "--x",
        "2",
        "--hmax",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    // n = 3 at x = 2 needs a cube root of 9/8 and a square root of 2 at once.
    let o = cli(&[
        "--exact",
        "lu-coeffs",
        "--family",
        "epsilon:1:1:3",
        "--x",
        "2",
    ]);
    assert_ne!(o.status.code(), Some(0));
}

#[test]
fn precision_environment_override() {
    let o = Command::new(env!("CARGO_BIN_EXE_radial-kahler"))
        .args([
            "gh-eval",
            "--family",
            "epsilon:1:1:3",
            "--x",
            "3/4",
            "--hmax",
            "1",
            "--print-config",
        ])
        .env("RADIAL_KAHLER_PRECISION_BITS", "512")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["precision_bits"], 512);
    assert_eq!(v["command"]["subcommand"], "gh-eval");
    assert_eq!(v["command"]["x"], "3/4");
}

#[test]
fn low_precision_reproduction_never_fails() {
    let o = cli(&["--precision-bits", "64", "reproduce-paper"]);
    let code = o.status.code();
    assert!(
        code == Some(0) || code == Some(2),
        "exit {code:?}\n{}",
        stdout(&o)
    );
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    for item in v["items"].as_array().unwrap() {
        assert_ne!(item["status"], "fail", "{item}");
    }
}

#[test]
fn out_writes_a_file() {
    let dir = std::env::temp_dir().join(format!("radial-kahler-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("gh.json");
    let o = cli(&[
        "gh-eval",
        "--family",
        "simanca",
        "--x",
        "1",
        "--hmax",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("\"h\": 2"));
    std::fs::remove_dir_all(&dir).unwrap();
}
