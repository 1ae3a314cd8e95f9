use std::fs;
use std::process::{Command, Output};

fn zrsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zrsim"))
        .args(args)
        .env_remove("ZRSIM_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Parses CSV output into (header, rows); fields never contain commas here.
fn csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect::<Vec<_>>());
    let header = lines.next().unwrap();
    (header, lines.collect())
}

fn field<'a>(header: &[String], row: &'a [String], name: &str) -> &'a str {
    let k = header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"));
    &row[k]
}

#[test]
fn solve_user_symmetric_split() {
    let text = stdout(&zrsim(&["solve-user", "--p", "0.35", "--c", "4", "--config", "SS"]));
    assert!(text.contains("theta1  2\n") && text.contains("theta2  2\n"), "{text}");
    assert!(text.contains("u       2.19722458"), "{text}");

    let (h, rows) = csv(&stdout(&zrsim(&["solve-user", "--format", "csv"])));
    assert_eq!(h, ["config", "theta1", "theta2", "u"]);
    assert_eq!(rows.len(), 4);
    assert_eq!(field(&h, &rows[0], "theta1"), "1.85714286");
    assert_eq!(field(&h, &rows[1], "theta1"), "3.28571429");
}

#[test]
fn dynamics_converges_to_ss() {
    let args = [
        "dynamics",
        "--p",
        "0.35",
        "--c",
        "4",
        "--t1",
        "3",
        "--t2",
        "3",
        "--a1",
        "5",
        "--a2",
        "4",
        "--max-rounds",
        "100",
        "--format",
        "csv",
    ];
    let (h, rows) = csv(&stdout(&zrsim(&args)));
    assert_eq!(rows.len(), 1);
    let row = &rows[0];
    assert_eq!(field(&h, row, "outcome"), "converged");
    assert_eq!((field(&h, row, "config1"), field(&h, row, "config2")), ("SS", "SS"));
    assert!(field(&h, row, "rounds").parse::<usize>().unwrap() <= 8);
}

#[test]
fn thresholds_report_both_quantities() {
    let (h, rows) = csv(&stdout(&zrsim(&[
        "thresholds",
        "--p",
        "0.35",
        "--c",
        "4",
        "--t1",
        "3",
        "--t2",
        "3",
        "--rho",
        "0.1",
        "--format",
        "csv",
    ])));
    let row = &rows[0];
    assert_eq!(field(&h, row, "branch"), "SN");
    assert_eq!(field(&h, row, "a_sn"), "0.805");
    let a_s: f64 = field(&h, row, "a_s").parse().unwrap();
    assert!((a_s - 0.517078455).abs() < 1e-8, "{a_s}");

    let human = stdout(&zrsim(&["thresholds", "--rho", "0.1"]));
    assert!(
        human.contains("a_s = 0.517078455") && human.contains("a_sn = 0.805"),
        "{human}"
    );
}

#[test]
fn verify_accepts_printed_dynamics_states() {
    let rates = ["0.3", "1.1", "2.5", "4", "6.7", "10"];
    let pairs = rates.iter().flat_map(|a1| rates.iter().map(move |a2| (*a1, *a2)));
    for (a1, a2) in pairs.chain([("6", "0.6"), ("8", "7.9")]) {
        let (h, rows) = csv(&stdout(&zrsim(&[
            "dynamics", "--a1", a1, "--a2", a2, "--format", "csv",
        ])));
        let row = &rows[0];
        if field(&h, row, "outcome") != "converged" {
            continue;
        }
        let out = zrsim(&[
            "verify",
            "--a1",
            a1,
            "--a2",
            a2,
            "--q1",
            field(&h, row, "q1"),
            "--m1",
            field(&h, row, "config1"),
            "--q2",
            field(&h, row, "q2"),
            "--m2",
            field(&h, row, "config2"),
            "--format",
            "csv",
        ]);
        let (vh, checks) = csv(&stdout(&out));
        for check in &checks[..2] {
            assert_eq!(field(&vh, check, "passed"), "true", "({a1}, {a2}): {check:?}");
        }
    }
}

#[test]
fn verify_rejects_non_equilibrium() {
    let out = zrsim(&[
        "verify", "--a1", "5", "--a2", "0.5", "--q1", "3", "--m1", "SS", "--q2", "3", "--m2", "SS",
    ]);
    let text = stdout(&out);
    assert!(text.starts_with("not a system equilibrium"), "{text}");
    assert!(text.contains("CP2 gains"), "{text}");
}

#[test]
fn validation_errors_exit_2() {
    let cases: [(&[&str], &str); 5] = [
        (&["solve-user", "--p", "-1"], "`p`"),
        (&["dynamics", "--t1", "0.5"], "t1"),
        (&["sweep-ray"], "--rho"),
        (&["sweep-ray", "--rho", "1.5"], "rho"),
        (&["solve-user", "--utility", "custom", "--exponent", "1.5"], "exponent"),
    ];
    for (args, needle) in cases {
        let out = zrsim(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(needle), "{args:?}: {err}");
    }
    assert_eq!(zrsim(&["sweep-map", "--threads", "0"]).status.code(), Some(2));
    assert_eq!(
        zrsim(&["verify", "--q1", "-1", "--m1", "NN", "--q2", "0", "--m2", "NN"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(zrsim(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn io_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.toml");
    let out = zrsim(&["solve-user", "--config-file", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let target = dir.path().join("no/such/dir/out.csv");
    let out = zrsim(&["solve-user", "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn config_file_sits_between_flags_and_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.toml");
    fs::write(&path, "[model]\np = 0.5\nc = 4.0\n\n[sweep]\nrho = 0.1\ngrid = 4\n").unwrap();
    let cfg = path.to_str().unwrap();

    let (h, rows) = csv(&stdout(&zrsim(&[
        "solve-user",
        "--config",
        "NN",
        "--config-file",
        cfg,
        "--format",
        "csv",
    ])));
    assert_eq!(field(&h, &rows[0], "theta1"), "1");
    let (h, rows) = csv(&stdout(&zrsim(&[
        "solve-user",
        "--config",
        "NN",
        "--config-file",
        cfg,
        "--p",
        "0.35",
        "--format",
        "csv",
    ])));
    assert_eq!(field(&h, &rows[0], "theta1"), "1.85714286");

    // rho and grid come from the file
    let (_, rows) = csv(&stdout(&zrsim(&["sweep-ray", "--config-file", cfg, "--format", "csv"])));
    assert_eq!(rows.len(), 12);
    let (_, rows) = csv(&stdout(&zrsim(&[
        "sweep-ray",
        "--config-file",
        cfg,
        "--grid",
        "5",
        "--format",
        "csv",
    ])));
    assert_eq!(rows.len(), 15);

    fs::write(&path, "[model]\nprice = 0.5\n").unwrap();
    let out = zrsim(&["solve-user", "--config-file", cfg]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("map.csv");
    let out = zrsim(&[
        "sweep-map",
        "--grid",
        "6",
        "--format",
        "csv",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success() && out.stdout.is_empty());
    let text = fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("a1,a2,label,rounds,q1,q2\n"));
    assert_eq!(text.lines().count(), 37);
}

#[test]
fn output_is_deterministic() {
    let args = ["sweep-map", "--grid", "20", "--format", "csv"];
    let base = zrsim(&args).stdout;
    assert_eq!(base, zrsim(&args).stdout);
    for threads in ["1", "3"] {
        let out = Command::new(env!("CARGO_BIN_EXE_zrsim"))
            .args(args)
            .env("ZRSIM_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(out.stdout, base, "ZRSIM_THREADS={threads}");
    }
}

#[test]
fn json_lines_output() {
    let text = stdout(&zrsim(&[
        "sweep-single-isp",
        "--rho",
        "0.8",
        "--grid",
        "4",
        "--format",
        "json-lines",
    ]));
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 8);
    assert!(
        lines[0].starts_with("{\"a\":2.5,\"mode\":\"single_isp\",\"config1\":\"SS\""),
        "{}",
        lines[0]
    );
    let text = stdout(&zrsim(&["thresholds", "--rho", "0.1", "--format", "json-lines"]));
    assert!(
        text.contains("\"a_s\":0.517078455") && text.contains("\"branch\":\"SN\""),
        "{text}"
    );
}

#[test]
fn custom_utility_runs() {
    let (h, rows) = csv(&stdout(&zrsim(&[
        "solve-user",
        "--utility",
        "custom",
        "--exponent",
        "0.5",
        "--config",
        "SS",
        "--format",
        "csv",
    ])));
    assert_eq!(field(&h, &rows[0], "theta1"), "2");
    let expected = 2.0 * (3.0f64.sqrt() - 1.0) / 0.5;
    let u: f64 = field(&h, &rows[0], "u").parse().unwrap();
    assert!((u - expected).abs() < 1e-8, "{u} vs {expected}");
}
