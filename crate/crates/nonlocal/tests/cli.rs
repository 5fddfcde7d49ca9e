use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use proptest::prelude::*;

use nonlocal::{Format, Grid, OptionValue, ScanSpec, Subcommand};
use nonlocal_core::bell::quantum_i_closed_form;

fn nonlocal(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nonlocal")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn column(csv: &str, name: &str) -> Vec<String> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let i = header.iter().position(|h| *h == name).unwrap();
    lines.map(|l| l.split(',').nth(i).unwrap().to_string()).collect()
}

#[test]
fn chained_scan_matches_closed_form() {
    let out = nonlocal(&["chained", "--grid", "n=2:64:63", "--param", "theta=pi"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let n = column(&text, "n");
    let i = column(&text, "i_value");
    assert_eq!(n.len(), 63);
    for (n, i) in n.iter().zip(&i) {
        let want = quantum_i_closed_form(n.parse().unwrap(), PI).unwrap();
        assert!((i.parse::<f64>().unwrap() - want).abs() < 1e-12);
    }
}

#[test]
fn interference_scan_has_full_fringes() {
    let out = nonlocal(&["interf", "--grid", "phi=0:2pi:101"]);
    assert!(out.status.success());
    let p: Vec<f64> = column(&stdout(&out), "p_plus").iter().map(|s| s.parse().unwrap()).collect();
    assert_eq!(p.len(), 101);
    assert_eq!(p[0], 1.0);
    assert_eq!(p[100], 1.0);
    assert!(p[50].abs() < 1e-15);
    for (k, v) in p.iter().enumerate() {
        let phi = 2.0 * PI * k as f64 / 100.0;
        assert!((v - 0.5 * (1.0 + phi.cos())).abs() < 1e-12);
    }
}

#[test]
fn csv_layout() {
    let text = stdout(&nonlocal(&["chained", "--grid", "n=2,3"]));
    assert!(!text.contains('\r'));
    let header = text.lines().next().unwrap();
    assert_eq!(header, "n,theta,visibility,i_value,closed_form,classification,strategy,error");
    let first = text.lines().nth(1).unwrap();
    assert!(first.starts_with("2,3.1415926535897931e0,"), "{first}");
}

#[test]
fn json_echoes_the_scan_file() {
    let out = nonlocal(&["extensions", "--param", "d=0.1", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["spec"]["subcommand"], "extensions");
    assert_eq!(v["rows"][0]["n"], 19);
    assert!(v["rows"][0]["error"].is_null());
}

#[test]
fn exit_codes() {
    assert_eq!(nonlocal(&["chained", "--grid", "n=2"]).status.code(), Some(0));
    // Row failure: enumeration bound.
    let out = nonlocal(&["chained", "--grid", "n=2,13", "--option", "model=lhv"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stdout(&out).lines().count(), 3);
    // Usage errors.
    assert_eq!(nonlocal(&["chained"]).status.code(), Some(2));
    assert_eq!(nonlocal(&["chained", "--grid", "q=1"]).status.code(), Some(2));
    assert_eq!(nonlocal(&["chained", "--grid", "n=2", "--bogus"]).status.code(), Some(2));
    assert_eq!(nonlocal(&["sample", "--param", "runs=10"]).status.code(), Some(2));
    assert_eq!(nonlocal(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(nonlocal(&["chained", "--grid", "n=2", "--tolerance", "-1"]).status.code(), Some(2));
}

#[test]
fn every_subcommand_takes_common_flags() {
    let dir = tempfile::tempdir().unwrap();
    for (sub, extra) in [
        ("interf", vec!["--param", "phi=0"]),
        ("unitarity", vec!["--param", "phi=0"]),
        ("franson", vec!["--option", "model=ideal", "--param", "phi=0"]),
        ("chained", vec!["--param", "n=2"]),
        ("extensions", vec!["--param", "d=0.5"]),
        ("sample", vec!["--param", "runs=100", "--seed", "1"]),
    ] {
        let path = dir.path().join(format!("{sub}.json"));
        let mut args = vec![sub, "--tolerance", "1e-9", "--format", "json", "--output", path.to_str().unwrap()];
        args.extend(extra);
        let out = nonlocal(&args);
        assert!(out.status.success(), "{sub}: {}", String::from_utf8_lossy(&out.stderr));
        let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(v["spec"]["tolerance"], 1e-9);
        assert_eq!(v["rows"].as_array().unwrap().len(), 1);
    }
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scan.toml");
    std::fs::write(
        &cfg,
        "subcommand = \"chained\"\n\n[grid]\nn = { start = 2, stop = 4, count = 3 }\n\n[options]\nmodel = \"suppressed\"\n",
    )
    .unwrap();
    let c = cfg.to_str().unwrap();
    let out = nonlocal(&["chained", "--config", c]);
    assert!(out.status.success());
    // Independent outcomes: every term is ½, so I = N.
    let i = column(&stdout(&out), "i_value");
    assert_eq!(i, vec!["2.0000000000000000e0", "3.0000000000000000e0", "4.0000000000000000e0"]);
    let out = nonlocal(&["chained", "--config", c, "--option", "model=pr_box", "--param", "n=5"]);
    let i = column(&stdout(&out), "i_value");
    assert_eq!(i, vec!["0.0000000000000000e0"]);
    // Subcommand mismatch.
    assert_eq!(nonlocal(&["interf", "--config", c]).status.code(), Some(2));
    // Unknown key.
    std::fs::write(&cfg, "subcommand = \"chained\"\nformat = \"csv\"\n[grid]\nn = [2]\n").unwrap();
    let out = nonlocal(&["chained", "--config", c]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("format"));
}

fn run_to(dir: &Path, name: &str, args: &[&str]) -> Vec<u8> {
    let path = dir.join(name);
    let mut all = args.to_vec();
    let p = path.to_str().unwrap().to_string();
    all.extend(["--output", &p]);
    assert!(nonlocal(&all).status.success());
    std::fs::read(path).unwrap()
}

#[test]
fn sample_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["sample", "--seed", "42", "--grid", "phi=0:pi:9", "--param", "runs=20000", "--option", "model=local"];
    let a = run_to(dir.path(), "a.csv", &[&args[..], &["--threads", "1"]].concat());
    let b = run_to(dir.path(), "b.csv", &[&args[..], &["--threads", "1"]].concat());
    let c = run_to(dir.path(), "c.csv", &[&args[..], &["--threads", "4"]].concat());
    assert_eq!(a, b);
    assert_eq!(a, c);
    let d = run_to(
        dir.path(),
        "d.csv",
        &["sample", "--seed", "43", "--grid", "phi=0:pi:9", "--param", "runs=20000", "--option", "model=local"],
    );
    assert_ne!(a, d);
}

#[test]
fn dumped_spec_reloads() {
    let out = nonlocal(&[
        "franson",
        "--option",
        "model=ideal",
        "--grid",
        "phi=0:pi:3",
        "--param",
        "visibility=0.5",
        "--dump-spec",
    ]);
    assert!(out.status.success());
    let spec = ScanSpec::from_toml(&stdout(&out)).unwrap();
    assert_eq!(spec.subcommand, Subcommand::Franson);
    assert_eq!(spec.grid["phi"], Grid::Range { start: 0.0, stop: PI, count: 3 });
    assert_eq!(spec.options["model"], OptionValue::Text("ideal".into()));
}

fn grid() -> impl Strategy<Value = Grid> {
    prop_oneof![
        prop::collection::vec(-1e6..1e6f64, 1..5).prop_map(Grid::Values),
        (-1e3..1e3f64, -1e3..1e3f64, 1usize..1000).prop_map(|(start, stop, count)| Grid::Range { start, stop, count }),
    ]
}

fn option_value() -> impl Strategy<Value = OptionValue> {
    prop_oneof![
        any::<bool>().prop_map(OptionValue::Bool),
        (-1e9..1e9f64).prop_map(OptionValue::Number),
        "[a-z_]{1,12}".prop_map(OptionValue::Text),
    ]
}

fn scan_spec() -> impl Strategy<Value = ScanSpec> {
    let sub = prop::sample::select(vec![
        Subcommand::Interf,
        Subcommand::Unitarity,
        Subcommand::Franson,
        Subcommand::Chained,
        Subcommand::Extensions,
        Subcommand::Sample,
    ]);
    (
        sub,
        prop::collection::vec(("[a-z][a-z_0-9]{0,8}", grid()), 0..4),
        prop::collection::vec(("[a-z][a-z_]{0,8}", option_value()), 0..3),
        prop::option::of(0u64..(1 << 62)),
        1e-15..1.0f64,
        prop::option::of("[a-z]{1,8}\\.(csv|json)"),
        any::<bool>(),
    )
        .prop_map(|(sub, grid, options, seed, tolerance, path, json)| {
            let mut s = ScanSpec::new(sub);
            s.grid.extend(grid);
            s.options.extend(options);
            s.seed = seed;
            s.tolerance = tolerance;
            s.output.path = path.map(Into::into);
            s.output.format = if json { Format::Json } else { Format::Csv };
            s
        })
}

proptest! {
    #[test]
    fn spec_round_trips_through_toml(spec in scan_spec()) {
        let text = spec.to_toml().unwrap();
        let back: ScanSpec = toml::from_str(&text).unwrap();
        prop_assert_eq!(back, spec);
    }
}
