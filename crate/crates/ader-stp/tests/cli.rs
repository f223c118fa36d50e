use std::fs;
use std::process::{Command, Output};

use ader_stp::dump::parse_tensor;
use ader_stp_core::predictor::flop_count;
use ader_stp_core::{LayoutSpec, StpConfig, Variant};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ader-stp"))
        .args(args)
        .output()
        .expect("spawn ader-stp")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv(text: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(str::to_owned).collect();
    let rows = lines.map(|l| l.split(',').map(str::to_owned).collect()).collect();
    (header, rows)
}

fn col(header: &[String], name: &str) -> usize {
    header
        .iter()
        .position(|h| h == name)
        .unwrap_or_else(|| panic!("no column {name}"))
}

#[test]
fn default_check_passes() {
    let o = run(&["check"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.contains("[PASS] N=8 m=9 equivalence aosoa"));
    assert!(!out.contains("[FAIL]"));
}

#[test]
fn order_one_check_passes() {
    let o = run(&["check", "--order", "1", "--pde", "demo"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn injected_bitflip_is_reported() {
    let o = run(&["check", "--order", "3", "--inject-fault", "d-bitflip"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("[FAIL] N=3 m=9 derivative"), "{}", stdout(&o));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["check", "--order", "5-3"][..],
        &["check", "--pde", "elastic", "--quantities", "4"],
        &["check", "--variant", "fastest"],
        &["bench", "--reps", "4"],
        &["convergence", "--pde", "elastic"],
        &["convergence", "--meshes", "9,3"],
        &["footprint", "--cache-bytes", "lots"],
        &["check", "--vec-width", "0"],
        &["frobnicate"],
    ] {
        assert_eq!(code(&run(args)), 2, "{args:?}");
    }
}

#[test]
fn check_csv_is_deterministic_per_seed() {
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name).to_str().unwrap().to_owned();
    for (name, seed) in [("a.csv", "7"), ("b.csv", "7"), ("c.csv", "8")] {
        let o = run(&[
            "check",
            "--order",
            "2-4",
            "--pde",
            "advection",
            "--quantities",
            "3",
            "--seed",
            seed,
            "--csv-out",
            &path(name),
        ]);
        assert_eq!(code(&o), 0);
    }
    let a = fs::read_to_string(path("a.csv")).unwrap();
    assert_eq!(a, fs::read_to_string(path("b.csv")).unwrap());
    assert_ne!(a, fs::read_to_string(path("c.csv")).unwrap());
    let (header, rows) = csv(&a);
    assert_eq!(header, ["suite", "N", "m", "variant", "error", "tolerance", "status"]);
    assert!(rows.iter().all(|r| r[6] == "pass"));
}

#[test]
fn check_dumps_parse_back() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert_eq!(code(&run(&["check", "--order", "3", "--dump-dir", d])), 0);
    let spec = LayoutSpec::aos(3, 9, 8).unwrap();
    let base = parse_tensor(
        &fs::read_to_string(dir.path().join("qavg_generic_N3.txt")).unwrap(),
        spec,
    )
    .unwrap();
    for v in ["log", "splitck", "aosoa"] {
        let t = parse_tensor(
            &fs::read_to_string(dir.path().join(format!("qavg_{v}_N3.txt"))).unwrap(),
            spec,
        )
        .unwrap();
        assert!(t.max_abs_diff(&base).unwrap() < 1e-12 * base.max_abs());
    }
}

#[test]
fn footprint_flags_first_exceedance() {
    let o = run(&["footprint"]);
    assert_eq!(code(&o), 0);
    let (h, rows) = csv(&stdout(&o));
    let first = |variant: &str| {
        rows.iter()
            .find(|r| r[col(&h, "variant")] == variant && r[col(&h, "first_exceedance")] == "yes")
            .map(|r| r[col(&h, "N")].parse::<usize>().unwrap())
    };
    assert_eq!(first("generic"), Some(6));
    assert!(first("splitck").is_none_or(|n| n > 6));
    assert_eq!(rows.len(), 4 * 8);

    let o = run(&[
        "footprint",
        "--cache-bytes",
        "inf",
        "--variant",
        "generic",
        "--order",
        "4-12",
    ]);
    let (h, rows) = csv(&stdout(&o));
    assert!(rows.iter().all(|r| r[col(&h, "exceeds_cache")] == "no"));
}

#[test]
fn bench_reports_every_variant_and_order() {
    let o = run(&[
        "bench",
        "--order",
        "2,3",
        "--elements",
        "4",
        "--steps",
        "2",
        "--workers",
        "2",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let (h, rows) = csv(&stdout(&o));
    assert_eq!(h.join(","), ader_stp::bench::HEADER.join(","));
    assert_eq!(rows.len(), 8);
    for r in &rows {
        let v: Variant = r[0].parse().unwrap();
        let n: usize = r[1].parse().unwrap();
        let config = StpConfig::new(n, 9, 8).unwrap();
        assert_eq!(
            r[col(&h, "flop_estimate")].parse::<u64>().unwrap(),
            flop_count(v, &config) * 8
        );
        assert!(r[col(&h, "wall_seconds")].parse::<f64>().unwrap() > 0.0);
        assert!(r[col(&h, "max_abs_diff_vs_generic")].parse::<f64>().unwrap() < 1e-12);
    }
}

#[test]
fn convergence_meets_design_order_and_ignores_worker_count() {
    let one = run(&["convergence", "--order", "2", "--variant", "splitck"]);
    let three = run(&["convergence", "--order", "2", "--variant", "splitck", "--workers", "3"]);
    assert_eq!(code(&one), 0);
    assert_eq!(stdout(&one), stdout(&three));
    let (h, rows) = csv(&stdout(&one));
    let order: f64 = rows[1][col(&h, "observed_order")].parse().unwrap();
    assert!(order >= 1.5, "{order}");
}

#[test]
fn zero_data_converges_exactly_and_dumps_fields() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = run(&[
        "convergence",
        "--order",
        "2",
        "--variant",
        "log",
        "--amplitude",
        "0",
        "--quantities",
        "2",
        "--field-out",
        d,
    ]);
    assert_eq!(code(&o), 0);
    let (h, rows) = csv(&stdout(&o));
    assert!(rows.iter().all(|r| r[col(&h, "l2_error")] == "0.0"));
    let field = fs::read_to_string(dir.path().join("field_log_N2_e3.txt")).unwrap();
    assert_eq!(field.lines().count(), 27 * 8);
    assert!(field.lines().all(|l| l.split(' ').count() == 5));
}

#[test]
fn blow_up_is_recorded_as_unstable() {
    let o = run(&[
        "convergence",
        "--order",
        "2",
        "--variant",
        "log",
        "--cfl",
        "5",
        "--t-end",
        "1",
    ]);
    assert_eq!(code(&o), 1);
    let (h, rows) = csv(&stdout(&o));
    assert!(rows.iter().all(|r| r[col(&h, "status")] == "unstable"));
}
