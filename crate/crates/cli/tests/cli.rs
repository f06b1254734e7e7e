use std::path::Path;
use std::process::{Command, Output};

fn polydirich(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polydirich")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn norm_of_all_ones_grid() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("ones.csv");
    let g = polydirich(&["generate", "--family", "all_ones", "--deg", "1,1", "--output", path(&f)]);
    assert!(g.status.success());
    let o = polydirich(&["norm", path(&f), "--alpha", "0,0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "2.0");
    let j = polydirich(&["norm", path(&f), "--alpha", "-1,-1", "--integral", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&j.stdout).unwrap();
    assert_eq!(v["norm"], 1.5);
}

#[test]
fn kernel_then_eval_gives_szego_value() {
    let dir = tempfile::tempdir().unwrap();
    let k = dir.path().join("k.csv");
    let o = polydirich(&["kernel", "--alpha", "0,0", "--at", "0.5,0", "--deg", "64,64", "-o", path(&k)]);
    assert!(o.status.success());
    let e = polydirich(&["eval", path(&k), "--at", "0.5,0"]);
    let out = stdout(&e);
    let (re, im) = out.trim().split_once(',').unwrap();
    assert!((re.parse::<f64>().unwrap() - 4.0 / 3.0).abs() < 1e-12);
    assert_eq!(im.parse::<f64>().unwrap(), 0.0);
}

#[test]
fn negative_weights_and_opnorm() {
    let dir = tempfile::tempdir().unwrap();
    let z = dir.path().join("z.csv");
    std::fs::write(&z, "k,l,re,im\n1,0,1,0\n").unwrap();
    let o = polydirich(&["opnorm", path(&z), "--alpha", "-1,-1", "--beta", "-1,-1", "--deg", "6,6"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    // weights (k+1)^{-1}: the largest ratio sqrt((k+1)/(k+2)) sits at k = 5
    assert!((stdout(&o).trim().parse::<f64>().unwrap() - (6.0f64 / 7.0).sqrt()).abs() < 1e-10);
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "k,l,re,im\n0,0,abc,0\n").unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["norm", path(&bad), "--alpha", "0,0"],
        vec!["norm", "/nonexistent.csv", "--alpha", "0,0"],
        vec!["generate", "--family", "nope", "--deg", "2,2"],
        vec!["check", "nope"],
        vec!["kernel", "--alpha", "0,0", "--at", "1.5,0", "--deg", "4,4"],
        vec!["kernel", "--alpha", "0", "--at", "0.5,0", "--deg", "4,4"],
        vec!["check", "product_membership", "--param", "bogus=1"],
        vec!["frobnicate"],
    ];
    for args in cases {
        let o = polydirich(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let err = String::from_utf8_lossy(&o.stderr);
        assert!(!err.trim().is_empty(), "{args:?}");
    }
}

#[test]
fn check_exit_codes() {
    let pass = polydirich(&["check", "product_membership", "--no-timestamp"]);
    assert_eq!(pass.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&pass.stdout).unwrap();
    assert_eq!(v["verdict"], "pass");
    assert!(v.get("runtime_ms").is_none());
    // below the trend resolution gate the verdict is inconclusive, not a pass
    let low = polydirich(&["check", "proper_containment", "--param", "max_degree=64", "--format", "csv"]);
    assert_eq!(low.status.code(), Some(1));
    assert!(stdout(&low).contains("proper_containment,verdict,,inconclusive"));
}

#[test]
fn suite_output_is_reproducible_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("suite.toml");
    std::fs::write(
        &cfg,
        "checks = [\"d_in_hinf\", \"non_factoring\", \"slices_membership\"]\n[params.d_in_hinf]\nsamples = \"10\"\n",
    )
    .unwrap();
    let run = |threads: &str| polydirich(&["suite", "--config", path(&cfg), "--no-timestamp", "--threads", threads]);
    let a = run("1");
    let b = run("4");
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["summary"]["passed"], 3);
    assert!(v.get("generated_at").is_none());
}

#[test]
fn thread_count_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_polydirich"))
        .args(["check", "product_membership"])
        .env("POLYDIRICH_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}
