use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hochloop"))
        .args(args)
        .env_remove("HOCHLOOP_CAP")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// `(degree, dim)` pairs of a TSV table.
fn dims(out: &str) -> Vec<(i64, usize)> {
    out.lines()
        .filter(|l| l.starts_with(|c: char| c.is_ascii_digit() || c == '-'))
        .map(|l| {
            let mut f = l.split('\t');
            (f.next().unwrap().parse().unwrap(), f.next().unwrap().parse().unwrap())
        })
        .collect()
}

fn dim_column(out: &str) -> Vec<usize> {
    dims(out).into_iter().map(|d| d.1).collect()
}

#[test]
fn hh_of_files() {
    let o = run(&["hh", &data("dual_numbers.alg")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(dim_column(&stdout(&o)), vec![2, 1, 1, 1, 1]);

    let o = run(&["hh", &data("trivial.alg")]);
    assert_eq!(dim_column(&stdout(&o)), vec![1, 0, 0, 0, 0]);

    let o = run(&["hh", &data("sphere.alg")]);
    assert_eq!(dims(&stdout(&o)), vec![(-4, 1), (-3, 1), (-2, 1), (-1, 1), (0, 1)]);

    let o = run(&["--field", "F2", "hh", &data("dual_numbers.alg")]);
    assert_eq!(dim_column(&stdout(&o)), vec![2; 5]);
}

#[test]
fn input_errors_exit_2() {
    let dir = std::env::temp_dir().join(format!("hochloop-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.alg");
    std::fs::write(&bad, "flavor commutative\ngen x two\n").unwrap();
    let o = run(&["hh", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bad.alg:2:"), "{}", stderr(&o));

    let o = run(&["hh", &data("missing.alg")]);
    assert_eq!(o.status.code(), Some(2));

    let o = run(&["--field", "F4", "hh", &data("dual_numbers.alg")]);
    assert_ne!(o.status.code(), Some(0));

    let o = run(&["loop", &data("torus.facets")]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn corrupted_differential_exits_1() {
    let o = run(&["hh", &data("corrupted.alg")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("d^2"), "{}", stderr(&o));
}

#[test]
fn ohh_checks_pass() {
    for f in ["sphere.alg", "polynomial.alg"] {
        let o = run(&["ohh", &data(f)]);
        let out = stdout(&o);
        assert_eq!(o.status.code(), Some(0), "{f}: {out}{}", stderr(&o));
        assert!(out.contains("PASS\tplus-normalization-bijection"), "{out}");
        assert!(out.contains("PASS\tsplitting"), "{out}");
        assert!(!out.contains("FAIL"), "{out}");
    }
}

#[test]
fn loop_spaces() {
    let o = run(&["loop", &data("point.facets")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(dim_column(&stdout(&o))[0], 1);

    let o = run(&["loop", "--space", "minimal-s2", "--max-level", "3", "--max-degree", "3", "--model", &data("sphere.alg")]);
    let out = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{out}{}", stderr(&o));
    assert!(out.contains("PASS\tagreement"), "{out}");

    let o = run(&["loop", &data("boundary_tetrahedron.facets"), "--model", &data("sphere.alg")]);
    let out = stdout(&o);
    assert_eq!(o.status.code(), Some(0), "{out}{}", stderr(&o));
    assert!(out.contains("PASS\tagreement"), "{out}");
}

#[test]
fn size_cap_exits_3() {
    let o = run(&["--cap", "1000", "loop", &data("boundary_tetrahedron.facets"), "--max-level", "3"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("cap 1000"), "{}", stderr(&o));

    let o = Command::new(env!("CARGO_BIN_EXE_hochloop"))
        .args(["loop", &data("boundary_tetrahedron.facets"), "--max-level", "3"])
        .env("HOCHLOOP_CAP", "500")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn barratt_eccles() {
    for n in ["1", "2", "3"] {
        let o = run(&["bar", "--arity", n, "--max-degree", "5"]);
        let out = stdout(&o);
        assert_eq!(o.status.code(), Some(0), "{out}");
        assert!(out.contains("PASS\tacyclic") && out.contains("PASS\tsigma-free"), "{out}");
    }
    let o = run(&["bar", "--arity", "3", "--max-degree", "3"]);
    let coinvariant: Vec<usize> = dim_column(&stdout(&o));
    assert_eq!(coinvariant, vec![1, 5, 25, 125]);
}

#[test]
fn selftest_and_fault_injection() {
    let o = run(&["selftest"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = run(&["selftest", "--inject-sign-fault"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("FAIL\thochschild.classical_dsquare"), "{}", stdout(&o));
}

#[test]
fn structured_output_is_json() {
    let o = run(&["--format", "structured", "hh", &data("dual_numbers.alg")]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["command"], "hh");
    let d: Vec<u64> = v["rows"].as_array().unwrap().iter().map(|r| r["dim"].as_u64().unwrap()).collect();
    assert_eq!(d, vec![2, 1, 1, 1, 1]);
}

#[test]
fn output_is_deterministic() {
    let args = ["ohh", &data("sphere.alg")];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    assert_eq!(run(&["selftest"]).stdout, run(&["selftest"]).stdout);
}
