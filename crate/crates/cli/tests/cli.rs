use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn depgap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_depgap"))
        .args(args)
        .env_remove("DEPGAP_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(
        o.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(o)).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Deterministic pseudo-random matrix without pulling an RNG crate into the tests.
fn write_random_matrix(path: &Path, genes: usize, cells: usize) {
    let mut state = 0x2545_f491_4f6c_dd1du64;
    let mut next = || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let mut text = String::from("gene");
    for c in 0..cells {
        text.push_str(&format!(",cell{c}"));
    }
    text.push('\n');
    let base: Vec<f64> = (0..cells).map(|_| next()).collect();
    for g in 0..genes {
        text.push_str(&format!("g{g}"));
        for b in &base {
            // every fifth gene shares a component so the matrix has structure
            let v = if g % 5 == 0 { b + 0.1 * next() } else { next() };
            text.push_str(&format!(",{v}"));
        }
        text.push('\n');
    }
    fs::write(path, text).unwrap();
}

const TOY: &str = "gene,c1,c2,c3,c4,c5,c6\na,1,2,3,4,5,6\nb,1,2,3,4,5,6\nc,6,1,5,2,4,3\n";

#[test]
fn measure_identical_rows_pearson_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("toy.csv");
    fs::write(&f, TOY).unwrap();
    let v = json(&depgap(&[
        "measure",
        "--input",
        p(&f),
        "--x-row",
        "a",
        "--y-row",
        "b",
        "--measure",
        "pearson",
    ]));
    assert_eq!(v["value"], 1.0);
    assert_eq!(v["measure"], "pearson");
    assert!(v["runtime_ms"].as_f64().unwrap() >= 0.0);
    assert!(v.get("t_used").is_none());
    // rows by index
    let w = json(&depgap(&[
        "measure",
        "--input",
        p(&f),
        "--x-row",
        "0",
        "--y-row",
        "1",
        "--measure",
        "pearson",
    ]));
    assert_eq!(w["value"], 1.0);
}

#[test]
fn measure_aldg_echoes_resolved_rule() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("lin.csv");
    fs::write(&f, "x,y\n").unwrap();
    let spec = dir.path().join("spec.json");
    fs::write(
        &spec,
        r#"{"family":"linear","noise_level":0.3,"n":300,"seed":4}"#,
    )
    .unwrap();
    stdout(&depgap(&["simulate", "--spec", p(&spec), "--out", p(&f)]));
    let v = json(&depgap(&[
        "measure",
        "--pairs",
        p(&f),
        "--measure",
        "aldg",
        "--threshold-rule",
        "auto",
    ]));
    assert_eq!(v["rule"], "asymptotic_norm");
    assert!(v["t_used"].as_f64().unwrap() > 0.0);
    let v = json(&depgap(&[
        "measure",
        "--pairs",
        p(&f),
        "--measure",
        "aldg",
        "--t",
        "0.05",
    ]));
    assert_eq!(v["rule"], "fixed");
    assert_eq!(v["t_used"], 0.05);
}

#[test]
fn usage_errors_exit_two() {
    let o = depgap(&["measure", "--pairs", "x.csv", "--measure", "bogus"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
    let o = depgap(&[
        "measure",
        "--pairs",
        "x.csv",
        "--measure",
        "pearson",
        "--threshold-rule",
        "auto",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = depgap(&["experiment", "nope"]);
    assert_eq!(o.status.code(), Some(2));
    let o = depgap(&["frobnicate"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = depgap(&[
        "measure",
        "--pairs",
        p(&dir.path().join("missing.csv")),
        "--measure",
        "pearson",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let f = dir.path().join("bad.csv");
    fs::write(&f, "gene,a,b,c\ng1,1,2,3\ng2,1,,3\n").unwrap();
    let o = depgap(&[
        "measure",
        "--input",
        p(&f),
        "--x-row",
        "g1",
        "--y-row",
        "g2",
        "--measure",
        "pearson",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("row 3") && err.contains("column 3"), "{err}");
    let z = dir.path().join("zero.csv");
    fs::write(&z, "gene,a,b,c\ng1,0,2,3\ng2,0,1,3\n").unwrap();
    let o = depgap(&[
        "measure",
        "--input",
        p(&z),
        "--transform",
        "log2cpm1",
        "--x-row",
        "g1",
        "--y-row",
        "g2",
        "--measure",
        "pearson",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("library size"));
}

#[test]
fn matrix_symmetric_and_thread_independent() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("expr.csv");
    write_random_matrix(&f, 50, 60);
    let out1 = dir.path().join("m1.csv");
    let out8 = dir.path().join("m8.csv");
    for (threads, out) in [("1", &out1), ("8", &out8)] {
        stdout(&depgap(&[
            "matrix",
            "--input",
            p(&f),
            "--measure",
            "aldg",
            "--threads",
            threads,
            "--out",
            p(out),
        ]));
    }
    let a = fs::read(&out1).unwrap();
    assert_eq!(a, fs::read(&out8).unwrap());
    assert_eq!(
        fs::read(dir.path().join("m1.csv.diagnostics.json")).unwrap(),
        fs::read(dir.path().join("m8.csv.diagnostics.json")).unwrap()
    );
    let text = String::from_utf8(a).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 51);
    assert_eq!(rows[0][0], "gene");
    assert_eq!(rows[0][1], "g0");
    for i in 1..=50 {
        assert_eq!(rows[i][0], rows[0][i]);
        for j in 1..=50 {
            assert_eq!(rows[i][j], rows[j][i]);
        }
    }
    let diag: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("m1.csv.diagnostics.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(diag["computed_pairs"], 50 * 49 / 2);
    assert_eq!(diag["failed_pairs"].as_array().unwrap().len(), 0);
    // structured genes (every fifth) depend on each other more than the rest
    let val = |i: usize, j: usize| rows[i + 1][j + 1].parse::<f64>().unwrap();
    assert!(val(0, 5) > val(1, 2));
}

#[test]
fn matrix_reports_failed_pairs() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("expr.tsv");
    fs::write(
        &f,
        "gene\ta\tb\tc\td\ng1\t1\t2\t3\t4\nflat\t5\t5\t5\t5\ng3\t4\t1\t3\t2\n",
    )
    .unwrap();
    let out = dir.path().join("m.csv");
    let saved = dir.path().join("saved.tsv");
    stdout(&depgap(&[
        "matrix",
        "--input",
        p(&f),
        "--measure",
        "pearson",
        "--out",
        p(&out),
        "--save-input",
        p(&saved),
    ]));
    assert_eq!(
        fs::read_to_string(&saved).unwrap(),
        fs::read_to_string(&f).unwrap()
    );
    let text = fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().nth(2).unwrap(), "flat,NA,NA,NA");
    assert_eq!(text.lines().nth(1).unwrap(), "g1,1,NA,-0.4");
    let diag: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("m.csv.diagnostics.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(diag["computed_pairs"], 1);
    assert_eq!(diag["failed_pairs"].as_array().unwrap().len(), 3);
    assert_eq!(diag["failed_pairs"][0]["row"], "g1");
    assert_eq!(diag["failed_pairs"][0]["column"], "flat");
}

#[test]
fn simulate_is_deterministic_and_seed_overridable() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    fs::write(
        &spec,
        r#"{"family":"sine","noise_level":0.2,"n":100,"seed":9,"params":{"freq":2}}"#,
    )
    .unwrap();
    let a = stdout(&depgap(&["simulate", "--spec", p(&spec)]));
    let b = stdout(&depgap(&["simulate", "--spec", p(&spec)]));
    assert_eq!(a, b);
    assert_eq!(a.lines().count(), 101);
    assert_eq!(a.lines().next(), Some("x,y"));
    let c = stdout(&depgap(&["simulate", "--spec", p(&spec), "--seed", "10"]));
    assert_ne!(a, c);
    let d = Command::new(env!("CARGO_BIN_EXE_depgap"))
        .args(["simulate", "--spec", p(&spec)])
        .env("DEPGAP_SEED", "10")
        .output()
        .unwrap();
    assert_eq!(stdout(&d), c);
    fs::write(
        &spec,
        r#"{"family":"nope","noise_level":0.2,"n":100,"seed":9}"#,
    )
    .unwrap();
    assert_eq!(
        depgap(&["simulate", "--spec", p(&spec)]).status.code(),
        Some(1)
    );
}

#[test]
fn permutation_test_on_simulated_line() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    fs::write(
        &spec,
        r#"{"family":"linear","noise_level":0.0,"n":200,"seed":1}"#,
    )
    .unwrap();
    let f = dir.path().join("lin.csv");
    stdout(&depgap(&["simulate", "--spec", p(&spec), "--out", p(&f)]));
    let v = json(&depgap(&[
        "test",
        "--pairs",
        p(&f),
        "--measure",
        "aldg",
        "--n-perms",
        "200",
        "--seed",
        "3",
    ]));
    assert_eq!(v["p_value"], 1.0 / 201.0);
    assert_eq!(v["n_perms"], 200);
    assert_eq!(v["seed"], 3);
    assert_eq!(v["measure"], "aldg");
}

#[test]
fn experiment_list_and_run() {
    let listed = stdout(&depgap(&["experiment", "list"]));
    let names: Vec<&str> = listed.lines().collect();
    assert_eq!(
        names,
        [
            "nonlinearity_grid",
            "noise_monotonicity",
            "mixture_accumulation",
            "power_suite",
            "threshold_comparison",
            "robustness",
            "timing"
        ]
    );
    let dir = tempfile::tempdir().unwrap();
    let (d1, d2) = (dir.path().join("a"), dir.path().join("b"));
    for (d, threads) in [(&d1, "1"), (&d2, "3")] {
        stdout(&depgap(&[
            "experiment",
            "mixture_accumulation",
            "--n",
            "60",
            "--trials",
            "2",
            "--seed",
            "7",
            "--threads",
            threads,
            "--out",
            p(d),
        ]));
    }
    for f in [
        "mixture_accumulation.csv",
        "mixture_accumulation.meta.json",
        "mixture_accumulation.svg",
    ] {
        assert_eq!(
            fs::read(d1.join(f)).unwrap(),
            fs::read(d2.join(f)).unwrap(),
            "{f}"
        );
    }
    assert!(d1.join("mixture_accumulation.timing.json").exists());
}
