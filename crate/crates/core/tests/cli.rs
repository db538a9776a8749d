use std::process::Command;

fn wb(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_wreathbench"))
        .args(args)
        .env_remove("WREATHBENCH_SEED")
        .output()
        .expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn every_suite_passes_with_defaults() {
    for suite in [
        "a-property",
        "ts-closed-form",
        "ts-sandwich",
        "kappa-identity",
        "r-map",
        "lin-indep",
        "lambda-sandwich",
        "equidist",
        "quotient-realizability",
    ] {
        let (code, out, err) = wb(&["verify", suite]);
        assert_eq!(code, 0, "{suite}: {out}{err}");
        assert!(out.starts_with("# tool: wreathbench "), "{suite}");
        assert!(out.contains(&format!("# command: verify {suite}")));
        assert!(out.trim_end().ends_with("# verdict: pass"), "{suite}");
    }
}

#[test]
fn help_and_version_exit_zero() {
    assert_eq!(wb(&["--help"]).0, 0);
    assert_eq!(wb(&["--version"]).0, 0);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(wb(&[]).0, 2);
    assert_eq!(wb(&["verify", "no-such-suite"]).0, 2);
    assert_eq!(wb(&["distortion", "--code", "d=4"]).0, 2);
    assert_eq!(wb(&["bound", "/nonexistent/table.txt"]).0, 2);
}

#[test]
fn malformed_bound_file_is_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("t.txt");
    std::fs::write(&p, "eta=0.5\nL=1\n2,x\n").unwrap();
    let (code, _, err) = wb(&["bound", p.to_str().unwrap()]);
    assert_eq!(code, 2, "{err}");
}

#[test]
fn sdp_budget_exhaustion_is_inconclusive() {
    let (code, _, err) = wb(&["distortion", "--code", "d=5", "dimc=3", "--budget-sdp", "4"]);
    assert_eq!(code, 3, "{err}");
}

#[test]
fn impossible_code_search_exits_three() {
    let (code, _, err) = wb(&["verify", "kappa-identity", "--d", "4", "--dimc", "4", "--floor", "3"]);
    assert_eq!(code, 3, "{err}");
}

#[test]
fn distortion_from_file_and_out_flag() {
    let dir = tempfile::tempdir().unwrap();
    let space = wreathbench::distortion::hamming_cube(2).unwrap();
    let metric = dir.path().join("c4.txt");
    std::fs::write(&metric, space.to_text()).unwrap();
    let out = dir.path().join("report.csv");
    let (code, stdout, err) = wb(&["distortion", "--file", metric.to_str().unwrap(), "--format", "csv", "--out", out.to_str().unwrap()]);
    assert_eq!(code, 0, "{err}");
    assert!(stdout.is_empty());
    let text = std::fs::read_to_string(out).unwrap();
    let row = text.lines().find(|l| !l.starts_with('#') && !l.starts_with("source")).unwrap();
    let upper: f64 = row.split(',').nth(3).unwrap().parse().unwrap();
    assert!((upper - 2f64.sqrt()).abs() < 1e-3, "{text}");
}

#[test]
fn bound_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("t.txt");
    let mut text = String::from("eta=0\nL=1\n");
    for n in 1..=10 {
        text.push_str(&format!("{},{}\n", 1u64 << n, n));
    }
    std::fs::write(&p, text).unwrap();
    let (code, out, _) = wb(&["bound", p.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.contains("# bound: 1\n"), "{out}");
}

#[test]
fn seed_and_budgets_are_recorded() {
    let (_, out, _) = wb(&["verify", "r-map", "--samples", "10", "--seed", "9", "--budget-tsp", "12"]);
    assert!(out.contains("# seed: 9\n"));
    assert!(out.contains("tsp=12"));
    let (_, env_out, _) = {
        let o = Command::new(env!("CARGO_BIN_EXE_wreathbench"))
            .args(["verify", "a-property"])
            .env("WREATHBENCH_SEED", "41")
            .output()
            .unwrap();
        (0, String::from_utf8_lossy(&o.stdout).into_owned(), ())
    };
    assert!(env_out.contains("# seed: 41\n"));
}

#[test]
fn equidist_uses_ball_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let (a, first, _) = wb(&["verify", "equidist", "--cache-dir", cache]);
    assert_eq!(a, 0);
    assert!(std::fs::read_dir(dir.path()).unwrap().count() > 0);
    let (b, second, _) = wb(&["verify", "equidist", "--cache-dir", cache]);
    assert_eq!(b, 0);
    let body = |t: &str| t.lines().filter(|l| !l.starts_with("# wall")).map(String::from).collect::<Vec<_>>();
    assert_eq!(body(&first), body(&second));
}
