use std::process::{Command, Output};

use serde_json::Value;

fn fibspec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fibspec"))
        .args(args)
        .env_remove("FIBSPEC_SEED")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let out = fibspec(args);
    let text = String::from_utf8(out.stdout).unwrap();
    let value = serde_json::from_str(&text).unwrap_or_else(|e| panic!("{e}: {text}"));
    (out.status.code().unwrap(), value)
}

#[test]
fn spectrum_parts() {
    let (code, v) = json(&["spectrum", "--family", "F", "--n", "1", "--lambda", "1.0"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["part"], "continuous");
    let (_, v) = json(&["spectrum", "--family", "F", "--n", "1", "--lambda", "0.5+0.0i"]);
    assert_eq!(v["results"]["part"], "residual");
    let (_, v) = json(&["spectrum", "--family", "G", "--n", "5", "--rho", "1", "--lambda", "3"]);
    assert_eq!(v["results"]["part"], "resolvent");
    let (_, v) = json(&["spectrum", "--family", "F", "--n", "1", "--lambda", "1.618033988749895"]);
    assert_eq!(v["results"]["part"], "point");
}

#[test]
fn roots_csv_and_json() {
    let out = fibspec(&["roots", "--family", "F", "--n", "1", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "re,im,modulus,in_point_spectrum");
    assert_eq!(lines.len(), 3);
    assert_eq!(lines.iter().filter(|l| l.ends_with(",true")).count(), 1);

    let (_, v) = json(&["roots", "--family", "F", "--n", "6"]);
    assert_eq!(v["results"]["roots"].as_array().unwrap().len(), 7);

    let (_, v) = json(&["roots", "--family", "G", "--n", "2", "--rho", "0.05"]);
    assert_eq!(v["results"]["root_count"]["regime"], "two_interior_roots");
    assert_eq!(v["results"]["root_count"]["interior_roots"].as_array().unwrap().len(), 2);
}

#[test]
fn fib_values_and_checks() {
    let (_, v) = json(&["fib", "--n", "1", "--k", "7"]);
    assert_eq!(v["results"]["value"], "13");
    let (code, v) = json(&["fib", "--n", "2", "--k", "9", "--check"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["value"], "13");
    assert_eq!(v["results"]["checks"]["all_pass"], true);
    let (_, v) = json(&["fib", "--n", "1", "--k", "100"]);
    assert_eq!(v["results"]["value"], "354224848179261915075");
}

#[test]
fn invasion_runs() {
    let (code, v) = json(&["invasion", "--kernel", "gaussian", "--sigma", "1", "--const", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["grid_validation"]["pass"], true);
    let loose = v["results"]["bracket_width"].as_f64().unwrap();

    let (_, v) = json(&["invasion", "--kernel", "laplace", "--sigma", "2", "--const", "1"]);
    assert!(v["results"]["s_star"].as_f64().unwrap() < 0.5);

    let (_, v) = json(&["invasion", "--kernel", "gaussian", "--sigma", "1", "--const", "1", "--tol", "1e-10"]);
    assert!(v["results"]["bracket_width"].as_f64().unwrap() < loose);
}

#[test]
fn invasion_kernel_file() {
    let dir = std::env::temp_dir().join(format!("fibspec-kernel-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("kernel.csv");
    let mut text = String::from("s,M\n");
    for i in 0..=200 {
        let s = i as f64 * 0.04;
        text.push_str(&format!("{s},{}\n", (0.5 * s * s).exp()));
    }
    std::fs::write(&path, text).unwrap();
    let (code, v) = json(&["invasion", "--kernel-file", path.to_str().unwrap()]);
    let (_, g) = json(&["invasion", "--kernel", "gaussian"]);
    std::fs::remove_dir_all(&dir).ok();
    assert_eq!(code, 0);
    let a = v["results"]["v_star"].as_f64().unwrap();
    let b = g["results"]["v_star"].as_f64().unwrap();
    assert!((a - b).abs() < 1e-5);
}

#[test]
fn verify_suites() {
    let (code, v) = json(&["verify", "--suite", "identities", "--seed", "7"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["identities"]["pass"], true);

    let (_, v) = json(&["verify", "--suite", "nonclosed"]);
    let rows = v["results"]["nonclosed"]["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 20);
    assert_eq!(rows[19]["gap_to_limit"], "1/20");

    let (code, v) = json(&["verify", "--suite", "resolvent", "--budget", "50"]);
    assert_eq!(code, 0);
    assert_eq!(v["results"]["resolvent"]["F"]["cases"]["passed"], 50);
    assert!(v["results"]["resolvent"]["G"]["worst_relative_residual"].as_f64().unwrap() < 1e-9);
}

#[test]
fn output_is_deterministic() {
    let a = fibspec(&["verify", "--suite", "all", "--seed", "3", "--budget", "20"]);
    let b = fibspec(&["verify", "--suite", "all", "--seed", "3", "--budget", "20"]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn env_seed_overrides_flag() {
    let run = |seed_flag: &str, env: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_fibspec"));
        cmd.args(["verify", "--suite", "resolvent", "--budget", "5", "--seed", seed_flag]);
        match env {
            Some(v) => cmd.env("FIBSPEC_SEED", v),
            None => cmd.env_remove("FIBSPEC_SEED"),
        };
        cmd.output().unwrap().stdout
    };
    assert_eq!(run("1", Some("9")), run("9", None));
    assert_ne!(run("1", None), run("9", None));
}

#[test]
fn exit_codes() {
    assert_eq!(fibspec(&["spectrum", "--family", "X", "--n", "1", "--lambda", "2"]).status.code(), Some(2));
    assert_eq!(fibspec(&["verify", "--suite", "bogus"]).status.code(), Some(2));
    let (code, v) = json(&["fib", "--n", "0", "--k", "3"]);
    assert_eq!(code, 2);
    assert_eq!(v["results"]["error"]["kind"], "domain");
}
