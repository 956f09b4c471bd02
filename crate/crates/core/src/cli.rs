//! Command front end shared by the `fibspec` binary and the tests.
//!
//! Every command produces one [`OutputRecord`], rendered as JSON with sorted
//! keys and 17 significant digits (CSV for `roots --format csv`).
//!
//! Exit codes: `0` success, `1` verification failure, `2` usage error.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::charpoly::{CharPolynomial, ROOTS_TOL};
use crate::error::{Error, Result};
use crate::invasion::{grid_scan, minimize_speed, InvasionModel, Kernel, TabulatedKernel};
use crate::operators::{f_power_norm, nonclosedness_demo, rational_to_f64, OperatorSpec, SeqVector};
use crate::sequences::{norm_of_power, GenFibSequence};
use crate::spectra::{self, classify, ROOT_TOL};

pub const SEED_ENV: &str = "FIBSPEC_SEED";

const EXIT_OK: i32 = 0;
const EXIT_FAIL: i32 = 1;
const EXIT_USAGE: i32 = 2;

const RESOLVENT_K: usize = 200;
const DENSE_SIZE: usize = 150;
const DENSE_COMPARE: usize = 20;
const RESIDUAL_TOL: f64 = 1e-9;
const DENSE_TOL: f64 = 1e-7;
const ROOT_EXCLUSION: f64 = 0.05;
const FIB_CHECK_MAX_K: usize = 200;

#[derive(Debug, Parser)]
#[command(name = "fibspec", version, about = "Spectra of generalized Fibonacci operators on l1")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyArg {
    #[value(name = "F", alias = "f")]
    F,
    #[value(name = "G", alias = "g")]
    G,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RootsFormat {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelArg {
    Gaussian,
    Laplace,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Identities,
    Resolvent,
    Nonclosed,
    All,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a complex number against the spectrum of F_n or G_n.
    Spectrum {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        n: usize,
        /// Required for family G.
        #[arg(long)]
        rho: Option<f64>,
        /// Complex number `a`, `a+bi`, `a-bi` or `bi`.
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, default_value_t = ROOT_TOL)]
        tol: f64,
    },
    /// All roots of the characteristic polynomial, flagged by point-spectrum membership.
    Roots {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long, value_enum, default_value_t = RootsFormat::Json)]
        format: RootsFormat,
        #[arg(long, default_value_t = ROOTS_TOL)]
        tol: f64,
    },
    /// Exact term f^(n)_k, optionally with identity cross-checks.
    Fib {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        check: bool,
    },
    /// Minimal invasion speed for the five-day latency model.
    Invasion {
        #[arg(long, value_enum, required_unless_present = "kernel_file", conflicts_with = "kernel_file")]
        kernel: Option<KernelArg>,
        /// Two-column CSV `s,M` with strictly increasing s; header optional.
        #[arg(long)]
        kernel_file: Option<PathBuf>,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        /// Multiplier in rho(s) = const * M(s). Set it explicitly; 1 is only a placeholder.
        #[arg(long = "const", default_value_t = 1.0)]
        constant: f64,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        /// Points in the validation grid scan.
        #[arg(long, default_value_t = 10_000)]
        grid: usize,
    },
    /// Run a property suite with a deterministic seed.
    Verify {
        #[arg(long, value_enum, default_value_t = Suite::All)]
        suite: Suite,
        /// Overridden by the FIBSPEC_SEED environment variable when set.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of random cases per randomized check.
        #[arg(long, default_value_t = 200)]
        budget: usize,
    },
}

/// Result of one command.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputRecord {
    pub command: String,
    pub inputs: BTreeMap<String, Value>,
    pub results: Value,
    pub metadata: Value,
}

impl OutputRecord {
    fn new(command: &str, inputs: Value, results: Value, tolerances: Value) -> Self {
        let inputs = match inputs {
            Value::Object(map) => map.into_iter().collect(),
            _ => BTreeMap::new(),
        };
        Self {
            command: command.to_string(),
            inputs,
            results,
            metadata: json!({ "version": env!("CARGO_PKG_VERSION"), "tolerances": tolerances }),
        }
    }

    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("record is serializable");
        let mut out = String::new();
        write_json(&value, 0, &mut out);
        out.push('\n');
        out
    }
}

/// A finished command: record, optional CSV rendering and exit code.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub record: OutputRecord,
    pub csv: Option<String>,
    pub exit_code: i32,
}

impl Outcome {
    fn ok(record: OutputRecord) -> Self {
        Self { record, csv: None, exit_code: EXIT_OK }
    }

    pub fn render(&self) -> String {
        self.csv.clone().unwrap_or_else(|| self.record.to_json())
    }
}

/// Float with 17 significant digits; non-finite values become strings.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "\"nan\"".into()
    } else if x > 0.0 {
        "\"inf\"".into()
    } else {
        "\"-inf\"".into()
    }
}

fn num(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        Value::String(format_float(x).trim_matches('"').to_string())
    }
}

fn write_json(v: &Value, indent: usize, out: &mut String) {
    let pad = |level: usize| "  ".repeat(level);
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => out.push_str(&u.to_string()),
            (_, Some(i)) => out.push_str(&i.to_string()),
            _ => out.push_str(&format_float(n.as_f64().unwrap_or(f64::NAN))),
        },
        Value::String(s) => out.push_str(&serde_json::to_string(s).expect("string")),
        Value::Array(items) if items.is_empty() => out.push_str("[]"),
        Value::Array(items) => {
            out.push_str("[\n");
            for (i, item) in items.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                write_json(item, indent + 1, out);
                out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push_str("{\n");
            for (i, key) in keys.iter().enumerate() {
                out.push_str(&pad(indent + 1));
                out.push_str(&serde_json::to_string(key).expect("key"));
                out.push_str(": ");
                write_json(&map[key.as_str()], indent + 1, out);
                out.push_str(if i + 1 < keys.len() { ",\n" } else { "\n" });
            }
            out.push_str(&pad(indent));
            out.push('}');
        }
    }
}

/// Parses `a`, `a+bi`, `a-bi`, `bi`, `i`, `-i` (`j` is accepted for `i`).
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Input(format!("cannot parse complex number '{text}'"));
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix('i').or_else(|| s.strip_suffix('j')) else {
        return s.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| matches!(bytes[i], b'+' | b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re_part, im_part) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("0", body),
    };
    let re = re_part.parse::<f64>().map_err(|_| bad())?;
    let im = match im_part {
        "" | "+" => 1.0,
        "-" => -1.0,
        other => other.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(Complex64::new(re, im))
}

fn complex_value(z: Complex64) -> Value {
    json!({ "re": num(z.re), "im": num(z.im) })
}

fn operator_spec(family: FamilyArg, n: usize, rho: Option<f64>) -> Result<OperatorSpec> {
    match (family, rho) {
        (FamilyArg::F, None) => OperatorSpec::f(n),
        (FamilyArg::F, Some(_)) => Err(Error::Input("--rho applies to family G only".into())),
        (FamilyArg::G, Some(rho)) => OperatorSpec::g(n, rho),
        (FamilyArg::G, None) => Err(Error::Input("family G needs --rho".into())),
    }
}

fn family_inputs(family: FamilyArg, n: usize, rho: Option<f64>) -> Value {
    let name = match family {
        FamilyArg::F => "F",
        FamilyArg::G => "G",
    };
    json!({ "family": name, "n": n, "rho": rho.map(num) })
}

pub fn cmd_spectrum(family: FamilyArg, n: usize, rho: Option<f64>, lambda: &str, tol: f64) -> Result<Outcome> {
    let spec = operator_spec(family, n, rho)?;
    let z = parse_complex(lambda)?;
    let verdict = classify(&spec, z, tol)?;
    let mut inputs = family_inputs(family, n, rho);
    inputs["lambda"] = complex_value(z);
    let witness = match &verdict.witness {
        None => Value::Null,
        Some(spectra::Witness::EigenvectorHead(head)) => {
            json!({ "eigenvector_head": head.iter().map(|&c| complex_value(c)).collect::<Vec<_>>() })
        }
        Some(spectra::Witness::ResolventResidual(r)) => json!({ "resolvent_residual": num(*r) }),
    };
    let results = json!({
        "lambda": complex_value(verdict.lambda),
        "part": serde_json::to_value(verdict.part).expect("part"),
        "boundary_flag": verdict.boundary_flag,
        "witness": witness,
    });
    Ok(Outcome::ok(OutputRecord::new("spectrum", inputs, results, json!({ "tol": num(tol) }))))
}

pub fn cmd_roots(family: FamilyArg, n: usize, rho: Option<f64>, format: RootsFormat, tol: f64) -> Result<Outcome> {
    let spec = operator_spec(family, n, rho)?;
    let poly: CharPolynomial = spec.charpoly();
    let roots = poly.all_roots(tol)?;
    let point = poly.point_spectrum(tol)?;
    let member = |z: Complex64| point.members.iter().any(|m| (m - z).norm() <= 1e-9 * (1.0 + z.norm()));
    let on_circle = |z: Complex64| point.boundary.iter().any(|m| (m - z).norm() <= 1e-9 * (1.0 + z.norm()));

    let rows: Vec<(Complex64, bool, bool)> =
        roots.all().into_iter().map(|z| (z, member(z), on_circle(z))).collect();
    let mut results = json!({
        "dominant": num(roots.dominant),
        "residual_bound": num(roots.residual_bound),
        "degree": poly.degree(),
        "roots": rows.iter().map(|&(z, inside, boundary)| json!({
            "re": num(z.re),
            "im": num(z.im),
            "modulus": num(z.norm()),
            "in_point_spectrum": inside,
            "unit_circle": boundary,
        })).collect::<Vec<_>>(),
    });
    if family == FamilyArg::G && n >= 2 {
        if let Ok(report) = poly.root_count_report(tol) {
            results["root_count"] = json!({
                "rho_0": num(report.rho_0),
                "lambda_1": num(report.lambda_1),
                "regime": serde_json::to_value(report.regime).expect("regime"),
                "interior_roots": report.interior_roots.iter().map(|&r| num(r)).collect::<Vec<_>>(),
            });
        }
    }
    let mut inputs = family_inputs(family, n, rho);
    inputs["format"] = json!(match format {
        RootsFormat::Json => "json",
        RootsFormat::Csv => "csv",
    });
    let record = OutputRecord::new("roots", inputs, results, json!({ "tol": num(tol) }));
    let csv = (format == RootsFormat::Csv).then(|| {
        let mut text = String::from("re,im,modulus,in_point_spectrum\n");
        for (z, inside, _) in &rows {
            text.push_str(&format!(
                "{},{},{},{}\n",
                format_float(z.re),
                format_float(z.im),
                format_float(z.norm()),
                inside
            ));
        }
        text
    });
    Ok(Outcome { record, csv, exit_code: EXIT_OK })
}

pub fn cmd_fib(n: usize, k: usize, check: bool) -> Result<Outcome> {
    let mut seq = GenFibSequence::new(n)?;
    let value = seq.term(k)?;
    let mut results = json!({ "value": value.to_string() });
    let mut exit_code = EXIT_OK;
    if check {
        let (sum, rhs) = seq.prefix_sum_identity(k)?;
        let prefix_ok = sum == rhs;
        let mut checks = json!({
            "prefix_sum": { "pass": prefix_ok, "sum": sum.to_string(), "shifted_term_minus_one": rhs.to_string() },
        });
        let mut all_ok = prefix_ok;
        if k > n {
            let identity = norm_of_power(n, k)?;
            let entry = if k <= FIB_CHECK_MAX_K {
                let matrix = f_power_norm(n, k)?;
                let pass = matrix == identity;
                all_ok &= pass;
                json!({ "pass": pass, "identity": identity.to_string(), "matrix_power": matrix.to_string() })
            } else {
                json!({ "pass": Value::Null, "identity": identity.to_string(), "skipped": "k too large for the matrix power" })
            };
            checks["norm_of_power"] = entry;
        }
        checks["all_pass"] = json!(all_ok);
        results["checks"] = checks;
        if !all_ok {
            exit_code = EXIT_FAIL;
        }
    }
    let record = OutputRecord::new("fib", json!({ "n": n, "k": k, "check": check }), results, json!({}));
    Ok(Outcome { record, csv: None, exit_code })
}

pub fn cmd_invasion(model: InvasionModel, tol: f64, grid: usize) -> Result<Outcome> {
    let kernel_name = match &model.kernel {
        Kernel::Gaussian => "gaussian",
        Kernel::Laplace => "laplace",
        Kernel::Custom(_) => "custom",
    };
    let inputs = json!({
        "kernel": kernel_name,
        "sigma": num(model.sigma),
        "const": num(model.constant),
        "grid": grid,
    });
    let tolerances = json!({ "tol": num(tol), "grid_slack": num(RESIDUAL_TOL) });
    let (lo, hi) = model.domain();
    match minimize_speed(&model, tol) {
        Ok(r) => {
            let scan_hi = if hi.is_finite() { hi } else { 4.0 * r.bracket.1.max(1.0) + 1.0 };
            let (grid_s, grid_v) = grid_scan(&model, lo, scan_hi, grid.max(1));
            let pass = grid_v >= r.v_star - RESIDUAL_TOL;
            let results = json!({
                "v_star": num(r.v_star),
                "s_star": num(r.s_star),
                "lambda_at_s": num(r.lambda_at_s),
                "iterations": r.iterations,
                "bracket": [num(r.bracket.0), num(r.bracket.1)],
                "bracket_width": num(r.bracket.1 - r.bracket.0),
                "s_hat": num(hi),
                "warnings": r.warnings,
                "grid_validation": {
                    "pass": pass,
                    "range": [num(lo), num(scan_hi)],
                    "grid_min": num(grid_v),
                    "grid_argmin": num(grid_s),
                    "gap": num(grid_v - r.v_star),
                },
            });
            let record = OutputRecord::new("invasion", inputs, results, tolerances);
            Ok(Outcome { record, csv: None, exit_code: if pass { EXIT_OK } else { EXIT_FAIL } })
        }
        Err(Error::NoInteriorMinimum { s, value, v_star }) => {
            let results = json!({
                "warning": {
                    "kind": "no_interior_minimum",
                    "edge_s": num(s),
                    "edge_value": num(value),
                    "bracketed_value": num(v_star),
                },
                "s_hat": num(hi),
            });
            let record = OutputRecord::new("invasion", inputs, results, tolerances);
            Ok(Outcome { record, csv: None, exit_code: EXIT_FAIL })
        }
        Err(e) => Err(e),
    }
}

#[derive(Debug, Default)]
struct Tally {
    passed: usize,
    failed: usize,
}

impl Tally {
    fn record(&mut self, ok: bool) {
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
    }

    fn to_value(&self) -> Value {
        json!({ "passed": self.passed, "failed": self.failed })
    }
}

fn suite_identities(rng: &mut ChaCha8Rng, budget: usize) -> Result<(Value, bool)> {
    let mut prefix = Tally::default();
    for n in 1..=8 {
        let mut seq = GenFibSequence::new(n)?;
        for k in 1..=200 {
            let (a, b) = seq.prefix_sum_identity(k)?;
            prefix.record(a == b);
        }
    }
    let mut random_prefix = Tally::default();
    for _ in 0..budget {
        let n = rng.gen_range(1..=8);
        let k = rng.gen_range(1..=500);
        let (a, b) = GenFibSequence::new(n)?.prefix_sum_identity(k)?;
        random_prefix.record(a == b);
    }
    let mut norms = Tally::default();
    for n in 1..=4 {
        for k in n + 1..=16 {
            norms.record(f_power_norm(n, k)? == norm_of_power(n, k)?);
        }
    }
    let ok = prefix.failed + random_prefix.failed + norms.failed == 0;
    let value = json!({
        "prefix_sum_exhaustive": prefix.to_value(),
        "prefix_sum_random": random_prefix.to_value(),
        "norm_of_power": norms.to_value(),
        "pass": ok,
    });
    Ok((value, ok))
}

/// One random resolvent case: `(residual / ‖y‖₁, dense gap)`.
fn resolvent_case(rng: &mut ChaCha8Rng, family: FamilyArg) -> Result<(f64, f64)> {
    let spec = match family {
        FamilyArg::F => OperatorSpec::f(rng.gen_range(1..=6))?,
        FamilyArg::G => OperatorSpec::g(rng.gen_range(2..=6), rng.gen_range(0.1..5.0))?,
    };
    let roots = spec.charpoly().all_roots(ROOTS_TOL)?.all();
    let lambda = loop {
        let r = rng.gen_range(1.2..4.0);
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        let z = Complex64::from_polar(r, theta);
        if roots.iter().all(|w| (w - z).norm() > ROOT_EXCLUSION) {
            break z;
        }
    };
    let support = rng.gen_range(1..=10);
    let y = SeqVector::new((0..support).map(|_| rng.gen_range(-1.0..1.0)).collect());
    let sol = match family {
        FamilyArg::F => spectra::resolvent_apply_f(spec.n, lambda, &y, RESOLVENT_K, ROOT_TOL)?,
        FamilyArg::G => {
            spectra::resolvent_apply_g(spec.n, spec.rho, lambda, &y, RESOLVENT_K, ROOT_TOL)?
        }
    };
    let dense = spectra::compare_with_dense(&spec, &sol, &y, DENSE_SIZE, DENSE_COMPARE)?;
    Ok((sol.residual / y.norm1().max(f64::MIN_POSITIVE), dense))
}

fn suite_resolvent(rng: &mut ChaCha8Rng, budget: usize) -> Result<(Value, bool)> {
    let mut families = serde_json::Map::new();
    let mut ok = true;
    for family in [FamilyArg::F, FamilyArg::G] {
        let mut tally = Tally::default();
        let (mut worst_res, mut worst_dense) = (0f64, 0f64);
        for _ in 0..budget {
            let (res, dense) = resolvent_case(rng, family)?;
            worst_res = worst_res.max(res);
            worst_dense = worst_dense.max(dense);
            tally.record(res <= RESIDUAL_TOL && dense <= DENSE_TOL);
        }
        ok &= tally.failed == 0;
        let name = if family == FamilyArg::F { "F" } else { "G" };
        families.insert(
            name.into(),
            json!({
                "cases": tally.to_value(),
                "worst_relative_residual": num(worst_res),
                "worst_dense_gap": num(worst_dense),
            }),
        );
    }
    families.insert("pass".into(), json!(ok));
    Ok((Value::Object(families), ok))
}

fn suite_nonclosed() -> Result<(Value, bool)> {
    let report = nonclosedness_demo(5, 2.0, 20)?;
    let mut ok = true;
    let rows: Vec<Value> = report
        .rows
        .iter()
        .map(|row| {
            let expect = BigRational::new(BigInt::from(1), BigInt::from(row.m));
            let pass = row.preimage_norm == expect && row.gap_to_limit == expect;
            ok &= pass;
            json!({
                "m": row.m,
                "preimage_norm": row.preimage_norm.to_string(),
                "image_norm": row.image_norm.to_string(),
                "gap_to_limit": row.gap_to_limit.to_string(),
                "gap_float": num(rational_to_f64(&row.gap_to_limit)),
                "pass": pass,
            })
        })
        .collect();
    let value = json!({
        "n": report.n,
        "rho": num(report.rho),
        "limit_mismatch": num(report.limit_mismatch),
        "rows": rows,
        "pass": ok,
    });
    Ok((value, ok))
}

pub fn cmd_verify(suite: Suite, seed: u64, budget: usize) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut results = serde_json::Map::new();
    let mut ok = true;
    if matches!(suite, Suite::Identities | Suite::All) {
        let (v, pass) = suite_identities(&mut rng, budget)?;
        results.insert("identities".into(), v);
        ok &= pass;
    }
    if matches!(suite, Suite::Resolvent | Suite::All) {
        let (v, pass) = suite_resolvent(&mut rng, budget)?;
        results.insert("resolvent".into(), v);
        ok &= pass;
    }
    if matches!(suite, Suite::Nonclosed | Suite::All) {
        let (v, pass) = suite_nonclosed()?;
        results.insert("nonclosed".into(), v);
        ok &= pass;
    }
    results.insert("pass".into(), json!(ok));
    let suite_name = serde_json::to_value(format!("{suite:?}").to_lowercase()).expect("name");
    let record = OutputRecord::new(
        "verify",
        json!({ "suite": suite_name, "seed": seed, "budget": budget }),
        Value::Object(results),
        json!({ "residual": num(RESIDUAL_TOL), "dense": num(DENSE_TOL), "root_exclusion": num(ROOT_EXCLUSION) }),
    );
    Ok(Outcome { record, csv: None, exit_code: if ok { EXIT_OK } else { EXIT_FAIL } })
}

/// Seed from `FIBSPEC_SEED` if set, otherwise the flag value.
pub fn effective_seed(flag: u64, env: Option<&str>) -> Result<u64> {
    match env {
        None => Ok(flag),
        Some(text) => text
            .trim()
            .parse()
            .map_err(|_| Error::Input(format!("{SEED_ENV} must be an unsigned integer, got '{text}'"))),
    }
}

/// Executes a parsed command.
pub fn execute(command: Command) -> Result<Outcome> {
    match command {
        Command::Spectrum { family, n, rho, lambda, tol } => cmd_spectrum(family, n, rho, &lambda, tol),
        Command::Roots { family, n, rho, format, tol } => cmd_roots(family, n, rho, format, tol),
        Command::Fib { n, k, check } => cmd_fib(n, k, check),
        Command::Invasion { kernel, kernel_file, sigma, constant, tol, grid } => {
            let kernel = match (kernel, kernel_file) {
                (_, Some(path)) => {
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
                    Kernel::Custom(TabulatedKernel::from_csv(&text)?)
                }
                (Some(KernelArg::Gaussian), None) => Kernel::Gaussian,
                (Some(KernelArg::Laplace), None) => Kernel::Laplace,
                (None, None) => return Err(Error::Input("need --kernel or --kernel-file".into())),
            };
            cmd_invasion(InvasionModel::new(kernel, sigma, constant)?, tol, grid)
        }
        Command::Verify { suite, seed, budget } => {
            let env = std::env::var(SEED_ENV).ok();
            cmd_verify(suite, effective_seed(seed, env.as_deref())?, budget)
        }
    }
}

fn error_record(command: &str, err: &Error) -> OutputRecord {
    let kind = match err {
        Error::Domain(_) => "domain",
        Error::NonConvergence { .. } => "non_convergence",
        Error::Truncation(_) => "truncation",
        Error::NotAnEigenvalue { .. } => "not_an_eigenvalue",
        Error::SingularResolvent(_) => "singular_resolvent",
        Error::OutsideResolventSet(_) => "outside_resolvent_set",
        Error::NoInteriorMinimum { .. } => "no_interior_minimum",
        Error::Input(_) => "input",
    };
    OutputRecord::new(
        command,
        json!({}),
        json!({ "error": { "kind": kind, "message": err.to_string() } }),
        json!({}),
    )
}

fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::NonConvergence { .. } | Error::Truncation(_) | Error::NoInteriorMinimum { .. } => EXIT_FAIL,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (program name first), runs the command and writes its output.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = sink.write_all(text.as_bytes());
            return code;
        }
    };
    let name = match &cli.command {
        Command::Spectrum { .. } => "spectrum",
        Command::Roots { .. } => "roots",
        Command::Fib { .. } => "fib",
        Command::Invasion { .. } => "invasion",
        Command::Verify { .. } => "verify",
    };
    match execute(cli.command) {
        Ok(outcome) => {
            let _ = out.write_all(outcome.render().as_bytes());
            outcome.exit_code
        }
        Err(e) => {
            let _ = out.write_all(error_record(name, &e).to_json().as_bytes());
            exit_code_for(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run(std::iter::once("fibspec").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap())
    }

    #[test]
    fn complex_grammar() {
        assert_eq!(parse_complex("1.0").unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(parse_complex("0.5+0.0i").unwrap(), Complex64::new(0.5, 0.0));
        assert_eq!(parse_complex("-1-2i").unwrap(), Complex64::new(-1.0, -2.0));
        assert_eq!(parse_complex("2.5i").unwrap(), Complex64::new(0.0, 2.5));
        assert_eq!(parse_complex("-i").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("1e-3+2E+1i").unwrap(), Complex64::new(1e-3, 20.0));
        assert_eq!(parse_complex("3 - 4i").unwrap(), Complex64::new(3.0, -4.0));
        assert!(parse_complex("abc").is_err());
        assert!(parse_complex("").is_err());
    }

    #[test]
    fn float_format_has_17_digits() {
        assert_eq!(format_float(1.0), "1.0000000000000000e0");
        assert_eq!(format_float(f64::INFINITY), "\"inf\"");
        let v: f64 = format_float(0.1).parse().unwrap();
        assert_eq!(v, 0.1);
    }

    #[test]
    fn json_keys_sorted() {
        let rec = OutputRecord::new("x", json!({ "b": 1, "a": 2 }), json!({ "z": 0.5, "y": [] }), json!({}));
        let text = rec.to_json();
        assert!(text.find("\"a\"").unwrap() < text.find("\"b\"").unwrap());
        assert!(text.find("\"y\"").unwrap() < text.find("\"z\"").unwrap());
        let parsed: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed["results"]["z"], json!(0.5));
    }

    #[test]
    fn seed_env_overrides_flag() {
        assert_eq!(effective_seed(7, None).unwrap(), 7);
        assert_eq!(effective_seed(7, Some("11")).unwrap(), 11);
        assert!(effective_seed(7, Some("x")).is_err());
    }

    #[test]
    fn usage_errors_exit_two() {
        assert_eq!(run_args(&["spectrum", "--family", "F"]).0, 2);
        assert_eq!(run_args(&["spectrum", "--family", "G", "--n", "2", "--lambda", "3"]).0, 2);
        assert_eq!(run_args(&["spectrum", "--family", "F", "--n", "1", "--lambda", "zz"]).0, 2);
        assert_eq!(run_args(&["bogus"]).0, 2);
        assert_eq!(run_args(&["--help"]).0, 0);
    }
}
