//! End-to-end behavior of the `casimir` binary: exit codes, stream
//! separation, output determinism and format round-trips.

use std::process::{Command, Output};
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_casimir"))
        .args(args)
        .output()
        .expect("the casimir binary should spawn")
}

fn config_file(dir: &TempDir, text: &str) -> String {
    let path = dir.path().join("run.cfg");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn stderr(output: &Output) -> String {
    String::from_utf8(output.stderr.clone()).unwrap()
}

fn code(output: &Output) -> i32 {
    output.status.code().expect("no signal")
}

const HEADLINE: &str = "\
L = 100nm
Lx = 24um
Ly = 24um
a1a2 = 200nm2
lambda_C = 1.2um
material = plasma
lambda_P = 137nm
";

const FAST_PFA: &str = "\
L = 1um
Lx = 24um
Ly = 24um
a1a2 = 200nm2
lambda_C = 2.4um
material = perfect
method = pfa
";

#[test]
fn missing_config_file_is_a_usage_error() {
    let out = run(&["gk", "-c", "/nonexistent/run.cfg"]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
    assert!(stderr(&out).starts_with("error:"));
}

#[test]
fn config_errors_exit_two_and_name_the_line() {
    let dir = TempDir::new().unwrap();
    let cases = [
        ("L = 1um\nwavelength = 5um\n", "line 2: unknown key"),
        ("L = 1um\nL = 2um\n", "line 2: duplicate key"),
        ("", "missing required keys"),
        (
            "L = 1um\nLx = 24um\nLy = 24um\na1a2 = 200nm2\nlambda_C = 2.4um\n\
             material = perfect\nlambda_P = 137nm\n",
            "lambda_P meaningless for perfect mirrors",
        ),
        (
            "L = 1\nLx = 24um\nLy = 24um\na1a2 = 200nm2\nlambda_C = 2.4um\nmaterial = perfect\n",
            "unit suffix",
        ),
    ];
    for (text, needle) in cases {
        let out = run(&["epp", "-c", &config_file(&dir, text)]);
        assert_eq!(code(&out), 2, "config {text:?}");
        assert!(stderr(&out).contains(needle), "{:?} missing {needle:?}", stderr(&out));
    }
    let missing = run(&["epp", "-c", &config_file(&dir, "")]);
    for key in ["L", "Lx", "Ly", "lambda_C", "material", "a1", "a2"] {
        assert!(stderr(&missing).contains(key));
    }
}

#[test]
fn flag_misuse_exits_two() {
    let dir = TempDir::new().unwrap();
    let cfg = config_file(&dir, FAST_PFA);
    for args in [
        vec!["optimize", "-c", cfg.as_str()],
        vec!["landscape", "-c", &cfg, "--b-steps", "3"],
        vec!["sweep-k", "-c", &cfg, "--points", "1"],
        vec!["sweep-k", "-c", &cfg, "--k-min", "5e6", "--k-max", "1e6"],
    ] {
        let out = run(&args);
        assert_eq!(code(&out), 2, "{args:?}: {}", stderr(&out));
    }
}

#[test]
fn failed_computation_exits_one() {
    let dir = TempDir::new().unwrap();
    let cfg = config_file(
        &dir,
        "L = 1um\nLx = 24um\nLy = 24um\na1a2 = 200nm2\nlambda_C = 2.4um\n\
         material = plasma\nlambda_P = 1e-300m\n",
    );
    let out = run(&["gk", "-c", &cfg]);
    assert_eq!(code(&out), 1, "{}", stderr(&out));
    assert!(stderr(&out).starts_with("error:"));
    assert!(stdout(&out).is_empty());
}

#[test]
fn torque_max_reproduces_the_headline_number() {
    let dir = TempDir::new().unwrap();
    let out = run(&["torque-max", "-c", &config_file(&dir, HEADLINE)]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("method,theta_star_rad,tau_max_N_per_m"));
    let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(fields[0], "scattering");
    let theta_star: f64 = fields[1].parse().unwrap();
    let tau: f64 = fields[2].parse().unwrap();
    assert!((theta_star / (0.66 * 1.2e-6 / 24e-6) - 1.0).abs() < 0.01, "theta* {theta_star}");
    assert!((tau / 5.2e-7 - 1.0).abs() < 0.05, "tau {tau}");
}

#[test]
fn identical_runs_emit_identical_bytes() {
    let dir = TempDir::new().unwrap();
    let cfg = config_file(&dir, FAST_PFA);
    let args = ["landscape", "-c", cfg.as_str(), "--b-steps", "9", "--theta-steps", "9"];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
    assert!(!first.stdout.is_empty());
}

#[test]
fn timestamp_is_an_isolated_comment() {
    let dir = TempDir::new().unwrap();
    let cfg = config_file(&dir, FAST_PFA);
    let plain = run(&["energy", "-c", &cfg]);
    let stamped = run(&["--timestamp", "energy", "-c", &cfg]);
    let text = stdout(&stamped);
    let (first, rest) = text.split_once('\n').unwrap();
    assert!(first.starts_with("# generated unix "));
    assert_eq!(rest, stdout(&plain));
}

#[test]
fn output_path_file_matches_stdout() {
    let dir = TempDir::new().unwrap();
    let to_stdout = run(&["epp", "-c", &config_file(&dir, FAST_PFA)]);
    let target = dir.path().join("table.csv");
    let routed = format!("{FAST_PFA}output_path = {}\n", target.display());
    let to_file = run(&["epp", "-c", &config_file(&dir, &routed)]);
    assert_eq!(code(&to_file), 0, "{}", stderr(&to_file));
    assert!(to_file.stdout.is_empty());
    assert_eq!(std::fs::read(&target).unwrap(), to_stdout.stdout);
}

#[test]
fn json_echo_round_trips_to_identical_bytes() {
    let dir = TempDir::new().unwrap();
    let source = format!("{FAST_PFA}b = 300nm\ntheta = 0.2deg\noutput = json\n");
    let first = run(&["energy", "-c", &config_file(&dir, &source)]);
    assert_eq!(code(&first), 0, "{}", stderr(&first));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&first)).unwrap();
    let echo = &doc["config"];
    let num = |key: &str| echo[key].as_f64().unwrap();
    let mut rebuilt = format!(
        "L = {}m\nLx = {}m\nLy = {}m\na1 = {}m\na2 = {}m\nlambda_C = {}m\n\
         b = {}m\ntheta = {}rad\nmaterial = {}\nmethod = {}\nrel_tol = {}\noutput = json\n",
        num("L"),
        num("Lx"),
        num("Ly"),
        num("a1"),
        num("a2"),
        num("lambda_C"),
        num("b"),
        num("theta"),
        echo["material"].as_str().unwrap(),
        echo["method"].as_str().unwrap(),
        num("rel_tol"),
    );
    if let Some(lambda_p) = echo.get("lambda_P").and_then(|v| v.as_f64()) {
        rebuilt.push_str(&format!("lambda_P = {lambda_p}m\n"));
    }
    let second = run(&["energy", "-c", &config_file(&dir, &rebuilt)]);
    assert_eq!(code(&second), 0, "{}", stderr(&second));
    assert_eq!(stdout(&first), stdout(&second), "rebuilt config:\n{rebuilt}");
}

#[test]
fn csv_tables_keep_rfc4180_shape() {
    let dir = TempDir::new().unwrap();
    let cfg = config_file(&dir, FAST_PFA);
    let out = run(&["landscape", "-c", &cfg, "--b-steps", "9", "--theta-steps", "9"]);
    let text = stdout(&out);
    assert!(!text.contains('\r'));
    assert!(text.ends_with('\n'));
    let mut lines = text.lines();
    let header = lines.next().unwrap();
    assert_eq!(header, "b_m,theta_rad,delta_e_J_per_m2");
    let width = header.matches(',').count();
    let mut rows = 0;
    for line in lines {
        assert_eq!(line.matches(',').count(), width, "{line}");
        for field in line.split(',') {
            field.parse::<f64>().expect("numeric field");
        }
        rows += 1;
    }
    assert_eq!(rows, 81);
}

#[test]
fn sweep_rows_that_fail_become_comment_lines() {
    let dir = TempDir::new().unwrap();
    let cfg = config_file(
        &dir,
        "L = 1um\nLx = 24um\nLy = 24um\na1a2 = 200nm2\nlambda_C = 2.4um\n\
         material = plasma\nlambda_P = 137nm\n",
    );
    let args =
        ["sweep-k", "-c", cfg.as_str(), "--k-min", "1e299", "--k-max", "1e300", "--points", "3"];
    let out = run(&args);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "k_rad_per_m,tau_scattering,tau_pfa,tau_perfect,theta_star");
    assert_eq!(lines.len(), 4);
    for line in &lines[1..] {
        assert!(line.starts_with("# error at k="), "{line}");
    }
    let rerun = run(&args);
    assert_eq!(out.stdout, rerun.stdout);
}

#[test]
fn degrees_and_radians_agree_exactly() {
    let dir = TempDir::new().unwrap();
    let in_degrees = config_file(&dir, &format!("{FAST_PFA}theta = 0.5deg\n"));
    let first = run(&["torque", "-c", &in_degrees]);
    let radians = 0.5f64.to_radians();
    let path = dir.path().join("rad.cfg");
    std::fs::write(&path, format!("{FAST_PFA}theta = {radians}rad\n")).unwrap();
    let second = run(&["torque", "-c", path.to_str().unwrap()]);
    assert_eq!(code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn warnings_stay_on_the_error_stream() {
    let dir = TempDir::new().unwrap();
    let cfg = config_file(&dir, &format!("{HEADLINE}method = pfa\n"));
    let out = run(&["energy", "-c", &cfg]);
    assert_eq!(code(&out), 0);
    assert!(stderr(&out).contains("warning:"), "{}", stderr(&out));
    assert!(!stdout(&out).contains("warning"));
}
