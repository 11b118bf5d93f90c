use std::io::{Read, Write};
use std::net::{TcpListener, TcpStream};
use std::process::{Child, Command, Stdio};
use std::time::{Duration, Instant};

use pcm_core::pcm::format::{serialize, MatrixFormat};
use pcm_core::reduce::{self, ReductionQuery, SearchOptions};
use pcm_core::{fixtures, indices, ComparisonMatrix, IndexKind, Position, RandomIndexTable};

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn pcm(args: &[&str], stdin: &str) -> Run {
    let mut child = Command::new(env!("CARGO_BIN_EXE_pcm"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(stdin.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn csv(a: &ComparisonMatrix) -> String {
    serialize(a, MatrixFormat::Csv)
}

fn first_line(r: &Run) -> &str {
    r.stdout.lines().next().unwrap_or("")
}

fn set_text(sets: &[Vec<Position>]) -> String {
    sets.iter()
        .map(|s| {
            format!(
                "{{{}}}",
                s.iter().map(Position::to_string).collect::<Vec<_>>().join(", ")
            )
        })
        .collect::<Vec<_>>()
        .join(", ")
}

#[test]
fn evaluate_city_matrix_cr() {
    let r = pcm(&["evaluate", "-", "--index", "cr"], &csv(&fixtures::cities()));
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(r.stdout.trim(), "CR = 0.0732, lambda_max = 6.4536");
}

#[test]
fn evaluate_consistent_matrix_is_all_zero() {
    let a = ComparisonMatrix::from_weights(&[4.0, 2.0, 1.0, 0.5]).unwrap();
    let r = pcm(&["evaluate", "-"], &csv(&a));
    assert_eq!(r.code, 0);
    for name in ["CR", "CM", "CI"] {
        assert!(r.stdout.contains(&format!("{name} = 0.0000")), "{}", r.stdout);
    }
    assert!(r.stdout.contains("consistent"));
}

#[test]
fn evaluate_malformed_csv_reports_the_cell() {
    let r = pcm(&["evaluate", "-"], "n=3\n1,2,3\n0.5,1,x\n0.333,1,1\n");
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("line 3"), "{}", r.stderr);
    assert!(r.stderr.contains("column 3"), "{}", r.stderr);
}

#[test]
fn evaluate_reads_a_file_in_upper_format() {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    write!(f, "{}", serialize(&fixtures::a2(), MatrixFormat::UpperJson)).unwrap();
    let path = f.path().to_str().unwrap();
    let r = pcm(&["evaluate", path, "--format", "upper", "--index", "cr"], "");
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(r.stdout.starts_with("CR = 0.5800"), "{}", r.stdout);
}

#[test]
fn evaluate_json_is_the_report() {
    let a = fixtures::a1();
    let r = pcm(&["--json", "evaluate", "-", "--index", "cm"], &csv(&a));
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert_eq!(
        v["value"].as_f64().unwrap().to_bits(),
        indices::cm(&a).value.to_bits()
    );
}

#[test]
fn missing_file_is_an_environment_error() {
    let r = pcm(&["evaluate", "/nonexistent/matrix.csv"], "");
    assert_eq!(r.code, 3);
}

#[test]
fn reduce_a2_finds_the_single_cell() {
    let r = pcm(
        &["reduce", "-", "--index", "cr", "--threshold", "0.1", "--all"],
        &csv(&fixtures::a2()),
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert_eq!(first_line(&r), "L*=1; solutions: {(1,3)}");
}

#[test]
fn reduce_a3_lists_the_engine_optima() {
    let r = pcm(
        &["reduce", "-", "--index", "cr", "--threshold", "0.1", "--all"],
        &csv(&fixtures::a3()),
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let q = ReductionQuery::min_changes(fixtures::a3(), IndexKind::Cr, 0.1);
    let sets = reduce::enumerate_optimal(&q, &SearchOptions::default())
        .unwrap()
        .position_sets();
    assert_eq!(first_line(&r), format!("L*=1; solutions: {}", set_text(&sets)));
}

#[test]
fn reduce_a3_with_a_wider_bound_has_six_singletons() {
    let args = [
        "reduce",
        "-",
        "--index",
        "cr",
        "--threshold",
        "0.1",
        "--all",
        "--bound",
        "20",
    ];
    let r = pcm(&args, &csv(&fixtures::a3()));
    assert_eq!(
        first_line(&r),
        "L*=1; solutions: {(1,3)}, {(1,4)}, {(1,5)}, {(2,6)}, {(3,4)}, {(4,5)}"
    );
}

#[test]
fn reduce_acceptable_matrix_needs_nothing() {
    let r = pcm(
        &["reduce", "-", "--index", "cr", "--threshold", "0.1"],
        &csv(&fixtures::a1()),
    );
    assert_eq!(r.code, 0);
    assert!(first_line(&r).starts_with("L*=0"));
}

#[test]
fn reduce_rejects_a_budget() {
    let r = pcm(
        &["reduce", "-", "--index", "cr", "--budget", "1"],
        &csv(&fixtures::a2()),
    );
    assert_eq!(r.code, 2);
}

#[test]
fn reduce_json_is_byte_stable() {
    let args = [
        "--json",
        "reduce",
        "-",
        "--index",
        "ci",
        "--threshold",
        "0.2",
        "--all",
        "--round",
    ];
    let a = pcm(&args, &csv(&fixtures::a2()));
    let b = pcm(&args, &csv(&fixtures::a2()));
    assert_eq!(a.code, 0, "{}", a.stderr);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_str(&a.stdout).unwrap();
    assert_eq!(v["mode"], "min_changes");
}

#[test]
fn minimize_a2_with_one_change() {
    let r = pcm(
        &["--json", "minimize", "-", "--index", "cr", "--budget", "1"],
        &csv(&fixtures::a2()),
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert!(v["alpha_opt"].as_f64().unwrap() <= 0.1);
    assert_eq!(v["best"]["positions"], serde_json::json!([[1, 3]]));

    let r = pcm(
        &["minimize", "-", "--index", "cr", "--budget", "1"],
        &csv(&fixtures::a2()),
    );
    assert!(first_line(&r).ends_with("at {(1,3)}"), "{}", r.stdout);
}

#[test]
fn minimize_full_budget_reaches_zero() {
    let r = pcm(
        &["minimize", "-", "--index", "cm", "--budget", "15"],
        &csv(&fixtures::cities()),
    );
    assert_eq!(r.code, 0, "{}", r.stderr);
    assert!(first_line(&r).starts_with("CM_opt = 0.0000"), "{}", r.stdout);
}

#[test]
fn minimize_zero_budget_keeps_current_value() {
    let a = fixtures::a3();
    let r = pcm(
        &["--json", "minimize", "-", "--index", "ci", "--budget", "0"],
        &csv(&a),
    );
    let v: serde_json::Value = serde_json::from_str(&r.stdout).unwrap();
    assert!((v["alpha_opt"].as_f64().unwrap() - indices::ci(&a).value).abs() < 1e-9);
}

#[test]
fn exceeding_the_work_budget_is_a_solver_limit() {
    let args = [
        "minimize",
        "-",
        "--index",
        "cr",
        "--budget",
        "2",
        "--work-budget",
        "10",
    ];
    let r = pcm(&args, &csv(&fixtures::a2()));
    assert_eq!(r.code, 4);
    assert!(r.stderr.contains("105"), "{}", r.stderr);
}

#[test]
fn entries_beyond_the_bound_are_rejected() {
    let args = [
        "reduce",
        "-",
        "--index",
        "cr",
        "--threshold",
        "0.1",
        "--bound",
        "5",
    ];
    let r = pcm(&args, &csv(&fixtures::cities()));
    assert_eq!(r.code, 2);
}

#[test]
fn ri_is_deterministic_and_near_the_table() {
    let a = pcm(&["ri", "--n", "6", "--samples", "20000", "--seed", "7"], "");
    let b = pcm(&["ri", "--n", "6", "--samples", "20000", "--seed", "7"], "");
    assert_eq!(a.code, 0);
    assert_eq!(a.stdout, b.stdout);
    let value: f64 = a.stdout.split_whitespace().nth(2).unwrap().parse().unwrap();
    assert!((value - 1.24).abs() < 0.03, "{value}");
}

#[test]
fn ri_without_samples_is_a_usage_error() {
    assert_eq!(pcm(&["ri", "--n", "6", "--samples", "0"], "").code, 2);
}

struct Server(Child);

impl Drop for Server {
    fn drop(&mut self) {
        let _ = self.0.kill();
        let _ = self.0.wait();
    }
}

fn free_port() -> u16 {
    TcpListener::bind("127.0.0.1:0")
        .unwrap()
        .local_addr()
        .unwrap()
        .port()
}

fn start(args: &[&str]) -> Server {
    Server(
        Command::new(env!("CARGO_BIN_EXE_pcm"))
            .arg("serve")
            .args(args)
            .stdout(Stdio::null())
            .stderr(Stdio::null())
            .spawn()
            .unwrap(),
    )
}

fn health(port: u16) -> String {
    let deadline = Instant::now() + Duration::from_secs(20);
    loop {
        if let Ok(mut s) = TcpStream::connect(("127.0.0.1", port)) {
            write!(
                s,
                "GET /api/v1/health HTTP/1.1\r\nHost: localhost\r\nConnection: close\r\n\r\n"
            )
            .unwrap();
            let mut resp = String::new();
            s.read_to_string(&mut resp).unwrap();
            return resp;
        }
        assert!(Instant::now() < deadline, "server did not start");
        std::thread::sleep(Duration::from_millis(50));
    }
}

#[test]
fn serve_answers_health_probes() {
    let port = free_port();
    let _server = start(&["--port", &port.to_string()]);
    let resp = health(port);
    assert!(resp.starts_with("HTTP/1.1 200"), "{resp}");
    assert!(resp.contains(env!("CARGO_PKG_VERSION")));
    assert!(resp.contains(&pcm_api::ri_table_hash(&RandomIndexTable::default())));
}

#[test]
fn serve_reports_the_loaded_table() {
    let mut ri = RandomIndexTable::default();
    ri.insert(6, 1.2519);
    let mut f = tempfile::NamedTempFile::new().unwrap();
    write!(f, "{}", ri.to_json()).unwrap();
    let port = free_port();
    let _server = start(&[
        "--port",
        &port.to_string(),
        "--ri-table",
        f.path().to_str().unwrap(),
    ]);
    let resp = health(port);
    assert!(resp.contains(&pcm_api::ri_table_hash(&ri)), "{resp}");
}

#[test]
fn serve_on_an_occupied_port_fails() {
    let held = TcpListener::bind("127.0.0.1:0").unwrap();
    let port = held.local_addr().unwrap().port().to_string();
    let status = Command::new(env!("CARGO_BIN_EXE_pcm"))
        .args(["serve", "--port", &port])
        .stderr(Stdio::null())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(3));
}
