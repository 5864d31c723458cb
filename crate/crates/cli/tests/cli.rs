use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_straggler"))
        .args(args)
        .env_remove("STRAGGLER_SEED")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn rows(text: &str) -> Vec<Vec<String>> {
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    reader
        .records()
        .map(|r| r.unwrap().iter().map(str::to_string).collect())
        .collect()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const EVENTS: &str = "job_id,task_id,kind,timestamp\n\
                      1,0,SCHEDULE,0\n1,0,FINISH,150\n\
                      1,1,SCHEDULE,10\n1,1,FINISH,60\n";

#[test]
fn eval_plain_pareto_job() {
    let out = stdout(&run(&["eval", "--k", "10", "--dist", "pareto:1,2"]));
    let r = rows(&out);
    assert_eq!(r.len(), 1);
    let e_t: f64 = r[0][0].parse().unwrap();
    assert!((e_t - 5.675463855).abs() < 1e-9);
    assert_eq!(r[0][1], "20");
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let samples = write(dir.path(), "s.csv", "1\n3\n");
    let empty = write(dir.path(), "e.csv", "lifetime\n");

    let unsupported = run(&[
        "eval",
        "--k",
        "2",
        "--dist",
        &format!("empirical:{samples}"),
    ]);
    assert_eq!(unsupported.status.code(), Some(2));

    let no_samples = run(&[
        "simulate",
        "--k",
        "2",
        "--dist",
        &format!("empirical:{empty}"),
    ]);
    assert_eq!(no_samples.status.code(), Some(3));

    let events = write(dir.path(), "t.csv", EVENTS);
    let filtered = run(&["trace", "export", &events, "--k-filter", "5"]);
    assert_eq!(filtered.status.code(), Some(3));

    let no_closed_form = run(&[
        "sweep", "--k", "4", "--dist", "sexp:4,1", "--family", "relaunch", "--grid", "1,2",
    ]);
    assert_eq!(no_closed_form.status.code(), Some(2));

    let infinite = run(&["eval", "--k", "10", "--dist", "pareto:1,0.5"]);
    assert_eq!(infinite.status.code(), Some(1));
}

#[test]
fn trace_export_and_tail() {
    let dir = TempDir::new().unwrap();
    let events = write(dir.path(), "t.csv", EVENTS);

    let exported = stdout(&run(&["trace", "export", &events]));
    assert_eq!(
        exported.lines().collect::<Vec<_>>(),
        ["lifetime", "50", "150"]
    );

    let tail = stdout(&run(&["trace", "tail", &events, "--grid", "1,100,200"]));
    assert_eq!(rows(&tail), [["1", "1"], ["100", "0.5"], ["200", "0"]]);

    let scaled = stdout(&run(&["trace", "export", &events, "--time-unit", "0.001"]));
    assert_eq!(scaled.lines().nth(1), Some("0.05"));

    let default_grid = stdout(&run(&["trace", "tail", &events, "--points", "5"]));
    let r = rows(&default_grid);
    assert_eq!(r.len(), 5);
    assert_eq!(r[0][1], "1");
    assert_eq!(r[4][1], "0");
}

#[test]
fn simulating_a_point_mass_is_exact() {
    let dir = TempDir::new().unwrap();
    let atom = write(dir.path(), "atom.csv", "3\n");
    let out = stdout(&run(&[
        "simulate",
        "--k",
        "2",
        "--dist",
        &format!("empirical:{atom}"),
        "--runs",
        "500",
    ]));
    let r = &rows(&out)[0];
    assert_eq!(&r[..6], ["3", "0", "6", "0", "6", "0"]);
    assert_eq!(r[8], "500");
}

#[test]
fn simulation_is_reproducible() {
    let args = [
        "simulate",
        "--k",
        "5",
        "--dist",
        "pareto:1,2",
        "--mode",
        "code:7",
        "--runs",
        "20000",
        "--seed",
        "9",
    ];
    let a = stdout(&run(&args));
    let b = stdout(&run(&[&args[..], &["--threads", "3"]].concat()));
    assert_eq!(a, b);
    let c = stdout(&run(&[&args[..9], &["--seed", "10"]].concat()));
    assert_ne!(a, c);
}

#[test]
fn sweeps_write_one_row_per_grid_point() {
    let dir = TempDir::new().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = run(&[
        "sweep",
        "--k",
        "10",
        "--dist",
        "pareto:1,2",
        "--family",
        "coding",
        "--grid",
        "10:15:1",
        "--sd",
        "-o",
        path.to_str().unwrap(),
    ]);
    assert!(stdout(&out).is_empty());
    let written = fs::read_to_string(&path).unwrap();
    let r = rows(&written);
    assert_eq!(r.len(), 6);
    let latencies: Vec<f64> = r.iter().map(|row| row[1].parse().unwrap()).collect();
    assert!(latencies.windows(2).all(|w| w[1] < w[0]));

    let simulated = stdout(&run(&[
        "sweep",
        "--k",
        "4",
        "--dist",
        "sexp:4,1",
        "--family",
        "relaunch",
        "--grid",
        "0.5,1,2",
        "--simulate",
        "--runs",
        "2000",
    ]));
    assert_eq!(rows(&simulated).len(), 3);
}

#[test]
fn optimize_reports_both_delays() {
    let out = stdout(&run(&["optimize", "--k", "10", "--alpha", "2"]));
    let mut reader = csv::Reader::from_reader(out.as_bytes());
    let header: Vec<String> = reader
        .headers()
        .unwrap()
        .iter()
        .map(str::to_string)
        .collect();
    assert_eq!(header[..2], ["delta_star", "delta_exact"]);
    let r = rows(&out);
    let g: f64 = r[0][5].parse().unwrap();
    let best: f64 = r[0][6].parse().unwrap();
    assert!(best < g);
}

#[test]
fn bad_arguments_fail() {
    assert_eq!(
        run(&["eval", "--k", "10", "--dist", "gamma:1,2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["eval", "--k", "10", "--dist", "pareto:1,2", "--relaunch"])
            .status
            .code(),
        Some(1)
    );
}
