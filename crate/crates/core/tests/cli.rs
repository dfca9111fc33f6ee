use std::path::Path;
use std::process::{Command, Output};

use truss_fretsaw::io::{format_vector, read_truss, read_vector};
use truss_fretsaw::stiffness::{assemble, norm};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_truss-solver"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn gen_solve_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let truss = dir.path().join("g.truss");
    let rhs = dir.path().join("b.txt");
    let sol = dir.path().join("x.txt");
    let report = dir.path().join("r.json");
    let out = run(&["gen", "grid", "--rows", "6", "--cols", "5", "--jitter", "0.1", "--seed", "3", "-o", p(&truss)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let t = read_truss(&truss).unwrap();
    assert_eq!(t.vertex_count(), 30);
    // a load with zero net force and torque
    let x: Vec<f64> = (0..t.dof()).map(|i| ((i * 7 % 11) as f64 - 5.0) / 5.0).collect();
    let a = assemble(&t).unwrap();
    let b = a.matvec(&x).unwrap();
    std::fs::write(&rhs, format_vector(&b)).unwrap();

    let out = run(&["solve", "--truss", p(&truss), "--rhs", p(&rhs), "--eps", "1e-10", "--report", p(&report), "-o", p(&sol)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let y = read_vector(&sol).unwrap();
    let res: Vec<f64> = a.matvec(&y).unwrap().iter().zip(&b).map(|(u, v)| u - v).collect();
    assert!(norm(&res) <= 1e-6 * norm(&b));

    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert!(json["iterations"].as_u64().unwrap() > 0);
    assert_eq!(json["eps_target"].as_f64().unwrap(), 1e-10);
    assert_eq!(json["pipeline"]["n"].as_u64().unwrap(), 30);
}

#[test]
fn gen_path_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let truss = dir.path().join("p.truss");
    assert_eq!(code(&run(&["gen", "path", "--len", "6", "-o", p(&truss)])), 0);
    assert_eq!(read_truss(&truss).unwrap().faces().len(), 6);

    let grid = dir.path().join("g.truss");
    assert_eq!(code(&run(&["gen", "grid", "--rows", "5", "--cols", "5", "-o", p(&grid)])), 0);
    let out = run(&["verify", "--truss", p(&grid), "--suite", "all"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json["passed"], true);
    assert_eq!(json["suites"].as_array().unwrap().len(), 4);

    let out = run(&["verify", "--truss", p(&grid), "--suite", "nullspace"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn verify_fails_on_floppy_truss() {
    let dir = tempfile::tempdir().unwrap();
    let truss = dir.path().join("bowtie.truss");
    std::fs::write(
        &truss,
        "v 0 0\nv 1 0\nv 0 1\nv -1 0\nv 0 -1\ne 0 1 1\ne 1 2 1\ne 2 0 1\ne 0 3 1\ne 3 4 1\ne 4 0 1\n",
    )
    .unwrap();
    let out = run(&["verify", "--truss", p(&truss), "--suite", "all"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn input_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.truss");
    assert_eq!(code(&run(&["verify", "--truss", p(&missing)])), 1);
    assert_eq!(code(&run(&["frobnicate"])), 1);
    assert_eq!(code(&run(&["gen", "grid", "--rows", "1", "--cols", "4", "-o", p(&missing)])), 1);

    let truss = dir.path().join("g.truss");
    assert_eq!(code(&run(&["gen", "grid", "--rows", "3", "--cols", "3", "-o", p(&truss)])), 0);
    assert_eq!(code(&run(&["verify", "--truss", p(&truss), "--suite", "everything"])), 1);
    let rhs = dir.path().join("b.txt");
    std::fs::write(&rhs, "1 2 3\n").unwrap();
    assert_eq!(code(&run(&["solve", "--truss", p(&truss), "--rhs", p(&rhs), "--eps", "1e-8"])), 1);
    std::fs::write(&rhs, "1 x\n").unwrap();
    assert_eq!(code(&run(&["solve", "--truss", p(&truss), "--rhs", p(&rhs), "--eps", "1e-8"])), 1);
    std::fs::write(&truss, "v 0 0\nv 1 0\ne 0 9 1\n").unwrap();
    assert_eq!(code(&run(&["verify", "--truss", p(&truss)])), 1);
}

#[test]
fn bench_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("bench.csv");
    let out = run(&["bench", "--sizes", "3,5", "--eps", "1e-6", "--csv", p(&csv)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "n,m,k,core,iters,kappa_oracle,seconds");
    let rows: Vec<&str> = lines.collect();
    assert!(rows.len() >= 2);
    for row in rows {
        assert_eq!(row.split(',').count(), 7);
    }
}
