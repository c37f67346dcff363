use causalthermo_cli::output::read_csv;
use causalthermo_core::processes::{w_compose, write_process, CausalOrder};
use causalthermo_core::{Process, ProcessMatrix};
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_causalthermo"));
    c.env_remove("CAUSALTHERMO_JOBS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn validate_builtins_pass() {
    for name in ["switch2", "switch3", "ising2", "lugano", "mixture:0.3"] {
        let o = run(&["validate", "--builtin", name, "--samples", "4"]);
        assert_eq!(code(&o), 0, "{name}: {}", stdout(&o));
        assert!(stdout(&o).starts_with(&format!("PASS {name}")));
        assert!(stdout(&o).contains("valid=true"));
    }
}

#[test]
fn validate_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.txt", "causalthermo-process 1\nkind matrix\nnonsense\n");
    assert_eq!(code(&run(&["validate", &bad])), 2);
    assert_eq!(code(&run(&["validate", "--builtin", "switch9"])), 2);
    assert_eq!(code(&run(&["validate", "/nonexistent/file"])), 2);

    let w = w_compose(CausalOrder::AThenB, 2).unwrap().to_matrix();
    let good = write(dir.path(), "good.txt", &write_process(&Process::Matrix(w.clone())));
    assert_eq!(code(&run(&["validate", &good, "--samples", "3"])), 0);

    let negated = ProcessMatrix::new(w.structure().clone(), w.matrix().scale_real(-1.0)).unwrap();
    let neg = write(dir.path(), "neg.txt", &write_process(&Process::Matrix(negated)));
    let o = run(&["validate", &neg, "--samples", "3"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("psd=false"));
}

#[test]
fn eval_composition_free_energy() {
    let o = run(&["eval", "--experiment", "free-energy", "--process", "composition", "--r", "0.5"]);
    assert_eq!(code(&o), 0);
    let rows = read_csv(o.stdout.as_slice()).unwrap();
    assert_eq!(rows.len(), 1);
    assert!((rows[0].value + 0.050201).abs() < 5e-7);
}

#[test]
fn eval_switch_with_control_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "experiment = \"free-energy\"\nancilla = \"zero\"\nmeasurement = \"computational\"\n",
    );
    let o = run(&["eval", "--config", &cfg, "--process", "switch2", "--r", "0.3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let row = &read_csv(o.stdout.as_slice()).unwrap()[0];
    assert!((row.prob_0 - 1.0).abs() < 1e-12 && row.prob_1.abs() < 1e-12);
}

#[test]
fn eval_without_experiment_is_usage_error() {
    let o = run(&["eval", "--process", "composition", "--r", "0.5"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.toml", "p = 0.8\nlamda = 1\n");
    let o = run(&["sweep-free-energy", "--config", &cfg]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("lamda"));
    assert_eq!(code(&run(&["sweep-free-energy", "--jobs", "0"])), 2);
    assert_eq!(code(&run(&["sweep-free-energy", "--config", "/nonexistent.toml"])), 2);
    assert_eq!(code(&run(&["no-such-command"])), 2);
}

#[test]
fn sweep_rows_reevaluate_through_eval() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "c.toml",
        "processes = [\"switch2\", \"ising2\"]\nr_points = 3\nrestarts = 4\n",
    );
    let csv = dir.path().join("out.csv");
    let o = run(&["sweep-ergotropy", "--config", &cfg, "--out", csv.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let rows = read_csv(std::fs::File::open(&csv).unwrap()).unwrap();
    assert_eq!(rows.len(), 6);
    for row in &rows {
        let params = format!(
            "{},{},{},{}",
            row.m.unwrap(),
            row.phi.unwrap(),
            row.x.unwrap(),
            row.chi.unwrap()
        );
        let r = row.r.to_string();
        let o = run(&[
            "eval", "--config", &cfg, "--experiment", "ergotropy", "--process", &row.process,
            "--r", &r, "--params", &params,
        ]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        let again = &read_csv(o.stdout.as_slice()).unwrap()[0];
        assert!((again.value - row.value).abs() < 1e-9, "{} {}", again.value, row.value);
    }
}

#[test]
fn jobs_from_environment() {
    let a = bin().args(["sweep-free-energy"]).env("CAUSALTHERMO_JOBS", "2").output().unwrap();
    assert_eq!(code(&a), 0);
    let b = bin().args(["sweep-free-energy"]).env("CAUSALTHERMO_JOBS", "0").output().unwrap();
    assert_eq!(code(&b), 2);
}

#[test]
fn emit_plot_writes_script() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("fe.csv");
    let o = run(&["sweep-free-energy", "--out", csv.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let o = run(&["emit-plot", csv.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let script = std::fs::read_to_string(dir.path().join("fe.py")).unwrap();
    assert_eq!(script.matches("\n    (\"").count(), 6);
    assert!(script.contains("IMAGE = \"fe.png\""));

    let empty = write(dir.path(), "empty.csv", "process,r,delta_rho,figure,value,prob_0,prob_1,m,phi,x,chi\n");
    assert_eq!(code(&run(&["emit-plot", &empty])), 2);
}
