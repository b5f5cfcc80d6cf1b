use std::path::Path;
use std::process::{Command, Output};

use obcs::formats::{self, MatrixFile};
use obcs_core::construct::bernoulli_matrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn obcs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_obcs")).args(args).env_remove("OBCS_ENUM_CAP").output().unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn gen_matrix_round_trips_through_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("M.txt");
    let o = obcs(&["gen-matrix", "--kind", "bernoulli", "--m", "120", "--n", "1000", "--p", "0.0909", "--seed", "7", "--out", p(&path)]);
    assert_eq!(o.status.code(), Some(0), "{o:?}");
    let expected = bernoulli_matrix(120, 1000, 0.0909, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
    assert_eq!(formats::read_matrix(&path).unwrap(), MatrixFile::Binary(expected));
}

#[test]
fn omitted_seed_means_zero() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.txt"), dir.path().join("b.txt"));
    assert!(obcs(&["gen-signal", "--n", "50", "--k", "3", "--out", p(&a)]).status.success());
    assert!(obcs(&["gen-signal", "--n", "50", "--k", "3", "--seed", "0", "--out", p(&b)]).status.success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn stacked_pipeline_recovers_a_binary_signal() {
    let dir = tempfile::tempdir().unwrap();
    let [m, x, y, xhat] = ["M.txt", "x.txt", "y.txt", "xhat.txt"].map(|f| dir.path().join(f));
    let run = |args: &[&str]| {
        let o = obcs(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        o
    };
    run(&["gen-matrix", "--kind", "stacked", "--n", "100", "--k", "4", "--eps", "0.2", "--seed", "3", "--out", p(&m)]);
    run(&["gen-signal", "--n", "100", "--k", "4", "--model", "binary", "--seed", "4", "--out", p(&x)]);
    run(&["measure", "--matrix", p(&m), "--signal", p(&x), "--out", p(&y)]);
    run(&["decode", "--algo", "superset-biht", "--matrix", p(&m), "--obs", p(&y), "--k", "4", "--binary", "--out", p(&xhat)]);
    assert_eq!(formats::read_signal(&xhat).unwrap(), formats::read_signal(&x).unwrap());

    let signs = formats::read_signs(&y).unwrap();
    let MatrixFile::Stacked(sm) = formats::read_matrix(&m).unwrap() else { panic!("not stacked") };
    assert_eq!(signs.len(), sm.m1() + sm.m2());
    assert_eq!(sm.m1(), 32);
    assert_eq!(sm.m2(), 4400);
}

#[test]
fn group_testing_decode_prints_a_superset() {
    let dir = tempfile::tempdir().unwrap();
    let [m, x, y] = ["M.txt", "x.txt", "y.txt"].map(|f| dir.path().join(f));
    assert!(obcs(&["gen-matrix", "--kind", "bernoulli", "--m", "60", "--n", "80", "--k", "3", "--p", "1/(k+1)", "--out", p(&m)]).status.success());
    assert!(obcs(&["gen-signal", "--n", "80", "--k", "3", "--seed", "1", "--out", p(&x)]).status.success());
    assert!(obcs(&["measure", "--matrix", p(&m), "--signal", p(&x), "--out", p(&y)]).status.success());
    let o = obcs(&["decode", "--algo", "gt", "--matrix", p(&m), "--obs", p(&y)]);
    assert!(o.status.success());
    let superset: Vec<usize> = stdout(&o).lines().map(|l| l.parse().unwrap()).collect();
    let support = formats::read_signal(&x).unwrap().support();
    assert!(support.indices().iter().all(|j| superset.contains(j)));
}

#[test]
fn verify_list_disjunct_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let eye = dir.path().join("eye.txt");
    std::fs::write(&eye, "binary 3 3\n1 0 0\n0 1 0\n0 0 1\n").unwrap();
    let o = obcs(&["verify", "--property", "list-disjunct", "--matrix", p(&eye), "--k", "1", "--l", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "PASS list-disjunct 0 1\n");

    let ones = dir.path().join("ones.txt");
    std::fs::write(&ones, "binary 1 3\n1 1 1\n").unwrap();
    let o = obcs(&["verify", "--property", "list-disjunct", "--matrix", p(&ones), "--k", "1", "--l", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stdout(&o).starts_with("FAIL list-disjunct"));
}

#[test]
fn enumeration_cap_from_env_and_flag() {
    let dir = tempfile::tempdir().unwrap();
    let eye = dir.path().join("eye.txt");
    std::fs::write(&eye, "binary 3 3\n1 0 0\n0 1 0\n0 0 1\n").unwrap();
    let args = ["verify", "--property", "list-disjunct", "--matrix", p(&eye), "--k", "1", "--l", "1"];
    let o = Command::new(env!("CARGO_BIN_EXE_obcs")).args(args).env("OBCS_ENUM_CAP", "2").output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("cap"));
    let o = Command::new(env!("CARGO_BIN_EXE_obcs"))
        .args(args)
        .args(["--enum-cap", "100"])
        .env("OBCS_ENUM_CAP", "2")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn decode_failure_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let (m, y) = (dir.path().join("M.txt"), dir.path().join("y.txt"));
    std::fs::write(&m, "binary 1 2\n1 0\nreal 1 2\n1 1\n").unwrap();
    std::fs::write(&y, "0\n1\n").unwrap();
    let o = obcs(&["decode", "--algo", "superset-biht", "--matrix", p(&m), "--obs", p(&y), "--k", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = obcs(&["decode", "--algo", "superset-biht", "--matrix", p(&m), "--obs", p(&y), "--k", "1", "--fallback", "full-biht"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn bad_inputs_exit_one() {
    let o = obcs(&["decode", "--algo", "gt", "--matrix", "/nonexistent/M.txt", "--obs", "/nonexistent/y.txt"]);
    assert_eq!(o.status.code(), Some(1));
    let o = obcs(&["gen-matrix", "--kind", "bernoulli", "--n", "10", "--p", "0.2", "--out", "/tmp/unused"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--m"));
    assert_eq!(obcs(&["verify", "--property", "nope"]).status.code(), Some(1));
}

#[test]
fn ruff_matrix_and_code_verify() {
    let dir = tempfile::tempdir().unwrap();
    let (m, c) = (dir.path().join("B.txt"), dir.path().join("code.txt"));
    let o = obcs(&["gen-matrix", "--kind", "ruff", "--n", "20", "--k", "2", "--alpha", "0.5", "--out", p(&m), "--code-out", p(&c)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = obcs(&["verify", "--property", "ruff", "--matrix", p(&m), "--k", "2", "--alpha", "0.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = obcs(&["verify", "--property", "code-distance", "--code", p(&c)]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn sweep_output_is_independent_of_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let outs: Vec<Vec<u8>> = ["1", "4"]
        .iter()
        .map(|jobs| {
            let csv = dir.path().join(format!("sweep{jobs}.csv"));
            let svg = dir.path().join(format!("sweep{jobs}.svg"));
            let o = obcs(&[
                "experiment", "sweep", "--n", "200", "--k", "4", "--m-values", "40,80", "--p-values", "0.1,0.3",
                "--trials", "20", "--jobs", jobs, "--seed", "5", "--out", p(&csv), "--svg", p(&svg),
            ]);
            assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
            assert!(std::fs::read_to_string(&svg).unwrap().contains("<polyline"));
            std::fs::read(&csv).unwrap()
        })
        .collect();
    assert_eq!(outs[0], outs[1]);
    let text = String::from_utf8(outs[0].clone()).unwrap();
    assert_eq!(text.lines().next(), Some("n,k,m,p,trials,mean_superset_size,std_superset_size"));
    assert_eq!(text.lines().count(), 1 + 2 * 3);
}

#[test]
fn error_curve_to_stdout() {
    let o = obcs(&["experiment", "error-curve", "--n", "100", "--k", "2", "--m-values", "60", "--trials", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,k,m,m1,p,method,trials,mean_error,std_error");
    assert!(lines[1].starts_with("100,2,60,0,0.3333333333333333,all_gaussian,3,"));
    assert!(lines[2].starts_with("100,2,60,16,0.3333333333333333,superset,3,"));
}
