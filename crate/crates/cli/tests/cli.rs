use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const SEPTIC: &str = "# x^7/2 + 3x^6 + x^5/2 + 5x^4 + 5x^3/2 + 3x^2 + 6x + 5/2\n\
2.5 0\n6 0\n3 0\n2.5 0\n5 0\n0.5 0\n3 0\n0.5 0\n";

fn rootbe(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rootbe"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn setup(files: &[(&str, &str)]) -> TempDir {
    let dir = TempDir::new().unwrap();
    for (name, text) in files {
        fs::write(dir.path().join(name), text).unwrap();
    }
    dir
}

#[test]
fn trop_lists_hull_vertices() {
    let dir = setup(&[("septic.txt", SEPTIC)]);
    let o = rootbe(&["trop", "--poly", "septic.txt"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("hull vertices: 0 1 4 6 7"), "{out}");
    assert!(out.contains("(0,1) (1,4) (4,6) (6,7)"));

    let o = rootbe(&["trop", "--poly", "septic.txt", "--csv"], dir.path());
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("i,abs_c,v,vertex,tau,r"));
    let vertices: Vec<&str> = lines
        .filter(|l| l.split(',').nth(3) == Some("true"))
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(vertices, ["0", "1", "4", "6", "7"]);
}

#[test]
fn be_on_exact_roots_is_tiny() {
    // (x - 1)(x - 2)(x - 3)
    let dir = setup(&[
        ("f.txt", "-6 0\n11 0\n-6 0\n1 0\n"),
        ("exact.txt", "1 0\n2 0\n3 0\n"),
    ]);
    let o = rootbe(&["be", "--poly", "f.txt", "--roots", "exact.txt", "--csv"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    let rows: Vec<(String, f64)> = out
        .lines()
        .skip(1)
        .map(|l| {
            let (k, v) = l.split_once(',').unwrap();
            (k.to_string(), v.parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 4);
    for (k, v) in rows {
        assert!(v <= 1e3 * f64::EPSILON / 2.0, "{k} = {v:e}");
    }
}

#[test]
fn roots_round_trip_through_be() {
    let dir = setup(&[("septic.txt", SEPTIC)]);
    let o = rootbe(&["roots", "--poly", "septic.txt", "--out", "r.txt"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).is_empty());
    let text = fs::read_to_string(dir.path().join("r.txt")).unwrap();
    assert_eq!(text.lines().count(), 7);
    let o = rootbe(
        &["be", "--poly", "septic.txt", "--roots", "r.txt", "--measures", "tbe,embe", "--csv"],
        dir.path(),
    );
    let out = stdout(&o);
    assert!(out.contains("tbe,") && out.contains("embe_ub,"));
    assert!(!out.contains("nbe,"));
}

#[test]
fn exp1_is_reproducible() {
    let dir = TempDir::new().unwrap();
    let args = |out: &str| {
        vec![
            "exp1".to_string(),
            "--d".into(),
            "20".into(),
            "--k".into(),
            "8".into(),
            "--trials".into(),
            "200".into(),
            "--seed".into(),
            "42".into(),
            "--out".into(),
            out.into(),
        ]
    };
    for out in ["run1", "run2"] {
        let a = args(out);
        let a: Vec<&str> = a.iter().map(String::as_str).collect();
        let o = rootbe(&a, dir.path());
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    }
    let one = fs::read(dir.path().join("run1/exp1.csv")).unwrap();
    let two = fs::read(dir.path().join("run2/exp1.csv")).unwrap();
    assert_eq!(one, two);
    assert_eq!(String::from_utf8(one).unwrap().lines().count(), 201);
    assert!(dir.path().join("run1/exp1.plt").exists());
}

#[test]
fn exp2_writes_ratios() {
    let dir = TempDir::new().unwrap();
    let o = rootbe(
        &["exp2", "--d", "8", "--k", "4", "--trials", "5", "--seed", "7", "--out", "e2"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(dir.path().join("e2/exp2.csv")).unwrap();
    assert!(csv.starts_with("trial,root_index,exp_tau_over_abs_root\n"));
    assert_eq!(csv.lines().count(), 41);
}

#[test]
fn parse_error_names_file_and_line() {
    let dir = setup(&[("bad.txt", "1 0\n# ok\n2 oops\n")]);
    let o = rootbe(&["trop", "--poly", "bad.txt"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).is_empty());
    let err = stderr(&o);
    assert!(err.contains("bad.txt") && err.contains("line 3"), "{err}");
}

#[test]
fn missing_file_is_io_error() {
    let dir = TempDir::new().unwrap();
    let o = rootbe(&["trop", "--poly", "nope.txt"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("nope.txt"));
}

#[test]
fn zero_constant_is_precondition_error() {
    let dir = setup(&[("z.txt", "0 0\n-1 0\n1 0\n")]);
    let o = rootbe(&["trop", "--poly", "z.txt"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).is_empty());
}

#[test]
fn wrong_root_count_is_precondition_error() {
    let dir = setup(&[("f.txt", "2 0\n-3 0\n1 0\n"), ("r.txt", "1 0\n")]);
    let o = rootbe(&["be", "--poly", "f.txt", "--roots", "r.txt"], dir.path());
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("length"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_one() {
    let dir = TempDir::new().unwrap();
    let o = rootbe(&["frobnicate"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).is_empty());
    let o = rootbe(&["be", "--poly", "x", "--roots", "y", "--measures", "abc"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn help_documents_file_grammar() {
    let dir = TempDir::new().unwrap();
    let o = rootbe(&["--help"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("FILE FORMAT"));
    assert!(out.contains("entry   := WS* REAL WS+ REAL WS*"));
}

#[test]
fn run_with_captures_streams() {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = rootbe_cli::run_with(["rootbe", "trop"], &mut out, &mut err);
    assert_eq!(code, 1);
    assert!(out.is_empty());
    assert!(!err.is_empty());
}
