//! Black-box tests of the binary: file format, exit protocol, diagnostics.

use num_complex::Complex64;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};
use wep_core::matcore::{rel_diff, CMatrix};

fn wep() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wep"))
}

fn write_mat(path: &Path, rows: usize, cols: usize, entries: &[(f64, f64)]) {
    assert_eq!(entries.len(), rows * cols);
    let mut s = format!("rows {rows}\ncols {cols}\ndata\n");
    for (re, im) in entries {
        s.push_str(&format!("{re:.16e} {im:.16e}\n"));
    }
    fs::write(path, s).unwrap();
}

/// Independent re-parse of the output format (row-major `re im` lines).
fn read_mat(path: &Path) -> CMatrix {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let rows: usize = lines.next().unwrap().strip_prefix("rows ").unwrap().parse().unwrap();
    let cols: usize = lines.next().unwrap().strip_prefix("cols ").unwrap().parse().unwrap();
    assert_eq!(lines.next(), Some("data"));
    let mut vals = Vec::new();
    for l in lines {
        let mut it = l.split_whitespace();
        let re: f64 = it.next().unwrap().parse().unwrap();
        let im: f64 = it.next().unwrap().parse().unwrap();
        vals.push(Complex64::new(re, im));
    }
    assert_eq!(vals.len(), rows * cols);
    CMatrix::from_fn(rows, cols, |i, j| vals[i * cols + j])
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn pinv_output_satisfies_definition() {
    let dir = tempfile::tempdir().unwrap();
    let a_path = dir.path().join("a.mat");
    write_mat(
        &a_path,
        3,
        2,
        &[(1.0, 0.5), (2.0, 0.0), (0.0, -1.0), (1.0, 1.0), (3.0, 0.0), (0.25, 0.0)],
    );
    let x_path = dir.path().join("x.mat");
    let out = wep()
        .args(["pinv", "-i"])
        .arg(&a_path)
        .arg("-o")
        .arg(&x_path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    assert!(stdout_of(&out).contains("res_axa"));
    let a = read_mat(&a_path);
    let x = read_mat(&x_path);
    assert_eq!(x.shape(), (2, 3));
    assert!(rel_diff(&(&(&a * &x) * &a), &a) <= 1e-10);
    assert!(rel_diff(&(&(&x * &a) * &x), &x) <= 1e-10);
    let ax = &a * &x;
    let xa = &x * &a;
    assert!(rel_diff(&ax.adjoint(), &ax) <= 1e-10);
    assert!(rel_diff(&xa.adjoint(), &xa) <= 1e-10);
}

#[test]
fn factorize_outputs_reconstruct_and_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a_path = dir.path().join("a.mat");
    // rank-2 3x3: third row is the sum of the first two
    write_mat(
        &a_path,
        3,
        3,
        &[
            (1.0, 0.0), (0.5, 0.25), (2.0, -1.0),
            (0.0, 1.0), (1.0, 0.0), (0.5, 0.0),
            (1.0, 1.0), (1.5, 0.25), (2.5, -1.0),
        ],
    );
    let run = |prefix: &Path| {
        let out = wep()
            .args(["factorize", "--mode", "fullrank", "-i"])
            .arg(&a_path)
            .arg("-o")
            .arg(prefix)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
        assert!(stdout_of(&out).contains("rank = 2"));
    };
    let p1 = dir.path().join("one");
    let p2 = dir.path().join("two");
    run(&p1);
    run(&p2);
    let b = read_mat(&dir.path().join("one.b.mat"));
    let c = read_mat(&dir.path().join("one.c.mat"));
    assert_eq!(b.shape(), (3, 2));
    assert_eq!(c.shape(), (2, 3));
    let a = read_mat(&a_path);
    assert!(rel_diff(&(&b * &c), &a) <= 1e-10);
    // serialization is deterministic down to the byte
    for part in ["b", "c"] {
        let f1 = fs::read(dir.path().join(format!("one.{part}.mat"))).unwrap();
        let f2 = fs::read(dir.path().join(format!("two.{part}.mat"))).unwrap();
        assert_eq!(f1, f2);
    }
}

#[test]
fn ep_check_exit_codes_follow_verdict() {
    let ep = wep()
        .args(["ep-check", "--synthesize", "ep", "--dim", "5", "--rank", "3", "--seed", "7"])
        .output()
        .unwrap();
    assert_eq!(ep.status.code(), Some(0), "{}", stderr_of(&ep));
    let text = stdout_of(&ep);
    assert!(text.contains("direct = true"));
    assert!(text.contains("consistent = true"));

    let non = wep()
        .args(["ep-check", "--synthesize", "non-ep", "--dim", "5", "--rank", "3", "--seed", "7"])
        .output()
        .unwrap();
    assert_eq!(non.status.code(), Some(1), "{}", stderr_of(&non));
    let text = stdout_of(&non);
    assert!(text.contains("direct = false"));
    assert!(text.contains("consistent = true"));
}

#[test]
fn synthesize_requires_the_l2_context() {
    let out = wep()
        .args(["ep-check", "--synthesize", "ep", "--norm", "l1"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(64));
    assert!(stderr_of(&out).contains("usage error"));
}

#[test]
fn parse_errors_name_file_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.mat");
    fs::write(&bad, "rows 2\ncols 2\ndata\n1.0 0.0\noops 0.0\n1.0 0.0\n1.0 0.0\n").unwrap();
    let out = wep().args(["pinv", "-i"]).arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(70));
    let err = stderr_of(&out);
    assert!(err.contains("bad.mat:5"), "missing location: {err}");
    assert!(err.contains("oops"), "missing token: {err}");
}

#[test]
fn nonpositive_weights_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.mat");
    let e = dir.path().join("e.mat");
    let f = dir.path().join("f.mat");
    write_mat(&a, 2, 2, &[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
    write_mat(&e, 2, 2, &[(-2.0, 0.0), (0.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
    write_mat(&f, 2, 2, &[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
    let out = wep()
        .args(["wpinv", "-i"])
        .arg(&a)
        .arg("-E")
        .arg(&e)
        .arg("-F")
        .arg(&f)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(70));
    assert!(stderr_of(&out).contains("not positive"), "{}", stderr_of(&out));
}

#[test]
fn tol_flag_overrides_environment() {
    let flag = wep()
        .args(["ep-check", "--synthesize", "ep", "--tol", "1e-12"])
        .env("WEP_TOL", "1e-3")
        .output()
        .unwrap();
    assert_eq!(flag.status.code(), Some(0), "{}", stderr_of(&flag));
    assert!(stdout_of(&flag).contains("tol_residual_rel = 1e-12"));

    let env_only = wep()
        .args(["ep-check", "--synthesize", "ep"])
        .env("WEP_TOL", "1e-3")
        .output()
        .unwrap();
    assert_eq!(env_only.status.code(), Some(0), "{}", stderr_of(&env_only));
    assert!(stdout_of(&env_only).contains("tol_residual_rel = 1e-3"));

    let bad_env = wep()
        .args(["ep-check", "--synthesize", "ep"])
        .env("WEP_TOL", "banana")
        .output()
        .unwrap();
    assert_eq!(bad_env.status.code(), Some(64));
}

#[test]
fn sampled_norms_leave_hermitianness_undetermined() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.mat");
    let e = dir.path().join("e.mat");
    let f = dir.path().join("f.mat");
    // a x a = a holds for any context; x a = [[.5,.5],[.5,.5]] fails the
    // sampled l1 isometry test, so the verdict cannot be `verified`
    write_mat(&a, 2, 2, &[(1.0, 0.0), (1.0, 0.0), (0.0, 0.0), (0.0, 0.0)]);
    write_mat(&e, 2, 2, &[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
    write_mat(&f, 2, 2, &[(1.0, 0.0), (0.0, 0.0), (0.0, 0.0), (1.0, 0.0)]);
    let out = wep()
        .args(["wpinv", "--norm", "l1", "-i"])
        .arg(&a)
        .arg("-E")
        .arg(&e)
        .arg("-F")
        .arg(&f)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("verdict = undetermined"), "{text}");

    // same files under l2 certify fully
    let out2 = wep()
        .args(["wpinv", "--norm", "l2", "-i"])
        .arg(&a)
        .arg("-E")
        .arg(&e)
        .arg("-F")
        .arg(&f)
        .output()
        .unwrap();
    assert_eq!(out2.status.code(), Some(0));
    assert!(stdout_of(&out2).contains("verdict = verified"));
}

#[test]
fn hermitian_check_labels_both_classes() {
    let dir = tempfile::tempdir().unwrap();
    let h = dir.path().join("h.mat");
    let nh = dir.path().join("nh.mat");
    write_mat(&h, 2, 2, &[(2.0, 0.0), (1.0, 0.5), (1.0, -0.5), (3.0, 0.0)]);
    write_mat(&nh, 2, 2, &[(2.0, 0.0), (1.0, 0.5), (1.0, 0.5), (3.0, 0.0)]);
    let a = wep().args(["hermitian-check", "-i"]).arg(&h).output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    let ta = stdout_of(&a);
    assert!(ta.contains("hermitian = true"), "{ta}");
    assert!(ta.contains("positive = true"), "{ta}");
    let b = wep().args(["hermitian-check", "-i"]).arg(&nh).output().unwrap();
    assert_eq!(b.status.code(), Some(0));
    assert!(stdout_of(&b).contains("hermitian = false"));
}
