use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cholinv_cli::matrix_file;
use cholinv_core::{DenseMatrix, C64};
use tempfile::TempDir;

fn cholinv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cholinv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_matrix(dir: &TempDir, name: &str, m: &DenseMatrix) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, matrix_file::format(m)).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn read(p: &Path) -> DenseMatrix {
    matrix_file::read(p).unwrap()
}

fn pd3() -> DenseMatrix {
    DenseMatrix::from_rows(&[
        &[C64::new(4.0, 0.0), C64::new(1.0, -0.5), C64::new(0.2, 0.1)],
        &[C64::new(1.0, 0.5), C64::new(3.0, 0.0), C64::new(-0.4, 0.3)],
        &[
            C64::new(0.2, -0.1),
            C64::new(-0.4, -0.3),
            C64::new(2.0, 0.0),
        ],
    ])
}

#[test]
fn decompose_identity_chol() {
    let dir = TempDir::new().unwrap();
    let a = write_matrix(&dir, "eye.txt", &DenseMatrix::identity(3));
    let out = dir.path().join("r.txt");
    let o = cholinv(&[
        "decompose",
        "--input",
        s(&a),
        "--method",
        "chol",
        "--output",
        s(&out),
    ]);
    assert!(o.status.success());
    assert_eq!(read(&out), DenseMatrix::identity(3));
}

#[test]
fn decompose_ldl_writes_pivots() {
    let dir = TempDir::new().unwrap();
    let a = write_matrix(
        &dir,
        "a.txt",
        &DenseMatrix::from_real_rows(&[&[2.0, 1.0], &[1.0, 2.0]]),
    );
    let out = dir.path().join("r.txt");
    let o = cholinv(&[
        "decompose",
        "--input",
        s(&a),
        "--method",
        "ldl",
        "--output",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(
        read(&out),
        DenseMatrix::from_real_rows(&[&[1.0, 0.5], &[0.0, 1.0]])
    );
    let d: Vec<f64> = fs::read_to_string(dir.path().join("r.txt.d"))
        .unwrap()
        .lines()
        .map(|l| l.parse().unwrap())
        .collect();
    assert_eq!(d, [2.0, 1.5]);
}

#[test]
fn non_square_input_exits_2() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.txt");
    fs::write(&a, "2 3\n1,0 0,0 0,0\n0,0 1,0 0,0\n").unwrap();
    let out = dir.path().join("r.txt");
    for args in [
        vec![
            "decompose",
            "--input",
            s(&a),
            "--method",
            "chol",
            "--output",
            s(&out),
        ],
        vec![
            "invert",
            "--input",
            s(&a),
            "--method",
            "trimat",
            "--output",
            s(&out),
        ],
    ] {
        let o = cholinv(&args);
        assert_eq!(o.status.code(), Some(2));
        assert!(String::from_utf8_lossy(&o.stderr).contains("square"));
    }
    assert!(!out.exists());
}

#[test]
fn malformed_file_exits_2_with_line() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.txt");
    fs::write(&a, "# header\n2 2\n1,0 0,0\n0,0 oops\n").unwrap();
    let out = dir.path().join("r.txt");
    let o = cholinv(&[
        "decompose",
        "--input",
        s(&a),
        "--method",
        "chol",
        "--output",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"));
}

#[test]
fn missing_input_exits_1() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("r.txt");
    let missing = dir.path().join("nope.txt");
    let o = cholinv(&[
        "decompose",
        "--input",
        s(&missing),
        "--method",
        "chol",
        "--output",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bad_flags_exit_2() {
    assert_eq!(
        cholinv(&["invert", "--method", "bogus"]).status.code(),
        Some(2)
    );
    assert_eq!(cholinv(&["opcount", "--sizes", "1"]).status.code(), Some(2));
    assert_eq!(
        cholinv(&["opcount", "--methods", "lu"]).status.code(),
        Some(2)
    );
    assert_eq!(
        cholinv(&["fxperr", "--qformat", "2.0"]).status.code(),
        Some(2)
    );
    assert_eq!(cholinv(&["fxperr", "--trials", "0"]).status.code(), Some(2));
}

#[test]
fn pivot_and_hermitian_errors() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("x.txt");
    let indefinite = write_matrix(
        &dir,
        "ind.txt",
        &DenseMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, 1.0]]),
    );
    let o = cholinv(&[
        "invert",
        "--input",
        s(&indefinite),
        "--method",
        "proposed-chol",
        "--output",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("pivot 2"));
    let o = cholinv(&[
        "decompose",
        "--input",
        s(&indefinite),
        "--method",
        "ldl",
        "--output",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let singular = write_matrix(
        &dir,
        "sing.txt",
        &DenseMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]),
    );
    let o = cholinv(&[
        "decompose",
        "--input",
        s(&singular),
        "--method",
        "ldl",
        "--output",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(3));
    let o = cholinv(&[
        "invert",
        "--input",
        s(&singular),
        "--method",
        "trimat",
        "--nonhermitian",
        "--output",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(3));

    let skew = write_matrix(
        &dir,
        "nh.txt",
        &DenseMatrix::from_real_rows(&[&[1.0, 2.0], &[3.0, 1.0]]),
    );
    fs::remove_file(&out).unwrap();
    let o = cholinv(&[
        "invert",
        "--input",
        s(&skew),
        "--method",
        "trimat",
        "--output",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(4));
    assert!(!out.exists(), "no output on failure");
}

#[test]
fn invert_diag_and_methods_agree() {
    let dir = TempDir::new().unwrap();
    let d = write_matrix(&dir, "d.txt", &DenseMatrix::from_diag(&[4.0, 9.0]));
    let out = dir.path().join("x.txt");
    let o = cholinv(&[
        "invert",
        "--input",
        s(&d),
        "--method",
        "proposed-chol",
        "--output",
        s(&out),
    ]);
    assert!(o.status.success());
    let x = read(&out);
    assert_eq!(x[(0, 0)], C64::new(0.25, 0.0));
    assert!((x[(1, 1)].re - 1.0 / 9.0).abs() < 1e-16);
    assert_eq!(x[(0, 1)], C64::new(0.0, 0.0));

    let a = write_matrix(&dir, "a.txt", &pd3());
    let results: Vec<DenseMatrix> = [
        "eqsolve-chol",
        "eqsolve-ldl",
        "trimat",
        "proposed-chol",
        "proposed-ldl",
    ]
    .iter()
    .map(|m| {
        let o = cholinv(&[
            "invert",
            "--input",
            s(&a),
            "--method",
            m,
            "--output",
            s(&out),
        ]);
        assert!(o.status.success());
        read(&out)
    })
    .collect();
    for x in &results[1..] {
        assert!(x.rel_dist(&results[0]) <= 1e-9);
    }
    let residual = pd3()
        .matmul(&results[3])
        .sub(&DenseMatrix::identity(3))
        .max_abs();
    assert!(residual < 1e-14);
}

#[test]
fn nonhermitian_inverse() {
    let dir = TempDir::new().unwrap();
    let m = DenseMatrix::from_rows(&[
        &[C64::new(1.0, 1.0), C64::new(2.0, 0.0)],
        &[C64::new(0.0, -1.0), C64::new(3.0, 0.5)],
    ]);
    let a = write_matrix(&dir, "a.txt", &m);
    let out = dir.path().join("x.txt");
    let o = cholinv(&[
        "invert",
        "--input",
        s(&a),
        "--method",
        "proposed-ldl",
        "--nonhermitian",
        "--output",
        s(&out),
    ]);
    assert!(o.status.success());
    let residual = m
        .matmul(&read(&out))
        .sub(&DenseMatrix::identity(2))
        .max_abs();
    assert!(residual < 1e-13);
}

#[test]
fn count_ops_prints_one_row() {
    let dir = TempDir::new().unwrap();
    let a = write_matrix(&dir, "a.txt", &pd3());
    let out = dir.path().join("x.txt");
    let o = cholinv(&[
        "invert",
        "--input",
        s(&a),
        "--method",
        "proposed-ldl",
        "--count-ops",
        "--output",
        s(&out),
    ]);
    assert!(o.status.success());
    let stdout = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = stdout.lines().collect();
    assert_eq!(lines[0], "method,n,cmul,cdiv,cadd,csqrt,mul_ops,fitted_c");
    assert_eq!(lines.len(), 2);
    let fields: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(fields[..2], ["proposed-ldl", "3"]);
    assert_eq!(fields[5], "0", "LDL path takes no square roots");
    assert_eq!(fields[7], "");
}

#[test]
fn round_trip_through_the_binary_is_bit_exact() {
    let dir = TempDir::new().unwrap();
    let a = write_matrix(&dir, "a.txt", &pd3());
    let out = dir.path().join("x.txt");
    let o = cholinv(&[
        "invert",
        "--input",
        s(&a),
        "--method",
        "trimat",
        "--output",
        s(&out),
    ]);
    assert!(o.status.success());
    let expected = cholinv_core::invert(&pd3(), cholinv_core::InverseMethod::TriMat, None).unwrap();
    let got = read(&out);
    for (e, g) in expected.as_slice().iter().zip(got.as_slice()) {
        assert_eq!(e.re.to_bits(), g.re.to_bits());
        assert_eq!(e.im.to_bits(), g.im.to_bits());
    }
    // rewriting what was read gives the same bytes
    assert_eq!(matrix_file::format(&got), fs::read_to_string(&out).unwrap());
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn opcount_fit_and_ordering() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("counts.csv");
    let o = cholinv(&[
        "opcount",
        "--methods",
        "proposed-chol,trimat,eqsolve-chol",
        "--sizes",
        "64,128,256",
        "--output",
        s(&out),
    ]);
    assert!(o.status.success());
    let rows = csv_rows(&fs::read_to_string(&out).unwrap());
    assert_eq!(rows.len(), 9);
    let fitted = |m: &str| -> f64 { rows.iter().find(|r| r[0] == m).unwrap()[7].parse().unwrap() };
    let (e, t, p) = (
        fitted("eqsolve-chol"),
        fitted("trimat"),
        fitted("proposed-chol"),
    );
    assert!((p / 0.5 - 1.0).abs() <= 0.15, "{p}");
    assert!(e > t && t > p);
    // sorted by method, then n
    let order: Vec<(&str, &str)> = rows
        .iter()
        .map(|r| (r[0].as_str(), r[1].as_str()))
        .collect();
    assert_eq!(order[0], ("eqsolve-chol", "64"));
    assert_eq!(order[2], ("eqsolve-chol", "256"));
    assert_eq!(order[8], ("proposed-chol", "256"));
}

#[test]
fn opcount_single_size_leaves_fit_empty() {
    let o = cholinv(&["opcount", "--methods", "chol,ldl", "--sizes", "32"]);
    assert!(o.status.success());
    let rows = csv_rows(&String::from_utf8(o.stdout).unwrap());
    assert_eq!(rows.len(), 2);
    for r in &rows {
        assert_eq!(r.len(), 8);
        assert_eq!(r[7], "");
    }
    assert_eq!(rows[1][5], "0");
}

#[test]
fn fxperr_defaults_shape() {
    let o = cholinv(&["fxperr", "--trials", "3"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text
        .starts_with("n,method,int_bits,frac_bits,trials,failures,mean_rel_err,mean_residual\n"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 15);
    assert!(rows
        .iter()
        .all(|r| r[2] == "2" && r[3] == "13" && r[4] == "3"));
}

#[test]
fn fxperr_is_deterministic_and_monotone() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |p: &Path| {
        vec![
            "fxperr".to_string(),
            "--sizes".into(),
            "8".into(),
            "--qformat".into(),
            "2.8,2.13,2.23".into(),
            "--trials".into(),
            "30".into(),
            "--seed".into(),
            "7".into(),
            "--output".into(),
            s(p).to_string(),
        ]
    };
    for p in [&a, &b] {
        let args = args(p);
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        assert!(cholinv(&refs).status.success());
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 15);
    for chunk in rows.chunks(3) {
        let errs: Vec<f64> = chunk.iter().map(|r| r[6].parse().unwrap()).collect();
        assert_eq!(
            chunk.iter().map(|r| r[3].as_str()).collect::<Vec<_>>(),
            ["8", "13", "23"]
        );
        assert!(errs[1] <= errs[0] && errs[2] <= errs[1], "{errs:?}");
    }
}
