use std::path::Path;
use std::process::{Command, Output};

fn hadamard(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hadamard"))
        .args(args)
        .output()
        .unwrap()
}

fn code(args: &[&str]) -> i32 {
    hadamard(args).status.code().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let short = write(
        dir.path(),
        "short.cfg",
        "space=euclidean:2\nmap=rotation:theta=1.0\nstart=(1,0)\nN=16\n",
    );
    let bad = write(
        dir.path(),
        "bad.cfg",
        "space=euclidean:2\nmap=rotation:theta=abc\nstart=(1,0)\nN=16\n",
    );
    let expanding = write(
        dir.path(),
        "grow.cfg",
        "space=euclidean:2\nfield=decay:-0.01\nstart=(1,0)\nT=20\n",
    );

    assert_eq!(code(&["verify-space", "river", "--samples", "500"]), 0);
    assert_eq!(code(&["verify-space", "circle", "--samples", "500"]), 3);
    assert_eq!(code(&["ergodic", &short]), 2);
    assert_eq!(code(&["semigroup", &expanding]), 3);
    assert_eq!(code(&["ergodic", &bad]), 4);
    assert_eq!(code(&["semigroup", &short]), 4);
    assert_eq!(code(&["verify-space", "sphere"]), 4);
    assert_eq!(code(&["frobnicate"]), 4);
    assert_eq!(code(&["--help"]), 0);

    let err = String::from_utf8(hadamard(&["ergodic", &bad]).stderr).unwrap();
    assert!(
        err.contains("line 2, column 5") && err.contains("`map`"),
        "{err}"
    );
}

#[test]
fn flags_override_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "r.cfg",
        "space=euclidean:2\nmap=rotation:theta=1.0\nstart=(1,0)\nN=2000\n",
    );
    let out = dir.path().join("out");
    let out_s = out.to_string_lossy().into_owned();
    let o = hadamard(&[
        "ergodic",
        &cfg,
        "--schedule",
        "10,100,1000",
        "--seed",
        "9",
        "--out",
        &out_s,
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let means = std::fs::read_to_string(out.join("means.csv")).unwrap();
    let ns: Vec<&str> = means
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(ns, ["10", "100", "1000"]);

    let report = hadamard(&["report", &out_s]);
    assert_eq!(report.status.code(), Some(0));
    let text = String::from_utf8(report.stdout).unwrap();
    assert!(
        text.contains("converged") && text.contains("[ok]"),
        "{text}"
    );
}

#[test]
fn mean_of_a_points_file() {
    let dir = tempfile::tempdir().unwrap();
    let pts = write(dir.path(), "pts.txt", "(-2, 1)\n(2, 1)\n(0, 2)\n");
    let o = hadamard(&["mean", "river", &pts]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("mean              (0, 0)"), "{text}");
    assert!(text.contains("7.333333333"), "{text}");
}
