//! Runs the `splforge` binary and checks outputs and the exit-code contract.

use std::path::{Path, PathBuf};
use std::process::Command;

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

fn webspl() -> PathBuf {
    fixtures().join("webspl.fm")
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn run<I, S>(args: I) -> Run
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    let out = Command::new(env!("CARGO_BIN_EXE_splforge")).args(args).output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn count_and_versions() {
    let r = run([Path::new("count"), &webspl()]);
    assert_eq!((r.code, r.stdout.as_str()), (0, "18\n"));
    let r = run(["count".as_ref(), webspl().as_os_str(), "--version".as_ref(), "1".as_ref()]);
    assert_eq!((r.code, r.stdout.as_str()), (0, "3\n"));
    let tmp = tempfile::tempdir().unwrap();
    let root_only = write(tmp.path(), "r.fm", "model R\nfeature R\n");
    assert_eq!(run([Path::new("count"), &root_only]).stdout, "1\n");
}

#[test]
fn validate_exit_codes() {
    let f = fixtures();
    let r = run([Path::new("validate"), &webspl(), &f.join("all-features.cfg")]);
    assert_eq!((r.code, r.stdout.as_str()), (0, "valid\n"));
    let tmp = tempfile::tempdir().unwrap();
    let bad = write(tmp.path(), "bad.cfg", "-DataManagement\n");
    let r = run([Path::new("validate"), &webspl(), &bad]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.starts_with("invalid\n"));
    assert!(r.stdout.contains("conflict"));
    let r = run([Path::new("validate"), &webspl(), &tmp.path().join("missing.cfg")]);
    assert_eq!(r.code, 2);
    assert!(r.stdout.is_empty() && !r.stderr.is_empty());
}

#[test]
fn total_but_invalid_lists_violations() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "c.cfg",
        "+WebSPL\n+DataManagement\n+Internationalization\n+PtBR\n-EnUS\n+UserProfileControl\n+ProfileManagement\n\
         -UserManagement\n+PermissionManagement\n-DataExport\n",
    );
    let r = run([Path::new("validate"), &webspl(), &cfg]);
    assert_eq!(r.code, 1);
    let mut lines = r.stdout.lines();
    assert_eq!(lines.next(), Some("invalid"));
    let rest: Vec<&str> = lines.collect();
    assert_eq!(rest.len(), 1, "{}", r.stdout);
    assert!(rest[0].starts_with("requires PermissionManagement UserManagement"), "{}", rest[0]);
}

#[test]
fn parse_errors_exit_two_with_positions() {
    let tmp = tempfile::tempdir().unwrap();
    let m = write(tmp.path(), "dup.fm", "model M\nfeature R {\n  optional feature A\n  optional feature A\n}\n");
    let r = run([Path::new("count"), &m]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("dup.fm:4:"), "{}", r.stderr);
    assert!(r.stderr.contains("E002"));
    let cfg = write(tmp.path(), "u.cfg", "+Ghost\n");
    let r = run([Path::new("propagate"), &webspl(), &cfg]);
    assert_eq!(r.code, 2);
    assert!(r.stderr.contains("E001"));
}

#[test]
fn propagate_prints_cfg_lines() {
    let tmp = tempfile::tempdir().unwrap();
    let pm = write(tmp.path(), "pm.cfg", "+PermissionManagement\n");
    let r = run([Path::new("propagate"), &webspl(), &pm]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.lines().any(|l| l == "+UserManagement"));
    let empty = write(tmp.path(), "empty.cfg", "");
    let r = run([Path::new("propagate"), &webspl(), &empty]);
    assert!(r.stdout.lines().any(|l| l == "+WebSPL"));
    let conflict = write(tmp.path(), "c.cfg", "-WebSPL\n");
    let r = run([Path::new("propagate"), &webspl(), &conflict]);
    assert_eq!((r.code, r.stdout.as_str()), (1, "conflict\n"));
}

#[test]
fn derive_goldens_and_cycles() {
    let f = fixtures();
    for name in ["mandatory-only", "all-features"] {
        let r = run([Path::new("derive"), &webspl(), &f.join(format!("{name}.cfg"))]);
        assert_eq!(r.code, 0, "{}", r.stderr);
        assert_eq!(r.stdout, std::fs::read_to_string(f.join(format!("golden/{name}.manifest"))).unwrap());
    }
    let tmp = tempfile::tempdir().unwrap();
    let model = write(
        tmp.path(),
        "loop.fm",
        "model Loop\nfeature R => module \"r\" {\n  mandatory feature A => module \"a\"\n  mandatory feature B => module \"b\"\n}\nrequires A B\nrequires B A\n",
    );
    let cfg = write(tmp.path(), "loop.cfg", "+R\n+A\n+B\n");
    let out = tmp.path().join("loop.manifest");
    let r = run([Path::new("derive"), &model, &cfg, Path::new("-o"), &out]);
    assert_eq!(r.code, 1);
    assert!(std::fs::read_to_string(&out).unwrap().ends_with("cycles: 1\n"));
    let invalid = write(tmp.path(), "bad.cfg", "+R\n-A\n+B\n");
    assert_eq!(run([Path::new("derive"), &model, &invalid]).code, 1);
}

#[test]
fn measure_and_compare() {
    let f = fixtures().join("metrics");
    let r = run([Path::new("measure"), &f.join("corpus")]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout, std::fs::read_to_string(f.join("corpus.metrics")).unwrap());

    let tmp = tempfile::tempdir().unwrap();
    let r = run([Path::new("measure"), tmp.path()]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("files=0\n") && r.stdout.ends_with("debt_days=0.0\n"));

    let t = f.join("webspl-columns");
    let r = run([
        Path::new("compare"),
        Path::new("--baseline"),
        &t.join("cwa.metrics"),
        Path::new("--spl"),
        &t.join("spl.metrics"),
        Path::new("--derived"),
        &t.join("dwa.metrics"),
    ]);
    assert_eq!(r.code, 0);
    assert_eq!(r.stdout, std::fs::read_to_string(t.join("comparison.txt")).unwrap());
}

#[test]
fn measure_flags_change_debt() {
    let f = fixtures().join("metrics/corpus");
    let r = run(["measure".as_ref(), f.as_os_str(), "--complexity-cap".as_ref(), "20".as_ref()]);
    assert!(r.stdout.contains("debt_minutes=35\n"));
    let r = run(["measure".as_ref(), f.as_os_str(), "--min-dup-block".as_ref(), "1".as_ref()]);
    assert_eq!(r.code, 2);
    let r = run(["measure".as_ref(), f.as_os_str(), "--glob".as_ref(), "sample*.gsrc".as_ref()]);
    assert!(r.stdout.contains("files=1\n"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(["count"]).code, 2);
    assert_eq!(run(["frobnicate"]).code, 2);
    assert_eq!(run(["count".as_ref(), webspl().as_os_str(), "--version".as_ref(), "x".as_ref()]).code, 2);
    assert_eq!(run(["count".as_ref(), webspl().as_os_str(), "--version".as_ref(), "0".as_ref()]).code, 2);
}

#[test]
fn outputs_are_deterministic() {
    let a = run([Path::new("enumerate"), &webspl()]);
    let b = run([Path::new("enumerate"), &webspl()]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout.lines().count(), 18);
}

#[test]
fn analyze_reports_core_features() {
    let r = run([Path::new("analyze"), &webspl()]);
    assert_eq!(r.code, 0);
    assert_eq!(
        r.stdout,
        "products: 18\nvoid: false\ncore: DataManagement,Internationalization,ProfileManagement,UserProfileControl,WebSPL\n\
         dead:\nfalse-optional:\n"
    );
}
