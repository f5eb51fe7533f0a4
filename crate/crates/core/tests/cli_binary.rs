use std::fs;
use std::process::Command;

use tempfile::tempdir;

fn fraclab() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_fraclab"));
    c.env_remove("FRACLAB_CACHE");
    c
}

#[test]
fn figure1_is_deterministic_and_matches_golden() {
    let a = fraclab().arg("figure1").output().unwrap();
    let b = fraclab().arg("figure1").output().unwrap();
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(String::from_utf8(a.stdout).unwrap(), fraclab::verify::FIGURE1_GOLDEN);
}

#[test]
fn correlate_prints_exact_value() {
    let o = fraclab()
        .args(["correlate", "--n", "2", "--m", "6", "--x-range", "7"])
        .output()
        .unwrap();
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains(",5/18,"), "{text}");
}

#[test]
fn cache_round_trip_and_flag_over_env() {
    let dir = tempdir().unwrap();
    let env_path = dir.path().join("env.muv1");
    let flag_path = dir.path().join("flag.muv1");
    let o = fraclab()
        .env("FRACLAB_CACHE", &env_path)
        .args(["--limit", "5000", "sieve"])
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(env_path.exists());

    let o = fraclab()
        .env("FRACLAB_CACHE", &env_path)
        .args(["--limit", "5000", "--cache"])
        .arg(&flag_path)
        .arg("sieve")
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(flag_path.exists());
    assert_eq!(fs::read(&env_path).unwrap(), fs::read(&flag_path).unwrap());

    let t = fraclab::MoebiusTable::load_cache(&flag_path).unwrap();
    assert_eq!(t.limit(), 5000);
    assert_eq!(t.mertens(1000).unwrap(), 2);
}

#[test]
fn corrupt_cache_warns_and_rebuilds() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("bad.muv1");
    fs::write(&path, b"XXXXnot a cache").unwrap();
    let o = fraclab()
        .args(["--limit", "2000", "--cache"])
        .arg(&path)
        .args(["theorem1", "--n", "2", "--exact"])
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("ignoring sieve cache"));
    assert_eq!(&fs::read(&path).unwrap()[..4], b"MUV1");
}

#[test]
fn out_flag_writes_file() {
    let dir = tempdir().unwrap();
    let path = dir.path().join("s.csv");
    let o = fraclab()
        .args(["--limit", "1000", "--out"])
        .arg(&path)
        .args(["figure2", "--n-max", "10"])
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    assert_eq!(fs::read_to_string(&path).unwrap().lines().count(), 11);
}

#[test]
fn exit_codes() {
    let o = fraclab()
        .args(["--limit", "1000", "theorem1", "--n", "5000"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("sieve_limit"));

    let o = fraclab().arg("bogus").output().unwrap();
    assert_eq!(o.status.code(), Some(2));

    let o = fraclab()
        .args(["correlate", "--n", "0", "--m", "6"])
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));

    let dir = tempdir().unwrap();
    let o = fraclab()
        .arg("--out")
        .arg(dir.path().join("missing/dir/x.csv"))
        .arg("figure1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn tails_report_columns() {
    let o = fraclab()
        .args(["--limit", "100000", "tails", "--cutoffs", "1000,10000"])
        .output()
        .unwrap();
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("N,mertens_ratio,tail_u2,tail_u1,bound_fit"));
    assert_eq!(lines.count(), 2);
}
