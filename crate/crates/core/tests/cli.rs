//! End-to-end runs of the `mrm` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

use mrm_learn::experiment::strip_timing;
use mrm_learn::io::mrm::parse_mrm;

fn mrm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mrm")).args(args).output().expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mrm-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

/// A short treasure run: full precision, few exploitation actions.
fn quick_config() -> PathBuf {
    let path = scratch("quick.cfg");
    std::fs::write(&path, "domain = treasure\napf = 1.0\nacts_to_ext = 150\n").unwrap();
    path
}

#[test]
fn batch_is_reproducible_modulo_timing() {
    let cfg = quick_config();
    let cfg = cfg.to_str().unwrap();
    let a = mrm(&["batch", "--config", cfg, "--trials", "2", "--seed", "11"]);
    let b = mrm(&["batch", "--config", cfg, "--trials", "2", "--seed", "11"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let (a, b) = (String::from_utf8(a.stdout).unwrap(), String::from_utf8(b.stdout).unwrap());
    assert_eq!(a.lines().count(), 4, "header, two trials, summary");
    assert!(a.starts_with("trial,seed,apf,return,mq_attempts,"));
    assert_eq!(strip_timing(&a), strip_timing(&b));
    let rows: Vec<&str> = a.lines().collect();
    assert!(rows[1].starts_with("0,11,1,"));
    assert!(rows[2].starts_with("1,12,1,"));
    assert!(rows[3].starts_with("mean±sd,,1,"));
}

#[test]
fn learn_writes_a_machine_file() {
    let cfg = quick_config();
    let out = scratch("learned.mrm");
    let run = mrm(&["learn", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert!(String::from_utf8_lossy(&run.stderr).contains("learned_ok 1"));
    let m = parse_mrm(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let target = mrm_learn::env::treasure_machine(mrm_learn::env::TREASURE_DEFAULT_REWARD);
    assert_eq!(m.equivalent(&target).unwrap(), None);

    // Feeding the learned machine back to `exploit` prints its strategy.
    let exploit = mrm(&["exploit", "--apf", "1.0", "--machine", out.to_str().unwrap()]);
    assert!(exploit.status.success(), "{}", String::from_utf8_lossy(&exploit.stderr));
    assert!(!exploit.stdout.is_empty());
    assert!(String::from_utf8_lossy(&exploit.stderr).contains("value at start"));
}

#[test]
fn inspect_table_dumps_the_rows() {
    let cfg = quick_config();
    let run = mrm(&["inspect-table", "--config", cfg.to_str().unwrap()]);
    assert!(run.status.success());
    let text = String::from_utf8(run.stdout).unwrap();
    assert!(text.lines().count() > 5);
}

#[test]
fn bad_input_fails_with_a_diagnostic() {
    let run = mrm(&["batch", "--apf", "1.5"]);
    assert!(!run.status.success());
    assert!(String::from_utf8_lossy(&run.stderr).contains("apf"));

    let cfg = scratch("bad.cfg");
    std::fs::write(&cfg, "domain = treasure\nwarp = 9\n").unwrap();
    let run = mrm(&["batch", "--config", cfg.to_str().unwrap()]);
    assert!(!run.status.success());
    let err = String::from_utf8_lossy(&run.stderr);
    assert!(err.contains("line 2") && err.contains("warp"), "{err}");

    let run = mrm(&["exploit", "--machine", "/nonexistent/m.mrm"]);
    assert!(!run.status.success());
    assert!(String::from_utf8_lossy(&run.stderr).starts_with("error:"));
}
