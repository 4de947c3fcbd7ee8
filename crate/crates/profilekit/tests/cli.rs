use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use profilekit::io::sha256_hex;
use profilekit::{Manifest, Status, CONFIG_ROOT_ENV, MANIFEST_FILE};
use profilekit_core::date::{add_days, parse_day};
use tempfile::TempDir;

fn cli(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_profilekit"))
        .args(args)
        .current_dir(dir)
        .env_remove(CONFIG_ROOT_ENV)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

/// Default configs shrunk to a corpus small enough for a test.
fn small_configs(dir: &Path) {
    let o = cli(dir, &["init-config", "--out", "cfg"]);
    assert_eq!(code(&o), 0, "{o:?}");
    let p = dir.join("cfg/pipeline.toml");
    let text = fs::read_to_string(&p)
        .unwrap()
        .replace("users = 200", "users = 6")
        .replace("horizon_days = 1095", "horizon_days = 240")
        .replace("steps = 200", "steps = 15");
    fs::write(&p, text).unwrap();
}

fn manifest(dir: &Path) -> Manifest {
    Manifest::parse(&fs::read_to_string(dir.join(MANIFEST_FILE)).unwrap()).unwrap()
}

#[test]
fn run_writes_hashed_artifacts_and_is_deterministic() {
    let t = TempDir::new().unwrap();
    small_configs(t.path());
    for out in ["a", "b"] {
        let o = cli(t.path(), &["run", "--config", "cfg/pipeline.toml", "--out", out]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (a, b) = (manifest(&t.path().join("a")), manifest(&t.path().join("b")));
    for s in ["simulate", "semantize", "curate", "train-toy", "eval", "update"] {
        assert_eq!(a.status_of(s), Some(Status::Ok), "{s}");
    }
    assert!(a.artifacts().len() > 10);
    for (_, path, hash) in a.artifacts() {
        let bytes = fs::read(t.path().join("a").join(path)).unwrap();
        assert_eq!(sha256_hex(&bytes), hash, "{path}");
    }
    assert_eq!(a.without_durations(), b.without_durations());
    assert!(a.metric("semantize", "reduction_ratio").unwrap() > 0.5);
}

#[test]
fn config_errors_exit_2() {
    let t = TempDir::new().unwrap();
    let d = t.path();
    assert_eq!(code(&cli(d, &["run", "--config", "missing.toml"])), 2);
    fs::write(d.join("bad.toml"), "seed = 1\nbogus = true\n").unwrap();
    assert_eq!(code(&cli(d, &["run", "--config", "bad.toml"])), 2);
    // curate requested without its upstream stages
    fs::write(d.join("deps.toml"), "stages = [\"curate\"]\n").unwrap();
    assert_eq!(code(&cli(d, &["run", "--config", "deps.toml"])), 2);
    assert_eq!(code(&cli(d, &["curate", "--stage", "4", "--in", ".", "--out", "x"])), 2);
    assert_eq!(code(&cli(d, &["simulate", "--users", "0", "--out", "x"])), 2);
    assert_eq!(code(&cli(d, &["nonsense"])), 2);
}

#[test]
fn failing_stage_exits_3_and_keeps_going() {
    let t = TempDir::new().unwrap();
    small_configs(t.path());
    // one question answered four times breaks the five-vote protocol
    let mock = t.path().join("cfg/mock.toml");
    let mut text = fs::read_to_string(&mock).unwrap();
    text.push_str("\n[overrides.\"u0000:gender\"]\nlabel = false\nvotes = [true, true, true, true]\n");
    fs::write(&mock, text).unwrap();
    let o = cli(t.path(), &["run", "--config", "cfg/pipeline.toml", "--out", "out"]);
    assert_eq!(code(&o), 3);
    let m = manifest(&t.path().join("out"));
    assert_eq!(m.status_of("curate"), Some(Status::Failed));
    assert!(m.entries.iter().any(|e| e.error.as_deref().is_some_and(|x| x.contains("expected 5"))));
    for s in ["simulate", "semantize", "eval", "update", "train-toy"] {
        assert_eq!(m.status_of(s), Some(Status::Ok), "{s}");
    }
}

#[test]
fn config_root_env_resolves_relative_paths() {
    let t = TempDir::new().unwrap();
    small_configs(t.path());
    let work = TempDir::new().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_profilekit"))
        .args(["run", "--config", "pipeline.toml", "--out", "o"])
        .current_dir(work.path())
        .env(CONFIG_ROOT_ENV, t.path().join("cfg"))
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(work.path().join("o").join(MANIFEST_FILE).exists());
    // without the variable the same relative path is not found
    assert_eq!(code(&cli(work.path(), &["run", "--config", "pipeline.toml"])), 2);
}

#[test]
fn subcommands_chain() {
    let t = TempDir::new().unwrap();
    let d = t.path();
    let ok = |args: &[&str]| {
        let o = cli(d, args);
        assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
        stdout(&o)
    };
    ok(&["simulate", "--users", "4", "--horizon", "200", "--seed", "3", "--out", "sim"]);
    assert!(d.join("sim/traces/u0003.jsonl").exists());
    assert!(d.join("sim/truth.jsonl").exists());

    ok(&["semantize", "--in", "sim/traces", "--out", "mub", "--now", "2024-08-01"]);
    let report = fs::read_to_string(d.join("mub/report.txt")).unwrap();
    assert!(report.contains("reduction_ratio="), "{report}");
    let mub = fs::read_to_string(d.join("mub/u0000.mub")).unwrap();
    profilekit_core::semantize::parse_mub(&mub).unwrap();

    let counts = ok(&["curate", "--stage", "2", "--in", "mub", "--out", "cur"]);
    assert!(counts.contains("stage2_samples="), "{counts}");
    assert!(d.join("cur/stage2.jsonl").exists());

    ok(&["train-toy", "--steps", "5", "--log", "train.log"]);
    assert_eq!(fs::read_to_string(d.join("train.log")).unwrap().lines().count(), 5);

    let update = |now: &str| ok(&["update", "--snapshot", "snap/u0000.jsonl", "--delta", "mub/u0000.mub", "--now", now]);
    let first = update("2024-08-01");
    assert!(first.starts_with("applied version=1"), "{first}");
    // the default trigger waits a week after the snapshot's as_of
    let as_of = parse_day(first.trim().rsplit('=').next().unwrap()).unwrap();
    let again = update(&add_days(as_of, 3).to_string());
    assert!(again.starts_with("not triggered version=1"), "{again}");
    let later = update(&add_days(as_of, 8).to_string());
    assert!(later.starts_with("applied version=2"), "{later}");
    assert_eq!(fs::read_to_string(d.join("snap/u0000.jsonl")).unwrap().lines().count(), 3);
    assert_eq!(code(&cli(d, &["update", "--snapshot", "s.jsonl", "--delta", "mub/u0000.mub", "--now", "soon"])), 2);
}

#[test]
fn eval_command_matches_pipeline_report() {
    let t = TempDir::new().unwrap();
    small_configs(t.path());
    let o = cli(t.path(), &["run", "--config", "cfg/pipeline.toml", "--out", "out"]);
    assert_eq!(code(&o), 0);
    let o = cli(
        t.path(),
        &["eval", "--pred", "out/eval/predictions.jsonl", "--gt", "out/truth.jsonl", "--report", "rep/report.txt"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let mine = fs::read_to_string(t.path().join("rep/report.txt")).unwrap();
    assert_eq!(mine, fs::read_to_string(t.path().join("out/eval/report.txt")).unwrap());
    assert_eq!(stdout(&o), mine);
    assert!(t.path().join("rep/report.jsonl").exists());
}
