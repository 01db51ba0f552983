use std::path::{Path, PathBuf};

use dispo_core::{
    builtin_corpus, sound, Justification, Response, SoundnessConfig, Store, StoreOptions,
};
use dispo_service::cli::{run_cli, Io};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

struct Output {
    code: i32,
    stdout: String,
    stderr: String,
}

fn dispo(store: &Path, args: &[&str], stdin: &str) -> Output {
    let mut argv = vec!["dispo", "--store", store.to_str().unwrap()];
    argv.extend_from_slice(args);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run_cli(
        argv,
        Io {
            stdin: &mut stdin.as_bytes(),
            stdout: &mut out,
            stderr: &mut err,
        },
    );
    Output {
        code,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

#[test]
fn sound_reports_verdict_first() {
    let dir = tempfile::tempdir().unwrap();
    let out = dispo(
        dir.path(),
        &[
            "sound",
            "--scenario",
            "postoffice",
            "--response",
            "yes",
            "--justification",
            "P1=1,P2=1,P3=1,P4=4",
        ],
        "",
    );
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(out.stdout.lines().next(), Some("unsound"));
    assert!(out.stdout.contains("P1: value 1"), "{}", out.stdout);

    let out = dispo(
        dir.path(),
        &[
            "sound",
            "--scenario",
            "fruits",
            "--response",
            "no",
            "--justification",
            "P1=1,P2=1,P3=1,P4=5",
        ],
        "",
    );
    assert_eq!(out.stdout.lines().next(), Some("sound"));
}

#[test]
fn sound_agrees_with_library() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = builtin_corpus();
    let cfg = SoundnessConfig::default();
    for scenario in corpus.scenarios() {
        for response in ["yes", "no"] {
            for values in [
                [1, 1, 1, 1],
                [5, 5, 5, 5],
                [3, 3, 3, 3],
                [4, 2, 3, 1],
                [2, 4, 1, 5],
            ] {
                let j = Justification::from_array(values);
                let out = dispo(
                    dir.path(),
                    &[
                        "sound",
                        "--scenario",
                        scenario.id(),
                        "--response",
                        response,
                        "--justification",
                        &j.to_string(),
                        "--format",
                        "json",
                    ],
                    "",
                );
                let got: serde_json::Value = serde_json::from_str(&out.stdout).unwrap();
                let want = sound(scenario, Response::parse(response).unwrap(), &j, &cfg);
                assert_eq!(got, serde_json::to_value(&want).unwrap());
            }
        }
    }
}

#[test]
fn sound_rejects_bad_justification() {
    let dir = tempfile::tempdir().unwrap();
    let out = dispo(
        dir.path(),
        &[
            "sound",
            "--scenario",
            "fruits",
            "--response",
            "no",
            "--justification",
            "P1=7",
        ],
        "",
    );
    assert_eq!(out.code, 1);
    assert!(out.stderr.contains("P1"), "{}", out.stderr);
}

#[test]
fn validate_fixtures_and_broken_corpus() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["builtin-corpus.json", "synthetic-corpus.json"] {
        let out = dispo(
            dir.path(),
            &["validate", fixture(name).to_str().unwrap()],
            "",
        );
        assert_eq!(out.code, 0, "{name}: {}{}", out.stdout, out.stderr);
        assert!(out.stdout.starts_with("ok: corpus"), "{}", out.stdout);
    }

    let broken = dir.path().join("broken.json");
    std::fs::write(
        &broken,
        r#"{"id":"b","scenarios":[
            {"id":"x","setting":"s","problem":"p","action":"a","press":["P4"],"polarity":{"P4":"aligned"}},
            {"id":"x","setting":"s","problem":"p","action":"a","press":["P9"],"polarity":{}}
        ]}"#,
    )
    .unwrap();
    let out = dispo(dir.path(), &["validate", broken.to_str().unwrap()], "");
    assert_eq!(out.code, 1);
    assert!(out.stdout.contains("scenarios[1]"), "{}", out.stdout);
}

#[test]
fn run_then_profile_then_predict() {
    let dir = tempfile::tempdir().unwrap();
    let out = dispo(
        dir.path(),
        &["predict", "--agent", "ann", "--scenario", "fruits"],
        "",
    );
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert_eq!(out.stdout.lines().next(), Some("abstain"));

    let out = dispo(dir.path(), &["profile", "show", "--agent", "ann"], "");
    assert_eq!(out.code, 1);

    let out = dispo(
        dir.path(),
        &["run", "--agent", "ann"],
        "yes P1=5,P2=1,P3=1,P4=1\nno P1=1,P2=1,P3=1,P4=5\n",
    );
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.contains("law abiding"), "{}", out.stdout);
    assert!(
        out.stdout.contains("done: 2 scenarios answered"),
        "{}",
        out.stdout
    );

    let out = dispo(dir.path(), &["profile", "show", "--agent", "ann"], "");
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(
        out.stdout.contains("legality {P4}: law abiding"),
        "{}",
        out.stdout
    );

    let out = dispo(
        dir.path(),
        &["predict", "--agent", "ann", "--scenario", "fruits"],
        "",
    );
    assert!(
        out.stdout.starts_with("no (confidence 1.00)"),
        "{}",
        out.stdout
    );
}

#[test]
fn run_resumes_interrupted_session() {
    let dir = tempfile::tempdir().unwrap();
    let out = dispo(
        dir.path(),
        &["run", "--agent", "bo"],
        "yes P1=5,P2=1,P3=1,P4=1\n",
    );
    assert!(out.stdout.contains("stopped at 1/2"), "{}", out.stdout);
    let session = out
        .stdout
        .lines()
        .next()
        .unwrap()
        .strip_prefix("session ")
        .unwrap()
        .to_owned();

    let out = dispo(
        dir.path(),
        &["run", "--agent", "bo", "--session", &session],
        "yes P1=1,P2=1,P3=1,P4=1\n",
    );
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.contains("done: 2"), "{}", out.stdout);

    let out = dispo(
        dir.path(),
        &["run", "--agent", "someone-else", "--session", &session],
        "",
    );
    assert_eq!(out.code, 1);
}

#[test]
fn interactive_run_reprompts() {
    let dir = tempfile::tempdir().unwrap();
    let input = "perhaps\nyes\n5\n1\n9\n1\n1\n";
    let out = dispo(
        dir.path(),
        &["run", "--agent", "cy", "--interactive"],
        input,
    );
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.contains("please answer yes or no"));
    assert!(out
        .stdout
        .contains("please enter a whole number from 1 to 5"));
    assert!(out.stdout.contains("postoffice: sound"), "{}", out.stdout);
    assert!(out.stdout.contains("stopped at 1/2"));
}

#[test]
fn export_and_replay_rebuild_profile() {
    let dir = tempfile::tempdir().unwrap();
    dispo(
        dir.path(),
        &["run", "--agent", "dee"],
        "yes P1=5,P2=1,P3=1,P4=1\nyes P1=1,P2=1,P3=1,P4=1\n",
    );
    let out = dispo(dir.path(), &["export", "--session", "session-1"], "");
    assert_eq!(out.code, 0, "{}", out.stderr);
    let export_file = dir.path().join("export.json");
    std::fs::write(&export_file, &out.stdout).unwrap();

    let original = dispo(
        dir.path(),
        &["profile", "show", "--agent", "dee", "--format", "json"],
        "",
    )
    .stdout;

    let fresh = tempfile::tempdir().unwrap();
    let out = dispo(fresh.path(), &["replay", export_file.to_str().unwrap()], "");
    assert_eq!(out.code, 0, "{}", out.stderr);
    assert!(out.stdout.contains("replayed 2 records"));
    let replayed = dispo(
        fresh.path(),
        &["profile", "show", "--agent", "dee", "--format", "json"],
        "",
    )
    .stdout;
    assert_eq!(replayed, original);

    let store = Store::open(
        fresh.path(),
        vec![builtin_corpus()],
        StoreOptions::default(),
    )
    .unwrap();
    let agent = dispo_core::AgentId::new("dee").unwrap();
    assert_eq!(
        store
            .profile(&agent)
            .unwrap()
            .unwrap()
            .observations(
                dispo_core::Dimension::Legality,
                dispo_core::Category::from_params([dispo_core::ParameterId::P4])
            )
            .len(),
        1
    );
}

#[test]
fn custom_corpus_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("dispo.json");
    std::fs::write(
        &config,
        format!(
            r#"{{"corpora":[{:?}],"storage_dir":"data","labels":{{"legality":{{"negative":"outlaw"}}}}}}"#,
            fixture("synthetic-corpus.json")
        ),
    )
    .unwrap();
    let mut argv = vec!["dispo", "--config", config.to_str().unwrap()];
    argv.extend(["run", "--agent", "eve"]);
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let input = "yes P1=1,P2=1,P3=1,P4=1\n";
    let code = run_cli(
        argv,
        Io {
            stdin: &mut input.as_bytes(),
            stdout: &mut out,
            stderr: &mut err,
        },
    );
    let out = String::from_utf8(out).unwrap();
    assert_eq!(code, 0, "{}", String::from_utf8_lossy(&err));
    assert!(out.contains("synthetic-shoplifting: sound"), "{out}");
    assert!(out.contains("outlaw"), "{out}");
    assert!(dir.path().join("data/profiles").is_dir());
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dispo(dir.path(), &["predict", "--agent", "x"], "");
    assert_eq!(out.code, 2);
    assert!(out.stderr.contains("--scenario"));
}
