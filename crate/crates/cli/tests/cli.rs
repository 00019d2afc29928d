use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use asgs_core::formats::{encode_vector, Document};
use asgs_core::AuthorizedShareSet;

fn asgs(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_asgs"))
        .current_dir(dir)
        .env_remove("ASGS_DEFAULT_BITS")
        .args(args)
        .output()
        .expect("run asgs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const BULLETIN: &str = r#"{"version":1,"kind":"bulletin","bits":8,"set1_role":"1","set2_role":"2","set1":["11","22"],"set2":["44","88","3e"]}"#;
const KEYS: &str = r#"{"version":1,"kind":"key_assignment","bits":8,"set1_role":"1","set2_role":"2","set1":["10","20"],"set2":["40","80","31"]}"#;

#[test]
fn fastshare_with_owner_fixture() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("f.hex"), "# owner\n11\n22\n").unwrap();
    let o = asgs(
        dir.path(),
        &["fastshare", "--secret", "5a", "--n", "3", "--bits", "8", "--fixture", "owner:f.hex"],
    );
    assert_eq!(code(&o), 0);
    let u = AuthorizedShareSet::from_json(&stdout(&o)).unwrap();
    let hexes: Vec<String> = u.shares().iter().map(|v| encode_vector(v).unwrap().to_string()).collect();
    assert_eq!(hexes, ["11", "22", "69"]);
}

#[test]
fn pvss_verify_worked_fixture() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("b.json"), BULLETIN).unwrap();
    fs::write(dir.path().join("k.json"), KEYS).unwrap();
    let o = asgs(dir.path(), &["pvss", "verify", "--bulletin", "b.json", "--keys", "k.json"]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("\"xored_keys\": \"c1\""), "{out}");
    assert!(out.contains("\"xored_encrypted_shares\": \"c1\""), "{out}");
    assert!(out.contains("POSITIVE"));

    fs::write(dir.path().join("b.json"), BULLETIN.replace("\"11\"", "\"10\"")).unwrap();
    let o = asgs(dir.path(), &["pvss", "verify", "--bulletin", "b.json", "--keys", "k.json"]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).contains("NEGATIVE"));

    let o = asgs(dir.path(), &["pvss", "recover-keys", "--keys", "k.json"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("xored keys: c1"));
}

#[test]
fn simulate_tampered_key_is_negative() {
    let dir = tempfile::tempdir().unwrap();
    let args = [
        "simulate", "safeshares", "--n", "2", "--secret", "03", "--bits", "8", "--then", "activate",
        "--then", "pvss",
    ];
    assert_eq!(code(&asgs(dir.path(), &args)), 0);
    let mut tampered = args.to_vec();
    tampered.extend(["--tamper", "dealer:key:2:bit:0"]);
    assert_eq!(code(&asgs(dir.path(), &tampered)), 2);
}

#[test]
fn audit_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = asgs(
        dir.path(),
        &["safeshares", "--secret", "03", "--n", "3", "--bits", "8", "--out", "honest"],
    );
    assert_eq!(code(&o), 0);
    assert_eq!(code(&asgs(dir.path(), &["audit", "honest/transcript.json"])), 0);

    let o = asgs(
        dir.path(),
        &[
            "safeshares", "--secret", "03", "--n", "3", "--bits", "8", "--out", "bad", "--tamper",
            "owner:secret:1:copy:dealer",
        ],
    );
    assert_eq!(code(&o), 0);
    let o = asgs(dir.path(), &["audit", "bad/transcript.json"]);
    assert_eq!(code(&o), 3);
    let out = stdout(&o);
    assert_eq!(out.matches("violation:").count(), 1, "{out}");
    assert!(out.contains("dealer"));

    // --audit on the run itself
    let o = asgs(
        dir.path(),
        &[
            "safeshares", "--secret", "03", "--n", "3", "--bits", "8", "--audit", "--tamper",
            "owner:secret:1:copy:dealer",
        ],
    );
    assert_eq!(code(&o), 3);

    fs::write(
        dir.path().join("empty.json"),
        r#"{"version":1,"kind":"transcript","bits":8,"config":{"bits":8,"dealer":{"seeded":{"seed":0}},"owner":{"seeded":{"seed":0}},"accumulator":{"seeded":{"seed":0}},"assignment":"shuffle","tamper":[]},"steps":[]}"#,
    )
    .unwrap();
    assert_eq!(code(&asgs(dir.path(), &["audit", "empty.json"])), 0);
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    for args in [
        &["fastshare", "--n", "2"][..],
        &["fastshare", "--secret", "zz", "--n", "2", "--bits", "8"],
        &["replicate", "--mode", "bigger", "--input", "missing.json"],
        &["frobnicate"],
        &["audit", "missing.json"],
        &["fastshare", "--secret", "5a", "--n", "2", "--bits", "8", "--tamper", "dealer:key"],
    ] {
        assert_eq!(code(&asgs(dir.path(), args)), 1, "{args:?}");
    }
    assert_eq!(code(&asgs(dir.path(), &["--help"])), 0);
}

#[test]
fn replicate_chain_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = asgs(dir.path(), &["set-generate", "--d", "2", "--n", "3", "--bits", "16", "--out", "g"]);
    assert_eq!(code(&o), 0);
    let o = asgs(
        dir.path(),
        &["replicate", "--mode", "bigger", "--d", "5", "--input", "g/master.json", "--out", "r"],
    );
    assert_eq!(code(&o), 0);
    let o = asgs(
        dir.path(),
        &["pvss", "distribute", "--set1", "g/template.json", "--set2", "r/derived.json", "--out", "p"],
    );
    assert_eq!(code(&o), 0);
    let o = asgs(
        dir.path(),
        &["pvss", "verify", "--bulletin", "p/bulletin.json", "--keys", "p/keys.json"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn identical_runs_write_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let run = |out: &str| {
        let o = asgs(
            dir.path(),
            &[
                "simulate", "set-generate", "--d", "3", "--n", "4", "--seed", "99", "--then",
                "equal", "--then", "smaller:2", "--then", "pvss", "--out", out,
            ],
        );
        assert_eq!(code(&o), 0);
    };
    run("a");
    run("b");
    let mut names: Vec<_> = fs::read_dir(dir.path().join("a"))
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert!(names.len() >= 6);
    for n in names {
        assert_eq!(
            fs::read(dir.path().join("a").join(&n)).unwrap(),
            fs::read(dir.path().join("b").join(&n)).unwrap()
        );
    }
}

#[test]
fn default_bits_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_asgs"))
        .current_dir(dir.path())
        .env("ASGS_DEFAULT_BITS", "16")
        .args(["gen-m", "--n", "3"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("\"bits\": 16"));
    let o = asgs(dir.path(), &["gen-m", "--n", "3"]);
    assert!(stdout(&o).contains("\"bits\": 128"));
}
