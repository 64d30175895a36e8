//! Runs every example binary that `cargo test` builds alongside the tests.

use std::path::PathBuf;
use std::process::Command;

/// The freshest build of an example. `cargo test` leaves hashed binaries
/// and only refreshes the plain name on `cargo build` or `cargo run`.
fn binary(name: &str) -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    let dir: PathBuf = exe.parent().and_then(|d| d.parent()).unwrap().join("examples");
    let prefix = format!("{name}-");
    std::fs::read_dir(&dir)
        .unwrap_or_else(|e| panic!("{}: {e}", dir.display()))
        .filter_map(|e| e.ok())
        .filter(|e| {
            let f = e.file_name().to_string_lossy().into_owned();
            f == name || (f.starts_with(&prefix) && !f.contains('.') && !f[prefix.len()..].contains('-'))
        })
        .max_by_key(|e| e.metadata().and_then(|m| m.modified()).ok())
        .map(|e| e.path())
        .unwrap_or_else(|| panic!("example {name} is not built"))
}

fn example(name: &str) -> String {
    let path = binary(name);
    let out = Command::new(&path).env("IVC_KIND_SOLVER", "yices").output().unwrap_or_else(|e| {
        panic!("cannot run {}: {e}", path.display());
    });
    let stdout = String::from_utf8_lossy(&out.stdout).into_owned();
    assert!(out.status.success(), "{name} failed:\n{stdout}\n{}", String::from_utf8_lossy(&out.stderr));
    stdout
}

#[test]
fn examples_run() {
    let cases: &[(&str, &[&str])] = &[
        ("lustre_frontend", &["step 5: b = true, n = 2"]),
        ("transition_system", &["(= b.next (ite (>= a.next 0.0) a.next (- a.next)))"]),
        ("smt_session", &["minimal core [\"x > 5\", \"x < 3\"]"]),
        ("check", &["counter.lus: proved", "counter_bound.lus: falsified after 3 steps"]),
        ("ivc", &["uc   [\"a\", \"w\"] minimal: No", "ucbf [\"a\"] minimal: Yes"]),
        ("slice", &["cruise.lus         slice {\"delta\", \"raw\", \"speed\"}  core [\"speed\"]"]),
        ("diversity", &["d(ab, bc) = 2/3", "overall dissimilarity 1/2"]),
        ("gadget", &["counter_bound.lus: pair minimal Yes, base alone No"]),
        ("bench", &["broken", "Error", "filter         uc    Proved"]),
    ];
    for (name, needles) in cases {
        let out = example(name);
        for n in *needles {
            assert!(out.contains(n), "{name}: missing `{n}` in\n{out}");
        }
    }
}
