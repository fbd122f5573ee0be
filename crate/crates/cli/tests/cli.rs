// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn solmem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_solmem")).args(args).output().expect("run solmem")
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name).display().to_string()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p: PathBuf = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn verify_exit_codes() {
    let o = solmem(&["verify", &fixture("dangling_pointer.sol")]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("verified"));

    let o = solmem(&["verify", &fixture("dangling_index.sol")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("counterexample"));

    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "loop.sol", "contract C { int x; constructor() { while (x < 3) { x = x + 1; } } }");
    let o = solmem(&["verify", &f]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unsupported: loops"));

    let f = write(dir.path(), "syntax.sol", "contract C { int x constructor() {} }");
    assert_eq!(solmem(&["verify", &f]).status.code(), Some(2));
}

#[test]
fn verify_writes_json_and_smt() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("r.json");
    let smt = dir.path().join("smt");
    let o = solmem(&[
        "verify",
        &fixture("tuple_swap.sol"),
        "--json",
        json.to_str().unwrap(),
        "--emit-smt",
        smt.to_str().unwrap(),
        "--emit-ir",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(r["contract"], "C");
    assert_eq!(std::fs::read_dir(&smt).unwrap().count(), 2);
    assert!(stdout(&o).contains("// primitiveAssign"));
}

#[test]
fn run_prints_canonical_storage() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "x.sol", "contract C { int x; }");
    let o = solmem(&["run", &f]);
    assert_eq!(o.status.code(), Some(0));
    let j: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(j["storage"], serde_json::json!({"x": 0}));

    let o = solmem(&["run", &fixture("tuple_swap.sol"), "primitiveAssign()"]);
    let j: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(j["storage"]["s1"]["x"], 3);
    assert_eq!(j["storage"]["s2"]["x"], 1);
    assert_eq!(j["storage"]["s3"]["x"], 2);

    let o = solmem(&[
        "run",
        &fixture("data_storage.sol"),
        "append(1, 2)",
        r#"isset({"$storage": ["records", 1]})"#,
        r#"isset({"$storage": ["records", 2]})"#,
    ]);
    let j: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(j["calls"][1]["returns"]["s"], true);
    assert_eq!(j["calls"][2]["returns"]["s"], false);

    let o = solmem(&["run", &fixture("dangling_index.sol")]);
    assert_eq!(o.status.code(), Some(1));
    let j: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(j["calls"][0]["assert_failed"]["id"], 0);
}

#[test]
fn corpus_table_and_gen() {
    let dir = tempfile::tempdir().unwrap();
    let o = solmem(&["corpus", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let table = stdout(&o);
    for class in ["assignment", "delete", "init", "storage", "storageptr", "total"] {
        assert!(table.contains(class), "{}", table);
    }
    let a = solmem(&["gen", "--seed", "3", "--size", "8"]);
    let b = solmem(&["gen", "--seed", "3", "--size", "8"]);
    assert!(stdout(&a).starts_with("contract Gen"));
    assert_eq!(a.stdout, b.stdout);
}
