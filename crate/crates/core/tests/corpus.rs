// SPDX-License-Identifier: Apache-2.0

mod common;

use std::fs;

use solmem::harness::corpus::{run_corpus, CorpusOptions, Observed, CLASSES};

fn options() -> CorpusOptions {
    let mut o = CorpusOptions::new(common::opts());
    o.jobs = 4;
    o
}

#[test]
fn empty_directory_gives_zero_table() {
    let dir = tempfile::tempdir().unwrap();
    let r = run_corpus(dir.path(), &options()).unwrap();
    let names: Vec<&str> = r.classes.iter().map(|c| c.class.as_str()).collect();
    assert_eq!(names, CLASSES);
    assert!(r.classes.iter().all(|c| c.tests == 0 && c.correct == 0));
    assert_eq!(r.total.tests, 0);
    assert!(r.table().contains("storageptr"));
}

#[test]
fn outcomes_and_invalid_tests() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("storage");
    fs::create_dir_all(&d).unwrap();
    let ok = "contract C { int[] a; constructor() { a.push(1); //expect: fails\n assert(a[0] == 2); } }";
    let wrong = "contract C { int x; constructor() { x = 1; //expect: fails\n assert(x == 1); } }";
    let loops = "contract C { int x; constructor() { while (x < 2) { x = x + 1; } } }";
    let bad_header = "contract C { int x; constructor() { //expect: maybe\n assert(x == 0); } }";
    fs::write(d.join("ok.sol"), ok).unwrap();
    fs::write(d.join("wrong.sol"), wrong).unwrap();
    fs::write(d.join("loops.sol"), loops).unwrap();
    fs::write(d.join("bad_header.sol"), bad_header).unwrap();
    let mut o = options();
    o.oracle = true;
    let r = run_corpus(dir.path(), &o).unwrap();
    let by_id = |id: &str| r.tests.iter().find(|t| t.id == id).unwrap();
    assert_eq!(by_id("ok").observed, Observed::Correct);
    assert_eq!(by_id("ok").oracle_agrees, Some(true));
    assert_eq!(by_id("wrong").observed, Observed::Incorrect);
    assert_eq!(by_id("wrong").oracle_agrees, Some(false));
    assert_eq!(by_id("loops").observed, Observed::Unsupported);
    assert_eq!(r.invalid.len(), 1);
    assert_eq!(r.invalid[0].id, "bad_header");
    let row = r.classes.iter().find(|c| c.class == "storage").unwrap();
    assert_eq!((row.tests, row.correct, row.incorrect, row.unsupported), (3, 1, 1, 1));
    let j = serde_json::to_value(&r).unwrap();
    assert_eq!(j["schema"], 1);
}

#[test]
fn corpus_totals_match_files_and_reruns_agree() {
    let dir = common::corpus_dir();
    let a = run_corpus(&dir, &options()).unwrap();
    for row in &a.classes {
        let files = fs::read_dir(dir.join(&row.class))
            .map(|rd| rd.flatten().filter(|e| e.path().extension().is_some_and(|x| x == "sol")).count())
            .unwrap_or(0);
        assert_eq!(row.tests, files, "{}", row.class);
        assert!(row.tests >= 5, "{}", row.class);
    }
    let b = run_corpus(&dir, &options()).unwrap();
    let observed = |r: &solmem::harness::corpus::CorpusReport| {
        r.tests.iter().map(|t| (t.class.clone(), t.id.clone(), t.observed)).collect::<Vec<_>>()
    };
    assert_eq!(observed(&a), observed(&b));
}
