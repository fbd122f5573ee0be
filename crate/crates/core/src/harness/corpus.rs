// SPDX-License-Identifier: Apache-2.0

//! Corpus runner: `<dir>/<class>/<test>.sol`, one verification per test,
//! aggregated per class.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;

use super::{verify_contract, AssertVerdict, FunctionOutcome, VerifyOptions};
use crate::frontend::{self, Expectation, FrontendError};
use crate::oracle::{Machine, Outcome};

/// Class names of the standard corpus, in report order.
pub const CLASSES: [&str; 5] = ["assignment", "delete", "init", "storage", "storageptr"];

#[derive(Clone, Debug)]
pub struct CorpusOptions {
    pub verify: VerifyOptions,
    /// Wall-clock budget per test.
    pub test_timeout: Duration,
    pub jobs: usize,
    /// Also run constructors through the oracle and compare with the
    /// expectations.
    pub oracle: bool,
}

impl CorpusOptions {
    pub fn new(verify: VerifyOptions) -> Self {
        CorpusOptions { verify, test_timeout: Duration::from_secs(60), jobs: 1, oracle: false }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Observed {
    Correct,
    Incorrect,
    Unsupported,
    Timeout,
}

#[derive(Clone, Debug, Serialize)]
pub struct TestOutcome {
    pub id: String,
    pub class: String,
    pub expected: Vec<Expectation>,
    pub observed: Observed,
    pub seconds: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    /// Whether the oracle's constructor run matched the expectations.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle_agrees: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct InvalidTest {
    pub id: String,
    pub class: String,
    pub reason: String,
}

#[derive(Clone, Debug, Default, Serialize, PartialEq)]
pub struct ClassRow {
    pub class: String,
    pub tests: usize,
    pub correct: usize,
    pub incorrect: usize,
    pub unsupported: usize,
    pub timeout: usize,
    pub seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CorpusReport {
    pub schema: u32,
    pub classes: Vec<ClassRow>,
    pub total: ClassRow,
    pub tests: Vec<TestOutcome>,
    pub invalid: Vec<InvalidTest>,
}

enum Run {
    Done(TestOutcome),
    Invalid(InvalidTest),
}

fn observe(text: &str, id: &str, class: &str, opts: &CorpusOptions) -> Run {
    let start = Instant::now();
    let invalid = |reason: String| Run::Invalid(InvalidTest { id: id.into(), class: class.into(), reason });
    let c = match frontend::load(text) {
        Ok(c) => c,
        Err(e @ FrontendError::Unsupported { .. }) => {
            return Run::Done(TestOutcome {
                id: id.into(),
                class: class.into(),
                expected: vec![],
                observed: Observed::Unsupported,
                seconds: start.elapsed().as_secs_f64(),
                detail: Some(e.to_string()),
                oracle_agrees: None,
            })
        }
        Err(e) => return invalid(e.to_string()),
    };
    let expected: Vec<Expectation> = c.asserts.iter().map(|a| a.expect).collect();
    let mut vo = opts.verify.clone();
    vo.solver.timeout = vo.solver.timeout.min(opts.test_timeout);
    if let Some(dir) = &opts.verify.emit_smt {
        let d = dir.join(class).join(id);
        if let Err(e) = std::fs::create_dir_all(&d) {
            log::warn!("cannot create {}: {}", d.display(), e);
        }
        vo.emit_smt = Some(d);
    }
    let report = verify_contract(&c, &vo);
    let mut observed = Observed::Correct;
    let mut detail = vec![];
    for f in &report.functions {
        match &f.outcome {
            FunctionOutcome::Checked { .. } => {}
            FunctionOutcome::Unsupported { message } => {
                observed = Observed::Unsupported;
                detail.push(format!("{}: {}", f.name, message));
            }
            FunctionOutcome::Error { message } => {
                if observed == Observed::Correct {
                    observed = Observed::Incorrect;
                }
                detail.push(format!("{}: error: {}", f.name, message));
            }
        }
    }
    if observed != Observed::Unsupported {
        for a in report.asserts() {
            match (&a.verdict, a.verdict.matches(a.expect)) {
                (_, Some(true)) => {}
                (AssertVerdict::Timeout, _) => {
                    observed = Observed::Timeout;
                    detail.push(format!("line {}: timeout", a.line));
                }
                (v, _) => {
                    if observed == Observed::Correct {
                        observed = Observed::Incorrect;
                    }
                    let got = match v {
                        AssertVerdict::Verified => "verified".to_string(),
                        AssertVerdict::Counterexample { .. } => "counterexample".to_string(),
                        other => format!("{:?}", other),
                    };
                    detail.push(format!("line {}: expected {}, got {}", a.line, a.expect, got));
                }
            }
        }
    }
    let seconds = start.elapsed().as_secs_f64();
    if seconds > opts.test_timeout.as_secs_f64() && observed != Observed::Unsupported {
        observed = Observed::Timeout;
    }
    let oracle_agrees = if opts.oracle { oracle_check(&c) } else { None };
    Run::Done(TestOutcome {
        id: id.into(),
        class: class.into(),
        expected,
        observed,
        seconds,
        detail: if detail.is_empty() { None } else { Some(detail.join("; ")) },
        oracle_agrees,
    })
}

/// Runs a parameterless constructor through the oracle: every constructor
/// assert must behave as annotated up to the first failure.
fn oracle_check(c: &frontend::TypedContract) -> Option<bool> {
    let ctor = c.constructor.as_ref().filter(|f| f.params.is_empty())?;
    let mut m = Machine::new(c);
    let r = m.call(&ctor.name, &[]).ok()?;
    let ok = r.passed.iter().all(|id| c.asserts[*id].expect == Expectation::Holds)
        && match r.outcome {
            Outcome::Finished => true,
            Outcome::AssertFailed(id) => c.asserts[id].expect == Expectation::Fails,
        };
    Some(ok)
}

fn list_sol(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = std::fs::read_dir(dir)
        .map(|rd| rd.filter_map(|e| e.ok()).map(|e| e.path()).filter(|p| p.extension().is_some_and(|x| x == "sol")).collect())
        .unwrap_or_default();
    v.sort();
    v
}

/// Runs every test of the corpus rooted at `dir`. The five standard classes
/// are always reported; other subdirectories are reported after them.
pub fn run_corpus(dir: &Path, opts: &CorpusOptions) -> std::io::Result<CorpusReport> {
    let mut classes: Vec<String> = CLASSES.iter().map(|s| s.to_string()).collect();
    let mut extra: Vec<String> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .filter(|e| e.path().is_dir())
        .filter_map(|e| e.file_name().to_str().map(String::from))
        .filter(|n| !classes.contains(n))
        .collect();
    extra.sort();
    classes.extend(extra);

    let mut jobs = vec![];
    for class in &classes {
        for path in list_sol(&dir.join(class)) {
            let id = path.file_stem().and_then(|s| s.to_str()).unwrap_or("?").to_string();
            jobs.push((class.clone(), id, path));
        }
    }
    let pool = rayon::ThreadPoolBuilder::new().num_threads(opts.jobs.max(1)).build().map_err(std::io::Error::other)?;
    let runs: Vec<Run> = pool.install(|| {
        jobs.par_iter()
            .map(|(class, id, path)| match std::fs::read_to_string(path) {
                Ok(text) => observe(&text, id, class, opts),
                Err(e) => Run::Invalid(InvalidTest { id: id.clone(), class: class.clone(), reason: e.to_string() }),
            })
            .collect()
    });

    let mut tests = vec![];
    let mut invalid = vec![];
    for r in runs {
        match r {
            Run::Done(t) => tests.push(t),
            Run::Invalid(i) => invalid.push(i),
        }
    }
    let mut rows = vec![];
    let mut total = ClassRow { class: "total".into(), ..Default::default() };
    for class in &classes {
        let mut row = ClassRow { class: class.clone(), ..Default::default() };
        for t in tests.iter().filter(|t| &t.class == class) {
            row.tests += 1;
            row.seconds += t.seconds;
            match t.observed {
                Observed::Correct => row.correct += 1,
                Observed::Incorrect => row.incorrect += 1,
                Observed::Unsupported => row.unsupported += 1,
                Observed::Timeout => row.timeout += 1,
            }
        }
        total.tests += row.tests;
        total.correct += row.correct;
        total.incorrect += row.incorrect;
        total.unsupported += row.unsupported;
        total.timeout += row.timeout;
        total.seconds += row.seconds;
        rows.push(row);
    }
    Ok(CorpusReport { schema: 1, classes: rows, total, tests, invalid })
}

impl CorpusReport {
    /// Plain-text table with one row per class.
    pub fn table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<12} {:>6} {:>8} {:>10} {:>12} {:>8} {:>9}",
            "class", "tests", "correct", "incorrect", "unsupported", "timeout", "time (s)"
        );
        for r in self.classes.iter().chain(std::iter::once(&self.total)) {
            let _ = writeln!(
                s,
                "{:<12} {:>6} {:>8} {:>10} {:>12} {:>8} {:>9.2}",
                r.class, r.tests, r.correct, r.incorrect, r.unsupported, r.timeout, r.seconds
            );
        }
        if !self.invalid.is_empty() {
            let _ = writeln!(s, "\ninvalid tests:");
            for i in &self.invalid {
                let _ = writeln!(s, "  {}/{}: {}", i.class, i.id, i.reason);
            }
        }
        s
    }
}
