// SPDX-License-Identifier: Apache-2.0

//! Batch client for an external SMT-LIB v2 solver process.

use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use log::debug;

mod sexp;

pub use sexp::{parse_sexps, Sexp};

pub const DEFAULT_SOLVER: &str = "z3 -in";
pub const SOLVER_ENV: &str = "SOLMEM_SOLVER";

#[derive(Clone, Debug, PartialEq)]
pub enum SolverVerdict {
    Unsat,
    /// `model` is `None` when the solver did not return a usable model.
    Sat { model: Option<Model> },
    Unknown(String),
    Timeout,
    SolverError(String),
}

impl SolverVerdict {
    pub fn kind(&self) -> &'static str {
        match self {
            SolverVerdict::Unsat => "unsat",
            SolverVerdict::Sat { .. } => "sat",
            SolverVerdict::Unknown(_) => "unknown",
            SolverVerdict::Timeout => "timeout",
            SolverVerdict::SolverError(_) => "error",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Model {
    /// Constant name to value text. Integers and booleans are normalized
    /// (`-3`, `true`); other values are kept as the solver printed them.
    pub values: BTreeMap<String, String>,
    /// Entries that could not be interpreted, verbatim.
    pub unparsed: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct SolverConfig {
    pub command: Vec<String>,
    pub timeout: Duration,
}

impl SolverConfig {
    /// Uses `cmd` if given, else `$SOLMEM_SOLVER`, else `z3 -in`.
    pub fn new(cmd: Option<&str>, timeout: Duration) -> Self {
        let env = std::env::var(SOLVER_ENV).ok();
        let text = cmd.map(str::to_string).or(env).unwrap_or_else(|| DEFAULT_SOLVER.to_string());
        SolverConfig { command: text.split_whitespace().map(str::to_string).collect(), timeout }
    }
}

/// Runs one query. Never blocks much longer than the timeout: the child is
/// killed and reaped when the deadline passes.
pub fn check(cfg: &SolverConfig, script: &str) -> SolverVerdict {
    let Some((prog, args)) = cfg.command.split_first() else {
        return SolverVerdict::SolverError("empty solver command".into());
    };
    let mut child = match Command::new(prog)
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
    {
        Ok(c) => c,
        Err(e) => return SolverVerdict::SolverError(format!("cannot start solver `{}`: {}", prog, e)),
    };
    let mut stdin = child.stdin.take().unwrap();
    let input = script.to_string();
    let writer = std::thread::spawn(move || {
        // a solver that exits early closes the pipe; that is not our error
        let _ = stdin.write_all(input.as_bytes());
    });
    let mut stdout = child.stdout.take().unwrap();
    let reader = std::thread::spawn(move || {
        let mut s = String::new();
        let _ = stdout.read_to_string(&mut s);
        s
    });
    let mut stderr = child.stderr.take().unwrap();
    let err_reader = std::thread::spawn(move || {
        let mut s = String::new();
        let _ = stderr.read_to_string(&mut s);
        s
    });

    let start = Instant::now();
    let status = loop {
        match child.try_wait() {
            Ok(Some(st)) => break Some(st),
            Ok(None) if start.elapsed() >= cfg.timeout => {
                let _ = child.kill();
                let _ = child.wait();
                break None;
            }
            Ok(None) => std::thread::sleep(Duration::from_millis(2)),
            Err(e) => {
                let _ = child.kill();
                let _ = child.wait();
                return SolverVerdict::SolverError(format!("waiting for solver: {}", e));
            }
        }
    };
    let _ = writer.join();
    let out = reader.join().unwrap_or_default();
    let err = err_reader.join().unwrap_or_default();
    let Some(status) = status else {
        debug!("solver timed out after {:?}", cfg.timeout);
        return SolverVerdict::Timeout;
    };
    debug!("solver exited with {}", status);
    interpret(&out, &err)
}

fn interpret(out: &str, err: &str) -> SolverVerdict {
    let mut lines = out.lines().map(str::trim).filter(|l| !l.is_empty());
    let first = lines.next().unwrap_or("");
    let rest: String = out.trim_start().strip_prefix(first).unwrap_or("").to_string();
    match first {
        "unsat" => SolverVerdict::Unsat,
        "sat" => {
            let model = parse_model(&rest);
            if model.values.is_empty() && model.unparsed.is_empty() {
                SolverVerdict::Sat { model: None }
            } else {
                SolverVerdict::Sat { model: Some(model) }
            }
        }
        "unknown" => SolverVerdict::Unknown("solver returned unknown".into()),
        "timeout" => SolverVerdict::Timeout,
        _ => SolverVerdict::SolverError(format!("unexpected solver output: {}{}", out.trim(), err.trim())),
    }
}

fn normalize_value(v: &Sexp) -> Option<String> {
    match v {
        Sexp::Atom(a) if a == "true" || a == "false" => Some(a.clone()),
        Sexp::Atom(a) if a.parse::<i128>().is_ok() => Some(a.clone()),
        Sexp::List(l) if l.len() == 2 && l[0] == Sexp::Atom("-".into()) => match &l[1] {
            Sexp::Atom(a) if a.parse::<i128>().is_ok() => Some(format!("-{}", a)),
            _ => None,
        },
        _ => None,
    }
}

/// Extracts `define-fun` entries of nullary functions from `get-model`
/// output. Anything else is kept verbatim in `unparsed`.
pub fn parse_model(text: &str) -> Model {
    let mut m = Model::default();
    let sexps = match parse_sexps(text) {
        Ok(s) => s,
        Err(_) => {
            if !text.trim().is_empty() {
                m.unparsed.push(text.trim().to_string());
            }
            return m;
        }
    };
    fn walk(s: &Sexp, m: &mut Model) {
        let Sexp::List(items) = s else { return };
        match items.first() {
            Some(Sexp::Atom(h)) if h == "define-fun" => {
                if let [_, Sexp::Atom(name), Sexp::List(params), _sort, value] = items.as_slice() {
                    if params.is_empty() {
                        let v = normalize_value(value).unwrap_or_else(|| value.to_string());
                        m.values.insert(name.clone(), v);
                        return;
                    }
                }
                m.unparsed.push(s.to_string());
            }
            Some(Sexp::Atom(h)) if h == "model" => items[1..].iter().for_each(|x| walk(x, m)),
            Some(Sexp::Atom(h)) if h == "error" => m.unparsed.push(s.to_string()),
            Some(Sexp::List(_)) => items.iter().for_each(|x| walk(x, m)),
            _ => m.unparsed.push(s.to_string()),
        }
    }
    for s in &sexps {
        walk(s, &mut m);
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_entries() {
        let m = parse_model("(\n  (define-fun x () Int\n    3)\n  (define-fun b () Bool true)\n  (define-fun n () Int (- 4))\n  (define-fun a () (Array Int Int) ((as const (Array Int Int)) 0))\n)");
        assert_eq!(m.values["x"], "3");
        assert_eq!(m.values["b"], "true");
        assert_eq!(m.values["n"], "-4");
        assert_eq!(m.values["a"], "((as const (Array Int Int)) 0)");
        assert!(m.unparsed.is_empty());
    }

    #[test]
    fn quoted_names_and_functions() {
        let m = parse_model("((define-fun |x y| () Int 1) (define-fun f ((a Int)) Int a))");
        assert_eq!(m.values["x y"], "1");
        assert_eq!(m.unparsed.len(), 1);
    }

    #[test]
    fn verdict_lines() {
        assert_eq!(interpret("unsat\n(error \"no model\")\n", ""), SolverVerdict::Unsat);
        assert_eq!(interpret("sat\n((define-fun x () Int 1))", "").kind(), "sat");
        assert!(matches!(interpret("", "segfault"), SolverVerdict::SolverError(_)));
    }

    #[test]
    fn missing_binary() {
        let cfg = SolverConfig::new(Some("definitely-not-a-solver-binary"), Duration::from_secs(1));
        assert!(matches!(check(&cfg, "(check-sat)"), SolverVerdict::SolverError(_)));
    }
}
