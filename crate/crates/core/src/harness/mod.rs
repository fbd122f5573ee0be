// SPDX-License-Identifier: Apache-2.0

//! End-to-end pipelines: verification of a contract, the five-class corpus
//! runner and differential testing against the oracle.

use std::path::PathBuf;
use std::time::{Duration, Instant};

use log::{debug, info};
use serde::Serialize;

use crate::frontend::lexer::Expectation;
use crate::frontend::{self, FrontendError, TypedContract};
use crate::ir::{emit_smtlib, normalize_lhs, to_ssa, vc_gen, IrError, SmtProgram};
use crate::solver::{self, Model, SolverConfig, SolverVerdict};
use crate::translate::{translate_function, StorageLayout, TranslateError, TranslateOptions};

pub mod corpus;
pub mod fuzz;

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub solver: SolverConfig,
    pub translate: TranslateOptions,
    /// Directory to write each query's SMT-LIB script to.
    pub emit_smt: Option<PathBuf>,
}

impl VerifyOptions {
    pub fn new(solver_cmd: Option<&str>, timeout: Duration) -> Self {
        VerifyOptions { solver: SolverConfig::new(solver_cmd, timeout), translate: TranslateOptions::default(), emit_smt: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum AssertVerdict {
    Verified,
    Counterexample { model: Vec<(String, String)> },
    Unknown { reason: String },
    Timeout,
    Error { message: String },
}

impl AssertVerdict {
    fn from_solver(v: SolverVerdict) -> Self {
        match v {
            SolverVerdict::Unsat => AssertVerdict::Verified,
            SolverVerdict::Sat { model } => AssertVerdict::Counterexample { model: model_excerpt(model.as_ref()) },
            SolverVerdict::Unknown(r) => AssertVerdict::Unknown { reason: r },
            SolverVerdict::Timeout => AssertVerdict::Timeout,
            SolverVerdict::SolverError(e) => AssertVerdict::Error { message: e },
        }
    }

    /// Whether the verdict agrees with an expectation; `None` when the
    /// verdict is inconclusive.
    pub fn matches(&self, e: Expectation) -> Option<bool> {
        match self {
            AssertVerdict::Verified => Some(e == Expectation::Holds),
            AssertVerdict::Counterexample { .. } => Some(e == Expectation::Fails),
            _ => None,
        }
    }
}

/// Integer and boolean values of source-level names, for display.
fn model_excerpt(m: Option<&Model>) -> Vec<(String, String)> {
    let Some(m) = m else { return vec![] };
    m.values
        .iter()
        .filter(|(k, v)| !k.contains('$') && (v.parse::<i64>().is_ok() || *v == "true" || *v == "false"))
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct AssertResult {
    pub id: usize,
    pub line: usize,
    pub text: String,
    pub expect: Expectation,
    #[serde(flatten)]
    pub verdict: AssertVerdict,
    pub seconds: f64,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum FunctionOutcome {
    Checked { asserts: Vec<AssertResult> },
    Unsupported { message: String },
    Error { message: String },
}

#[derive(Clone, Debug, Serialize)]
pub struct FunctionReport {
    pub name: String,
    #[serde(flatten)]
    pub outcome: FunctionOutcome,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub contract: String,
    pub functions: Vec<FunctionReport>,
}

pub const EXIT_VERIFIED: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USER_ERROR: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

impl VerifyReport {
    pub fn asserts(&self) -> impl Iterator<Item = &AssertResult> {
        self.functions.iter().flat_map(|f| match &f.outcome {
            FunctionOutcome::Checked { asserts } => asserts.as_slice(),
            _ => &[],
        })
    }

    pub fn unsupported(&self) -> Option<&str> {
        self.functions.iter().find_map(|f| match &f.outcome {
            FunctionOutcome::Unsupported { message } => Some(message.as_str()),
            _ => None,
        })
    }

    /// 0 when every assert verified, 1 on any counterexample, 2 when a
    /// function could not be translated, 3 when a query was inconclusive.
    pub fn exit_code(&self) -> i32 {
        if self.functions.iter().any(|f| !matches!(f.outcome, FunctionOutcome::Checked { .. })) {
            return EXIT_USER_ERROR;
        }
        if self.asserts().any(|a| matches!(a.verdict, AssertVerdict::Counterexample { .. })) {
            return EXIT_VIOLATION;
        }
        if self.asserts().any(|a| a.verdict != AssertVerdict::Verified) {
            return EXIT_INCONCLUSIVE;
        }
        EXIT_VERIFIED
    }

    pub fn render(&self) -> String {
        let mut s = format!("contract {}\n", self.contract);
        for f in &self.functions {
            match &f.outcome {
                FunctionOutcome::Checked { asserts } if asserts.is_empty() => {
                    s.push_str(&format!("  {}: no assertions\n", f.name));
                }
                FunctionOutcome::Checked { asserts } => {
                    for a in asserts {
                        let v = match &a.verdict {
                            AssertVerdict::Verified => "verified".to_string(),
                            AssertVerdict::Counterexample { model } => {
                                let ex: Vec<String> = model.iter().take(8).map(|(k, v)| format!("{} = {}", k, v)).collect();
                                if ex.is_empty() {
                                    "counterexample".to_string()
                                } else {
                                    format!("counterexample ({})", ex.join(", "))
                                }
                            }
                            AssertVerdict::Unknown { reason } => format!("unknown: {}", reason),
                            AssertVerdict::Timeout => "timeout".to_string(),
                            AssertVerdict::Error { message } => format!("solver error: {}", message),
                        };
                        s.push_str(&format!("  {}: line {}: assert({}): {}\n", f.name, a.line, a.text, v));
                    }
                }
                FunctionOutcome::Unsupported { message } => s.push_str(&format!("  {}: {}\n", f.name, message)),
                FunctionOutcome::Error { message } => s.push_str(&format!("  {}: error: {}\n", f.name, message)),
            }
        }
        s
    }
}

/// Normalizes, converts to SSA and checks every assert of a translated
/// program. Returns `(assert id, verdict, seconds)` in program order.
pub fn check_program(
    p: &SmtProgram,
    opts: &VerifyOptions,
    label: &str,
) -> Result<Vec<(usize, AssertVerdict, f64)>, IrError> {
    let (ssa, _) = to_ssa(&normalize_lhs(p)?)?;
    let ids = ssa.assert_ids();
    let mut out = vec![];
    for (k, id) in ids.iter().enumerate() {
        let f = vc_gen(&ssa, k)?;
        let script = emit_smtlib(&f);
        if let Some(dir) = &opts.emit_smt {
            let path = dir.join(format!("{}_{}.smt2", label, id));
            if let Err(e) = std::fs::write(&path, &script) {
                log::warn!("cannot write {}: {}", path.display(), e);
            }
        }
        let start = Instant::now();
        let v = solver::check(&opts.solver, &script);
        let secs = start.elapsed().as_secs_f64();
        debug!("{} assert #{}: {} in {:.3}s", label, id, v.kind(), secs);
        out.push((*id, AssertVerdict::from_solver(v), secs));
    }
    Ok(out)
}

pub fn verify_contract(c: &TypedContract, opts: &VerifyOptions) -> VerifyReport {
    let layout = StorageLayout::new(c);
    let mut functions = vec![];
    for f in c.all_functions() {
        let outcome = match translate_function(c, &layout, f, opts.translate) {
            Err(e @ TranslateError::Unsupported { .. }) => FunctionOutcome::Unsupported { message: e.to_string() },
            Err(e) => FunctionOutcome::Error { message: e.to_string() },
            Ok(p) => match check_program(&p, opts, &format!("{}_{}", c.name, f.name)) {
                Err(e) => FunctionOutcome::Error { message: e.to_string() },
                Ok(rs) => FunctionOutcome::Checked {
                    asserts: rs
                        .into_iter()
                        .map(|(id, verdict, seconds)| {
                            let info = &c.asserts[id];
                            AssertResult {
                                id,
                                line: info.span.line,
                                text: info.text.clone(),
                                expect: info.expect,
                                verdict,
                                seconds,
                            }
                        })
                        .collect(),
                },
            },
        };
        functions.push(FunctionReport { name: f.name.clone(), outcome });
    }
    info!("verified contract {}", c.name);
    VerifyReport { contract: c.name.clone(), functions }
}

pub fn verify_source(text: &str, opts: &VerifyOptions) -> Result<VerifyReport, FrontendError> {
    let c = frontend::load(text)?;
    Ok(verify_contract(&c, opts))
}
