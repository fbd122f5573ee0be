// SPDX-License-Identifier: Apache-2.0

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value as Json};

use solmem::frontend::{self, TypedContract};
use solmem::harness::corpus::{run_corpus, CorpusOptions};
use solmem::harness::fuzz::fuzz;
use solmem::harness::{verify_contract, VerifyOptions, EXIT_USER_ERROR, EXIT_VIOLATION};
use solmem::oracle::{random_program, Machine, Outcome};
use solmem::translate::{translate_contract, TranslateOptions};

#[derive(Parser)]
#[command(name = "solmem", version, about = "Verifier and reference interpreter for Solidity's memory model")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct SolverArgs {
    /// Solver command line, reading SMT-LIB on stdin.
    #[arg(long, env = "SOLMEM_SOLVER")]
    solver_cmd: Option<String>,
    /// Timeout in seconds (per query for `verify`, per test for `corpus`).
    #[arg(long, default_value_t = 60)]
    timeout: u64,
    /// Unroll element-wise copies of dynamic arrays up to N elements.
    #[arg(long, value_name = "N")]
    unroll: Option<u32>,
    /// Write every SMT-LIB query into DIR.
    #[arg(long, value_name = "DIR")]
    emit_smt: Option<PathBuf>,
}

impl SolverArgs {
    fn options(&self) -> Result<VerifyOptions> {
        let mut o = VerifyOptions::new(self.solver_cmd.as_deref(), Duration::from_secs(self.timeout));
        o.translate = TranslateOptions { unroll: self.unroll };
        if let Some(d) = &self.emit_smt {
            std::fs::create_dir_all(d).with_context(|| format!("creating {}", d.display()))?;
            o.emit_smt = Some(d.clone());
        }
        Ok(o)
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Verify every assertion of a contract.
    Verify {
        file: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// Print the translated program of every function.
        #[arg(long)]
        emit_ir: bool,
        /// Write the report as JSON to PATH.
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,
    },
    /// Execute calls with the reference interpreter, e.g. `'append(3)' 'isset(3)'`.
    ///
    /// A parameterless constructor runs first unless the first call names it.
    /// Arguments are JSON values; storage pointers are `{"$storage": [root, steps..]}`.
    Run {
        file: PathBuf,
        calls: Vec<String>,
        /// Bound on element-wise copies of dynamic arrays.
        #[arg(long, value_name = "N")]
        unroll: Option<u32>,
    },
    /// Run a corpus laid out as `<class>/<test>.sol`.
    Corpus {
        dir: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, value_name = "N", default_value_t = default_jobs())]
        jobs: usize,
        /// Also run parameterless constructors through the interpreter.
        #[arg(long)]
        oracle: bool,
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,
    },
    /// Print a generated program.
    Gen {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 20)]
        size: usize,
    },
    /// Compare interpreter and verifier on generated programs.
    Fuzz {
        #[arg(long, default_value_t = 0)]
        start: u64,
        #[arg(long, default_value_t = 500)]
        seeds: u64,
        #[arg(long, default_value_t = 20)]
        size: usize,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, value_name = "N", default_value_t = default_jobs())]
        jobs: usize,
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,
    },
}

fn default_jobs() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

fn write_json(path: &Path, v: &impl serde::Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(v)?;
    std::fs::write(path, text + "\n").with_context(|| format!("writing {}", path.display()))
}

fn load(path: &Path) -> Result<TypedContract, i32> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        eprintln!("error: {}: {}", path.display(), e);
        EXIT_USER_ERROR
    })?;
    frontend::load(&text).map_err(|e| {
        eprintln!("{}:{}", path.display(), e);
        EXIT_USER_ERROR
    })
}

fn verify(file: &Path, solver: &SolverArgs, emit_ir: bool, json: Option<&Path>) -> Result<i32> {
    let c = match load(file) {
        Ok(c) => c,
        Err(code) => return Ok(code),
    };
    let opts = solver.options()?;
    if emit_ir {
        for (name, p) in translate_contract(&c, opts.translate) {
            match p {
                Ok(p) => println!("// {}\n{}", name, p),
                Err(e) => println!("// {}: {}", name, e),
            }
        }
    }
    let report = verify_contract(&c, &opts);
    print!("{}", report.render());
    if let Some(p) = json {
        write_json(p, &report)?;
    }
    Ok(report.exit_code())
}

/// Splits `name(a, b)` into the name and its JSON arguments.
fn parse_call(s: &str) -> Result<(String, Vec<Json>)> {
    let s = s.trim();
    let Some(open) = s.find('(') else { return Ok((s.to_string(), vec![])) };
    let inner = s[open + 1..].strip_suffix(')').ok_or_else(|| anyhow!("call `{}` lacks a closing parenthesis", s))?;
    let args: Vec<Json> = serde_json::from_str(&format!("[{}]", inner)).with_context(|| format!("arguments of `{}`", s))?;
    Ok((s[..open].trim().to_string(), args))
}

fn run(file: &Path, calls: &[String], unroll: Option<u32>) -> Result<i32> {
    let c = match load(file) {
        Ok(c) => c,
        Err(code) => return Ok(code),
    };
    let mut calls: Vec<(String, Vec<Json>)> = calls.iter().map(|s| parse_call(s)).collect::<Result<_>>()?;
    let first_is_ctor = calls.first().is_some_and(|(n, _)| n == "constructor");
    if !first_is_ctor && c.constructor.as_ref().is_some_and(|f| f.params.is_empty()) {
        calls.insert(0, ("constructor".into(), vec![]));
    }
    let mut m = Machine::new(&c);
    m.unroll = unroll;
    let mut log = vec![];
    let mut code = 0;
    for (name, args) in &calls {
        let r = match m.call(name, args) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("error: {}: {}", name, e);
                code = EXIT_USER_ERROR;
                break;
            }
        };
        let f = c.function(name).expect("called function exists");
        let mut returns = serde_json::Map::new();
        for ((n, v), id) in r.returns.iter().zip(&f.returns) {
            returns.insert(n.clone(), m.value_json(v, &c.var(*id).ty)?);
        }
        let mut entry = json!({ "call": name, "args": args, "returns": returns });
        if let Outcome::AssertFailed(id) = r.outcome {
            let a = &c.asserts[id];
            entry["assert_failed"] = json!({ "id": id, "line": a.span.line, "text": a.text });
            eprintln!("assertion #{} failed at line {}: assert({})", id, a.span.line, a.text);
            log.push(entry);
            code = EXIT_VIOLATION;
            break;
        }
        log.push(entry);
    }
    let out = json!({ "calls": log, "storage": m.storage_json() });
    println!("{}", serde_json::to_string_pretty(&out)?);
    Ok(code)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let res = match &cli.cmd {
        Cmd::Verify { file, solver, emit_ir, json } => verify(file, solver, *emit_ir, json.as_deref()),
        Cmd::Run { file, calls, unroll } => run(file, calls, *unroll),
        Cmd::Corpus { dir, solver, jobs, oracle, json } => (|| {
            let mut opts = CorpusOptions::new(solver.options()?);
            opts.test_timeout = Duration::from_secs(solver.timeout);
            opts.jobs = *jobs;
            opts.oracle = *oracle;
            if !dir.is_dir() {
                bail!("{} is not a directory", dir.display());
            }
            let report = run_corpus(dir, &opts)?;
            print!("{}", report.table());
            if let Some(p) = json {
                write_json(p, &report)?;
            }
            let bad = report.total.incorrect + report.total.timeout + report.invalid.len();
            let oracle_bad = report.tests.iter().filter(|t| t.oracle_agrees == Some(false)).count();
            if oracle_bad > 0 {
                eprintln!("{} tests disagree with the interpreter", oracle_bad);
            }
            Ok(if bad + oracle_bad > 0 { EXIT_VIOLATION } else { 0 })
        })(),
        Cmd::Gen { seed, size } => {
            print!("{}", random_program(*seed, *size));
            Ok(0)
        }
        Cmd::Fuzz { start, seeds, size, solver, jobs, json } => (|| {
            let opts = solver.options()?;
            let s = fuzz(*start..*start + *seeds, *size, &opts, *jobs);
            println!(
                "{} programs: {} agree, {} disagree, {} inconclusive ({:.1}s)",
                s.cases.len(),
                s.agree,
                s.disagree,
                s.inconclusive,
                s.seconds
            );
            for case in s.cases.iter().filter(|c| !matches!(c.verdict, solmem::harness::fuzz::FuzzVerdict::Agree)) {
                println!("  seed {}: {:?}", case.seed, case.verdict);
            }
            if let Some(p) = json {
                write_json(p, &s)?;
            }
            Ok(if s.disagree > 0 { EXIT_VIOLATION } else { 0 })
        })(),
    };
    match res {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {:#}", e);
            ExitCode::from(EXIT_USER_ERROR as u8)
        }
    }
}
