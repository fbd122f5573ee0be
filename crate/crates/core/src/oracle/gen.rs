// SPDX-License-Identifier: Apache-2.0

//! Seeded generator of constructor-only contracts with concrete inputs.
//!
//! Programs are biased toward reference-type assignments across data
//! locations, storage pointers, push/pop/delete and tuple swaps, and end
//! their statements with probes `assert(e == K)`. The constants are
//! calibrated by running the oracle, so most probes hold and at most one
//! fails.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CValue, Machine, OracleError, Outcome};
use crate::frontend::{self, SolType};

/// Unrolling bound the generated programs are meant to be translated with.
pub const GEN_UNROLL: u32 = 3;

const PRELUDE: &str = "    struct T { int z; int[] zs; }
    struct S { int x; bool b; T t; T[] ts; int[2] f; }
    struct W { int y; mapping(int => T) mt; S s; }

    int n;
    bool flag;
    int[] ia;
    int[2] fa;
    T t1;
    S s1;
    S s2;
    S[] sa;
    T[2] tf;
    W w;
    mapping(int => S) ms;
    mapping(bool => int) mb;
";

fn st(n: &str) -> SolType {
    SolType::Struct(n.into())
}

fn members(s: &str) -> Vec<(&'static str, SolType)> {
    match s {
        "T" => vec![("z", SolType::Int), ("zs", SolType::dyn_array(SolType::Int))],
        "S" => vec![
            ("x", SolType::Int),
            ("b", SolType::Bool),
            ("t", st("T")),
            ("ts", SolType::dyn_array(st("T"))),
            ("f", SolType::fix_array(SolType::Int, 2)),
        ],
        "W" => vec![("y", SolType::Int), ("mt", SolType::mapping(SolType::Int, st("T"))), ("s", st("S"))],
        _ => vec![],
    }
}

fn state_vars() -> Vec<(&'static str, SolType)> {
    vec![
        ("n", SolType::Int),
        ("flag", SolType::Bool),
        ("ia", SolType::dyn_array(SolType::Int)),
        ("fa", SolType::fix_array(SolType::Int, 2)),
        ("t1", st("T")),
        ("s1", st("S")),
        ("s2", st("S")),
        ("sa", SolType::dyn_array(st("S"))),
        ("tf", SolType::fix_array(st("T"), 2)),
        ("w", st("W")),
        ("ms", SolType::mapping(SolType::Int, st("S"))),
        ("mb", SolType::mapping(SolType::Bool, SolType::Int)),
    ]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Where {
    Storage,
    Memory,
}

#[derive(Clone, Debug)]
struct Cand {
    expr: String,
    ty: SolType,
    loc: Where,
    /// A local storage pointer variable itself.
    ptr_var: bool,
}

enum GStmt {
    Line(String),
    /// `assert(<expr> == K)`; the flag marks boolean probes.
    Probe(String, bool),
}

struct Gen {
    rng: ChaCha8Rng,
    mems: Vec<(String, SolType)>,
    ptrs: Vec<(String, SolType)>,
    next: usize,
    out: Vec<GStmt>,
    /// Recently written expressions; probes prefer what lies below them.
    touched: Vec<Cand>,
}

impl Gen {
    fn candidates(&mut self) -> Vec<Cand> {
        let mut roots: Vec<Cand> =
            state_vars().into_iter().map(|(n, t)| Cand { expr: n.into(), ty: t, loc: Where::Storage, ptr_var: false }).collect();
        for (n, t) in self.ptrs.clone() {
            roots.push(Cand { expr: n, ty: t, loc: Where::Storage, ptr_var: true });
        }
        for (n, t) in self.mems.clone() {
            roots.push(Cand { expr: n, ty: t, loc: Where::Memory, ptr_var: false });
        }
        let mut out = vec![];
        for r in roots {
            self.expand(r, 0, &mut out);
        }
        out
    }

    fn index(&mut self, loc: Where, t: &SolType) -> String {
        match (loc, t) {
            (_, SolType::FixArray(_, n)) => self.rng.gen_range(0..*n).to_string(),
            (Where::Memory, _) => (if self.rng.gen_bool(0.8) { 0 } else { 1 }).to_string(),
            _ => [0, 0, 0, 1, 1, 2].choose(&mut self.rng).copied().unwrap_or(0).to_string(),
        }
    }

    fn expand(&mut self, c: Cand, depth: usize, out: &mut Vec<Cand>) {
        out.push(c.clone());
        if depth >= 4 {
            return;
        }
        let child = |expr: String, ty: SolType| Cand { expr, ty, loc: c.loc, ptr_var: false };
        match &c.ty {
            SolType::Struct(s) => {
                for (m, mt) in members(s) {
                    self.expand(child(format!("{}.{}", c.expr, m), mt), depth + 1, out);
                }
            }
            SolType::DynArray(b) | SolType::FixArray(b, _) => {
                let i = self.index(c.loc, &c.ty);
                self.expand(child(format!("{}[{}]", c.expr, i), (**b).clone()), depth + 1, out);
            }
            SolType::Mapping(k, v) => {
                let key = if **k == SolType::Bool {
                    self.rng.gen_bool(0.5).to_string()
                } else {
                    self.rng.gen_range(0..3).to_string()
                };
                self.expand(child(format!("{}[{}]", c.expr, key), (**v).clone()), depth + 1, out);
            }
            _ => {}
        }
    }

    fn pick<'a>(&mut self, cs: &'a [Cand], f: impl Fn(&Cand) -> bool) -> Option<&'a Cand> {
        let v: Vec<&Cand> = cs.iter().filter(|c| f(c)).collect();
        v.choose(&mut self.rng).copied()
    }

    fn fresh(&mut self, base: &str) -> String {
        self.next += 1;
        format!("{}{}", base, self.next)
    }

    fn int_expr(&mut self, cs: &[Cand], depth: usize) -> String {
        match self.rng.gen_range(0..10) {
            0..=2 => self.rng.gen_range(0..10).to_string(),
            3..=5 => self.pick(cs, |c| c.ty == SolType::Int).map(|c| c.expr.clone()).unwrap_or_else(|| "1".into()),
            6 => match self.pick(cs, |c| c.ty.is_array()) {
                Some(c) => format!("{}.length", c.expr),
                None => "2".into(),
            },
            7 if depth < 2 => format!("{} + {}", self.int_expr(cs, depth + 1), self.rng.gen_range(1..4)),
            8 if depth < 2 => {
                let b = self.bool_expr(cs, depth + 1);
                format!("({} ? {} : {})", b, self.int_expr(cs, depth + 1), self.int_expr(cs, depth + 1))
            }
            _ => self.rng.gen_range(0..4).to_string(),
        }
    }

    fn bool_expr(&mut self, cs: &[Cand], depth: usize) -> String {
        match self.rng.gen_range(0..6) {
            0 => self.rng.gen_bool(0.5).to_string(),
            1 | 2 => self.pick(cs, |c| c.ty == SolType::Bool).map(|c| c.expr.clone()).unwrap_or_else(|| "true".into()),
            3 if depth < 2 => format!("!{}", self.bool_expr(cs, depth + 1)),
            _ => {
                let a = self.int_expr(cs, depth + 1);
                let op = ["<", "==", "!=", ">="].choose(&mut self.rng).copied().unwrap_or("<");
                format!("({} {} {})", a, op, self.rng.gen_range(0..3))
            }
        }
    }

    fn value_expr(&mut self, cs: &[Cand], t: &SolType) -> String {
        if *t == SolType::Bool {
            self.bool_expr(cs, 0)
        } else {
            self.int_expr(cs, 0)
        }
    }

    /// A memory-located expression of type `t` built from scratch.
    fn construct(&mut self, cs: &[Cand], t: &SolType, depth: usize) -> Option<String> {
        match t {
            SolType::DynArray(_) => Some(format!("new {}({})", t, self.rng.gen_range(1..=GEN_UNROLL))),
            SolType::Struct(s) if s != "W" && depth < 2 => {
                let mut args = vec![];
                for (_, mt) in members(s) {
                    args.push(self.rhs(cs, &mt, false, depth + 1)?);
                }
                Some(format!("{}({})", s, args.join(", ")))
            }
            _ => None,
        }
    }

    /// A right-hand side of type `t`; storage-located only when `storage`.
    fn rhs(&mut self, cs: &[Cand], t: &SolType, storage: bool, depth: usize) -> Option<String> {
        if t.is_value() {
            return Some(self.value_expr(cs, t));
        }
        let roll = self.rng.gen_range(0..10);
        if !storage && roll < 3 {
            if let Some(e) = self.construct(cs, t, depth) {
                return Some(e);
            }
        }
        let ok = |c: &Cand| c.ty == *t && (!storage || c.loc == Where::Storage);
        let a = self.pick(cs, ok)?.expr.clone();
        if roll >= 8 && depth == 0 {
            let b = self.pick(cs, ok)?.expr.clone();
            let c = self.bool_expr(cs, 1);
            return Some(format!("({} ? {} : {})", c, a, b));
        }
        Some(a)
    }

    fn ref_type(&mut self) -> SolType {
        let ts = [
            st("T"),
            st("S"),
            SolType::dyn_array(SolType::Int),
            SolType::dyn_array(st("T")),
            SolType::fix_array(SolType::Int, 2),
            SolType::dyn_array(st("S")),
            SolType::fix_array(st("T"), 2),
        ];
        ts.choose(&mut self.rng).cloned().unwrap_or_else(|| st("T"))
    }

    fn assignable(c: &Cand) -> bool {
        !c.ty.is_mapping() && !matches!(&c.ty, SolType::Struct(s) if s == "W")
    }

    fn stmt(&mut self) {
        let cs = self.candidates();
        let line = match self.rng.gen_range(0..20) {
            0..=3 => {
                let Some(l) = self.pick(&cs, |c| c.ty.is_value()).cloned() else { return };
                let r = self.value_expr(&cs, &l.ty);
                self.touched.push(l.clone());
                format!("{} = {};", l.expr, r)
            }
            4..=7 => {
                let t = self.ref_type();
                let Some(l) = self.pick(&cs, |c| c.ty == t && Self::assignable(c)).cloned() else { return };
                let Some(r) = self.rhs(&cs, &t, l.ptr_var, 0) else { return };
                self.touched.push(l.clone());
                format!("{} = {};", l.expr, r)
            }
            8 | 9 => {
                let Some(c) = self.pick(&cs, |c| c.loc == Where::Storage && c.ty.is_reference() && !c.ptr_var).cloned()
                else {
                    return;
                };
                let p = self.fresh("p");
                self.ptrs.push((p.clone(), c.ty.clone()));
                self.touched.push(Cand { expr: p.clone(), ty: c.ty.clone(), loc: Where::Storage, ptr_var: true });
                format!("{} storage {} = {};", c.ty, p, c.expr)
            }
            10 | 11 => {
                let t = self.ref_type();
                let r = if self.rng.gen_bool(0.2) { None } else { self.rhs(&cs, &t, false, 0) };
                let m = self.fresh("m");
                self.mems.push((m.clone(), t.clone()));
                self.touched.push(Cand { expr: m.clone(), ty: t.clone(), loc: Where::Memory, ptr_var: false });
                match r {
                    Some(r) => format!("{} memory {} = {};", t, m, r),
                    None => format!("{} memory {};", t, m),
                }
            }
            12 | 13 => {
                self.push(&cs);
                return;
            }
            14 => {
                let Some(a) = self
                    .pick(&cs, |c| c.loc == Where::Storage && matches!(c.ty, SolType::DynArray(_)))
                    .cloned()
                else {
                    return;
                };
                self.touched.push(a.clone());
                format!("{}.pop();", a.expr)
            }
            15 => {
                let Some(c) = self.pick(&cs, |c| !c.ty.is_mapping() && !c.ptr_var).cloned() else { return };
                format!("delete {};", c.expr)
            }
            16 | 17 => {
                let t = if self.rng.gen_bool(0.4) { SolType::Int } else { self.ref_type() };
                let ok = |c: &Cand| c.ty == t && Self::assignable(c) && !c.ptr_var;
                let Some(a) = self.pick(&cs, ok).cloned() else { return };
                let Some(b) = self.pick(&cs, ok).cloned() else { return };
                if self.rng.gen_bool(0.5) {
                    self.touched.extend([a.clone(), b.clone()]);
                    format!("({}, {}) = ({}, {});", a.expr, b.expr, b.expr, a.expr)
                } else {
                    let Some(c) = self.pick(&cs, ok).cloned() else { return };
                    self.touched.extend([a.clone(), b.clone(), c.clone()]);
                    format!("({}, {}, {}) = ({}, {}, {});", a.expr, c.expr, b.expr, c.expr, b.expr, a.expr)
                }
            }
            _ => {
                self.probe(&cs);
                return;
            }
        };
        self.out.push(GStmt::Line(line));
    }

    fn push(&mut self, cs: &[Cand]) {
        let Some(a) = self.pick(cs, |c| c.loc == Where::Storage && matches!(c.ty, SolType::DynArray(_))).cloned() else {
            return;
        };
        let elem = a.ty.array_base().cloned().unwrap_or(SolType::Int);
        let Some(v) = self.rhs(cs, &elem, false, 0) else { return };
        self.touched.push(a.clone());
        self.out.push(GStmt::Line(format!("{}.push({});", a.expr, v)));
    }

    fn probe(&mut self, cs: &[Cand]) {
        let recent: Vec<Cand> = self.touched.iter().rev().take(4).cloned().collect();
        let mut near = vec![];
        for t in recent {
            self.expand(t, 1, &mut near);
        }
        let cs = if !near.is_empty() && self.rng.gen_bool(0.75) { &near[..] } else { cs };
        let (e, is_bool) = match self.rng.gen_range(0..5) {
            0 => match self.pick(cs, |c| c.ty.is_array()) {
                Some(c) => (format!("{}.length", c.expr), false),
                None => return,
            },
            1 => match self.pick(cs, |c| c.ty == SolType::Bool) {
                Some(c) => (c.expr.clone(), true),
                None => return,
            },
            _ => match self.pick(cs, |c| c.ty == SolType::Int) {
                Some(c) => (c.expr.clone(), false),
                None => return,
            },
        };
        self.out.push(GStmt::Probe(e, is_bool));
    }
}

fn render(stmts: &[GStmt], ks: &[String]) -> String {
    let mut body = String::new();
    let mut k = 0;
    for s in stmts {
        match s {
            GStmt::Line(l) => body.push_str(&format!("        {}\n", l)),
            GStmt::Probe(e, is_bool) => {
                let c = ks.get(k).cloned().unwrap_or_else(|| if *is_bool { "false" } else { "0" }.into());
                k += 1;
                body.push_str(&format!("        assert({} == {});\n", e, c));
            }
        }
    }
    format!("contract Gen {{\n{}\n    constructor() {{\n{}    }}\n}}\n", PRELUDE, body)
}

fn literal(v: &CValue) -> String {
    match v {
        CValue::Bool(b) => b.to_string(),
        CValue::Int(n) => n.to_string(),
        v => format!("{:?}", v),
    }
}

fn wrong(v: &CValue) -> String {
    match v {
        CValue::Bool(b) => (!b).to_string(),
        CValue::Int(n) => (n + 1).to_string(),
        v => format!("{:?}", v),
    }
}

fn attempt(seed: u64, attempt: u64, size: usize) -> Result<String, OracleError> {
    let mut g = Gen {
        rng: ChaCha8Rng::seed_from_u64(seed.wrapping_mul(1_000_003).wrapping_add(attempt)),
        mems: vec![],
        ptrs: vec![],
        next: 0,
        out: vec![],
        touched: vec![],
    };
    for _ in 0..3 {
        let cs = g.candidates();
        g.push(&cs);
    }
    for _ in 0..size {
        g.stmt();
    }
    for _ in 0..3 {
        let cs = g.candidates();
        g.probe(&cs);
    }
    let draft = render(&g.out, &[]);
    let c = frontend::load(&draft).unwrap_or_else(|e| panic!("generator produced an ill-typed program ({}):\n{}", e, draft));
    let mut m = Machine::new(&c);
    m.unroll = Some(GEN_UNROLL);
    let values = m.probe("constructor")?;
    let fail_at = if !values.is_empty() && g.rng.gen_bool(0.35) { Some(g.rng.gen_range(0..values.len())) } else { None };
    let ks: Vec<String> =
        values.iter().enumerate().map(|(i, v)| if Some(i) == fail_at { wrong(v) } else { literal(v) }).collect();
    let text = render(&g.out, &ks);
    // the calibrated program must behave as planned
    let c = frontend::load(&text).unwrap_or_else(|e| panic!("generator produced an ill-typed program ({}):\n{}", e, text));
    let mut m = Machine::new(&c);
    m.unroll = Some(GEN_UNROLL);
    let r = m.call("constructor", &[])?;
    let expected = fail_at.map(|i| c.asserts[i].id);
    match (&r.outcome, expected) {
        (Outcome::Finished, None) => {}
        (Outcome::AssertFailed(id), Some(e)) if *id == e => {}
        (o, e) => return Err(OracleError::Internal(format!("calibration mismatch: {:?} vs {:?}", o, e))),
    }
    Ok(text)
}

/// A generated contract, deterministic in `seed`, with about `size`
/// statements in its constructor. Candidates whose execution hits a runtime
/// error in the oracle (out-of-bounds memory index, pop on an empty array,
/// copies beyond [`GEN_UNROLL`] elements) are discarded and regenerated.
pub fn random_program(seed: u64, size: usize) -> String {
    let mut last = None;
    for k in 0..500 {
        match attempt(seed, k, size) {
            Ok(t) => return t,
            Err(e) => last = Some(e),
        }
    }
    // fall back to a trivially valid program
    log::warn!("seed {}: no valid program after 500 attempts ({:?})", seed, last);
    render(&[GStmt::Line("n = 1;".into()), GStmt::Probe("n".into(), false)], &["1".into()])
}
