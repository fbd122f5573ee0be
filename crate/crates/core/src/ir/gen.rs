// SPDX-License-Identifier: Apache-2.0

//! Seeded generator of small well-typed IR programs with composite
//! left-hand sides, for checking the IR transformations.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::eval::{ArrayVal, Env, Value};
use super::{BinOp, DatatypeDef, IrExpr, IrStmt, IrType, SmtProgram};

fn dt(n: &str) -> IrType {
    IrType::Datatype(n.into())
}

/// The fixed signature shared by all generated programs.
pub fn signature() -> SmtProgram {
    let mut p = SmtProgram::default();
    p.add_datatype(DatatypeDef { name: "P".into(), members: vec![("x".into(), IrType::Int), ("y".into(), IrType::Bool)] });
    p.add_datatype(DatatypeDef {
        name: "Q".into(),
        members: vec![
            ("p".into(), dt("P")),
            ("arr".into(), IrType::array(IrType::Int, dt("P"))),
            ("n".into(), IrType::Int),
        ],
    });
    for (n, t) in [
        ("i", IrType::Int),
        ("j", IrType::Int),
        ("b", IrType::Bool),
        ("a", IrType::array(IrType::Int, IrType::Int)),
        ("m", IrType::array(IrType::Bool, IrType::Int)),
        ("p", dt("P")),
        ("q", dt("Q")),
        ("qs", IrType::array(IrType::Int, dt("Q"))),
    ] {
        p.declare(n, t);
    }
    p
}

struct Gen<'a> {
    rng: ChaCha8Rng,
    sig: &'a SmtProgram,
    types: Vec<IrType>,
    next_assert: usize,
}

impl Gen<'_> {
    fn all_types(sig: &SmtProgram) -> Vec<IrType> {
        let mut ts: Vec<IrType> = vec![IrType::Int, IrType::Bool];
        let mut work: Vec<IrType> = sig.decls.values().cloned().collect();
        while let Some(t) = work.pop() {
            if ts.contains(&t) {
                continue;
            }
            match &t {
                IrType::Array(i, e) => {
                    work.push((**i).clone());
                    work.push((**e).clone());
                }
                IrType::Datatype(d) => work.extend(sig.datatypes[d.as_str()].members.iter().map(|(_, t)| t.clone())),
                _ => {}
            }
            ts.push(t);
        }
        ts
    }

    fn small_int(&mut self) -> IrExpr {
        IrExpr::Int(self.rng.gen_range(-3..=3))
    }

    /// An assignable expression of type `t`, or `None` if none exists.
    fn lvalue(&mut self, t: &IrType, depth: u32) -> Option<IrExpr> {
        let mut options: Vec<IrExpr> = self
            .sig
            .decls
            .iter()
            .filter(|(_, dt)| *dt == t)
            .map(|(n, _)| IrExpr::Ident(n.clone()))
            .collect();
        if depth > 0 {
            let containers: Vec<IrType> = self.types.clone();
            for c in containers {
                match &c {
                    IrType::Array(i, e) if **e == *t => {
                        if let Some(base) = self.lvalue(&c, depth - 1) {
                            let idx = self.expr(i, depth - 1);
                            options.push(base.read(idx));
                        }
                    }
                    IrType::Datatype(d) => {
                        let members: Vec<(String, IrType)> = self.sig.datatypes[d.as_str()].members.clone();
                        for (m, mt) in members {
                            if mt == *t {
                                if let Some(base) = self.lvalue(&c, depth - 1) {
                                    options.push(base.select(d.clone(), m));
                                }
                            }
                        }
                    }
                    _ => {}
                }
            }
        }
        if options.is_empty() {
            return None;
        }
        let k = self.rng.gen_range(0..options.len());
        let pick = options.swap_remove(k);
        if depth > 0 && self.rng.gen_bool(0.15) {
            if let Some(other) = self.lvalue(t, depth - 1) {
                let c = self.expr(&IrType::Bool, depth - 1);
                return Some(IrExpr::ite(c, pick, other));
            }
        }
        Some(pick)
    }

    fn expr(&mut self, t: &IrType, depth: u32) -> IrExpr {
        let leaf = depth == 0 || self.rng.gen_bool(0.3);
        if !leaf && self.rng.gen_bool(0.1) {
            let c = self.expr(&IrType::Bool, depth - 1);
            return IrExpr::ite(c, self.expr(t, depth - 1), self.expr(t, depth - 1));
        }
        if !leaf && self.rng.gen_bool(0.4) {
            if let Some(l) = self.lvalue(t, depth.min(2)) {
                return l;
            }
        }
        match t {
            IrType::Int => {
                if leaf {
                    return match self.rng.gen_range(0..3) {
                        0 => self.small_int(),
                        1 => IrExpr::Ident("i".into()),
                        _ => IrExpr::Ident("j".into()),
                    };
                }
                match self.rng.gen_range(0..3) {
                    0 => IrExpr::bin(BinOp::Add, self.expr(t, depth - 1), self.expr(t, depth - 1)),
                    1 => IrExpr::bin(BinOp::Sub, self.expr(t, depth - 1), self.expr(t, depth - 1)),
                    _ => IrExpr::Neg(Box::new(self.expr(t, depth - 1))),
                }
            }
            IrType::Bool => {
                if leaf {
                    return match self.rng.gen_range(0..3) {
                        0 => IrExpr::Bool(self.rng.gen()),
                        _ => IrExpr::Ident("b".into()),
                    };
                }
                let ops = [BinOp::Eq, BinOp::Ne, BinOp::Lt, BinOp::Le, BinOp::Gt, BinOp::Ge, BinOp::And, BinOp::Or];
                match self.rng.gen_range(0..4) {
                    0 => IrExpr::not(self.expr(t, depth - 1)),
                    1 => {
                        // equality over a random type
                        let k = self.rng.gen_range(0..self.types.len());
                        let ty = self.types[k].clone();
                        IrExpr::eq(self.expr(&ty, depth - 1), self.expr(&ty, depth - 1))
                    }
                    _ => {
                        let op = ops[self.rng.gen_range(0..ops.len())];
                        let at = if matches!(op, BinOp::And | BinOp::Or) { IrType::Bool } else { IrType::Int };
                        IrExpr::bin(op, self.expr(&at, depth - 1), self.expr(&at, depth - 1))
                    }
                }
            }
            IrType::Array(i, e) => {
                if leaf || self.rng.gen_bool(0.3) {
                    if let Some(l) = self.lvalue(t, 0) {
                        if self.rng.gen_bool(0.7) {
                            return l;
                        }
                    }
                    let v = self.expr(e, depth.saturating_sub(1));
                    return IrExpr::const_array((**i).clone(), (**e).clone(), v);
                }
                let base = self.expr(t, depth - 1);
                base.write(self.expr(i, depth - 1), self.expr(e, depth - 1))
            }
            IrType::Datatype(d) => {
                if leaf {
                    if let Some(l) = self.lvalue(t, 1) {
                        return l;
                    }
                }
                let members: Vec<IrType> = self.sig.datatypes[d.as_str()].members.iter().map(|(_, t)| t.clone()).collect();
                let args = members.iter().map(|mt| self.expr(mt, depth.saturating_sub(1))).collect();
                IrExpr::Construct(d.clone(), args)
            }
        }
    }

    fn stmts(&mut self, n: usize, depth: u32) -> Vec<IrStmt> {
        let mut out = vec![];
        for _ in 0..n {
            let r = self.rng.gen_range(0..100);
            if r < 60 {
                let k = self.rng.gen_range(0..self.types.len());
                let t = self.types[k].clone();
                if let Some(l) = self.lvalue(&t, 3) {
                    let e = self.expr(&t, 3);
                    out.push(IrStmt::Assign(l, e));
                }
            } else if r < 75 && depth > 0 {
                let c = self.expr(&IrType::Bool, 2);
                let nt = self.rng.gen_range(0..3);
                let ne = self.rng.gen_range(0..3);
                let t = self.stmts(nt, depth - 1);
                let e = self.stmts(ne, depth - 1);
                out.push(IrStmt::Ite(c, t, e));
            } else if r < 82 {
                let c = self.expr(&IrType::Bool, 2);
                out.push(IrStmt::Assume(c));
            } else {
                let c = self.expr(&IrType::Bool, 3);
                out.push(IrStmt::Assert(c, self.next_assert));
                self.next_assert += 1;
            }
        }
        out
    }
}

/// A random program over [`signature`]; deterministic in `seed`.
pub fn random_program(seed: u64, size: usize) -> SmtProgram {
    let sig = signature();
    let types = Gen::all_types(&sig);
    let mut g = Gen { rng: ChaCha8Rng::seed_from_u64(seed), sig: &sig, types, next_assert: 0 };
    let stmts = g.stmts(size, 2);
    let mut p = sig.clone();
    p.stmts = stmts;
    p
}

fn random_value(rng: &mut ChaCha8Rng, sig: &SmtProgram, t: &IrType) -> Value {
    match t {
        IrType::Int => Value::Int(rng.gen_range(-3..=3)),
        IrType::Bool => Value::Bool(rng.gen()),
        IrType::Array(i, e) => {
            let mut a = ArrayVal::constant(**i == IrType::Bool, random_value(rng, sig, e));
            for _ in 0..rng.gen_range(0..3) {
                let k = random_value(rng, sig, i);
                let v = random_value(rng, sig, e);
                a.set(k, v);
            }
            Value::Array(a)
        }
        IrType::Datatype(d) => {
            let ms = sig.datatypes[d.as_str()].members.iter().map(|(_, mt)| random_value(rng, sig, mt)).collect();
            Value::Data(d.clone(), ms)
        }
    }
}

/// A random initial environment for the variables of [`signature`].
pub fn random_env(seed: u64) -> Env {
    let sig = signature();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    sig.decls.iter().map(|(n, t)| (n.clone(), random_value(&mut rng, &sig, t))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generated_programs_typecheck() {
        for seed in 0..50 {
            let p = random_program(seed, 12);
            p.check().unwrap_or_else(|e| panic!("seed {}: {}\n{}", seed, e, p));
        }
    }

    #[test]
    fn deterministic() {
        assert_eq!(random_program(3, 10), random_program(3, 10));
    }
}
