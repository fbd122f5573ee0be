// SPDX-License-Identifier: Apache-2.0

//! Static single assignment form.
//!
//! Versions of `x` are named `x@1`, `x@2`, ...; the initial version keeps the
//! bare name. If-statements are flattened: both branches are emitted as
//! plain definitions, assumes and asserts inside them are guarded by the path
//! condition, and variables assigned in either branch get a merged version
//! `x@k := ite(c, x_then, x_else)` at the join.

use std::collections::HashMap;

use super::{IrError, IrExpr, IrStmt, SmtProgram};

struct Ssa<'a> {
    src: &'a SmtProgram,
    out: SmtProgram,
    /// Highest version handed out per variable.
    counter: HashMap<String, usize>,
}

type Versions = HashMap<String, usize>;

fn versioned(x: &str, k: usize) -> String {
    if k == 0 {
        x.to_string()
    } else {
        format!("{}@{}", x, k)
    }
}

/// Converts a normalized program to SSA. Returns the new program and a map
/// from every declared variable to the name of its final version.
pub fn to_ssa(p: &SmtProgram) -> Result<(SmtProgram, HashMap<String, String>), IrError> {
    let mut s = Ssa {
        src: p,
        out: SmtProgram { datatypes: p.datatypes.clone(), decls: p.decls.clone(), stmts: vec![] },
        counter: HashMap::new(),
    };
    let mut cur = Versions::new();
    let mut stmts = vec![];
    s.block(&p.stmts, &IrExpr::Bool(true), &mut cur, &mut stmts)?;
    s.out.stmts = stmts;
    let finals = p
        .decls
        .keys()
        .map(|x| (x.clone(), versioned(x, cur.get(x).copied().unwrap_or(0))))
        .collect();
    Ok((s.out, finals))
}

impl Ssa<'_> {
    fn current(cur: &Versions, e: &IrExpr) -> IrExpr {
        e.rename(&|x| versioned(x, cur.get(x).copied().unwrap_or(0)))
    }

    fn fresh(&mut self, x: &str) -> Result<usize, IrError> {
        let ty = self
            .src
            .decls
            .get(x)
            .cloned()
            .ok_or_else(|| IrError::IllFormed(format!("assignment to undeclared `{}`", x)))?;
        let k = self.counter.entry(x.to_string()).or_insert(0);
        *k += 1;
        let k = *k;
        self.out.decls.insert(versioned(x, k), ty);
        Ok(k)
    }

    fn block(&mut self, ss: &[IrStmt], pc: &IrExpr, cur: &mut Versions, out: &mut Vec<IrStmt>) -> Result<(), IrError> {
        for s in ss {
            match s {
                IrStmt::Assign(IrExpr::Ident(x), r) => {
                    let r = Self::current(cur, r);
                    let k = self.fresh(x)?;
                    cur.insert(x.clone(), k);
                    out.push(IrStmt::Assign(IrExpr::Ident(versioned(x, k)), r));
                }
                IrStmt::Assign(l, _) => {
                    return Err(IrError::IllFormed(format!("non-identifier left-hand side `{}`", l)));
                }
                IrStmt::Assume(c) => out.push(IrStmt::Assume(IrExpr::implies(pc.clone(), Self::current(cur, c)))),
                IrStmt::Assert(c, id) => {
                    out.push(IrStmt::Assert(IrExpr::implies(pc.clone(), Self::current(cur, c)), *id))
                }
                IrStmt::Ite(c, t, e) => {
                    let c = Self::current(cur, c);
                    let mut ct = cur.clone();
                    self.block(t, &IrExpr::and(pc.clone(), c.clone()), &mut ct, out)?;
                    let mut ce = cur.clone();
                    self.block(e, &IrExpr::and(pc.clone(), IrExpr::not(c.clone())), &mut ce, out)?;
                    let mut changed: Vec<&String> = ct
                        .keys()
                        .chain(ce.keys())
                        .filter(|x| ct.get(*x) != ce.get(*x))
                        .collect();
                    changed.sort();
                    changed.dedup();
                    for x in changed {
                        let vt = versioned(x, ct.get(x).copied().unwrap_or(0));
                        let ve = versioned(x, ce.get(x).copied().unwrap_or(0));
                        let k = self.fresh(x)?;
                        out.push(IrStmt::Assign(
                            IrExpr::Ident(versioned(x, k)),
                            IrExpr::ite(c.clone(), IrExpr::Ident(vt), IrExpr::Ident(ve)),
                        ));
                        cur.insert(x.clone(), k);
                    }
                    // variables assigned identically in both branches
                    for (x, k) in ct {
                        if ce.get(&x) == Some(&k) {
                            cur.insert(x, k);
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{ident, BinOp, IrType};

    #[test]
    fn sequential_renaming() {
        let mut p = SmtProgram::default();
        p.declare("x", IrType::Int);
        p.stmts = vec![
            IrStmt::Assign(ident("x"), IrExpr::Int(1)),
            IrStmt::Assign(ident("x"), IrExpr::add(ident("x"), IrExpr::Int(1))),
        ];
        let (s, fin) = to_ssa(&p).unwrap();
        assert_eq!(
            s.stmts,
            vec![
                IrStmt::Assign(ident("x@1"), IrExpr::Int(1)),
                IrStmt::Assign(ident("x@2"), IrExpr::add(ident("x@1"), IrExpr::Int(1))),
            ]
        );
        assert_eq!(fin["x"], "x@2");
    }

    #[test]
    fn join_merges_with_ite() {
        let mut p = SmtProgram::default();
        p.declare("x", IrType::Int);
        p.declare("c", IrType::Bool);
        p.stmts = vec![
            IrStmt::Ite(
                ident("c"),
                vec![IrStmt::Assign(ident("x"), IrExpr::Int(1))],
                vec![IrStmt::Assign(ident("x"), IrExpr::Int(2))],
            ),
            IrStmt::Assert(IrExpr::bin(BinOp::Gt, ident("x"), IrExpr::Int(0)), 0),
        ];
        let (s, _) = to_ssa(&p).unwrap();
        assert_eq!(s.stmts[2], IrStmt::Assign(ident("x@3"), IrExpr::ite(ident("c"), ident("x@1"), ident("x@2"))));
        assert_eq!(s.stmts[3], IrStmt::Assert(IrExpr::bin(BinOp::Gt, ident("x@3"), IrExpr::Int(0)), 0));
    }
}
