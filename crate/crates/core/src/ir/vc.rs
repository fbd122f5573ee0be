// SPDX-License-Identifier: Apache-2.0

//! Verification conditions: one formula per assert of an SSA program.

use indexmap::IndexMap;

use super::{DatatypeDef, IrError, IrExpr, IrStmt, IrType, SmtProgram};

/// A closed quantifier-free formula with the datatypes and constants it
/// mentions. Satisfiable iff the checked assert can fail.
#[derive(Clone, Debug)]
pub struct Formula {
    pub datatypes: IndexMap<String, DatatypeDef>,
    pub decls: IndexMap<String, IrType>,
    pub conjuncts: Vec<IrExpr>,
    /// Source id of the checked assert.
    pub assert_id: usize,
}

impl Formula {
    pub fn to_expr(&self) -> IrExpr {
        self.conjuncts.iter().cloned().reduce(IrExpr::and).unwrap_or(IrExpr::Bool(true))
    }
}

/// Builds the VC of the `index`-th assert (in program order) of an SSA
/// program: definitions and assumptions before it, earlier asserts as
/// assumptions, and the negated assert.
pub fn vc_gen(p: &SmtProgram, index: usize) -> Result<Formula, IrError> {
    let mut conjuncts = vec![];
    let mut seen = 0;
    for s in &p.stmts {
        match s {
            IrStmt::Assign(IrExpr::Ident(x), e) => conjuncts.push(IrExpr::eq(IrExpr::Ident(x.clone()), e.clone())),
            IrStmt::Assume(c) => conjuncts.push(c.clone()),
            IrStmt::Assert(c, id) => {
                if seen == index {
                    conjuncts.push(IrExpr::not(c.clone()));
                    return Ok(Formula {
                        datatypes: p.datatypes.clone(),
                        decls: used_decls(p, &conjuncts),
                        conjuncts,
                        assert_id: *id,
                    });
                }
                conjuncts.push(c.clone());
                seen += 1;
            }
            s => return Err(IrError::IllFormed(format!("VC generation needs SSA form, found {:?}", s))),
        }
    }
    Err(IrError::AssertIndex(index))
}

fn used_decls(p: &SmtProgram, cs: &[IrExpr]) -> IndexMap<String, IrType> {
    let mut used = std::collections::HashSet::new();
    for c in cs {
        c.visit(&mut |e| {
            if let IrExpr::Ident(n) = e {
                used.insert(n.clone());
            }
        });
    }
    p.decls.iter().filter(|(n, _)| used.contains(*n)).map(|(n, t)| (n.clone(), t.clone())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::ident;

    #[test]
    fn trivial_vc() {
        let mut p = SmtProgram::default();
        p.declare("x@1", IrType::Int);
        p.stmts = vec![
            IrStmt::Assign(ident("x@1"), IrExpr::Int(1)),
            IrStmt::Assert(IrExpr::eq(ident("x@1"), IrExpr::Int(1)), 7),
        ];
        let f = vc_gen(&p, 0).unwrap();
        assert_eq!(f.assert_id, 7);
        assert_eq!(f.to_expr().to_string(), "(x@1 = 1) && !(x@1 = 1)");
        assert_eq!(vc_gen(&p, 1).unwrap_err(), IrError::AssertIndex(1));
    }
}
