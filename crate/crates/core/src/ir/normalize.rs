// SPDX-License-Identifier: Apache-2.0

//! Elimination of composite left-hand sides.
//!
//! * `a[i] := e` becomes `a := a[i <- e]`;
//! * `d.m := e` becomes `d := D(d.m1, .., e, .., d.mn)`;
//! * `ite(c, t, f) := e` becomes `if c { t := e } else { f := e }`.

use super::{IrError, IrExpr, IrStmt, SmtProgram};

pub fn normalize_lhs(p: &SmtProgram) -> Result<SmtProgram, IrError> {
    let stmts = normalize_stmts(p, &p.stmts)?;
    Ok(SmtProgram { datatypes: p.datatypes.clone(), decls: p.decls.clone(), stmts })
}

fn normalize_stmts(p: &SmtProgram, ss: &[IrStmt]) -> Result<Vec<IrStmt>, IrError> {
    let mut out = Vec::with_capacity(ss.len());
    for s in ss {
        match s {
            IrStmt::Assign(l, r) => assign(p, l.clone(), r.clone(), &mut out)?,
            IrStmt::Ite(c, t, e) => out.push(IrStmt::Ite(c.clone(), normalize_stmts(p, t)?, normalize_stmts(p, e)?)),
            s => out.push(s.clone()),
        }
    }
    Ok(out)
}

fn assign(p: &SmtProgram, mut lhs: IrExpr, mut rhs: IrExpr, out: &mut Vec<IrStmt>) -> Result<(), IrError> {
    loop {
        match lhs {
            IrExpr::Ident(_) => {
                out.push(IrStmt::Assign(lhs, rhs));
                return Ok(());
            }
            IrExpr::Read(a, i) => {
                rhs = IrExpr::Write(a.clone(), i, Box::new(rhs));
                lhs = *a;
            }
            IrExpr::Select(d, dt, m) => {
                let def = p.datatype(&dt)?;
                let k = def
                    .member_index(&m)
                    .ok_or_else(|| IrError::IllFormed(format!("datatype `{}` has no member `{}`", dt, m)))?;
                let args = def
                    .members
                    .iter()
                    .enumerate()
                    .map(|(j, (mj, _))| if j == k { rhs.clone() } else { d.as_ref().clone().select(dt.clone(), mj.clone()) })
                    .collect();
                rhs = IrExpr::Construct(dt, args);
                lhs = *d;
            }
            IrExpr::Ite(c, t, f) => {
                let mut ts = vec![];
                assign(p, *t, rhs.clone(), &mut ts)?;
                let mut fs = vec![];
                assign(p, *f, rhs, &mut fs)?;
                out.push(IrStmt::Ite(*c, ts, fs));
                return Ok(());
            }
            other => return Err(IrError::IllFormed(format!("`{}` is not assignable", other))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::{ident, DatatypeDef, IrType};

    fn prog() -> SmtProgram {
        let mut p = SmtProgram::default();
        p.add_datatype(DatatypeDef {
            name: "D".into(),
            members: vec![("m1".into(), IrType::Int), ("m2".into(), IrType::Int), ("m3".into(), IrType::Int)],
        });
        p.declare("d", IrType::Datatype("D".into()));
        p.declare("a", IrType::array(IrType::Int, IrType::Int));
        p.declare("x", IrType::Int);
        p.declare("y", IrType::Int);
        p.declare("c", IrType::Bool);
        p
    }

    fn norm(l: IrExpr, r: IrExpr) -> String {
        let mut p = prog();
        p.stmts = vec![IrStmt::Assign(l, r)];
        normalize_lhs(&p).unwrap().stmts.iter().map(|s| format!("{:?}", s)).collect()
    }

    #[test]
    fn array_write() {
        let got = norm(ident("a").read(ident("i")), ident("e"));
        let want = format!("{:?}", IrStmt::Assign(ident("a"), ident("a").write(ident("i"), ident("e"))));
        assert_eq!(got, want);
    }

    #[test]
    fn member_reassembly() {
        let mut p = prog();
        p.stmts = vec![IrStmt::Assign(ident("d").select("D", "m2"), ident("e"))];
        let n = normalize_lhs(&p).unwrap();
        assert_eq!(n.stmts.len(), 1);
        let IrStmt::Assign(l, r) = &n.stmts[0] else { panic!() };
        assert_eq!(l, &ident("d"));
        assert_eq!(r.to_string(), "D(d.m1, e, d.m3)");
    }

    #[test]
    fn ite_branches() {
        let mut p = prog();
        p.stmts = vec![IrStmt::Assign(IrExpr::ite(ident("c"), ident("x"), ident("y")), IrExpr::Int(5))];
        let n = normalize_lhs(&p).unwrap();
        assert_eq!(
            n.stmts,
            vec![IrStmt::Ite(
                ident("c"),
                vec![IrStmt::Assign(ident("x"), IrExpr::Int(5))],
                vec![IrStmt::Assign(ident("y"), IrExpr::Int(5))]
            )]
        );
    }

    #[test]
    fn literal_lhs_rejected() {
        let mut p = prog();
        p.stmts = vec![IrStmt::Assign(IrExpr::Int(1), IrExpr::Int(5))];
        assert!(matches!(normalize_lhs(&p), Err(IrError::IllFormed(_))));
    }
}
