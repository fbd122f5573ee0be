// SPDX-License-Identifier: Apache-2.0

//! SMT-LIB v2 rendering of formulas.

use std::collections::HashSet;
use std::fmt::Write;

use super::{BinOp, DatatypeDef, Formula, IrExpr, IrType};

const RESERVED: &[&str] = &[
    "_", "!", "as", "let", "exists", "forall", "match", "par", "assert", "check-sat", "declare-const",
    "declare-fun", "define-fun", "push", "pop", "NUMERAL", "DECIMAL", "STRING", "BINARY", "HEXADECIMAL",
];

/// Renders a symbol, quoting it with `|...|` unless it is a simple symbol.
pub fn symbol(s: &str) -> String {
    let simple_char = |c: char| c.is_ascii_alphanumeric() || "~!@$%^&*_-+=<>.?/".contains(c);
    let simple = !s.is_empty()
        && !s.starts_with(|c: char| c.is_ascii_digit())
        && s.chars().all(simple_char)
        && !RESERVED.contains(&s);
    if simple {
        s.to_string()
    } else {
        format!("|{}|", s.replace(['|', '\\'], "_"))
    }
}

/// Selector name of member `m` in datatype `d`.
pub fn selector(d: &str, m: &str) -> String {
    symbol(&format!("{}.{}", d, m))
}

pub fn sort(t: &IrType) -> String {
    match t {
        IrType::Int => "Int".into(),
        IrType::Bool => "Bool".into(),
        IrType::Array(i, e) => format!("(Array {} {})", sort(i), sort(e)),
        IrType::Datatype(d) => symbol(d),
    }
}

pub fn expr(e: &IrExpr) -> String {
    let mut s = String::new();
    write_expr(&mut s, e);
    s
}

fn write_expr(out: &mut String, e: &IrExpr) {
    match e {
        IrExpr::Ident(n) => out.push_str(&symbol(n)),
        IrExpr::Int(n) if *n < 0 => {
            let _ = write!(out, "(- {})", n.unsigned_abs());
        }
        IrExpr::Int(n) => {
            let _ = write!(out, "{}", n);
        }
        IrExpr::Bool(b) => {
            let _ = write!(out, "{}", b);
        }
        IrExpr::Read(a, i) => app(out, "select", &[a, i]),
        IrExpr::Write(a, i, v) => app(out, "store", &[a, i, v]),
        IrExpr::ConstArray(it, et, v) => {
            let _ = write!(out, "((as const (Array {} {})) ", sort(it), sort(et));
            write_expr(out, v);
            out.push(')');
        }
        IrExpr::Construct(n, args) => {
            let args: Vec<&IrExpr> = args.iter().collect();
            app(out, &symbol(n), &args)
        }
        IrExpr::Select(a, d, m) => app(out, &selector(d, m), &[a]),
        IrExpr::Ite(c, t, f) => app(out, "ite", &[c, t, f]),
        IrExpr::Bin(BinOp::Ne, a, b) => {
            out.push_str("(not ");
            app(out, "=", &[a, b]);
            out.push(')');
        }
        IrExpr::Bin(op, a, b) => {
            let f = match op {
                BinOp::Add => "+",
                BinOp::Sub => "-",
                BinOp::Eq => "=",
                BinOp::Lt => "<",
                BinOp::Le => "<=",
                BinOp::Gt => ">",
                BinOp::Ge => ">=",
                BinOp::And => "and",
                BinOp::Or => "or",
                BinOp::Ne => unreachable!(),
            };
            app(out, f, &[a, b])
        }
        IrExpr::Not(a) => app(out, "not", &[a]),
        IrExpr::Neg(a) => app(out, "-", &[a]),
    }
}

fn app(out: &mut String, f: &str, args: &[&IrExpr]) {
    out.push('(');
    out.push_str(f);
    for a in args {
        out.push(' ');
        write_expr(out, a);
    }
    out.push(')');
}

/// Datatypes in an order where every datatype follows those it mentions.
fn dependency_order(dts: &[&DatatypeDef]) -> Vec<DatatypeDef> {
    fn refs(t: &IrType, out: &mut Vec<String>) {
        match t {
            IrType::Datatype(d) => out.push(d.clone()),
            IrType::Array(i, e) => {
                refs(i, out);
                refs(e, out)
            }
            _ => {}
        }
    }
    fn visit(d: &DatatypeDef, all: &[&DatatypeDef], done: &mut HashSet<String>, out: &mut Vec<DatatypeDef>) {
        if !done.insert(d.name.clone()) {
            return;
        }
        let mut deps = vec![];
        for (_, t) in &d.members {
            refs(t, &mut deps);
        }
        for dep in deps {
            if let Some(dd) = all.iter().find(|x| x.name == dep) {
                visit(dd, all, done, out);
            }
        }
        out.push(d.clone());
    }
    let mut done = HashSet::new();
    let mut out = vec![];
    for d in dts {
        visit(d, dts, &mut done, &mut out);
    }
    out
}

/// Renders a complete script: logic, datatypes, constants, a single assert
/// of the formula, `check-sat` and `get-model`.
pub fn emit_smtlib(f: &Formula) -> String {
    let mut s = String::from("(set-logic ALL)\n(set-option :produce-models true)\n");
    let dts: Vec<&DatatypeDef> = f.datatypes.values().collect();
    for d in dependency_order(&dts) {
        let name = symbol(&d.name);
        let _ = write!(s, "(declare-datatypes (({} 0)) ((({}", name, name);
        for (m, t) in &d.members {
            let _ = write!(s, " ({} {})", selector(&d.name, m), sort(t));
        }
        s.push_str("))))\n");
    }
    for (n, t) in &f.decls {
        let _ = writeln!(s, "(declare-const {} {})", symbol(n), sort(t));
    }
    s.push_str("(assert ");
    if f.conjuncts.len() == 1 {
        write_expr(&mut s, &f.conjuncts[0]);
    } else {
        s.push_str("(and");
        for c in &f.conjuncts {
            s.push_str("\n  ");
            write_expr(&mut s, c);
        }
        s.push(')');
    }
    s.push_str(")\n(check-sat)\n(get-model)\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::ident;
    use indexmap::IndexMap;

    #[test]
    fn symbols() {
        assert_eq!(symbol("x@1"), "x@1");
        assert_eq!(symbol("$tmp1"), "$tmp1");
        assert_eq!(symbol("1x"), "|1x|");
        assert_eq!(symbol("let"), "|let|");
    }

    #[test]
    fn script_shape() {
        let mut datatypes = IndexMap::new();
        datatypes.insert(
            "StorArr_int".to_string(),
            DatatypeDef {
                name: "StorArr_int".into(),
                members: vec![("arr".into(), IrType::array(IrType::Int, IrType::Int)), ("length".into(), IrType::Int)],
            },
        );
        let mut decls = IndexMap::new();
        decls.insert("x".to_string(), IrType::Bool);
        let f = Formula {
            datatypes,
            decls,
            conjuncts: vec![ident("x"), IrExpr::eq(IrExpr::Int(-3), IrExpr::Int(-3))],
            assert_id: 0,
        };
        let s = emit_smtlib(&f);
        assert!(s.starts_with("(set-logic ALL)"));
        assert!(s.contains("(declare-const x Bool)"));
        assert!(s.contains(
            "(declare-datatypes ((StorArr_int 0)) (((StorArr_int (StorArr_int.arr (Array Int Int)) (StorArr_int.length Int)))))"
        ));
        assert!(s.contains("(= (- 3) (- 3))"));
        assert!(s.ends_with("(check-sat)\n(get-model)\n"));
        let k = IrExpr::const_array(IrType::Int, IrType::Int, IrExpr::Int(0));
        assert_eq!(expr(&k), "((as const (Array Int Int)) 0)");
    }
}
