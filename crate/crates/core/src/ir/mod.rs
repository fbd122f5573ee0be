// SPDX-License-Identifier: Apache-2.0

//! The SMT-based intermediate language: datatypes, variable declarations and
//! assignment/ite/assume/assert statements over integers, booleans, arrays
//! and single-constructor datatypes.

use std::fmt;

use indexmap::IndexMap;
use thiserror::Error;

pub mod eval;
pub mod gen;
pub mod normalize;
pub mod smtlib;
pub mod ssa;
pub mod vc;

pub use eval::{eval_expr, eval_program, EvalOutcome, Value};
pub use normalize::normalize_lhs;
pub use smtlib::emit_smtlib;
pub use ssa::to_ssa;
pub use vc::{vc_gen, Formula};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IrError {
    #[error("ill-formed program: {0}")]
    IllFormed(String),
    #[error("assert index {0} out of range")]
    AssertIndex(usize),
    #[error("type error: {0}")]
    Type(String),
    #[error("evaluation error: {0}")]
    Eval(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum IrType {
    Int,
    Bool,
    Array(Box<IrType>, Box<IrType>),
    Datatype(String),
}

impl IrType {
    pub fn array(index: IrType, elem: IrType) -> IrType {
        IrType::Array(Box::new(index), Box::new(elem))
    }

    /// `[int]int`, the type of storage pointers.
    pub fn ptr() -> IrType {
        IrType::array(IrType::Int, IrType::Int)
    }
}

impl fmt::Display for IrType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IrType::Int => write!(f, "int"),
            IrType::Bool => write!(f, "bool"),
            IrType::Array(i, e) => write!(f, "[{}]{}", i, e),
            IrType::Datatype(n) => write!(f, "{}", n),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DatatypeDef {
    pub name: String,
    pub members: Vec<(String, IrType)>,
}

impl DatatypeDef {
    pub fn member_index(&self, m: &str) -> Option<usize> {
        self.members.iter().position(|(n, _)| n == m)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    And,
    Or,
}

impl BinOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Eq => "=",
            BinOp::Ne => "!=",
            BinOp::Lt => "<",
            BinOp::Le => "<=",
            BinOp::Gt => ">",
            BinOp::Ge => ">=",
            BinOp::And => "&&",
            BinOp::Or => "||",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum IrExpr {
    Ident(String),
    Read(Box<IrExpr>, Box<IrExpr>),
    Write(Box<IrExpr>, Box<IrExpr>, Box<IrExpr>),
    /// Array of the given index/element type holding `value` everywhere.
    ConstArray(IrType, IrType, Box<IrExpr>),
    Construct(String, Vec<IrExpr>),
    /// Member select; carries the datatype name so selectors stay unambiguous.
    Select(Box<IrExpr>, String, String),
    Ite(Box<IrExpr>, Box<IrExpr>, Box<IrExpr>),
    Int(i64),
    Bool(bool),
    Bin(BinOp, Box<IrExpr>, Box<IrExpr>),
    Not(Box<IrExpr>),
    Neg(Box<IrExpr>),
}

pub fn ident(n: impl Into<String>) -> IrExpr {
    IrExpr::Ident(n.into())
}

impl IrExpr {
    pub fn read(self, i: IrExpr) -> IrExpr {
        IrExpr::Read(Box::new(self), Box::new(i))
    }

    pub fn write(self, i: IrExpr, v: IrExpr) -> IrExpr {
        IrExpr::Write(Box::new(self), Box::new(i), Box::new(v))
    }

    pub fn select(self, dt: impl Into<String>, m: impl Into<String>) -> IrExpr {
        IrExpr::Select(Box::new(self), dt.into(), m.into())
    }

    pub fn ite(c: IrExpr, t: IrExpr, f: IrExpr) -> IrExpr {
        IrExpr::Ite(Box::new(c), Box::new(t), Box::new(f))
    }

    pub fn bin(op: BinOp, a: IrExpr, b: IrExpr) -> IrExpr {
        IrExpr::Bin(op, Box::new(a), Box::new(b))
    }

    pub fn eq(a: IrExpr, b: IrExpr) -> IrExpr {
        IrExpr::bin(BinOp::Eq, a, b)
    }

    pub fn and(a: IrExpr, b: IrExpr) -> IrExpr {
        match (&a, &b) {
            (IrExpr::Bool(true), _) => b,
            (_, IrExpr::Bool(true)) => a,
            _ => IrExpr::bin(BinOp::And, a, b),
        }
    }

    pub fn implies(a: IrExpr, b: IrExpr) -> IrExpr {
        match a {
            IrExpr::Bool(true) => b,
            a => IrExpr::bin(BinOp::Or, IrExpr::not(a), b),
        }
    }

    pub fn not(a: IrExpr) -> IrExpr {
        IrExpr::Not(Box::new(a))
    }

    pub fn add(a: IrExpr, b: IrExpr) -> IrExpr {
        IrExpr::bin(BinOp::Add, a, b)
    }

    pub fn const_array(index: IrType, elem: IrType, v: IrExpr) -> IrExpr {
        IrExpr::ConstArray(index, elem, Box::new(v))
    }

    /// Calls `f` on every sub-expression, pre-order.
    pub fn visit(&self, f: &mut dyn FnMut(&IrExpr)) {
        f(self);
        match self {
            IrExpr::Ident(_) | IrExpr::Int(_) | IrExpr::Bool(_) => {}
            IrExpr::Read(a, b) | IrExpr::Bin(_, a, b) => {
                a.visit(f);
                b.visit(f);
            }
            IrExpr::Write(a, b, c) | IrExpr::Ite(a, b, c) => {
                a.visit(f);
                b.visit(f);
                c.visit(f);
            }
            IrExpr::ConstArray(_, _, a) | IrExpr::Select(a, ..) | IrExpr::Not(a) | IrExpr::Neg(a) => a.visit(f),
            IrExpr::Construct(_, args) => args.iter().for_each(|a| a.visit(f)),
        }
    }

    /// Rebuilds the expression bottom-up, replacing identifiers via `f`.
    pub fn rename(&self, f: &dyn Fn(&str) -> String) -> IrExpr {
        let r = |e: &IrExpr| Box::new(e.rename(f));
        match self {
            IrExpr::Ident(n) => IrExpr::Ident(f(n)),
            IrExpr::Int(_) | IrExpr::Bool(_) => self.clone(),
            IrExpr::Read(a, b) => IrExpr::Read(r(a), r(b)),
            IrExpr::Write(a, b, c) => IrExpr::Write(r(a), r(b), r(c)),
            IrExpr::ConstArray(i, e, v) => IrExpr::ConstArray(i.clone(), e.clone(), r(v)),
            IrExpr::Construct(n, args) => IrExpr::Construct(n.clone(), args.iter().map(|a| a.rename(f)).collect()),
            IrExpr::Select(a, d, m) => IrExpr::Select(r(a), d.clone(), m.clone()),
            IrExpr::Ite(a, b, c) => IrExpr::Ite(r(a), r(b), r(c)),
            IrExpr::Bin(op, a, b) => IrExpr::Bin(*op, r(a), r(b)),
            IrExpr::Not(a) => IrExpr::Not(r(a)),
            IrExpr::Neg(a) => IrExpr::Neg(r(a)),
        }
    }

    pub fn size(&self) -> usize {
        let mut n = 0;
        self.visit(&mut |_| n += 1);
        n
    }
}

fn needs_parens(e: &IrExpr) -> bool {
    matches!(e, IrExpr::Bin(..))
}

fn operand(f: &mut fmt::Formatter<'_>, e: &IrExpr) -> fmt::Result {
    if needs_parens(e) {
        write!(f, "({})", e)
    } else {
        write!(f, "{}", e)
    }
}

impl fmt::Display for IrExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IrExpr::Ident(n) => write!(f, "{}", n),
            IrExpr::Read(a, i) => {
                operand(f, a)?;
                write!(f, "[{}]", i)
            }
            IrExpr::Write(a, i, v) => {
                operand(f, a)?;
                write!(f, "[{} <- {}]", i, v)
            }
            IrExpr::ConstArray(i, e, v) => write!(f, "const([{}]{}, {})", i, e, v),
            IrExpr::Construct(n, args) => {
                write!(f, "{}(", n)?;
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{}", a)?;
                }
                write!(f, ")")
            }
            IrExpr::Select(a, _, m) => {
                operand(f, a)?;
                write!(f, ".{}", m)
            }
            IrExpr::Ite(c, t, e) => write!(f, "ite({}, {}, {})", c, t, e),
            IrExpr::Int(n) => write!(f, "{}", n),
            IrExpr::Bool(b) => write!(f, "{}", b),
            IrExpr::Bin(op, a, b) => {
                operand(f, a)?;
                write!(f, " {} ", op.symbol())?;
                operand(f, b)
            }
            IrExpr::Not(a) => {
                write!(f, "!")?;
                operand(f, a)
            }
            IrExpr::Neg(a) => {
                write!(f, "-")?;
                match **a {
                    IrExpr::Int(_) | IrExpr::Neg(_) => write!(f, "({})", a),
                    _ => operand(f, a),
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum IrStmt {
    Assign(IrExpr, IrExpr),
    Ite(IrExpr, Vec<IrStmt>, Vec<IrStmt>),
    Assume(IrExpr),
    /// Assertion tagged with the source assert id it checks.
    Assert(IrExpr, usize),
}

impl IrStmt {
    pub fn assign(l: IrExpr, r: IrExpr) -> IrStmt {
        IrStmt::Assign(l, r)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SmtProgram {
    pub datatypes: IndexMap<String, DatatypeDef>,
    pub decls: IndexMap<String, IrType>,
    pub stmts: Vec<IrStmt>,
}

impl SmtProgram {
    /// Adds a datatype unless one with the same name exists.
    pub fn add_datatype(&mut self, d: DatatypeDef) {
        self.datatypes.entry(d.name.clone()).or_insert(d);
    }

    pub fn declare(&mut self, name: impl Into<String>, ty: IrType) {
        self.decls.entry(name.into()).or_insert(ty);
    }

    pub fn datatype(&self, name: &str) -> Result<&DatatypeDef, IrError> {
        self.datatypes.get(name).ok_or_else(|| IrError::Type(format!("unknown datatype `{}`", name)))
    }

    /// Ids of assert statements in program order.
    pub fn assert_ids(&self) -> Vec<usize> {
        fn go(ss: &[IrStmt], out: &mut Vec<usize>) {
            for s in ss {
                match s {
                    IrStmt::Assert(_, id) => out.push(*id),
                    IrStmt::Ite(_, t, e) => {
                        go(t, out);
                        go(e, out)
                    }
                    _ => {}
                }
            }
        }
        let mut out = vec![];
        go(&self.stmts, &mut out);
        out
    }

    /// Infers the type of `e`, checking it along the way.
    pub fn type_of(&self, e: &IrExpr) -> Result<IrType, IrError> {
        let err = |m: String| Err(IrError::Type(m));
        match e {
            IrExpr::Ident(n) => self.decls.get(n).cloned().ok_or_else(|| IrError::Type(format!("undeclared `{}`", n))),
            IrExpr::Int(_) => Ok(IrType::Int),
            IrExpr::Bool(_) => Ok(IrType::Bool),
            IrExpr::Read(a, i) => match self.type_of(a)? {
                IrType::Array(it, et) => {
                    let t = self.type_of(i)?;
                    if t != *it {
                        return err(format!("index `{}` has type {} but {} expected", i, t, it));
                    }
                    Ok(*et)
                }
                t => err(format!("read from non-array `{}` of type {}", a, t)),
            },
            IrExpr::Write(a, i, v) => {
                let at = self.type_of(a)?;
                let IrType::Array(it, et) = &at else {
                    return err(format!("write to non-array `{}`", a));
                };
                if self.type_of(i)? != **it || self.type_of(v)? != **et {
                    return err(format!("ill-typed write `{}`", e));
                }
                Ok(at)
            }
            IrExpr::ConstArray(it, et, v) => {
                if self.type_of(v)? != *et {
                    return err(format!("constant array value `{}` is not {}", v, et));
                }
                Ok(IrType::array(it.clone(), et.clone()))
            }
            IrExpr::Construct(n, args) => {
                let d = self.datatype(n)?;
                if d.members.len() != args.len() {
                    return err(format!("constructor `{}` arity", n));
                }
                for ((m, t), a) in d.members.iter().zip(args) {
                    let at = self.type_of(a)?;
                    if at != *t {
                        return err(format!("member `{}` of `{}` expects {}, got {} (`{}`)", m, n, t, at, a));
                    }
                }
                Ok(IrType::Datatype(n.clone()))
            }
            IrExpr::Select(a, d, m) => {
                let at = self.type_of(a)?;
                if at != IrType::Datatype(d.clone()) {
                    return err(format!("select `.{}` on `{}` of type {}, expected {}", m, a, at, d));
                }
                let def = self.datatype(d)?;
                match def.member_index(m) {
                    Some(k) => Ok(def.members[k].1.clone()),
                    None => err(format!("datatype `{}` has no member `{}`", d, m)),
                }
            }
            IrExpr::Ite(c, t, f) => {
                if self.type_of(c)? != IrType::Bool {
                    return err(format!("ite condition `{}` is not bool", c));
                }
                let tt = self.type_of(t)?;
                let ft = self.type_of(f)?;
                if tt != ft {
                    return err(format!("ite branches {} and {} differ in `{}`", tt, ft, e));
                }
                Ok(tt)
            }
            IrExpr::Bin(op, a, b) => {
                let at = self.type_of(a)?;
                let bt = self.type_of(b)?;
                let ok = match op {
                    BinOp::Add | BinOp::Sub | BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
                        at == IrType::Int && bt == IrType::Int
                    }
                    BinOp::Eq | BinOp::Ne => at == bt,
                    BinOp::And | BinOp::Or => at == IrType::Bool && bt == IrType::Bool,
                };
                if !ok {
                    return err(format!("operands of `{}` ill-typed ({} and {})", e, at, bt));
                }
                Ok(if matches!(op, BinOp::Add | BinOp::Sub) { IrType::Int } else { IrType::Bool })
            }
            IrExpr::Not(a) => match self.type_of(a)? {
                IrType::Bool => Ok(IrType::Bool),
                t => err(format!("`!` applied to {}", t)),
            },
            IrExpr::Neg(a) => match self.type_of(a)? {
                IrType::Int => Ok(IrType::Int),
                t => err(format!("`-` applied to {}", t)),
            },
        }
    }

    /// Type-checks every statement.
    pub fn check(&self) -> Result<(), IrError> {
        fn go(p: &SmtProgram, ss: &[IrStmt]) -> Result<(), IrError> {
            for s in ss {
                match s {
                    IrStmt::Assign(l, r) => {
                        let (lt, rt) = (p.type_of(l)?, p.type_of(r)?);
                        if lt != rt {
                            return Err(IrError::Type(format!("assignment `{} := {}` of {} to {}", l, r, rt, lt)));
                        }
                    }
                    IrStmt::Ite(c, t, e) => {
                        if p.type_of(c)? != IrType::Bool {
                            return Err(IrError::Type(format!("if condition `{}` is not bool", c)));
                        }
                        go(p, t)?;
                        go(p, e)?;
                    }
                    IrStmt::Assume(c) | IrStmt::Assert(c, _) => {
                        if p.type_of(c)? != IrType::Bool {
                            return Err(IrError::Type(format!("condition `{}` is not bool", c)));
                        }
                    }
                }
            }
            Ok(())
        }
        go(self, &self.stmts)
    }
}

fn write_stmts(f: &mut fmt::Formatter<'_>, ss: &[IrStmt], indent: usize) -> fmt::Result {
    let pad = "    ".repeat(indent);
    for s in ss {
        match s {
            IrStmt::Assign(l, r) => writeln!(f, "{}{} := {}", pad, l, r)?,
            IrStmt::Ite(c, t, e) => {
                writeln!(f, "{}if {} {{", pad, c)?;
                write_stmts(f, t, indent + 1)?;
                if !e.is_empty() {
                    writeln!(f, "{}}} else {{", pad)?;
                    write_stmts(f, e, indent + 1)?;
                }
                writeln!(f, "{}}}", pad)?;
            }
            IrStmt::Assume(c) => writeln!(f, "{}assume {}", pad, c)?,
            IrStmt::Assert(c, id) => writeln!(f, "{}assert {}  // #{}", pad, c, id)?,
        }
    }
    Ok(())
}

/// Textual form used by `--emit-ir`: datatypes, then declarations, then
/// statements, one per line.
impl fmt::Display for SmtProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in self.datatypes.values() {
            write!(f, "datatype {}(", d.name)?;
            for (k, (m, t)) in d.members.iter().enumerate() {
                if k > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}: {}", m, t)?;
            }
            writeln!(f, ")")?;
        }
        for (n, t) in &self.decls {
            writeln!(f, "var {}: {}", n, t)?;
        }
        write_stmts(f, &self.stmts, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_forms() {
        let ptr = ident("ptr");
        let e = IrExpr::ite(
            IrExpr::eq(ptr.clone().read(IrExpr::Int(0)), IrExpr::Int(0)),
            ident("t1"),
            ident("s1").select("StorStruct_S", "t"),
        );
        assert_eq!(e.to_string(), "ite(ptr[0] = 0, t1, s1.t)");
        let w = ident("a").write(IrExpr::Int(1), IrExpr::Neg(Box::new(IrExpr::Int(2))));
        assert_eq!(w.to_string(), "a[1 <- -(2)]");
        assert_eq!(IrType::array(IrType::Int, IrType::Bool).to_string(), "[int]bool");
    }

    #[test]
    fn type_checking() {
        let mut p = SmtProgram::default();
        p.add_datatype(DatatypeDef {
            name: "D".into(),
            members: vec![("a".into(), IrType::Int), ("b".into(), IrType::Bool)],
        });
        p.declare("d", IrType::Datatype("D".into()));
        p.declare("x", IrType::Int);
        assert_eq!(p.type_of(&ident("d").select("D", "b")).unwrap(), IrType::Bool);
        assert!(p.type_of(&ident("x").select("D", "a")).is_err());
        let c = IrExpr::Construct("D".into(), vec![IrExpr::Int(1), IrExpr::Int(2)]);
        assert!(p.type_of(&c).is_err());
    }
}
