// SPDX-License-Identifier: Apache-2.0

//! Parse tree of the fragment, before name resolution and typing.
//!
//! The `Display` impls print source that reparses to an equal tree
//! (spans compare equal regardless of position).

use std::fmt;

use super::lexer::Expectation;
use super::types::{DataLoc, SolType};
use super::Span;

#[derive(Clone, Debug, PartialEq)]
pub struct SourceUnit {
    pub contract: ContractDef,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ContractDef {
    pub name: String,
    pub structs: Vec<StructDef>,
    pub state_vars: Vec<StateVarDecl>,
    pub constructor: Option<FunctionDef>,
    pub functions: Vec<FunctionDef>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StructDef {
    pub name: String,
    pub members: Vec<(SolType, String)>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateVarDecl {
    pub ty: SolType,
    pub name: String,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Param {
    pub ty: SolType,
    pub loc: Option<DataLoc>,
    pub name: String,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FunctionDef {
    pub name: String,
    pub is_constructor: bool,
    pub params: Vec<Param>,
    pub returns: Vec<Param>,
    pub body: Vec<Stmt>,
    pub span: Span,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Stmt {
    VarDecl {
        ty: SolType,
        loc: Option<DataLoc>,
        name: String,
        init: Option<Expr>,
        span: Span,
    },
    /// `l = r;` (`tuple == false`) or `(l1, ..., ln) = (r1, ..., rn);`.
    Assign {
        lhs: Vec<Expr>,
        rhs: Vec<Expr>,
        tuple: bool,
        span: Span,
    },
    Push {
        array: Expr,
        value: Expr,
        span: Span,
    },
    Pop {
        array: Expr,
        span: Span,
    },
    Delete {
        target: Expr,
        span: Span,
    },
    Assert {
        cond: Expr,
        expect: Option<Expectation>,
        span: Span,
    },
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
            BinOp::Eq => "==",
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

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum UnOp {
    Not,
    Neg,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Ident(String, Span),
    Member(Box<Expr>, String, Span),
    Index(Box<Expr>, Box<Expr>, Span),
    Cond(Box<Expr>, Box<Expr>, Box<Expr>, Span),
    /// `new T[](len)`; holds the element type.
    NewArray(SolType, Box<Expr>, Span),
    /// `Name(args)`: a struct constructor, or an unsupported call.
    Call(String, Vec<Expr>, Span),
    /// `base.name(args)`: `push`/`pop` in statement position, unsupported elsewhere.
    MemberCall(Box<Expr>, String, Vec<Expr>, Span),
    Tuple(Vec<Expr>, Span),
    IntLit(i64, Span),
    BoolLit(bool, Span),
    Binary(BinOp, Box<Expr>, Box<Expr>, Span),
    Unary(UnOp, Box<Expr>, Span),
}

impl Expr {
    pub fn span(&self) -> Span {
        match self {
            Expr::Ident(_, s)
            | Expr::Member(_, _, s)
            | Expr::Index(_, _, s)
            | Expr::Cond(_, _, _, s)
            | Expr::NewArray(_, _, s)
            | Expr::Call(_, _, s)
            | Expr::MemberCall(_, _, _, s)
            | Expr::Tuple(_, s)
            | Expr::IntLit(_, s)
            | Expr::BoolLit(_, s)
            | Expr::Binary(_, _, _, s)
            | Expr::Unary(_, _, s) => *s,
        }
    }
}

fn comma_list<T: fmt::Display>(f: &mut fmt::Formatter<'_>, items: &[T]) -> fmt::Result {
    for (i, it) in items.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{}", it)?;
    }
    Ok(())
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Ident(n, _) => write!(f, "{}", n),
            Expr::Member(b, m, _) => write!(f, "{}.{}", b, m),
            Expr::Index(b, i, _) => write!(f, "{}[{}]", b, i),
            Expr::Cond(c, t, e, _) => write!(f, "({} ? {} : {})", c, t, e),
            Expr::NewArray(t, n, _) => write!(f, "new {}[]({})", t, n),
            Expr::Call(n, args, _) => {
                write!(f, "{}(", n)?;
                comma_list(f, args)?;
                write!(f, ")")
            }
            Expr::MemberCall(b, n, args, _) => {
                write!(f, "{}.{}(", b, n)?;
                comma_list(f, args)?;
                write!(f, ")")
            }
            Expr::Tuple(items, _) => {
                write!(f, "(")?;
                comma_list(f, items)?;
                write!(f, ")")
            }
            Expr::IntLit(n, _) => write!(f, "{}", n),
            Expr::BoolLit(b, _) => write!(f, "{}", b),
            Expr::Binary(op, a, b, _) => write!(f, "({} {} {})", a, op.symbol(), b),
            Expr::Unary(UnOp::Not, a, _) => write!(f, "!{}", a),
            Expr::Unary(UnOp::Neg, a, _) => write!(f, "-({})", a),
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.ty)?;
        if let Some(l) = self.loc {
            write!(f, " {}", l)?;
        }
        write!(f, " {}", self.name)
    }
}

fn write_stmt(f: &mut fmt::Formatter<'_>, s: &Stmt, indent: &str) -> fmt::Result {
    match s {
        Stmt::VarDecl { ty, loc, name, init, .. } => {
            write!(f, "{}{}", indent, ty)?;
            if let Some(l) = loc {
                write!(f, " {}", l)?;
            }
            write!(f, " {}", name)?;
            if let Some(e) = init {
                write!(f, " = {}", e)?;
            }
            writeln!(f, ";")
        }
        Stmt::Assign { lhs, rhs, tuple, .. } => {
            if *tuple {
                write!(f, "{}(", indent)?;
                comma_list(f, lhs)?;
                write!(f, ") = (")?;
                comma_list(f, rhs)?;
                writeln!(f, ");")
            } else {
                writeln!(f, "{}{} = {};", indent, lhs[0], rhs[0])
            }
        }
        Stmt::Push { array, value, .. } => writeln!(f, "{}{}.push({});", indent, array, value),
        Stmt::Pop { array, .. } => writeln!(f, "{}{}.pop();", indent, array),
        Stmt::Delete { target, .. } => writeln!(f, "{}delete {};", indent, target),
        Stmt::Assert { cond, expect, .. } => {
            if let Some(e) = expect {
                writeln!(f, "{}//expect: {}", indent, e)?;
            }
            writeln!(f, "{}assert({});", indent, cond)
        }
    }
}

fn write_function(f: &mut fmt::Formatter<'_>, func: &FunctionDef) -> fmt::Result {
    if func.is_constructor {
        write!(f, "    constructor(")?;
    } else {
        write!(f, "    function {}(", func.name)?;
    }
    comma_list(f, &func.params)?;
    write!(f, ")")?;
    if !func.returns.is_empty() {
        write!(f, " returns (")?;
        comma_list(f, &func.returns)?;
        write!(f, ")")?;
    }
    writeln!(f, " {{")?;
    for s in &func.body {
        write_stmt(f, s, "        ")?;
    }
    writeln!(f, "    }}")
}

impl fmt::Display for ContractDef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "contract {} {{", self.name)?;
        for s in &self.structs {
            writeln!(f, "    struct {} {{", s.name)?;
            for (t, n) in &s.members {
                writeln!(f, "        {} {};", t, n)?;
            }
            writeln!(f, "    }}")?;
        }
        for v in &self.state_vars {
            writeln!(f, "    {} {};", v.ty, v.name)?;
        }
        if let Some(c) = &self.constructor {
            write_function(f, c)?;
        }
        for func in &self.functions {
            write_function(f, func)?;
        }
        writeln!(f, "}}")
    }
}

impl fmt::Display for SourceUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.contract)
    }
}
