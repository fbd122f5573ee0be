// SPDX-License-Identifier: Apache-2.0

//! Resolved, alpha-renamed and typed contract.

use indexmap::IndexMap;

use super::lexer::Expectation;
use super::syntax::{BinOp, UnOp};
use super::types::{LocCategory, SolType};
use super::Span;

pub type VarId = usize;
pub type ExprId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VarKind {
    State,
    Param,
    Return,
    Local,
}

#[derive(Clone, Debug)]
pub struct VarInfo {
    /// Globally unique name after alpha-renaming.
    pub name: String,
    /// Name as written in the source.
    pub source_name: String,
    pub ty: SolType,
    pub cat: LocCategory,
    pub kind: VarKind,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub struct StructInfo {
    pub name: String,
    pub members: Vec<(String, SolType)>,
}

impl StructInfo {
    pub fn member(&self, name: &str) -> Option<(usize, &SolType)> {
        self.members.iter().position(|(m, _)| m == name).map(|i| (i, &self.members[i].1))
    }
}

#[derive(Clone, Debug)]
pub struct TExpr {
    pub id: ExprId,
    pub kind: TExprKind,
    pub ty: SolType,
    pub cat: LocCategory,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub enum TExprKind {
    Var(VarId),
    /// Struct member: base, member name and its position in the struct.
    Member(Box<TExpr>, String, usize),
    /// `base.length` on an array.
    Length(Box<TExpr>),
    Index(Box<TExpr>, Box<TExpr>),
    Cond(Box<TExpr>, Box<TExpr>, Box<TExpr>),
    /// `new T[](len)`; the element type is the base of `ty`.
    NewArray(Box<TExpr>),
    StructLit(String, Vec<TExpr>),
    IntLit(i64),
    BoolLit(bool),
    Binary(BinOp, Box<TExpr>, Box<TExpr>),
    Unary(UnOp, Box<TExpr>),
}

impl TExpr {
    /// True when the expression evaluates to a storage pointer value (a
    /// pointer variable or a conditional over pointers), as opposed to a
    /// storage entity reached through one.
    pub fn is_pointer(&self) -> bool {
        self.cat == LocCategory::StorPtr && matches!(self.kind, TExprKind::Var(_) | TExprKind::Cond(..))
    }

    /// True when the expression denotes a storage entity (directly or
    /// through a pointer dereference).
    pub fn is_storage_entity(&self) -> bool {
        match self.cat {
            LocCategory::Storage => true,
            LocCategory::StorPtr => !self.is_pointer(),
            _ => false,
        }
    }

    /// Pre-order walk over the expression tree.
    pub fn walk<'a>(&'a self, f: &mut dyn FnMut(&'a TExpr)) {
        f(self);
        match &self.kind {
            TExprKind::Var(_) | TExprKind::IntLit(_) | TExprKind::BoolLit(_) => {}
            TExprKind::Member(b, ..) | TExprKind::Length(b) | TExprKind::NewArray(b) | TExprKind::Unary(_, b) => {
                b.walk(f)
            }
            TExprKind::Index(a, b) | TExprKind::Binary(_, a, b) => {
                a.walk(f);
                b.walk(f);
            }
            TExprKind::Cond(c, t, e) => {
                c.walk(f);
                t.walk(f);
                e.walk(f);
            }
            TExprKind::StructLit(_, args) => args.iter().for_each(|a| a.walk(f)),
        }
    }
}

#[derive(Clone, Debug)]
pub enum TStmt {
    /// Local declaration; `init == None` means default initialization.
    Decl {
        var: VarId,
        init: Option<TExpr>,
        span: Span,
    },
    Assign {
        lhs: Vec<TExpr>,
        rhs: Vec<TExpr>,
        tuple: bool,
        span: Span,
    },
    Push {
        array: TExpr,
        value: TExpr,
        span: Span,
    },
    Pop {
        array: TExpr,
        span: Span,
    },
    Delete {
        target: TExpr,
        span: Span,
    },
    Assert {
        id: AssertId,
        cond: TExpr,
        expect: Expectation,
        span: Span,
    },
}

pub type AssertId = usize;

#[derive(Clone, Debug)]
pub struct AssertInfo {
    pub id: AssertId,
    pub function: String,
    pub span: Span,
    pub expect: Expectation,
    /// Condition as written (pretty-printed with source names).
    pub text: String,
}

#[derive(Clone, Debug)]
pub struct Function {
    pub name: String,
    pub is_constructor: bool,
    pub params: Vec<VarId>,
    pub returns: Vec<VarId>,
    pub body: Vec<TStmt>,
    pub span: Span,
}

#[derive(Clone, Debug)]
pub struct TypedContract {
    pub name: String,
    pub structs: IndexMap<String, StructInfo>,
    pub state_vars: Vec<VarId>,
    pub constructor: Option<Function>,
    pub functions: Vec<Function>,
    pub vars: Vec<VarInfo>,
    pub asserts: Vec<AssertInfo>,
    pub expr_count: usize,
    pub warnings: Vec<String>,
}

impl TypedContract {
    pub fn var(&self, id: VarId) -> &VarInfo {
        &self.vars[id]
    }

    pub fn struct_info(&self, name: &str) -> &StructInfo {
        &self.structs[name]
    }

    pub fn function(&self, name: &str) -> Option<&Function> {
        if name == "constructor" {
            return self.constructor.as_ref();
        }
        self.functions.iter().find(|f| f.name == name)
    }

    /// Constructor first (if any), then the other functions in source order.
    pub fn all_functions(&self) -> impl Iterator<Item = &Function> {
        self.constructor.iter().chain(self.functions.iter())
    }

    /// True if `t` contains a mapping anywhere inside it.
    pub fn contains_mapping(&self, t: &SolType) -> bool {
        match t {
            SolType::Mapping(..) => true,
            SolType::DynArray(b) | SolType::FixArray(b, _) => self.contains_mapping(b),
            SolType::Struct(s) => self.structs[s.as_str()].members.iter().any(|(_, m)| self.contains_mapping(m)),
            _ => false,
        }
    }

    pub fn asserts_of<'a>(&'a self, function: &'a str) -> impl Iterator<Item = &'a AssertInfo> + 'a {
        self.asserts.iter().filter(move |a| a.function == function)
    }
}
