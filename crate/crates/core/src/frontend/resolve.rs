// SPDX-License-Identifier: Apache-2.0

//! Name resolution, alpha-renaming and type/location checking.

use std::collections::{HashMap, HashSet};

use indexmap::IndexMap;

use super::lexer::Expectation;
use super::syntax::{self, BinOp, Expr, SourceUnit, Stmt, UnOp};
use super::typed::*;
use super::types::{DataLoc, LocCategory, SolType};
use super::{FrontendError, Span};

/// Prefixes of identifiers generated by the translation.
pub const RESERVED_PREFIXES: &[&str] = &[
    "arrHeap_",
    "structHeap_",
    "StorArr_",
    "MemArr_",
    "StorStruct_",
    "MemStruct_",
    "defctx_",
];

const SMT_WORDS: &[&str] = &[
    "refcnt", "ite", "and", "or", "not", "xor", "select", "store", "distinct", "true", "false", "let", "forall",
    "exists", "div", "mod", "abs", "Int", "Bool", "Array", "as", "const", "par", "match", "assert", "_",
];

pub fn is_reserved_name(name: &str) -> bool {
    name.contains('$') || SMT_WORDS.contains(&name) || RESERVED_PREFIXES.iter().any(|p| name.starts_with(p))
}

struct Renamer {
    taken: HashSet<String>,
    source_names: HashSet<String>,
}

impl Renamer {
    fn fresh(&mut self, source: &str) -> String {
        let mut base = source.replace('$', "_");
        if RESERVED_PREFIXES.iter().any(|p| base.starts_with(p)) {
            base = format!("u{}", base);
        }
        let mut name = source.to_string();
        let mut k = 0;
        while is_reserved_name(&name) || self.taken.contains(&name) || (k > 0 && self.source_names.contains(&name)) {
            k += 1;
            name = format!("{}_{}", base, k);
        }
        self.taken.insert(name.clone());
        name
    }
}

struct Resolver {
    structs: IndexMap<String, StructInfo>,
    vars: Vec<VarInfo>,
    renamer: Renamer,
    next_expr: ExprId,
    asserts: Vec<AssertInfo>,
    current_fn: String,
    /// Source name to variable, innermost binding last.
    scope: HashMap<String, VarId>,
    state_scope: HashMap<String, VarId>,
}

pub fn resolve(unit: &SourceUnit, warnings: Vec<String>) -> Result<TypedContract, FrontendError> {
    let c = &unit.contract;
    let mut source_names = HashSet::new();
    for v in &c.state_vars {
        source_names.insert(v.name.clone());
    }
    for f in c.constructor.iter().chain(&c.functions) {
        for p in f.params.iter().chain(&f.returns) {
            source_names.insert(p.name.clone());
        }
        for s in &f.body {
            if let Stmt::VarDecl { name, .. } = s {
                source_names.insert(name.clone());
            }
        }
    }
    let mut r = Resolver {
        structs: IndexMap::new(),
        vars: vec![],
        renamer: Renamer { taken: HashSet::new(), source_names },
        next_expr: 0,
        asserts: vec![],
        current_fn: String::new(),
        scope: HashMap::new(),
        state_scope: HashMap::new(),
    };
    r.collect_structs(&c.structs)?;

    let mut state_vars = vec![];
    for v in &c.state_vars {
        r.check_type(&v.ty, v.span)?;
        if r.state_scope.contains_key(&v.name) {
            return Err(FrontendError::Resolve { span: v.span, msg: format!("identifier `{}` already declared", v.name) });
        }
        let cat = if v.ty.is_value() { LocCategory::Value } else { LocCategory::Storage };
        let id = r.new_var(&v.name, v.ty.clone(), cat, VarKind::State, v.span);
        r.state_scope.insert(v.name.clone(), id);
        state_vars.push(id);
    }

    let mut seen = HashSet::new();
    for f in &c.functions {
        if !seen.insert(f.name.clone()) {
            return Err(FrontendError::unsupported(f.span, "function overloading"));
        }
        if r.state_scope.contains_key(&f.name) {
            return Err(FrontendError::Resolve { span: f.span, msg: format!("identifier `{}` already declared", f.name) });
        }
    }
    let constructor = match &c.constructor {
        Some(f) => Some(r.function(f)?),
        None => None,
    };
    let mut functions = vec![];
    for f in &c.functions {
        functions.push(r.function(f)?);
    }
    Ok(TypedContract {
        name: c.name.clone(),
        structs: r.structs,
        state_vars,
        constructor,
        functions,
        vars: r.vars,
        asserts: r.asserts,
        expr_count: r.next_expr,
        warnings,
    })
}

fn resolve_err(span: Span, msg: impl Into<String>) -> FrontendError {
    FrontendError::Resolve { span, msg: msg.into() }
}

fn type_err(span: Span, msg: impl Into<String>) -> FrontendError {
    FrontendError::Type { span, msg: msg.into() }
}

impl Resolver {
    fn collect_structs(&mut self, defs: &[syntax::StructDef]) -> Result<(), FrontendError> {
        for s in defs {
            if self.structs.contains_key(&s.name) {
                return Err(resolve_err(s.span, format!("struct `{}` already declared", s.name)));
            }
            let mut names = HashSet::new();
            for (_, m) in &s.members {
                if !names.insert(m) {
                    return Err(resolve_err(s.span, format!("duplicate member `{}` in struct `{}`", m, s.name)));
                }
            }
            if s.members.is_empty() {
                return Err(type_err(s.span, format!("struct `{}` has no members", s.name)));
            }
            let members = s.members.iter().map(|(t, n)| (n.clone(), t.clone())).collect();
            self.structs.insert(s.name.clone(), StructInfo { name: s.name.clone(), members });
        }
        for s in defs {
            for (t, _) in &s.members {
                self.check_type(t, s.span)?;
            }
        }
        // reject recursion through any path of member types
        for s in defs {
            let mut stack = vec![s.name.clone()];
            self.check_recursion(&s.name, &mut stack, s.span)?;
        }
        Ok(())
    }

    fn check_recursion(&self, name: &str, stack: &mut Vec<String>, span: Span) -> Result<(), FrontendError> {
        let mut refs = vec![];
        for (_, t) in &self.structs[name].members {
            collect_struct_refs(t, &mut refs);
        }
        for r in refs {
            if stack.contains(&r) {
                return Err(FrontendError::unsupported(span, format!("recursive struct `{}`", r)));
            }
            stack.push(r.clone());
            self.check_recursion(&r, stack, span)?;
            stack.pop();
        }
        Ok(())
    }

    fn check_type(&self, t: &SolType, span: Span) -> Result<(), FrontendError> {
        match t {
            SolType::Struct(n) if !self.structs.contains_key(n) => {
                Err(resolve_err(span, format!("undeclared type `{}`", n)))
            }
            SolType::Mapping(k, v) => {
                self.check_type(k, span)?;
                self.check_type(v, span)
            }
            SolType::DynArray(b) | SolType::FixArray(b, _) => self.check_type(b, span),
            _ => Ok(()),
        }
    }

    fn contains_mapping(&self, t: &SolType) -> bool {
        match t {
            SolType::Mapping(..) => true,
            SolType::DynArray(b) | SolType::FixArray(b, _) => self.contains_mapping(b),
            SolType::Struct(s) => self.structs[s.as_str()].members.iter().any(|(_, m)| self.contains_mapping(m)),
            _ => false,
        }
    }

    fn new_var(&mut self, source: &str, ty: SolType, cat: LocCategory, kind: VarKind, span: Span) -> VarId {
        let name = self.renamer.fresh(source);
        self.vars.push(VarInfo { name, source_name: source.to_string(), ty, cat, kind, span });
        self.vars.len() - 1
    }

    /// Category of a declared local/parameter/return from its data location.
    fn decl_category(&self, ty: &SolType, loc: Option<DataLoc>, span: Span) -> Result<LocCategory, FrontendError> {
        self.check_type(ty, span)?;
        if ty.is_value() {
            if loc.is_some() {
                return Err(type_err(span, "data location can only be given for array, struct or mapping types"));
            }
            return Ok(LocCategory::Value);
        }
        match loc {
            None => Err(type_err(span, "data location required")),
            Some(DataLoc::Storage) => Ok(LocCategory::StorPtr),
            Some(DataLoc::Memory) => {
                if self.contains_mapping(ty) {
                    Err(type_err(span, "mapping in memory location"))
                } else {
                    Ok(LocCategory::Memory)
                }
            }
        }
    }

    fn declare_local(&mut self, name: &str, ty: &SolType, loc: Option<DataLoc>, kind: VarKind, span: Span) -> Result<VarId, FrontendError> {
        let cat = self.decl_category(ty, loc, span)?;
        if let Some(prev) = self.scope.get(name) {
            if self.vars[*prev].kind != VarKind::State {
                return Err(resolve_err(span, format!("identifier `{}` already declared", name)));
            }
        }
        let id = self.new_var(name, ty.clone(), cat, kind, span);
        self.scope.insert(name.to_string(), id);
        Ok(id)
    }

    fn function(&mut self, f: &syntax::FunctionDef) -> Result<Function, FrontendError> {
        self.scope = self.state_scope.clone();
        self.current_fn = f.name.clone();
        if f.is_constructor && !f.returns.is_empty() {
            return Err(type_err(f.span, "constructor cannot return values"));
        }
        let mut params = vec![];
        for p in &f.params {
            params.push(self.declare_local(&p.name, &p.ty, p.loc, VarKind::Param, p.span)?);
        }
        let mut returns = vec![];
        for p in &f.returns {
            returns.push(self.declare_local(&p.name, &p.ty, p.loc, VarKind::Return, p.span)?);
        }
        let mut body = vec![];
        for s in &f.body {
            body.push(self.stmt(s)?);
        }
        Ok(Function {
            name: f.name.clone(),
            is_constructor: f.is_constructor,
            params,
            returns,
            body,
            span: f.span,
        })
    }

    fn stmt(&mut self, s: &Stmt) -> Result<TStmt, FrontendError> {
        match s {
            Stmt::VarDecl { ty, loc, name, init, span } => {
                // the initializer is resolved before the new name is in scope
                let init = match init {
                    Some(e) => Some(self.expr(e)?),
                    None => None,
                };
                let var = self.declare_local(name, ty, *loc, VarKind::Local, *span)?;
                let info = self.vars[var].clone();
                match &init {
                    Some(e) => self.check_assign(&info.ty, info.cat, info.cat == LocCategory::StorPtr, e, *span)?,
                    None if info.cat == LocCategory::StorPtr => {
                        return Err(type_err(*span, "uninitialized storage pointer"));
                    }
                    None => {}
                }
                Ok(TStmt::Decl { var, init, span: *span })
            }
            Stmt::Assign { lhs, rhs, tuple, span } => {
                if lhs.len() != rhs.len() {
                    return Err(type_err(*span, "tuple assignment arity mismatch"));
                }
                let mut tr = vec![];
                for e in rhs {
                    tr.push(self.expr(e)?);
                }
                let mut tl = vec![];
                for e in lhs {
                    tl.push(self.lvalue(e)?);
                }
                for (l, r) in tl.iter().zip(&tr) {
                    self.check_assign(&l.ty, l.cat, l.is_pointer(), r, *span)?;
                }
                Ok(TStmt::Assign { lhs: tl, rhs: tr, tuple: *tuple, span: *span })
            }
            Stmt::Push { array, value, span } => {
                let a = self.push_pop_target(array, *span)?;
                let v = self.expr(value)?;
                let base = a.ty.array_base().unwrap().clone();
                let cat = if base.is_value() { LocCategory::Value } else { LocCategory::Storage };
                self.check_assign(&base, cat, false, &v, *span)?;
                Ok(TStmt::Push { array: a, value: v, span: *span })
            }
            Stmt::Pop { array, span } => {
                let a = self.push_pop_target(array, *span)?;
                Ok(TStmt::Pop { array: a, span: *span })
            }
            Stmt::Delete { target, span } => {
                let t = self.lvalue(target)?;
                if t.ty.is_mapping() {
                    return Err(type_err(*span, "delete cannot be applied to a mapping"));
                }
                if t.is_pointer() {
                    return Err(type_err(*span, "delete cannot be applied to a storage pointer"));
                }
                Ok(TStmt::Delete { target: t, span: *span })
            }
            Stmt::Assert { cond, expect, span } => {
                let c = self.expr(cond)?;
                if c.ty != SolType::Bool {
                    return Err(type_err(*span, format!("assert condition must be bool, found `{}`", c.ty)));
                }
                let id = self.asserts.len();
                let expect = expect.unwrap_or(Expectation::Holds);
                self.asserts.push(AssertInfo {
                    id,
                    function: self.current_fn.clone(),
                    span: *span,
                    expect,
                    text: cond.to_string(),
                });
                Ok(TStmt::Assert { id, cond: c, expect, span: *span })
            }
        }
    }

    fn push_pop_target(&mut self, array: &Expr, span: Span) -> Result<TExpr, FrontendError> {
        let a = self.expr(array)?;
        match (&a.ty, a.cat) {
            (SolType::DynArray(_), LocCategory::Storage | LocCategory::StorPtr) => Ok(a),
            _ => Err(type_err(span, format!("push/pop only on dynamic storage arrays, found `{}` {}", a.ty, a.cat))),
        }
    }

    fn lvalue(&mut self, e: &Expr) -> Result<TExpr, FrontendError> {
        match e {
            Expr::Ident(..) | Expr::Member(..) | Expr::Index(..) => {
                let t = self.expr(e)?;
                if matches!(t.kind, TExprKind::Length(_)) {
                    return Err(type_err(e.span(), "array length is read-only"));
                }
                Ok(t)
            }
            _ => Err(type_err(e.span(), "expression is not assignable")),
        }
    }

    /// Checks that `rhs` may be assigned to a location of type `ty` and
    /// category `cat`; `is_pointer` tells whether the target is a pointer
    /// variable (as opposed to a storage entity reached through one).
    fn check_assign(&self, ty: &SolType, cat: LocCategory, is_pointer: bool, rhs: &TExpr, span: Span) -> Result<(), FrontendError> {
        let mismatch = || type_err(span, format!("type `{}` {} is not assignable to `{}` {}", rhs.ty, rhs.cat, ty, cat));
        if ty.is_value() {
            return if rhs.ty.compatible_value(ty) { Ok(()) } else { Err(mismatch()) };
        }
        if rhs.ty != *ty {
            return Err(mismatch());
        }
        if is_pointer {
            return match rhs.cat {
                LocCategory::Storage | LocCategory::StorPtr => Ok(()),
                _ => Err(type_err(span, "memory cannot be assigned to a storage pointer")),
            };
        }
        match cat {
            LocCategory::Storage | LocCategory::StorPtr => {
                if ty.is_mapping() {
                    return Err(type_err(span, "mappings cannot be assigned to"));
                }
                Ok(())
            }
            LocCategory::Memory => Ok(()),
            LocCategory::Value => Err(mismatch()),
        }
    }

    fn mk(&mut self, kind: TExprKind, ty: SolType, cat: LocCategory, span: Span) -> TExpr {
        let id = self.next_expr;
        self.next_expr += 1;
        TExpr { id, kind, ty, cat, span }
    }

    fn expr(&mut self, e: &Expr) -> Result<TExpr, FrontendError> {
        let span = e.span();
        match e {
            Expr::Ident(n, _) => {
                let Some(&v) = self.scope.get(n) else {
                    if self.structs.contains_key(n) {
                        return Err(type_err(span, format!("struct type `{}` used as a value", n)));
                    }
                    return Err(resolve_err(span, format!("undeclared identifier `{}`", n)));
                };
                let info = &self.vars[v];
                let (ty, cat) = (info.ty.clone(), info.cat);
                Ok(self.mk(TExprKind::Var(v), ty, cat, span))
            }
            Expr::Member(b, m, _) => {
                let b = self.expr(b)?;
                match &b.ty {
                    SolType::Struct(s) => {
                        let info = &self.structs[s.as_str()];
                        let Some((idx, mty)) = info.member(m) else {
                            return Err(resolve_err(span, format!("struct `{}` has no member `{}`", s, m)));
                        };
                        let mty = mty.clone();
                        let cat = if mty.is_value() { LocCategory::Value } else { b.cat };
                        Ok(self.mk(TExprKind::Member(Box::new(b), m.clone(), idx), mty, cat, span))
                    }
                    t if t.is_array() && m == "length" => {
                        Ok(self.mk(TExprKind::Length(Box::new(b)), SolType::Uint, LocCategory::Value, span))
                    }
                    t => Err(resolve_err(span, format!("type `{}` has no member `{}`", t, m))),
                }
            }
            Expr::Index(b, i, _) => {
                let b = self.expr(b)?;
                let i = self.expr(i)?;
                let (res, key_ok) = match &b.ty {
                    SolType::DynArray(base) => ((**base).clone(), i.ty.is_integer()),
                    SolType::FixArray(base, n) => {
                        if let TExprKind::IntLit(k) = i.kind {
                            if k < 0 || k as u64 >= *n {
                                return Err(type_err(span, format!("index {} out of bounds for `{}`", k, b.ty)));
                            }
                        }
                        ((**base).clone(), i.ty.is_integer())
                    }
                    SolType::Mapping(k, v) => ((**v).clone(), i.ty.compatible_value(k)),
                    t => return Err(type_err(span, format!("type `{}` cannot be indexed", t))),
                };
                if !key_ok {
                    return Err(type_err(span, format!("invalid index type `{}` for `{}`", i.ty, b.ty)));
                }
                let cat = if res.is_value() { LocCategory::Value } else { b.cat };
                Ok(self.mk(TExprKind::Index(Box::new(b), Box::new(i)), res, cat, span))
            }
            Expr::Cond(c, t, f, _) => {
                let c = self.expr(c)?;
                if c.ty != SolType::Bool {
                    return Err(type_err(span, "condition must be bool"));
                }
                let t = self.expr(t)?;
                let f = self.expr(f)?;
                let (ty, cat) = if t.ty.is_value() && f.ty.is_value() {
                    if !t.ty.compatible_value(&f.ty) {
                        return Err(type_err(span, format!("branch types `{}` and `{}` differ", t.ty, f.ty)));
                    }
                    let ty = if t.ty == f.ty { t.ty.clone() } else { SolType::Int };
                    (ty, LocCategory::Value)
                } else {
                    if t.ty != f.ty {
                        return Err(type_err(span, format!("branch types `{}` and `{}` differ", t.ty, f.ty)));
                    }
                    let cat = if t.cat == LocCategory::Memory || f.cat == LocCategory::Memory {
                        LocCategory::Memory
                    } else {
                        LocCategory::StorPtr
                    };
                    if cat == LocCategory::Memory && self.contains_mapping(&t.ty) {
                        return Err(type_err(span, "mapping in memory location"));
                    }
                    (t.ty.clone(), cat)
                };
                Ok(self.mk(TExprKind::Cond(Box::new(c), Box::new(t), Box::new(f)), ty, cat, span))
            }
            Expr::NewArray(elem, len, _) => {
                self.check_type(elem, span)?;
                if self.contains_mapping(elem) {
                    return Err(type_err(span, "mapping in memory location"));
                }
                let len = self.expr(len)?;
                if !len.ty.is_integer() {
                    return Err(type_err(span, "array length must be an integer"));
                }
                Ok(self.mk(TExprKind::NewArray(Box::new(len)), SolType::dyn_array(elem.clone()), LocCategory::Memory, span))
            }
            Expr::Call(name, args, _) => {
                let Some(info) = self.structs.get(name).cloned() else {
                    return Err(FrontendError::unsupported(span, "function calls"));
                };
                let sty = SolType::Struct(name.clone());
                if self.contains_mapping(&sty) {
                    return Err(type_err(span, "mapping in memory location"));
                }
                if args.len() != info.members.len() {
                    return Err(type_err(span, format!("struct `{}` takes {} arguments", name, info.members.len())));
                }
                let mut targs = vec![];
                for (a, (_, mty)) in args.iter().zip(&info.members) {
                    let ta = self.expr(a)?;
                    let cat = if mty.is_value() { LocCategory::Value } else { LocCategory::Memory };
                    self.check_assign(mty, cat, false, &ta, a.span())?;
                    targs.push(ta);
                }
                Ok(self.mk(TExprKind::StructLit(name.clone(), targs), sty, LocCategory::Memory, span))
            }
            Expr::MemberCall(..) => Err(FrontendError::unsupported(span, "function calls")),
            Expr::Tuple(..) => Err(type_err(span, "tuple expressions are only allowed in assignments")),
            Expr::IntLit(n, _) => Ok(self.mk(TExprKind::IntLit(*n), SolType::Int, LocCategory::Value, span)),
            Expr::BoolLit(b, _) => Ok(self.mk(TExprKind::BoolLit(*b), SolType::Bool, LocCategory::Value, span)),
            Expr::Binary(op, a, b, _) => {
                let a = self.expr(a)?;
                let b = self.expr(b)?;
                let ty = match op {
                    BinOp::Add | BinOp::Sub => {
                        if !(a.ty.is_integer() && b.ty.is_integer()) {
                            return Err(type_err(span, format!("operator `{}` needs integer operands", op.symbol())));
                        }
                        if a.ty == b.ty { a.ty.clone() } else { SolType::Int }
                    }
                    BinOp::Eq | BinOp::Ne => {
                        if !(a.ty.is_value() && a.ty.compatible_value(&b.ty)) {
                            return Err(type_err(span, format!("cannot compare `{}` with `{}`", a.ty, b.ty)));
                        }
                        SolType::Bool
                    }
                    BinOp::Lt | BinOp::Le | BinOp::Gt | BinOp::Ge => {
                        if !(a.ty.is_integer() && b.ty.is_integer()) {
                            return Err(type_err(span, format!("operator `{}` needs integer operands", op.symbol())));
                        }
                        SolType::Bool
                    }
                    BinOp::And | BinOp::Or => {
                        if a.ty != SolType::Bool || b.ty != SolType::Bool {
                            return Err(type_err(span, format!("operator `{}` needs bool operands", op.symbol())));
                        }
                        SolType::Bool
                    }
                };
                Ok(self.mk(TExprKind::Binary(*op, Box::new(a), Box::new(b)), ty, LocCategory::Value, span))
            }
            Expr::Unary(op, a, _) => {
                let a = self.expr(a)?;
                let ty = match op {
                    UnOp::Not if a.ty == SolType::Bool => SolType::Bool,
                    UnOp::Neg if a.ty.is_integer() => SolType::Int,
                    _ => return Err(type_err(span, format!("invalid operand type `{}`", a.ty))),
                };
                Ok(self.mk(TExprKind::Unary(*op, Box::new(a)), ty, LocCategory::Value, span))
            }
        }
    }
}

fn collect_struct_refs(t: &SolType, out: &mut Vec<String>) {
    match t {
        SolType::Struct(n) => out.push(n.clone()),
        SolType::Mapping(_, v) => collect_struct_refs(v, out),
        SolType::DynArray(b) | SolType::FixArray(b, _) => collect_struct_refs(b, out),
        _ => {}
    }
}
