// SPDX-License-Identifier: Apache-2.0

//! Translation of typed contracts into SMT programs.
//!
//! Storage data is encoded as datatype values (so value semantics come for
//! free), memory data as heaps indexed by integer pointers allocated from
//! `refcnt`, and local storage pointers as packed paths into the storage
//! tree of their pointee type.

use std::collections::HashMap;
use std::rc::Rc;

use thiserror::Error;

use crate::frontend::typed::{Function, TypedContract};
use crate::frontend::{LocCategory, SolType, Span};
use crate::ir::{ident, DatatypeDef, IrExpr, IrStmt, IrType, SmtProgram};

mod assign;
mod expr;
pub mod names;
mod stmt;
pub mod tree;

use names::*;
pub use tree::{defctx_name, PathStep, StorageLayout, StorageTree};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TranslateError {
    #[error("{span}: unsupported: {msg}")]
    Unsupported { span: Span, msg: String },
    #[error("internal translation error: {0}")]
    Internal(String),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TranslateOptions {
    /// Bound for element-wise loops over dynamic arrays; `None` rejects them.
    pub unroll: Option<u32>,
}

/// Root and steps of a storage entity, kept so it can be packed.
#[derive(Clone, Debug, PartialEq)]
pub struct SPath {
    pub root: PathRoot,
    pub steps: Vec<PathStep>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum PathRoot {
    /// A storage root (state variable or default context).
    Var(String),
    /// A pointer value together with its pointee type.
    Ptr(IrExpr, SolType),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Loc {
    Value,
    /// A storage entity; its expression is a datatype (or array) value.
    Storage(Option<SPath>),
    /// A storage pointer value of type `[int]int`.
    Pointer,
    /// A memory pointer.
    Memory,
}

/// A translated expression with its Solidity type and location.
#[derive(Clone, Debug, PartialEq)]
pub struct Operand {
    pub expr: IrExpr,
    pub ty: SolType,
    pub loc: Loc,
}

impl Operand {
    pub fn new(expr: IrExpr, ty: SolType, loc: Loc) -> Self {
        Operand { expr, ty, loc }
    }
}

fn loc_of(ty: &SolType, cat: LocCategory) -> Loc {
    if ty.is_value() {
        return Loc::Value;
    }
    match cat {
        LocCategory::Value => Loc::Value,
        LocCategory::Storage => Loc::Storage(None),
        LocCategory::StorPtr => Loc::Pointer,
        LocCategory::Memory => Loc::Memory,
    }
}

/// Category of a member or element of a `parent`-located reference.
fn sub_cat(t: &SolType, parent: LocCategory) -> LocCategory {
    if t.is_value() {
        LocCategory::Value
    } else {
        parent
    }
}

/// Translation state for one function.
pub struct Ctx<'a> {
    pub contract: &'a TypedContract,
    pub layout: &'a StorageLayout,
    pub opts: TranslateOptions,
    pub prog: SmtProgram,
    pub out: Vec<IrStmt>,
    span: Span,
    fresh: usize,
    trees: HashMap<SolType, Rc<StorageTree>>,
    /// Set while translating an assignment target.
    lvalue: bool,
}

impl<'a> Ctx<'a> {
    pub fn new(contract: &'a TypedContract, layout: &'a StorageLayout, opts: TranslateOptions) -> Self {
        let mut prog = SmtProgram::default();
        prog.declare(REFCNT, IrType::Int);
        Ctx { contract, layout, opts, prog, out: vec![], span: Span::default(), fresh: 0, trees: HashMap::new(), lvalue: false }
    }

    fn unsupported(&self, msg: impl Into<String>) -> TranslateError {
        TranslateError::Unsupported { span: self.span, msg: msg.into() }
    }

    pub fn fresh(&mut self, base: &str, ty: IrType) -> IrExpr {
        self.fresh += 1;
        let n = format!("{}${}", base, self.fresh);
        self.prog.declare(n.clone(), ty);
        ident(n)
    }

    pub fn tree(&mut self, t: &SolType) -> Rc<StorageTree> {
        if let Some(tr) = self.trees.get(t) {
            return tr.clone();
        }
        let tr = Rc::new(self.layout.tree(self.contract, t));
        self.trees.insert(t.clone(), tr.clone());
        tr
    }

    pub fn unpack(&mut self, ptr: &IrExpr, t: &SolType) -> Result<IrExpr, TranslateError> {
        self.tree(t).unpack(ptr)
    }

    /// Pointer to the storage entity `path` of type `t`. Paths rooted at a
    /// pointer are re-encoded leaf by leaf in the tree of `t`.
    pub fn pack(&mut self, path: &SPath, t: &SolType) -> Result<IrExpr, TranslateError> {
        let target = self.tree(t);
        match &path.root {
            PathRoot::Var(n) => {
                let mut steps = vec![PathStep::Name(n.clone())];
                steps.extend(path.steps.iter().cloned());
                target.pack(&steps)
            }
            PathRoot::Ptr(p, pt) => {
                if path.steps.is_empty() && pt == t {
                    return Ok(p.clone());
                }
                let source = self.tree(pt);
                source.fold(p, &mut |leaf_steps, _| {
                    let mut steps = leaf_steps.to_vec();
                    steps.extend(path.steps.iter().cloned());
                    target.pack(&steps)
                })
            }
        }
    }

    /// Γ: the IR type of a Solidity type at a location. Declares datatypes
    /// and heaps as a side effect.
    pub fn map_type(&mut self, t: &SolType, cat: LocCategory) -> Result<IrType, TranslateError> {
        Ok(match t {
            SolType::Bool => IrType::Bool,
            SolType::Address | SolType::Int | SolType::Uint => IrType::Int,
            _ if cat == LocCategory::StorPtr => IrType::ptr(),
            SolType::Mapping(k, v) => match cat {
                LocCategory::Storage => {
                    let kt = self.map_type(k, LocCategory::Value)?;
                    let vt = self.map_type(v, sub_cat(v, LocCategory::Storage))?;
                    IrType::array(kt, vt)
                }
                _ => return Err(TranslateError::Internal(format!("mapping `{}` at location {}", t, cat))),
            },
            SolType::DynArray(b) | SolType::FixArray(b, _) => {
                let et = self.map_type(b, sub_cat(b, cat))?;
                let members = vec![("arr".to_string(), IrType::array(IrType::Int, et)), ("length".to_string(), IrType::Int)];
                match cat {
                    LocCategory::Storage => {
                        let name = stor_arr_name(b);
                        self.prog.add_datatype(DatatypeDef { name: name.clone(), members });
                        IrType::Datatype(name)
                    }
                    LocCategory::Memory => {
                        let name = mem_arr_name(b);
                        self.prog.add_datatype(DatatypeDef { name: name.clone(), members });
                        self.prog.declare(arr_heap_name(b), IrType::array(IrType::Int, IrType::Datatype(name)));
                        IrType::Int
                    }
                    _ => return Err(TranslateError::Internal(format!("array `{}` at location {}", t, cat))),
                }
            }
            SolType::Struct(s) => {
                let info = self.contract.struct_info(s).clone();
                let mut members = vec![];
                for (m, mt) in &info.members {
                    // mappings in memory structs are inaccessible
                    if cat == LocCategory::Memory && mt.is_mapping() {
                        continue;
                    }
                    members.push((m.clone(), self.map_type(mt, sub_cat(mt, cat))?));
                }
                match cat {
                    LocCategory::Storage => {
                        let name = stor_struct_name(s);
                        self.prog.add_datatype(DatatypeDef { name: name.clone(), members });
                        IrType::Datatype(name)
                    }
                    LocCategory::Memory => {
                        let name = mem_struct_name(s);
                        self.prog.add_datatype(DatatypeDef { name: name.clone(), members });
                        self.prog.declare(struct_heap_name(s), IrType::array(IrType::Int, IrType::Datatype(name)));
                        IrType::Int
                    }
                    _ => return Err(TranslateError::Internal(format!("struct `{}` at location {}", t, cat))),
                }
            }
        })
    }

    /// `refcnt := refcnt + 1; r := refcnt` for a fresh `r`.
    fn alloc(&mut self) -> IrExpr {
        let r = self.fresh("new", IrType::Int);
        self.out.push(IrStmt::assign(ident(REFCNT), IrExpr::add(ident(REFCNT), IrExpr::Int(1))));
        self.out.push(IrStmt::assign(r.clone(), ident(REFCNT)));
        r
    }

    /// Number of elements to enumerate for an element-wise operation on an
    /// array of type `t` whose length is `len`. Fixed-size arrays use their
    /// size; dynamic ones need the unrolling bound, which is assumed.
    fn element_bound(&mut self, t: &SolType, len: &IrExpr, what: &str) -> Result<(u64, bool), TranslateError> {
        if let SolType::FixArray(_, n) = t {
            return Ok((*n, true));
        }
        match self.opts.unroll {
            Some(n) => {
                self.out.push(IrStmt::Assume(IrExpr::bin(crate::ir::BinOp::Le, len.clone(), IrExpr::Int(n as i64))));
                Ok((n as u64, false))
            }
            None => Err(self.unsupported(what)),
        }
    }

    /// Default value of `t` in `cat`. Memory defaults allocate.
    pub fn default_value(&mut self, t: &SolType, cat: LocCategory) -> Result<IrExpr, TranslateError> {
        Ok(match t {
            SolType::Bool => IrExpr::Bool(false),
            SolType::Address | SolType::Int | SolType::Uint => IrExpr::Int(0),
            _ if cat == LocCategory::StorPtr || cat == LocCategory::Value => {
                return Err(TranslateError::Internal(format!("no default value for `{}` at location {}", t, cat)))
            }
            SolType::Mapping(k, v) => {
                let kt = self.map_type(k, LocCategory::Value)?;
                let vc = sub_cat(v, LocCategory::Storage);
                let vt = self.map_type(v, vc)?;
                let d = self.default_value(v, vc)?;
                IrExpr::const_array(kt, vt, d)
            }
            SolType::DynArray(b) | SolType::FixArray(b, _) => {
                let n = match t {
                    SolType::FixArray(_, n) => *n as i64,
                    _ => 0,
                };
                self.map_type(t, cat)?;
                let bc = sub_cat(b, cat);
                if cat == LocCategory::Storage {
                    let et = self.map_type(b, bc)?;
                    let d = self.default_value(b, bc)?;
                    IrExpr::Construct(stor_arr_name(b), vec![IrExpr::const_array(IrType::Int, et, d), IrExpr::Int(n)])
                } else {
                    let r = self.alloc();
                    let arr = if b.is_value() {
                        let et = self.map_type(b, bc)?;
                        let d = self.default_value(b, bc)?;
                        IrExpr::const_array(IrType::Int, et, d)
                    } else {
                        let mut acc = IrExpr::const_array(IrType::Int, IrType::Int, IrExpr::Int(0));
                        for i in 0..n {
                            let d = self.default_value(b, bc)?;
                            acc = acc.write(IrExpr::Int(i), d);
                        }
                        acc
                    };
                    let obj = IrExpr::Construct(mem_arr_name(b), vec![arr, IrExpr::Int(n)]);
                    self.out.push(IrStmt::assign(ident(arr_heap_name(b)).read(r.clone()), obj));
                    r
                }
            }
            SolType::Struct(s) => {
                self.map_type(t, cat)?;
                let info = self.contract.struct_info(s).clone();
                if cat == LocCategory::Storage {
                    let mut args = vec![];
                    for (_, mt) in &info.members {
                        args.push(self.default_value(mt, sub_cat(mt, cat))?);
                    }
                    IrExpr::Construct(stor_struct_name(s), args)
                } else {
                    let r = self.alloc();
                    let mut args = vec![];
                    for (_, mt) in info.members.iter().filter(|(_, mt)| !mt.is_mapping()) {
                        args.push(self.default_value(mt, sub_cat(mt, cat))?);
                    }
                    let obj = IrExpr::Construct(mem_struct_name(s), args);
                    self.out.push(IrStmt::assign(ident(struct_heap_name(s)).read(r.clone()), obj));
                    r
                }
            }
        })
    }

    /// Non-aliasing assumptions for a memory pointer that comes from outside
    /// the function: it and everything reachable from it are at most
    /// `refcnt`.
    fn assume_external(&mut self, p: IrExpr, t: &SolType) -> Result<(), TranslateError> {
        self.map_type(t, LocCategory::Memory)?;
        self.out.push(IrStmt::Assume(IrExpr::bin(crate::ir::BinOp::Le, p.clone(), ident(REFCNT))));
        match t {
            SolType::Struct(s) => {
                let info = self.contract.struct_info(s).clone();
                let obj = ident(struct_heap_name(s)).read(p);
                for (m, mt) in &info.members {
                    if mt.is_reference() && !mt.is_mapping() {
                        self.assume_external(obj.clone().select(mem_struct_name(s), m.clone()), mt)?;
                    }
                }
            }
            SolType::DynArray(b) | SolType::FixArray(b, _) => {
                let obj = ident(arr_heap_name(b)).read(p);
                let len = obj.clone().select(mem_arr_name(b), "length");
                if let SolType::FixArray(_, n) = t {
                    self.out.push(IrStmt::Assume(IrExpr::eq(len.clone(), IrExpr::Int(*n as i64))));
                }
                if b.is_reference() {
                    let (bound, exact) =
                        self.element_bound(t, &len, "assumptions on elements of a memory array parameter with reference-type elements")?;
                    let arr = obj.select(mem_arr_name(b), "arr");
                    for i in 0..bound as i64 {
                        let saved = std::mem::take(&mut self.out);
                        self.assume_external(arr.clone().read(IrExpr::Int(i)), b)?;
                        let body = std::mem::replace(&mut self.out, saved);
                        if exact {
                            self.out.extend(body);
                        } else {
                            let guard = IrExpr::bin(crate::ir::BinOp::Lt, IrExpr::Int(i), len.clone());
                            self.out.push(IrStmt::Ite(guard, body, vec![]));
                        }
                    }
                }
            }
            _ => {}
        }
        Ok(())
    }
}

/// Translates one function (or the constructor) into a stand-alone program.
pub fn translate_function(
    c: &TypedContract,
    layout: &StorageLayout,
    f: &Function,
    opts: TranslateOptions,
) -> Result<SmtProgram, TranslateError> {
    let mut cx = Ctx::new(c, layout, opts);
    cx.span = f.span;
    for (n, t) in &layout.roots {
        let it = cx.map_type(t, LocCategory::Storage)?;
        cx.prog.declare(n.clone(), it);
    }
    for v in f.params.iter().chain(&f.returns) {
        let info = c.var(*v);
        let it = cx.map_type(&info.ty, info.cat)?;
        cx.prog.declare(info.name.clone(), it);
    }
    for v in &f.params {
        let info = c.var(*v);
        if info.cat == LocCategory::Memory {
            cx.assume_external(ident(info.name.clone()), &info.ty)?;
        }
    }
    if f.is_constructor {
        for v in &c.state_vars {
            let info = c.var(*v);
            let d = cx.default_value(&info.ty, LocCategory::Storage)?;
            cx.out.push(IrStmt::assign(ident(info.name.clone()), d));
        }
    } else {
        for v in &f.returns {
            let info = c.var(*v);
            // storage pointer returns have no default; they stay unconstrained
            if info.cat != LocCategory::StorPtr {
                let d = cx.default_value(&info.ty, info.cat)?;
                cx.out.push(IrStmt::assign(ident(info.name.clone()), d));
            }
        }
    }
    for s in &f.body {
        cx.stmt(s)?;
    }
    cx.prog.stmts = std::mem::take(&mut cx.out);
    Ok(cx.prog)
}

/// Translates every function of the contract, constructor first.
pub fn translate_contract(
    c: &TypedContract,
    opts: TranslateOptions,
) -> Vec<(String, Result<SmtProgram, TranslateError>)> {
    let layout = StorageLayout::new(c);
    c.all_functions()
        .map(|f| (f.name.clone(), translate_function(c, &layout, f, opts)))
        .collect()
}
