// SPDX-License-Identifier: Apache-2.0

//! Concrete reference interpreter.
//!
//! Storage is a tree of plain values, memory a heap of objects addressed by
//! [`CValue::MemRef`], and storage pointers are structural paths into the
//! storage tree. The interpreter is written against the typed AST only and
//! shares no code with the translation.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use indexmap::IndexMap;
use serde_json::{json, Map, Value as Json};
use thiserror::Error;

use crate::frontend::syntax::{BinOp, UnOp};
use crate::frontend::typed::{AssertId, Function, TExpr, TExprKind, TStmt, TypedContract, VarId, VarKind};
use crate::frontend::{LocCategory, SolType};

pub mod decode;
pub mod gen;

pub use gen::random_program;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("no function `{0}`")]
    NoFunction(String),
    #[error("bad arguments: {0}")]
    Args(String),
    #[error("memory index {index} out of bounds (length {length})")]
    MemoryBounds { index: i64, length: usize },
    #[error("pop on an empty array")]
    EmptyPop,
    #[error("negative array length {0}")]
    NegativeLength(i64),
    #[error("integer overflow")]
    Overflow,
    #[error("read of an uninitialized storage pointer")]
    Uninitialized,
    #[error("element-wise copy of {length} elements exceeds the bound {bound}")]
    Bound { length: i64, bound: u32 },
    #[error("internal: {0}")]
    Internal(String),
}

type Result<T> = std::result::Result<T, OracleError>;

fn internal(msg: impl Into<String>) -> OracleError {
    OracleError::Internal(msg.into())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    Member(usize),
    /// Array index or mapping key (booleans as 0/1).
    Index(i64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StorPath {
    pub root: String,
    pub steps: Vec<Step>,
}

impl StorPath {
    fn child(&self, s: Step) -> StorPath {
        let mut p = self.clone();
        p.steps.push(s);
        p
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CValue {
    Int(i64),
    Bool(bool),
    /// Storage struct, members in declaration order.
    Struct(Vec<CValue>),
    /// Storage array: a default-extended map plus a length. Slots at or past
    /// the length may still hold values (after a pop).
    Array { elems: BTreeMap<i64, CValue>, length: i64, default: Box<CValue> },
    Mapping { entries: BTreeMap<i64, CValue>, default: Box<CValue> },
    MemRef(usize),
    StorPath(StorPath),
}

impl CValue {
    fn as_int(&self) -> Result<i64> {
        match self {
            CValue::Int(n) => Ok(*n),
            CValue::Bool(b) => Ok(*b as i64),
            v => Err(internal(format!("expected an integer, found {:?}", v))),
        }
    }

    fn as_bool(&self) -> Result<bool> {
        match self {
            CValue::Bool(b) => Ok(*b),
            v => Err(internal(format!("expected a boolean, found {:?}", v))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum HeapObj {
    Struct(Vec<CValue>),
    Array(Vec<CValue>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Outcome {
    Finished,
    AssertFailed(AssertId),
}

#[derive(Clone, Debug)]
pub struct ExecResult {
    pub outcome: Outcome,
    /// Asserts that held, in execution order.
    pub passed: Vec<AssertId>,
    pub returns: Vec<(String, CValue)>,
}

/// Storage locations, memory slots and local variables.
#[derive(Clone, Debug)]
enum Place {
    Local(VarId),
    Stor(StorPath),
    Heap(usize, usize),
}

/// Result of evaluating an expression: a plain value (including memory
/// references and pointers) or a storage entity. `oob` records that an index
/// on the way was past the array length, so reading yields the default.
#[derive(Clone, Debug)]
enum Opnd {
    Val(CValue),
    Stor(StorPath, bool),
}

enum Ref {
    Mem(usize),
    Stor(StorPath, bool),
}

pub struct Machine<'c> {
    c: &'c TypedContract,
    pub storage: IndexMap<String, CValue>,
    pub heap: Vec<HeapObj>,
    locals: HashMap<VarId, CValue>,
    /// Bound on element-wise copies of dynamic arrays with reference-type
    /// elements, mirroring the translation's unrolling bound.
    pub unroll: Option<u32>,
    /// When set, `assert(e == k)` records the value of `e` and never fails.
    probes: Option<Vec<CValue>>,
}

/// Storage default of a type.
pub fn storage_default(c: &TypedContract, t: &SolType) -> CValue {
    match t {
        SolType::Bool => CValue::Bool(false),
        SolType::Int | SolType::Uint | SolType::Address => CValue::Int(0),
        SolType::Mapping(_, v) => CValue::Mapping { entries: BTreeMap::new(), default: Box::new(storage_default(c, v)) },
        SolType::DynArray(b) => {
            CValue::Array { elems: BTreeMap::new(), length: 0, default: Box::new(storage_default(c, b)) }
        }
        SolType::FixArray(b, n) => {
            CValue::Array { elems: BTreeMap::new(), length: *n as i64, default: Box::new(storage_default(c, b)) }
        }
        SolType::Struct(s) => CValue::Struct(c.struct_info(s).members.iter().map(|(_, m)| storage_default(c, m)).collect()),
    }
}

fn key_of(v: &CValue) -> Result<i64> {
    v.as_int()
}

impl<'c> Machine<'c> {
    /// A machine with default-initialized storage and an empty heap.
    pub fn new(c: &'c TypedContract) -> Self {
        let storage = c.state_vars.iter().map(|v| (c.var(*v).name.clone(), storage_default(c, &c.var(*v).ty))).collect();
        Machine { c, storage, heap: vec![], locals: HashMap::new(), unroll: None, probes: None }
    }

    fn alloc(&mut self, obj: HeapObj) -> usize {
        self.heap.push(obj);
        self.heap.len()
    }

    fn obj(&self, a: usize) -> Result<&HeapObj> {
        a.checked_sub(1).and_then(|k| self.heap.get(k)).ok_or_else(|| internal(format!("dangling memory reference {}", a)))
    }

    fn obj_mut(&mut self, a: usize) -> Result<&mut HeapObj> {
        a.checked_sub(1)
            .and_then(|k| self.heap.get_mut(k))
            .ok_or_else(|| internal(format!("dangling memory reference {}", a)))
    }

    fn mem_len(&self, a: usize) -> Result<usize> {
        match self.obj(a)? {
            HeapObj::Array(es) => Ok(es.len()),
            HeapObj::Struct(_) => Err(internal("length of a memory struct")),
        }
    }

    // storage access

    pub fn stor_get(&self, p: &StorPath) -> Result<CValue> {
        let mut cur = self.storage.get(&p.root).ok_or_else(|| internal(format!("no storage root `{}`", p.root)))?;
        for s in &p.steps {
            cur = match (cur, s) {
                (CValue::Struct(ms), Step::Member(i)) => ms.get(*i).ok_or_else(|| internal("member out of range"))?,
                (CValue::Array { elems, default, .. }, Step::Index(i))
                | (CValue::Mapping { entries: elems, default }, Step::Index(i)) => elems.get(i).unwrap_or(default),
                (v, s) => return Err(internal(format!("step {:?} on {:?}", s, v))),
            };
        }
        Ok(cur.clone())
    }

    fn stor_slot(&mut self, p: &StorPath) -> Result<&mut CValue> {
        let mut cur = self.storage.get_mut(&p.root).ok_or_else(|| internal(format!("no storage root `{}`", p.root)))?;
        for s in &p.steps {
            cur = match (cur, s) {
                (CValue::Struct(ms), Step::Member(i)) => ms.get_mut(*i).ok_or_else(|| internal("member out of range"))?,
                (CValue::Array { elems, default, .. }, Step::Index(i))
                | (CValue::Mapping { entries: elems, default }, Step::Index(i)) => {
                    elems.entry(*i).or_insert_with(|| (**default).clone())
                }
                (v, s) => return Err(internal(format!("step {:?} on {:?}", s, v))),
            };
        }
        Ok(cur)
    }

    fn read_place(&self, pl: &Place) -> Result<CValue> {
        match pl {
            Place::Local(v) => self.locals.get(v).cloned().ok_or(OracleError::Uninitialized),
            Place::Stor(p) => self.stor_get(p),
            Place::Heap(a, i) => match self.obj(*a)? {
                HeapObj::Struct(ms) | HeapObj::Array(ms) => ms.get(*i).cloned().ok_or_else(|| internal("heap slot")),
            },
        }
    }

    fn write_place(&mut self, pl: &Place, v: CValue) -> Result<()> {
        match pl {
            Place::Local(x) => {
                self.locals.insert(*x, v);
            }
            Place::Stor(p) => *self.stor_slot(p)? = v,
            Place::Heap(a, i) => match self.obj_mut(*a)? {
                HeapObj::Struct(ms) | HeapObj::Array(ms) => *ms.get_mut(*i).ok_or_else(|| internal("heap slot"))? = v,
            },
        }
        Ok(())
    }

    // defaults and copies

    fn memory_default(&mut self, t: &SolType) -> Result<CValue> {
        Ok(match t {
            SolType::Bool => CValue::Bool(false),
            SolType::Int | SolType::Uint | SolType::Address => CValue::Int(0),
            SolType::DynArray(_) => CValue::MemRef(self.alloc(HeapObj::Array(vec![]))),
            SolType::FixArray(b, n) => {
                let r = self.alloc(HeapObj::Array(vec![]));
                let mut es = vec![];
                for _ in 0..*n {
                    es.push(self.memory_default(b)?);
                }
                *self.obj_mut(r)? = HeapObj::Array(es);
                CValue::MemRef(r)
            }
            SolType::Struct(s) => {
                let r = self.alloc(HeapObj::Struct(vec![]));
                let mut ms = vec![];
                for (_, mt) in &self.c.struct_info(s).members {
                    ms.push(self.memory_default(mt)?);
                }
                *self.obj_mut(r)? = HeapObj::Struct(ms);
                CValue::MemRef(r)
            }
            SolType::Mapping(..) => return Err(internal("mapping in memory")),
        })
    }

    fn check_bound(&self, t: &SolType, len: i64) -> Result<()> {
        if let (SolType::DynArray(b), Some(n)) = (t, self.unroll) {
            if b.is_reference() && len > n as i64 {
                return Err(OracleError::Bound { length: len, bound: n });
            }
        }
        Ok(())
    }

    /// Fresh memory copy of a storage value.
    fn stor_to_mem(&mut self, t: &SolType, v: &CValue) -> Result<CValue> {
        match (t, v) {
            (_, v) if t.is_value() => Ok(v.clone()),
            (SolType::Struct(s), CValue::Struct(ms)) => {
                let r = self.alloc(HeapObj::Struct(vec![]));
                let info = self.c.struct_info(s).clone();
                let mut out = vec![];
                for ((_, mt), m) in info.members.iter().zip(ms) {
                    out.push(self.stor_to_mem(mt, m)?);
                }
                *self.obj_mut(r)? = HeapObj::Struct(out);
                Ok(CValue::MemRef(r))
            }
            (SolType::DynArray(b) | SolType::FixArray(b, _), CValue::Array { elems, length, default }) => {
                self.check_bound(t, *length)?;
                if *length < 0 {
                    return Err(OracleError::NegativeLength(*length));
                }
                let r = self.alloc(HeapObj::Array(vec![]));
                let mut out = vec![];
                for i in 0..*length {
                    out.push(self.stor_to_mem(b, elems.get(&i).unwrap_or(default))?);
                }
                *self.obj_mut(r)? = HeapObj::Array(out);
                Ok(CValue::MemRef(r))
            }
            _ => Err(internal(format!("copy of {:?} to memory as `{}`", v, t))),
        }
    }

    /// Storage value of the memory entity `v`; mappings keep `old`.
    fn mem_to_stor(&self, t: &SolType, v: &CValue, old: &CValue) -> Result<CValue> {
        if t.is_value() {
            return Ok(v.clone());
        }
        if t.is_mapping() {
            return Ok(old.clone());
        }
        let CValue::MemRef(a) = v else { return Err(internal(format!("expected a memory reference, found {:?}", v))) };
        match (t, self.obj(*a)?) {
            (SolType::Struct(s), HeapObj::Struct(ms)) => {
                let info = self.c.struct_info(s);
                let olds = match old {
                    CValue::Struct(os) => os.clone(),
                    _ => return Err(internal("old value is not a struct")),
                };
                let mut out = vec![];
                for (((_, mt), m), o) in info.members.iter().zip(ms).zip(&olds) {
                    out.push(self.mem_to_stor(mt, m, o)?);
                }
                Ok(CValue::Struct(out))
            }
            (SolType::DynArray(b) | SolType::FixArray(b, _), HeapObj::Array(es)) => {
                self.check_bound(t, es.len() as i64)?;
                let (old_elems, old_default) = match old {
                    CValue::Array { elems, default, .. } => (elems.clone(), (**default).clone()),
                    _ => return Err(internal("old value is not an array")),
                };
                let mut elems = BTreeMap::new();
                for (i, e) in es.iter().enumerate() {
                    let o = old_elems.get(&(i as i64)).unwrap_or(&old_default);
                    elems.insert(i as i64, self.mem_to_stor(b, e, o)?);
                }
                let length = match t {
                    SolType::FixArray(_, n) => *n as i64,
                    _ => es.len() as i64,
                };
                Ok(CValue::Array { elems, length, default: Box::new(storage_default(self.c, b)) })
            }
            (_, o) => Err(internal(format!("copy of {:?} to storage as `{}`", o, t))),
        }
    }

    /// Current value of an operand as a storage value.
    fn stor_value(&self, t: &SolType, o: &Opnd) -> Result<CValue> {
        match o {
            Opnd::Stor(_, true) => Ok(storage_default(self.c, t)),
            Opnd::Stor(p, false) | Opnd::Val(CValue::StorPath(p)) => self.stor_get(p),
            Opnd::Val(v) => Ok(v.clone()),
        }
    }

    /// Assignment of `rhs` to the place `pl` holding type `t` in category `cat`.
    fn assign(&mut self, pl: &Place, t: &SolType, cat: LocCategory, rhs: &Opnd) -> Result<()> {
        if t.is_value() {
            let v = self.stor_value(t, rhs)?;
            return self.write_place(pl, v);
        }
        match cat {
            LocCategory::StorPtr if matches!(pl, Place::Local(_)) => {
                let p = match rhs {
                    Opnd::Stor(p, _) | Opnd::Val(CValue::StorPath(p)) => p.clone(),
                    o => return Err(internal(format!("pointer assigned from {:?}", o))),
                };
                self.write_place(pl, CValue::StorPath(p))
            }
            _ if t.is_mapping() => Ok(()),
            LocCategory::Storage | LocCategory::StorPtr => {
                let v = match rhs {
                    Opnd::Val(CValue::MemRef(_)) => {
                        let Opnd::Val(m) = rhs else { unreachable!() };
                        let old = self.read_place(pl)?;
                        self.mem_to_stor(t, m, &old)?
                    }
                    o => self.stor_value(t, o)?,
                };
                self.write_place(pl, v)
            }
            LocCategory::Memory => {
                let v = match rhs {
                    Opnd::Val(CValue::MemRef(a)) => CValue::MemRef(*a),
                    o => {
                        let s = self.stor_value(t, o)?;
                        self.stor_to_mem(t, &s)?
                    }
                };
                self.write_place(pl, v)
            }
            LocCategory::Value => Err(internal("reference type in value category")),
        }
    }

    // expressions

    /// The entity a reference-typed base expression denotes.
    fn base_ref(&mut self, base: &TExpr, lvalue: bool) -> Result<Ref> {
        if lvalue && !matches!(base.kind, TExprKind::Cond(..)) {
            return match self.place(base)? {
                Place::Stor(p) => Ok(Ref::Stor(p, false)),
                pl => match self.read_place(&pl)? {
                    CValue::MemRef(a) => Ok(Ref::Mem(a)),
                    CValue::StorPath(p) => Ok(Ref::Stor(p, false)),
                    v => Err(internal(format!("base evaluates to {:?}", v))),
                },
            };
        }
        match self.eval(base)? {
            Opnd::Stor(p, oob) => Ok(Ref::Stor(p, oob)),
            Opnd::Val(CValue::MemRef(a)) => Ok(Ref::Mem(a)),
            Opnd::Val(CValue::StorPath(p)) => Ok(Ref::Stor(p, false)),
            Opnd::Val(v) => Err(internal(format!("base evaluates to {:?}", v))),
        }
    }

    fn index_value(&mut self, idx: &TExpr) -> Result<i64> {
        let v = self.eval(idx)?;
        key_of(&self.stor_value(&idx.ty, &v)?)
    }

    fn mem_index(&self, a: usize, i: i64) -> Result<usize> {
        let length = self.mem_len(a)?;
        if i < 0 || i as usize >= length {
            return Err(OracleError::MemoryBounds { index: i, length });
        }
        Ok(i as usize)
    }

    /// Place denoted by an assignment target. Storage indices are not
    /// checked against the length.
    fn place(&mut self, e: &TExpr) -> Result<Place> {
        match &e.kind {
            TExprKind::Var(v) => {
                let info = self.c.var(*v);
                Ok(if info.kind == VarKind::State {
                    Place::Stor(StorPath { root: info.name.clone(), steps: vec![] })
                } else {
                    Place::Local(*v)
                })
            }
            TExprKind::Member(base, _, i) => match self.base_ref(base, true)? {
                Ref::Mem(a) => Ok(Place::Heap(a, *i)),
                Ref::Stor(p, _) => Ok(Place::Stor(p.child(Step::Member(*i)))),
            },
            TExprKind::Index(base, idx) => {
                let r = self.base_ref(base, true)?;
                let i = self.index_value(idx)?;
                match r {
                    Ref::Mem(a) => Ok(Place::Heap(a, self.mem_index(a, i)?)),
                    Ref::Stor(p, _) => Ok(Place::Stor(p.child(Step::Index(i)))),
                }
            }
            _ => Err(internal("expression is not assignable")),
        }
    }

    /// Result of a member or index access on a storage entity.
    fn stor_access(&self, e: &TExpr, p: StorPath, oob: bool) -> Result<Opnd> {
        if e.ty.is_value() {
            Ok(Opnd::Val(if oob { storage_default(self.c, &e.ty) } else { self.stor_get(&p)? }))
        } else {
            Ok(Opnd::Stor(p, oob))
        }
    }

    fn eval(&mut self, e: &TExpr) -> Result<Opnd> {
        match &e.kind {
            TExprKind::Var(v) => {
                let info = self.c.var(*v);
                if info.kind == VarKind::State {
                    return Ok(Opnd::Stor(StorPath { root: info.name.clone(), steps: vec![] }, false));
                }
                self.locals.get(v).cloned().map(Opnd::Val).ok_or(OracleError::Uninitialized)
            }
            TExprKind::Member(base, _, i) => match self.base_ref(base, false)? {
                Ref::Mem(a) => Ok(Opnd::Val(self.read_place(&Place::Heap(a, *i))?)),
                Ref::Stor(p, oob) => self.stor_access(e, p.child(Step::Member(*i)), oob),
            },
            TExprKind::Index(base, idx) => {
                let r = self.base_ref(base, false)?;
                let i = self.index_value(idx)?;
                match r {
                    Ref::Mem(a) => {
                        let k = self.mem_index(a, i)?;
                        Ok(Opnd::Val(self.read_place(&Place::Heap(a, k))?))
                    }
                    Ref::Stor(p, oob) => {
                        let mut oob = oob;
                        if !oob && base.ty.is_array() {
                            let len = match self.stor_get(&p)? {
                                CValue::Array { length, .. } => length,
                                v => return Err(internal(format!("index into {:?}", v))),
                            };
                            oob = i >= len;
                        }
                        self.stor_access(e, p.child(Step::Index(i)), oob)
                    }
                }
            }
            TExprKind::Length(base) => {
                if let SolType::FixArray(_, n) = &base.ty {
                    self.base_ref(base, false)?;
                    return Ok(Opnd::Val(CValue::Int(*n as i64)));
                }
                let n = match self.base_ref(base, false)? {
                    Ref::Mem(a) => self.mem_len(a)? as i64,
                    Ref::Stor(_, true) => 0,
                    Ref::Stor(p, false) => match self.stor_get(&p)? {
                        CValue::Array { length, .. } => length,
                        v => return Err(internal(format!("length of {:?}", v))),
                    },
                };
                Ok(Opnd::Val(CValue::Int(n)))
            }
            TExprKind::Cond(c, t, f) => {
                let c = self.eval(c)?;
                let b = self.stor_value(&SolType::Bool, &c)?.as_bool()?;
                let v = self.eval(if b { t } else { f })?;
                if e.ty.is_value() {
                    return Ok(Opnd::Val(self.stor_value(&e.ty, &v)?));
                }
                match e.cat {
                    LocCategory::Memory => match v {
                        Opnd::Val(CValue::MemRef(a)) => Ok(Opnd::Val(CValue::MemRef(a))),
                        o => {
                            let s = self.stor_value(&e.ty, &o)?;
                            Ok(Opnd::Val(self.stor_to_mem(&e.ty, &s)?))
                        }
                    },
                    _ => match v {
                        Opnd::Stor(p, _) | Opnd::Val(CValue::StorPath(p)) => Ok(Opnd::Val(CValue::StorPath(p))),
                        o => Err(internal(format!("storage conditional branch {:?}", o))),
                    },
                }
            }
            TExprKind::NewArray(len) => {
                let l = self.index_value(len)?;
                if l < 0 {
                    return Err(OracleError::NegativeLength(l));
                }
                let b = e.ty.array_base().ok_or_else(|| internal("new of a non-array"))?.clone();
                let r = self.alloc(HeapObj::Array(vec![]));
                let mut es = vec![];
                for _ in 0..l {
                    es.push(self.memory_default(&b)?);
                }
                *self.obj_mut(r)? = HeapObj::Array(es);
                Ok(Opnd::Val(CValue::MemRef(r)))
            }
            TExprKind::StructLit(s, args) => {
                let info = self.c.struct_info(s).clone();
                let placeholder = info.members.iter().map(|_| CValue::Int(0)).collect();
                let r = self.alloc(HeapObj::Struct(placeholder));
                for (k, (a, (_, mt))) in args.iter().zip(&info.members).enumerate() {
                    let v = self.eval(a)?;
                    let cat = if mt.is_value() { LocCategory::Value } else { LocCategory::Memory };
                    self.assign(&Place::Heap(r, k), mt, cat, &v)?;
                }
                Ok(Opnd::Val(CValue::MemRef(r)))
            }
            TExprKind::IntLit(n) => Ok(Opnd::Val(CValue::Int(*n))),
            TExprKind::BoolLit(b) => Ok(Opnd::Val(CValue::Bool(*b))),
            TExprKind::Binary(op, a, b) => {
                let x = self.eval(a)?;
                let x = self.stor_value(&a.ty, &x)?;
                let y = self.eval(b)?;
                let y = self.stor_value(&b.ty, &y)?;
                let v = match op {
                    BinOp::Add => CValue::Int(x.as_int()?.checked_add(y.as_int()?).ok_or(OracleError::Overflow)?),
                    BinOp::Sub => CValue::Int(x.as_int()?.checked_sub(y.as_int()?).ok_or(OracleError::Overflow)?),
                    BinOp::Eq => CValue::Bool(x == y),
                    BinOp::Ne => CValue::Bool(x != y),
                    BinOp::Lt => CValue::Bool(x.as_int()? < y.as_int()?),
                    BinOp::Le => CValue::Bool(x.as_int()? <= y.as_int()?),
                    BinOp::Gt => CValue::Bool(x.as_int()? > y.as_int()?),
                    BinOp::Ge => CValue::Bool(x.as_int()? >= y.as_int()?),
                    BinOp::And => CValue::Bool(x.as_bool()? && y.as_bool()?),
                    BinOp::Or => CValue::Bool(x.as_bool()? || y.as_bool()?),
                };
                Ok(Opnd::Val(v))
            }
            TExprKind::Unary(op, a) => {
                let x = self.eval(a)?;
                let x = self.stor_value(&a.ty, &x)?;
                Ok(Opnd::Val(match op {
                    UnOp::Not => CValue::Bool(!x.as_bool()?),
                    UnOp::Neg => CValue::Int(x.as_int()?.checked_neg().ok_or(OracleError::Overflow)?),
                }))
            }
        }
    }

    fn value_of(&mut self, e: &TExpr) -> Result<CValue> {
        let o = self.eval(e)?;
        self.stor_value(&e.ty, &o)
    }

    // statements

    fn stor_array(&mut self, array: &TExpr) -> Result<StorPath> {
        match self.base_ref(array, true)? {
            Ref::Stor(p, _) => Ok(p),
            Ref::Mem(_) => Err(internal("push/pop on a memory array")),
        }
    }

    fn array_length(&mut self, p: &StorPath) -> Result<&mut i64> {
        match self.stor_slot(p)? {
            CValue::Array { length, .. } => Ok(length),
            v => Err(internal(format!("push/pop on {:?}", v))),
        }
    }

    /// Executes one statement; `Some(id)` when an assert fails.
    fn stmt(&mut self, s: &TStmt) -> Result<Option<AssertId>> {
        match s {
            TStmt::Decl { var, init, .. } => {
                let info = self.c.var(*var).clone();
                let rhs = match init {
                    Some(e) => self.eval(e)?,
                    None if info.ty.is_value() => Opnd::Val(storage_default(self.c, &info.ty)),
                    None if info.cat == LocCategory::Memory => Opnd::Val(self.memory_default(&info.ty)?),
                    None => return Err(internal("uninitialized storage pointer declaration")),
                };
                self.assign(&Place::Local(*var), &info.ty, info.cat, &rhs)?;
            }
            TStmt::Assign { lhs, rhs, tuple: false, .. } => {
                let v = self.eval(&rhs[0])?;
                let pl = self.place(&lhs[0])?;
                self.assign(&pl, &lhs[0].ty, lhs[0].cat, &v)?;
            }
            TStmt::Assign { lhs, rhs, .. } => {
                // storage right-hand sides are held as pointers
                let mut tmps = vec![];
                for r in rhs {
                    tmps.push(match self.eval(r)? {
                        Opnd::Stor(p, _) => Opnd::Val(CValue::StorPath(p)),
                        o if r.ty.is_value() => Opnd::Val(self.stor_value(&r.ty, &o)?),
                        o => o,
                    });
                }
                for (l, t) in lhs.iter().zip(&tmps).rev() {
                    let pl = self.place(l)?;
                    self.assign(&pl, &l.ty, l.cat, t)?;
                }
            }
            TStmt::Push { array, value, .. } => {
                let p = self.stor_array(array)?;
                let v = self.eval(value)?;
                let elem = array.ty.array_base().ok_or_else(|| internal("push on a non-array"))?.clone();
                let len = *self.array_length(&p)?;
                let cat = if elem.is_value() { LocCategory::Value } else { LocCategory::Storage };
                self.assign(&Place::Stor(p.child(Step::Index(len))), &elem, cat, &v)?;
                *self.array_length(&p)? += 1;
            }
            TStmt::Pop { array, .. } => {
                let p = self.stor_array(array)?;
                let len = self.array_length(&p)?;
                if *len <= 0 {
                    return Err(OracleError::EmptyPop);
                }
                // the slot keeps its value
                *len -= 1;
            }
            TStmt::Delete { target, .. } => {
                let pl = self.place(target)?;
                let d = match target.cat {
                    _ if target.ty.is_value() => storage_default(self.c, &target.ty),
                    LocCategory::Memory => self.memory_default(&target.ty)?,
                    _ => storage_default(self.c, &target.ty),
                };
                self.write_place(&pl, d)?;
            }
            TStmt::Assert { id, cond, .. } => {
                if let Some(probes) = self.probes.take() {
                    let mut probes = probes;
                    let r = match &cond.kind {
                        TExprKind::Binary(BinOp::Eq, a, _) => self.value_of(a),
                        _ => self.value_of(cond),
                    };
                    if let Ok(v) = &r {
                        probes.push(v.clone());
                    }
                    self.probes = Some(probes);
                    r?;
                    return Ok(None);
                }
                if !self.value_of(cond)?.as_bool()? {
                    return Ok(Some(*id));
                }
            }
        }
        Ok(None)
    }

    fn bind_arg(&mut self, t: &SolType, cat: LocCategory, j: &Json) -> Result<CValue> {
        let bad = || OracleError::Args(format!("`{}` does not fit `{}`", j, t));
        match t {
            SolType::Bool => j.as_bool().map(CValue::Bool).ok_or_else(bad),
            SolType::Int | SolType::Uint | SolType::Address => j.as_i64().map(CValue::Int).ok_or_else(bad),
            _ if cat == LocCategory::StorPtr => {
                let parts = j.get("$storage").and_then(|p| p.as_array()).ok_or_else(bad)?;
                let root = parts.first().and_then(|r| r.as_str()).ok_or_else(bad)?;
                let root_var = self
                    .c
                    .state_vars
                    .iter()
                    .map(|v| self.c.var(*v))
                    .find(|v| v.source_name == root)
                    .ok_or_else(|| OracleError::Args(format!("no state variable `{}`", root)))?;
                let mut ty = root_var.ty.clone();
                let mut path = StorPath { root: root_var.name.clone(), steps: vec![] };
                for s in &parts[1..] {
                    let (step, next) = match (&ty, s) {
                        (SolType::Struct(n), Json::String(m)) => {
                            let (i, mt) = self.c.struct_info(n).member(m).ok_or_else(bad)?;
                            (Step::Member(i), mt.clone())
                        }
                        (SolType::Mapping(_, v), k) => (Step::Index(json_key(k).ok_or_else(bad)?), (**v).clone()),
                        (SolType::DynArray(b) | SolType::FixArray(b, _), k) => {
                            (Step::Index(json_key(k).ok_or_else(bad)?), (**b).clone())
                        }
                        _ => return Err(bad()),
                    };
                    path.steps.push(step);
                    ty = next;
                }
                if ty != *t {
                    return Err(bad());
                }
                Ok(CValue::StorPath(path))
            }
            SolType::Struct(s) => {
                let info = self.c.struct_info(s).clone();
                let obj = j.as_object().ok_or_else(bad)?;
                let r = self.alloc(HeapObj::Struct(vec![]));
                let mut ms = vec![];
                for (m, mt) in &info.members {
                    ms.push(match obj.get(m) {
                        Some(v) => self.bind_arg(mt, LocCategory::Memory, v)?,
                        None => self.memory_default(mt)?,
                    });
                }
                *self.obj_mut(r)? = HeapObj::Struct(ms);
                Ok(CValue::MemRef(r))
            }
            SolType::DynArray(b) | SolType::FixArray(b, _) => {
                let es = j.as_array().ok_or_else(bad)?;
                if let SolType::FixArray(_, n) = t {
                    if es.len() as u64 != *n {
                        return Err(bad());
                    }
                }
                let r = self.alloc(HeapObj::Array(vec![]));
                let mut out = vec![];
                for e in es {
                    out.push(self.bind_arg(b, LocCategory::Memory, e)?);
                }
                *self.obj_mut(r)? = HeapObj::Array(out);
                Ok(CValue::MemRef(r))
            }
            SolType::Mapping(..) => Err(bad()),
        }
    }

    /// Runs a function on the current storage. The constructor resets the
    /// storage to defaults first. Arguments are JSON: numbers, booleans,
    /// arrays and objects for memory data, and `{"$storage": [root, steps..]}`
    /// for storage pointers.
    pub fn call(&mut self, name: &str, args: &[Json]) -> Result<ExecResult> {
        if name == "constructor" && self.c.constructor.is_none() && args.is_empty() {
            // implicit constructor: default initialization only
            *self = Machine { probes: self.probes.take(), unroll: self.unroll, ..Machine::new(self.c) };
            return Ok(ExecResult { outcome: Outcome::Finished, passed: vec![], returns: vec![] });
        }
        let f: &Function = self.c.function(name).ok_or_else(|| OracleError::NoFunction(name.to_string()))?;
        if args.len() != f.params.len() {
            return Err(OracleError::Args(format!("`{}` takes {} arguments, got {}", name, f.params.len(), args.len())));
        }
        self.locals.clear();
        if f.is_constructor {
            *self = Machine { probes: self.probes.take(), unroll: self.unroll, ..Machine::new(self.c) };
        }
        for (v, a) in f.params.iter().zip(args) {
            let info = self.c.var(*v).clone();
            let val = self.bind_arg(&info.ty, info.cat, a)?;
            self.locals.insert(*v, val);
        }
        for v in &f.returns {
            let info = self.c.var(*v).clone();
            if info.ty.is_value() {
                self.locals.insert(*v, storage_default(self.c, &info.ty));
            } else if info.cat == LocCategory::Memory {
                let d = self.memory_default(&info.ty)?;
                self.locals.insert(*v, d);
            }
        }
        let mut passed = vec![];
        let mut outcome = Outcome::Finished;
        for s in &f.body {
            if let Some(id) = self.stmt(s)? {
                outcome = Outcome::AssertFailed(id);
                break;
            }
            if let TStmt::Assert { id, .. } = s {
                passed.push(*id);
            }
        }
        let returns = f
            .returns
            .iter()
            .map(|v| (self.c.var(*v).source_name.clone(), self.locals.get(v).cloned().unwrap_or(CValue::Int(0))))
            .collect();
        Ok(ExecResult { outcome, passed, returns })
    }

    /// Runs `name` recording, for every executed `assert(e == k)`, the value
    /// of `e`. Asserts never fail in this mode.
    pub fn probe(&mut self, name: &str) -> Result<Vec<CValue>> {
        self.probes = Some(vec![]);
        let r = self.call(name, &[]);
        let probes = self.probes.take().unwrap_or_default();
        r.map(|_| probes)
    }

    // canonical JSON

    /// Final storage as canonical JSON keyed by source names.
    pub fn storage_json(&self) -> Json {
        let mut m = Map::new();
        for v in &self.c.state_vars {
            let info = self.c.var(*v);
            let j = self.value_json(&self.storage[&info.name], &info.ty).unwrap_or_else(|e| json!({ "error": e.to_string() }));
            m.insert(info.source_name.clone(), j);
        }
        Json::Object(m)
    }

    /// Canonical JSON of a value of type `t`. Memory references are
    /// dereferenced; pointers print as paths.
    pub fn value_json(&self, v: &CValue, t: &SolType) -> Result<Json> {
        Ok(match (v, t) {
            (CValue::Int(n), _) => json!(n),
            (CValue::Bool(b), _) => json!(b),
            (CValue::StorPath(p), _) => json!({ "storptr": self.path_string(p) }),
            (CValue::Struct(ms), SolType::Struct(s)) => {
                let info = self.c.struct_info(s);
                let mut o = Map::new();
                for ((name, mt), m) in info.members.iter().zip(ms) {
                    o.insert(name.clone(), self.value_json(m, mt)?);
                }
                Json::Object(o)
            }
            (CValue::Array { elems, length, default }, SolType::DynArray(b) | SolType::FixArray(b, _)) => {
                let mut out = vec![];
                for i in 0..*length {
                    out.push(self.value_json(elems.get(&i).unwrap_or(default), b)?);
                }
                array_json(*length, out)
            }
            (CValue::Mapping { entries, default }, SolType::Mapping(k, vt)) => {
                let d = self.value_json(default, vt)?;
                let mut es = vec![];
                for (key, val) in entries {
                    es.push((key_json(k, *key), self.value_json(val, vt)?));
                }
                mapping_json(&default_json(self.c, vt), d, es)
            }
            (CValue::MemRef(a), _) => match (self.obj(*a)?, t) {
                (HeapObj::Struct(ms), SolType::Struct(s)) => {
                    let info = self.c.struct_info(s);
                    let mut o = Map::new();
                    for ((name, mt), m) in info.members.iter().zip(ms) {
                        o.insert(name.clone(), self.value_json(m, mt)?);
                    }
                    Json::Object(o)
                }
                (HeapObj::Array(es), SolType::DynArray(b) | SolType::FixArray(b, _)) => {
                    let mut out = vec![];
                    for e in es {
                        out.push(self.value_json(e, b)?);
                    }
                    array_json(es.len() as i64, out)
                }
                (o, t) => return Err(internal(format!("heap object {:?} as `{}`", o, t))),
            },
            (v, t) => return Err(internal(format!("value {:?} as `{}`", v, t))),
        })
    }

    fn path_string(&self, p: &StorPath) -> String {
        let root = self.c.state_vars.iter().map(|v| self.c.var(*v)).find(|v| v.name == p.root);
        let mut ty = root.map(|v| v.ty.clone());
        let mut s = root.map(|v| v.source_name.clone()).unwrap_or_else(|| p.root.clone());
        for step in &p.steps {
            match (step, ty.clone()) {
                (Step::Member(i), Some(SolType::Struct(n))) => {
                    let (m, mt) = &self.c.struct_info(&n).members[*i];
                    s.push_str(&format!(".{}", m));
                    ty = Some(mt.clone());
                }
                (Step::Index(i), Some(SolType::Mapping(_, v))) => {
                    s.push_str(&format!("[{}]", i));
                    ty = Some(*v);
                }
                (Step::Index(i), Some(SolType::DynArray(b) | SolType::FixArray(b, _))) => {
                    s.push_str(&format!("[{}]", i));
                    ty = Some(*b);
                }
                (st, _) => {
                    s.push_str(&format!("<{:?}>", st));
                    ty = None;
                }
            }
        }
        s
    }
}

fn json_key(j: &Json) -> Option<i64> {
    j.as_i64().or_else(|| j.as_bool().map(|b| b as i64))
}

pub(crate) fn key_json(k: &SolType, key: i64) -> String {
    if *k == SolType::Bool {
        (key != 0).to_string()
    } else {
        key.to_string()
    }
}

pub(crate) fn array_json(length: i64, elems: Vec<Json>) -> Json {
    json!({ "length": length, "elems": elems })
}

/// `{"entries": {...}}` holding the entries that differ from the mapping's
/// default; the default itself is listed only when it is not the type's.
pub(crate) fn mapping_json(type_default: &Json, default: Json, entries: Vec<(String, Json)>) -> Json {
    let mut es = Map::new();
    for (k, v) in entries {
        if v != default {
            es.insert(k, v);
        }
    }
    let mut o = Map::new();
    if default != *type_default {
        o.insert("default".into(), default);
    }
    o.insert("entries".into(), Json::Object(es));
    Json::Object(o)
}

/// Canonical JSON of a type's default value.
pub fn default_json(c: &TypedContract, t: &SolType) -> Json {
    let m = Machine::new(c);
    m.value_json(&storage_default(c, t), t).unwrap_or(Json::Null)
}

impl fmt::Display for StorPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.root)?;
        for s in &self.steps {
            match s {
                Step::Member(i) => write!(f, ".#{}", i)?,
                Step::Index(i) => write!(f, "[{}]", i)?,
            }
        }
        Ok(())
    }
}

/// Runs a function of a freshly initialized contract (the constructor when
/// `name` is `constructor`).
pub fn exec_function(c: &TypedContract, name: &str, args: &[Json]) -> Result<(ExecResult, Json)> {
    let mut m = Machine::new(c);
    let r = m.call(name, args)?;
    Ok((r, m.storage_json()))
}
