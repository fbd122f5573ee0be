// SPDX-License-Identifier: Apache-2.0

//! Expressions. Side effects (allocations, conditional temporaries) go to
//! the current statement list, left to right.

use super::names::*;
use super::{loc_of, sub_cat, Ctx, Loc, Operand, PathRoot, PathStep, SPath, TranslateError};
use crate::frontend::syntax::{BinOp as SBin, UnOp};
use crate::frontend::typed::{TExpr, TExprKind};
use crate::frontend::{LocCategory, SolType};
use crate::ir::{ident, BinOp, IrExpr, IrType};

fn ir_op(op: SBin) -> BinOp {
    match op {
        SBin::Add => BinOp::Add,
        SBin::Sub => BinOp::Sub,
        SBin::Eq => BinOp::Eq,
        SBin::Ne => BinOp::Ne,
        SBin::Lt => BinOp::Lt,
        SBin::Le => BinOp::Le,
        SBin::Gt => BinOp::Gt,
        SBin::Ge => BinOp::Ge,
        SBin::And => BinOp::And,
        SBin::Or => BinOp::Or,
    }
}

impl Ctx<'_> {
    /// The storage value a storage-located base denotes, with its path.
    fn storage_base(&mut self, b: &Operand) -> Result<(IrExpr, Option<SPath>), TranslateError> {
        match &b.loc {
            Loc::Storage(p) => Ok((b.expr.clone(), p.clone())),
            Loc::Pointer => {
                let v = self.unpack(&b.expr, &b.ty)?;
                Ok((v, Some(SPath { root: PathRoot::Ptr(b.expr.clone(), b.ty.clone()), steps: vec![] })))
            }
            _ => Err(TranslateError::Internal("expected a storage operand".into())),
        }
    }

    /// Result operand of a member or index access yielding `e`'s type.
    fn access_result(e: &TExpr, expr: IrExpr, base_loc: &Loc, path: Option<SPath>, step: PathStep) -> Operand {
        let loc = if e.ty.is_value() {
            Loc::Value
        } else if *base_loc == Loc::Memory {
            Loc::Memory
        } else {
            Loc::Storage(path.map(|mut p| {
                p.steps.push(step);
                p
            }))
        };
        Operand::new(expr, e.ty.clone(), loc)
    }

    /// Translates an expression in rvalue position.
    fn rvalue(&mut self, e: &TExpr) -> Result<Operand, TranslateError> {
        let saved = std::mem::replace(&mut self.lvalue, false);
        let r = self.expr(e);
        self.lvalue = saved;
        r
    }

    /// Translates an assignment target. Storage array elements are then
    /// addressed directly, even past the length.
    pub fn place(&mut self, e: &TExpr) -> Result<Operand, TranslateError> {
        let saved = std::mem::replace(&mut self.lvalue, true);
        let r = self.expr(e);
        self.lvalue = saved;
        r
    }

    pub fn expr(&mut self, e: &TExpr) -> Result<Operand, TranslateError> {
        match &e.kind {
            TExprKind::Var(v) => {
                let info = self.contract.var(*v);
                let name = info.name.clone();
                let loc = match loc_of(&info.ty, info.cat) {
                    Loc::Storage(_) => Loc::Storage(Some(SPath { root: PathRoot::Var(name.clone()), steps: vec![] })),
                    l => l,
                };
                Ok(Operand::new(ident(name), info.ty.clone(), loc))
            }
            TExprKind::Member(base, m, _) => {
                let b = self.expr(base)?;
                let s = base.ty.struct_name().ok_or_else(|| TranslateError::Internal("member of non-struct".into()))?;
                self.map_type(&base.ty, if b.loc == Loc::Memory { LocCategory::Memory } else { LocCategory::Storage })?;
                if b.loc == Loc::Memory {
                    let v = ident(struct_heap_name(s)).read(b.expr.clone()).select(mem_struct_name(s), m.clone());
                    return Ok(Self::access_result(e, v, &b.loc, None, PathStep::Name(m.clone())));
                }
                let (v, path) = self.storage_base(&b)?;
                let v = v.select(stor_struct_name(s), m.clone());
                Ok(Self::access_result(e, v, &b.loc, path, PathStep::Name(m.clone())))
            }
            TExprKind::Length(base) => {
                let b = self.expr(base)?;
                let elem = base.ty.array_base().ok_or_else(|| TranslateError::Internal("length of non-array".into()))?;
                // fixed-size arrays never change length
                if let SolType::FixArray(_, n) = &base.ty {
                    return Ok(Operand::new(IrExpr::Int(*n as i64), SolType::Uint, Loc::Value));
                }
                let v = if b.loc == Loc::Memory {
                    self.map_type(&base.ty, LocCategory::Memory)?;
                    ident(arr_heap_name(elem)).read(b.expr.clone()).select(mem_arr_name(elem), "length")
                } else {
                    self.storage_base(&b)?.0.select(stor_arr_name(elem), "length")
                };
                Ok(Operand::new(v, SolType::Uint, Loc::Value))
            }
            TExprKind::Index(base, idx) => {
                let b = self.expr(base)?;
                let i = self.rvalue(idx)?;
                let step = PathStep::Index(i.expr.clone());
                if let Some(elem) = base.ty.array_base() {
                    if b.loc == Loc::Memory {
                        self.map_type(&base.ty, LocCategory::Memory)?;
                        let v = ident(arr_heap_name(elem)).read(b.expr.clone()).select(mem_arr_name(elem), "arr").read(i.expr);
                        return Ok(Self::access_result(e, v, &b.loc, None, step));
                    }
                    let (v, path) = self.storage_base(&b)?;
                    let mut r = v.clone().select(stor_arr_name(elem), "arr").read(i.expr.clone());
                    if !self.lvalue {
                        // reads past the length see the default element
                        let len = match &base.ty {
                            SolType::FixArray(_, n) => IrExpr::Int(*n as i64),
                            _ => v.select(stor_arr_name(elem), "length"),
                        };
                        let d = self.default_value(elem, LocCategory::Storage)?;
                        r = IrExpr::ite(IrExpr::bin(BinOp::Lt, i.expr, len), r, d);
                    }
                    Ok(Self::access_result(e, r, &b.loc, path, step))
                } else {
                    let (v, path) = self.storage_base(&b)?;
                    Ok(Self::access_result(e, v.read(i.expr), &b.loc, path, step))
                }
            }
            TExprKind::Cond(c, t, f) => {
                let saved = std::mem::replace(&mut self.lvalue, false);
                let r = self.cond(e, c, t, f);
                self.lvalue = saved;
                r
            }
            TExprKind::NewArray(len) => {
                let l = self.expr(len)?;
                let elem = e.ty.array_base().cloned().ok_or_else(|| TranslateError::Internal("new of non-array".into()))?;
                self.map_type(&e.ty, LocCategory::Memory)?;
                let r = self.alloc();
                let arr = if elem.is_value() {
                    let et = self.map_type(&elem, LocCategory::Value)?;
                    let d = self.default_value(&elem, LocCategory::Value)?;
                    IrExpr::const_array(IrType::Int, et, d)
                } else {
                    let (bound, exact) = match len.kind {
                        TExprKind::IntLit(n) if n >= 0 => (n as u64, true),
                        _ => self.element_bound(&e.ty, &l.expr, "new array with reference-type elements and non-constant length")?,
                    };
                    let mut acc = IrExpr::const_array(IrType::Int, IrType::Int, IrExpr::Int(0));
                    for k in 0..bound as i64 {
                        let d = self.default_value(&elem, LocCategory::Memory)?;
                        let w = acc.clone().write(IrExpr::Int(k), d);
                        acc = if exact { w } else { IrExpr::ite(IrExpr::bin(BinOp::Lt, IrExpr::Int(k), l.expr.clone()), w, acc) };
                    }
                    acc
                };
                let obj = IrExpr::Construct(mem_arr_name(&elem), vec![arr, l.expr]);
                self.out.push(crate::ir::IrStmt::assign(ident(arr_heap_name(&elem)).read(r.clone()), obj));
                Ok(Operand::new(r, e.ty.clone(), Loc::Memory))
            }
            TExprKind::StructLit(s, args) => {
                self.map_type(&e.ty, LocCategory::Memory)?;
                let info = self.contract.struct_info(s).clone();
                let r = self.alloc();
                for (a, (m, mt)) in args.iter().zip(&info.members) {
                    let v = self.expr(a)?;
                    let cell = ident(struct_heap_name(s)).read(r.clone()).select(mem_struct_name(s), m.clone());
                    let lhs = Operand::new(cell, mt.clone(), loc_of(mt, sub_cat(mt, LocCategory::Memory)));
                    self.assign(&lhs, &v)?;
                }
                Ok(Operand::new(r, e.ty.clone(), Loc::Memory))
            }
            TExprKind::IntLit(n) => Ok(Operand::new(IrExpr::Int(*n), e.ty.clone(), Loc::Value)),
            TExprKind::BoolLit(b) => Ok(Operand::new(IrExpr::Bool(*b), e.ty.clone(), Loc::Value)),
            TExprKind::Binary(op, a, b) => {
                let a = self.expr(a)?;
                let b = self.expr(b)?;
                Ok(Operand::new(IrExpr::bin(ir_op(*op), a.expr, b.expr), e.ty.clone(), Loc::Value))
            }
            TExprKind::Unary(op, a) => {
                let a = self.expr(a)?;
                let v = match op {
                    UnOp::Not => IrExpr::not(a.expr),
                    UnOp::Neg => IrExpr::Neg(Box::new(a.expr)),
                };
                Ok(Operand::new(v, e.ty.clone(), Loc::Value))
            }
        }
    }

    fn cond(&mut self, e: &TExpr, c: &TExpr, t: &TExpr, f: &TExpr) -> Result<Operand, TranslateError> {
        let c = self.expr(c)?;
        if e.ty.is_value() {
            let t = self.expr(t)?;
            let f = self.expr(f)?;
            return Ok(Operand::new(IrExpr::ite(c.expr, t.expr, f.expr), e.ty.clone(), Loc::Value));
        }
        let it = self.map_type(&e.ty, e.cat)?;
        let loc = loc_of(&e.ty, e.cat);
        let vt = Operand::new(self.fresh("cond_t", it.clone()), e.ty.clone(), loc.clone());
        let vf = Operand::new(self.fresh("cond_f", it), e.ty.clone(), loc.clone());
        let t = self.expr(t)?;
        self.assign(&vt, &t)?;
        let f = self.expr(f)?;
        self.assign(&vf, &f)?;
        Ok(Operand::new(IrExpr::ite(c.expr, vt.expr, vf.expr), e.ty.clone(), loc))
    }
}
