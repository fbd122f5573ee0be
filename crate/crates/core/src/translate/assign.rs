// SPDX-License-Identifier: Apache-2.0

//! Assignment between operands of any type and location.

use super::names::*;
use super::{Ctx, Loc, Operand, TranslateError};
use crate::frontend::{LocCategory, SolType};
use crate::ir::{ident, BinOp, IrExpr, IrStmt, IrType};

impl Ctx<'_> {
    pub fn assign(&mut self, lhs: &Operand, rhs: &Operand) -> Result<(), TranslateError> {
        let t = &lhs.ty;
        if t.is_value() {
            self.out.push(IrStmt::assign(lhs.expr.clone(), rhs.expr.clone()));
            return Ok(());
        }
        let rhs_ty = rhs.ty.clone();
        match (&lhs.loc, &rhs.loc) {
            (Loc::Pointer, Loc::Storage(Some(path))) => {
                let p = self.pack(path, &rhs_ty)?;
                self.out.push(IrStmt::assign(lhs.expr.clone(), p));
            }
            (Loc::Pointer, Loc::Pointer) => self.out.push(IrStmt::assign(lhs.expr.clone(), rhs.expr.clone())),
            // mappings are never copied
            _ if t.is_mapping() => {}
            (Loc::Storage(_), Loc::Storage(_)) => self.out.push(IrStmt::assign(lhs.expr.clone(), rhs.expr.clone())),
            (Loc::Storage(_), Loc::Pointer) => {
                let v = self.unpack(&rhs.expr, &rhs_ty)?;
                self.out.push(IrStmt::assign(lhs.expr.clone(), v));
            }
            (Loc::Storage(_), Loc::Memory) => {
                let v = self.mem_to_stor(t, &rhs.expr, &lhs.expr)?;
                self.out.push(IrStmt::assign(lhs.expr.clone(), v));
            }
            (Loc::Memory, Loc::Memory) => self.out.push(IrStmt::assign(lhs.expr.clone(), rhs.expr.clone())),
            (Loc::Memory, Loc::Storage(_)) => {
                let r = self.stor_to_mem(t, &rhs.expr)?;
                self.out.push(IrStmt::assign(lhs.expr.clone(), r));
            }
            (Loc::Memory, Loc::Pointer) => {
                let v = self.unpack(&rhs.expr, &rhs_ty)?;
                let r = self.stor_to_mem(t, &v)?;
                self.out.push(IrStmt::assign(lhs.expr.clone(), r));
            }
            (l, r) => {
                return Err(TranslateError::Internal(format!("assignment of `{}` from {:?} to {:?}", t, r, l)));
            }
        }
        Ok(())
    }

    /// Storage value equal to the memory entity `m` points to. `old` is the
    /// storage value being overwritten.
    fn mem_to_stor(&mut self, t: &SolType, m: &IrExpr, old: &IrExpr) -> Result<IrExpr, TranslateError> {
        self.map_type(t, LocCategory::Storage)?;
        self.map_type(t, LocCategory::Memory)?;
        match t {
            SolType::Struct(s) => {
                let info = self.contract.struct_info(s).clone();
                let obj = ident(struct_heap_name(s)).read(m.clone());
                let mut args = vec![];
                for (name, mt) in &info.members {
                    let old_m = old.clone().select(stor_struct_name(s), name.clone());
                    args.push(if mt.is_mapping() {
                        old_m
                    } else if mt.is_value() {
                        obj.clone().select(mem_struct_name(s), name.clone())
                    } else {
                        self.mem_to_stor(mt, &obj.clone().select(mem_struct_name(s), name.clone()), &old_m)?
                    });
                }
                Ok(IrExpr::Construct(stor_struct_name(s), args))
            }
            SolType::DynArray(b) | SolType::FixArray(b, _) => {
                let obj = ident(arr_heap_name(b)).read(m.clone());
                let arr = obj.clone().select(mem_arr_name(b), "arr");
                let len = match t {
                    SolType::FixArray(_, n) => IrExpr::Int(*n as i64),
                    _ => obj.select(mem_arr_name(b), "length"),
                };
                if b.is_value() {
                    return Ok(IrExpr::Construct(stor_arr_name(b), vec![arr, len]));
                }
                let (bound, exact) = self.element_bound(t, &len, "element-wise copy of a memory array with reference-type elements")?;
                let et = self.map_type(b, LocCategory::Storage)?;
                let d = self.default_value(b, LocCategory::Storage)?;
                let mut acc = IrExpr::const_array(IrType::Int, et, d);
                let old_arr = old.clone().select(stor_arr_name(b), "arr");
                for i in 0..bound as i64 {
                    let k = IrExpr::Int(i);
                    let e = self.mem_to_stor(b, &arr.clone().read(k.clone()), &old_arr.clone().read(k.clone()))?;
                    let w = acc.clone().write(k.clone(), e);
                    acc = if exact { w } else { IrExpr::ite(IrExpr::bin(BinOp::Lt, k, len.clone()), w, acc) };
                }
                Ok(IrExpr::Construct(stor_arr_name(b), vec![acc, len]))
            }
            _ => Err(TranslateError::Internal(format!("copy of `{}` to storage", t))),
        }
    }

    /// Allocates a memory copy of the storage value `s`; returns the pointer.
    fn stor_to_mem(&mut self, t: &SolType, s: &IrExpr) -> Result<IrExpr, TranslateError> {
        self.map_type(t, LocCategory::Storage)?;
        self.map_type(t, LocCategory::Memory)?;
        let r = self.alloc();
        match t {
            SolType::Struct(n) => {
                let info = self.contract.struct_info(n).clone();
                let mut args = vec![];
                for (name, mt) in info.members.iter().filter(|(_, mt)| !mt.is_mapping()) {
                    let sm = s.clone().select(stor_struct_name(n), name.clone());
                    args.push(if mt.is_value() { sm } else { self.stor_to_mem(mt, &sm)? });
                }
                let obj = IrExpr::Construct(mem_struct_name(n), args);
                self.out.push(IrStmt::assign(ident(struct_heap_name(n)).read(r.clone()), obj));
            }
            SolType::DynArray(b) | SolType::FixArray(b, _) => {
                let arr = s.clone().select(stor_arr_name(b), "arr");
                let len = match t {
                    SolType::FixArray(_, k) => IrExpr::Int(*k as i64),
                    _ => s.clone().select(stor_arr_name(b), "length"),
                };
                let elems = if b.is_value() {
                    arr
                } else {
                    let (bound, exact) =
                        self.element_bound(t, &len, "element-wise copy of a storage array with reference-type elements")?;
                    let mut acc = IrExpr::const_array(IrType::Int, IrType::Int, IrExpr::Int(0));
                    for i in 0..bound as i64 {
                        let k = IrExpr::Int(i);
                        let p = self.stor_to_mem(b, &arr.clone().read(k.clone()))?;
                        let w = acc.clone().write(k.clone(), p);
                        acc = if exact { w } else { IrExpr::ite(IrExpr::bin(BinOp::Lt, k, len.clone()), w, acc) };
                    }
                    acc
                };
                let obj = IrExpr::Construct(mem_arr_name(b), vec![elems, len]);
                self.out.push(IrStmt::assign(ident(arr_heap_name(b)).read(r.clone()), obj));
            }
            _ => return Err(TranslateError::Internal(format!("copy of `{}` to memory", t))),
        }
        Ok(r)
    }
}
