// SPDX-License-Identifier: Apache-2.0

//! Statements.

use super::names::stor_arr_name;
use super::{loc_of, sub_cat, Ctx, Loc, Operand, TranslateError};
use crate::frontend::typed::TStmt;
use crate::frontend::{LocCategory, SolType};
use crate::ir::{ident, IrExpr, IrStmt};

impl Ctx<'_> {
    /// The storage array value an array operand denotes.
    fn storage_array(&mut self, a: &Operand) -> Result<IrExpr, TranslateError> {
        match &a.loc {
            Loc::Storage(_) => Ok(a.expr.clone()),
            Loc::Pointer => self.unpack(&a.expr, &a.ty),
            _ => Err(TranslateError::Internal("push/pop on a non-storage array".into())),
        }
    }

    fn default_operand(&mut self, t: &SolType, loc: &Loc) -> Result<Operand, TranslateError> {
        let cat = match loc {
            Loc::Value => LocCategory::Value,
            Loc::Storage(_) => LocCategory::Storage,
            Loc::Memory => LocCategory::Memory,
            Loc::Pointer => return Err(TranslateError::Internal("default value of a storage pointer".into())),
        };
        let d = self.default_value(t, cat)?;
        Ok(Operand::new(d, t.clone(), if t.is_value() { Loc::Value } else { loc_of(t, cat) }))
    }

    pub fn stmt(&mut self, s: &TStmt) -> Result<(), TranslateError> {
        match s {
            TStmt::Decl { var, init, span } => {
                self.span = *span;
                let info = self.contract.var(*var).clone();
                let it = self.map_type(&info.ty, info.cat)?;
                self.prog.declare(info.name.clone(), it);
                let lhs = Operand::new(ident(info.name.clone()), info.ty.clone(), loc_of(&info.ty, info.cat));
                let rhs = match init {
                    Some(e) => self.expr(e)?,
                    None => self.default_operand(&info.ty, &lhs.loc)?,
                };
                self.assign(&lhs, &rhs)
            }
            TStmt::Assign { lhs, rhs, tuple, span } => {
                self.span = *span;
                if !*tuple {
                    let r = self.expr(&rhs[0])?;
                    let l = self.place(&lhs[0])?;
                    return self.assign(&l, &r);
                }
                // right-hand sides left to right into temporaries (storage
                // operands as pointers), then assignments right to left
                let mut tmps = vec![];
                for r in rhs {
                    let v = self.expr(r)?;
                    let cat = match v.loc {
                        Loc::Value => LocCategory::Value,
                        Loc::Storage(_) | Loc::Pointer => LocCategory::StorPtr,
                        Loc::Memory => LocCategory::Memory,
                    };
                    let it = self.map_type(&v.ty, cat)?;
                    let t = Operand::new(self.fresh("tmp", it), v.ty.clone(), loc_of(&v.ty, cat));
                    self.assign(&t, &v)?;
                    tmps.push(t);
                }
                for (l, t) in lhs.iter().zip(&tmps).rev() {
                    let l = self.place(l)?;
                    self.assign(&l, t)?;
                }
                Ok(())
            }
            TStmt::Push { array, value, span } => {
                self.span = *span;
                let a = self.place(array)?;
                let v = self.expr(value)?;
                let elem = array.ty.array_base().cloned().ok_or_else(|| TranslateError::Internal("push on non-array".into()))?;
                let sa = self.storage_array(&a)?;
                let dt = stor_arr_name(&elem);
                let len = sa.clone().select(dt.clone(), "length");
                let cell = sa.clone().select(dt.clone(), "arr").read(len.clone());
                let lhs = Operand::new(cell, elem.clone(), loc_of(&elem, sub_cat(&elem, LocCategory::Storage)));
                self.assign(&lhs, &v)?;
                self.out.push(IrStmt::assign(len.clone(), IrExpr::add(len, IrExpr::Int(1))));
                Ok(())
            }
            TStmt::Pop { array, span } => {
                self.span = *span;
                let a = self.place(array)?;
                let elem = array.ty.array_base().cloned().ok_or_else(|| TranslateError::Internal("pop on non-array".into()))?;
                let sa = self.storage_array(&a)?;
                let dt = stor_arr_name(&elem);
                let len = sa.clone().select(dt.clone(), "length");
                // the removed slot keeps its value: indexing no longer sees
                // it, storage pointers still do
                self.out.push(IrStmt::assign(len.clone(), IrExpr::bin(crate::ir::BinOp::Sub, len, IrExpr::Int(1))));
                Ok(())
            }
            TStmt::Delete { target, span } => {
                self.span = *span;
                let t = self.place(target)?;
                let d = self.default_operand(&t.ty, &t.loc)?;
                self.assign(&t, &d)
            }
            TStmt::Assert { id, cond, span, .. } => {
                self.span = *span;
                let c = self.expr(cond)?;
                self.out.push(IrStmt::Assert(c.expr, *id));
                Ok(())
            }
        }
    }
}
