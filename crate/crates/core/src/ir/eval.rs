// SPDX-License-Identifier: Apache-2.0

//! Big-step concrete evaluator for IR programs, used as a testing oracle for
//! the IR transformations and the translation.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use super::{BinOp, IrError, IrExpr, IrStmt, IrType, SmtProgram};

/// Total map with a default. Entries equal to the default are never stored,
/// so structural equality is extensional equality.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArrayVal {
    /// Boolean index domain; such arrays keep `default` as the value at `false`.
    pub bool_index: bool,
    pub default: Box<Value>,
    pub entries: BTreeMap<Value, Value>,
}

impl ArrayVal {
    pub fn constant(bool_index: bool, v: Value) -> Self {
        ArrayVal { bool_index, default: Box::new(v), entries: BTreeMap::new() }
    }

    pub fn get(&self, k: &Value) -> Value {
        self.entries.get(k).cloned().unwrap_or_else(|| (*self.default).clone())
    }

    pub fn set(&mut self, k: Value, v: Value) {
        if self.bool_index {
            let f = if k == Value::Bool(false) { v.clone() } else { self.get(&Value::Bool(false)) };
            let t = if k == Value::Bool(true) { v } else { self.get(&Value::Bool(true)) };
            self.entries.clear();
            if t != f {
                self.entries.insert(Value::Bool(true), t);
            }
            *self.default = f;
        } else if v == *self.default {
            self.entries.remove(&k);
        } else {
            self.entries.insert(k, v);
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Int(i64),
    Bool(bool),
    Array(ArrayVal),
    Data(String, Vec<Value>),
}

impl Value {
    pub fn as_int(&self) -> Result<i64, IrError> {
        match self {
            Value::Int(n) => Ok(*n),
            v => Err(IrError::Eval(format!("expected integer, found {}", v))),
        }
    }

    pub fn as_bool(&self) -> Result<bool, IrError> {
        match self {
            Value::Bool(b) => Ok(*b),
            v => Err(IrError::Eval(format!("expected boolean, found {}", v))),
        }
    }

    pub fn as_array(&self) -> Result<&ArrayVal, IrError> {
        match self {
            Value::Array(a) => Ok(a),
            v => Err(IrError::Eval(format!("expected array, found {}", v))),
        }
    }

    /// Default value of an IR type: 0, false, constant arrays of defaults,
    /// and constructors of member defaults.
    pub fn default_of(p: &SmtProgram, t: &IrType) -> Result<Value, IrError> {
        Ok(match t {
            IrType::Int => Value::Int(0),
            IrType::Bool => Value::Bool(false),
            IrType::Array(i, e) => Value::Array(ArrayVal::constant(**i == IrType::Bool, Value::default_of(p, e)?)),
            IrType::Datatype(d) => {
                let def = p.datatype(d)?;
                let mut ms = vec![];
                for (_, mt) in &def.members {
                    ms.push(Value::default_of(p, mt)?);
                }
                Value::Data(d.clone(), ms)
            }
        })
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{}", n),
            Value::Bool(b) => write!(f, "{}", b),
            Value::Array(a) => {
                write!(f, "{{")?;
                for (k, v) in &a.entries {
                    write!(f, "{}: {}, ", k, v)?;
                }
                write!(f, "_: {}}}", a.default)
            }
            Value::Data(n, ms) => {
                write!(f, "{}(", n)?;
                for (k, m) in ms.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{}", m)?;
                }
                write!(f, ")")
            }
        }
    }
}

pub type Env = HashMap<String, Value>;

#[derive(Clone, Debug, PartialEq)]
pub enum EvalOutcome {
    Finished(Env),
    AssumeViolated,
    AssertFailed(usize),
}

fn overflow() -> IrError {
    IrError::Eval("integer overflow".into())
}

pub fn eval_expr(p: &SmtProgram, env: &Env, e: &IrExpr) -> Result<Value, IrError> {
    let ev = |x: &IrExpr| eval_expr(p, env, x);
    Ok(match e {
        IrExpr::Ident(n) => match env.get(n) {
            Some(v) => v.clone(),
            None => match p.decls.get(n) {
                Some(t) => Value::default_of(p, t)?,
                None => return Err(IrError::Eval(format!("unbound identifier `{}`", n))),
            },
        },
        IrExpr::Int(n) => Value::Int(*n),
        IrExpr::Bool(b) => Value::Bool(*b),
        IrExpr::Read(a, i) => {
            let a = ev(a)?;
            a.as_array()?.get(&ev(i)?)
        }
        IrExpr::Write(a, i, v) => {
            let mut arr = ev(a)?.as_array()?.clone();
            arr.set(ev(i)?, ev(v)?);
            Value::Array(arr)
        }
        IrExpr::ConstArray(it, _, v) => Value::Array(ArrayVal::constant(*it == IrType::Bool, ev(v)?)),
        IrExpr::Construct(n, args) => {
            let mut vs = vec![];
            for a in args {
                vs.push(ev(a)?);
            }
            Value::Data(n.clone(), vs)
        }
        IrExpr::Select(d, dt, m) => match ev(d)? {
            Value::Data(n, mut vs) if &n == dt => {
                let k = p
                    .datatype(dt)?
                    .member_index(m)
                    .ok_or_else(|| IrError::Eval(format!("no member `{}` in `{}`", m, dt)))?;
                vs.swap_remove(k)
            }
            v => return Err(IrError::Eval(format!("select `.{}` on {}", m, v))),
        },
        IrExpr::Ite(c, t, f) => {
            if ev(c)?.as_bool()? {
                ev(t)?
            } else {
                ev(f)?
            }
        }
        IrExpr::Bin(op, a, b) => {
            let (a, b) = (ev(a)?, ev(b)?);
            match op {
                BinOp::Add => Value::Int(a.as_int()?.checked_add(b.as_int()?).ok_or_else(overflow)?),
                BinOp::Sub => Value::Int(a.as_int()?.checked_sub(b.as_int()?).ok_or_else(overflow)?),
                BinOp::Eq => Value::Bool(a == b),
                BinOp::Ne => Value::Bool(a != b),
                BinOp::Lt => Value::Bool(a.as_int()? < b.as_int()?),
                BinOp::Le => Value::Bool(a.as_int()? <= b.as_int()?),
                BinOp::Gt => Value::Bool(a.as_int()? > b.as_int()?),
                BinOp::Ge => Value::Bool(a.as_int()? >= b.as_int()?),
                BinOp::And => Value::Bool(a.as_bool()? && b.as_bool()?),
                BinOp::Or => Value::Bool(a.as_bool()? || b.as_bool()?),
            }
        }
        IrExpr::Not(a) => Value::Bool(!ev(a)?.as_bool()?),
        IrExpr::Neg(a) => Value::Int(ev(a)?.as_int()?.checked_neg().ok_or_else(overflow)?),
    })
}

/// Runs `p` from `env`; declared variables missing from `env` start at
/// their type's default value.
pub fn eval_program(p: &SmtProgram, env: &Env) -> Result<EvalOutcome, IrError> {
    let mut env = env.clone();
    for (n, t) in &p.decls {
        if !env.contains_key(n) {
            env.insert(n.clone(), Value::default_of(p, t)?);
        }
    }
    match exec(p, &mut env, &p.stmts)? {
        None => Ok(EvalOutcome::Finished(env)),
        Some(o) => Ok(o),
    }
}

/// Updates the location denoted by `lhs` (evaluated in the current state).
/// Composite left-hand sides are handled directly, independent of
/// `normalize_lhs`.
fn store(p: &SmtProgram, env: &mut Env, lhs: &IrExpr, v: Value) -> Result<(), IrError> {
    match lhs {
        IrExpr::Ident(x) => {
            env.insert(x.clone(), v);
            Ok(())
        }
        IrExpr::Read(a, i) => {
            let k = eval_expr(p, env, i)?;
            let mut arr = eval_expr(p, env, a)?.as_array()?.clone();
            arr.set(k, v);
            store(p, env, a, Value::Array(arr))
        }
        IrExpr::Select(d, dt, m) => {
            let k = p
                .datatype(dt)?
                .member_index(m)
                .ok_or_else(|| IrError::Eval(format!("no member `{}` in `{}`", m, dt)))?;
            match eval_expr(p, env, d)? {
                Value::Data(n, mut vs) if &n == dt => {
                    vs[k] = v;
                    store(p, env, d, Value::Data(n, vs))
                }
                other => Err(IrError::Eval(format!("select `.{}` on {}", m, other))),
            }
        }
        IrExpr::Ite(c, t, f) => {
            if eval_expr(p, env, c)?.as_bool()? {
                store(p, env, t, v)
            } else {
                store(p, env, f, v)
            }
        }
        other => Err(IrError::Eval(format!("`{}` is not assignable", other))),
    }
}

fn exec(p: &SmtProgram, env: &mut Env, ss: &[IrStmt]) -> Result<Option<EvalOutcome>, IrError> {
    for s in ss {
        match s {
            IrStmt::Assign(l, r) => {
                let v = eval_expr(p, env, r)?;
                store(p, env, l, v)?;
            }
            IrStmt::Ite(c, t, e) => {
                let branch = if eval_expr(p, env, c)?.as_bool()? { t } else { e };
                if let Some(o) = exec(p, env, branch)? {
                    return Ok(Some(o));
                }
            }
            IrStmt::Assume(c) => {
                if !eval_expr(p, env, c)?.as_bool()? {
                    return Ok(Some(EvalOutcome::AssumeViolated));
                }
            }
            IrStmt::Assert(c, id) => {
                if !eval_expr(p, env, c)?.as_bool()? {
                    return Ok(Some(EvalOutcome::AssertFailed(*id)));
                }
            }
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::ident;

    #[test]
    fn arithmetic_and_const_arrays() {
        let mut p = SmtProgram::default();
        p.declare("x", IrType::Int);
        p.stmts = vec![IrStmt::Assign(ident("x"), IrExpr::add(IrExpr::Int(1), IrExpr::Int(2)))];
        let EvalOutcome::Finished(env) = eval_program(&p, &Env::new()).unwrap() else { panic!() };
        assert_eq!(env["x"], Value::Int(3));
        let k = IrExpr::const_array(IrType::Int, IrType::Int, IrExpr::Int(7)).read(IrExpr::Int(12345));
        assert_eq!(eval_expr(&p, &Env::new(), &k).unwrap(), Value::Int(7));
    }

    #[test]
    fn assume_stops_before_assert() {
        let mut p = SmtProgram::default();
        p.stmts = vec![IrStmt::Assume(IrExpr::Bool(false)), IrStmt::Assert(IrExpr::Bool(false), 0)];
        assert_eq!(eval_program(&p, &Env::new()).unwrap(), EvalOutcome::AssumeViolated);
    }

    #[test]
    fn arrays_are_extensional() {
        let mut a = ArrayVal::constant(false, Value::Int(0));
        a.set(Value::Int(3), Value::Int(5));
        a.set(Value::Int(3), Value::Int(0));
        assert_eq!(a, ArrayVal::constant(false, Value::Int(0)));
        let mut b = ArrayVal::constant(true, Value::Int(1));
        b.set(Value::Bool(true), Value::Int(2));
        b.set(Value::Bool(false), Value::Int(2));
        assert_eq!(b, ArrayVal::constant(true, Value::Int(2)));
    }
}
