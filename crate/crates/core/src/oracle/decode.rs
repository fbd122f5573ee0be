// SPDX-License-Identifier: Apache-2.0

//! Decoding of IR evaluation results into the oracle's canonical JSON, so
//! that oracle states and evaluated translations compare structurally.

use serde_json::{json, Map, Value as Json};

use super::{array_json, default_json, key_json, mapping_json};
use crate::frontend::{LocCategory, SolType, TypedContract};
use crate::ir::eval::Env;
use crate::ir::Value;
use crate::translate::names::{arr_heap_name, struct_heap_name};

fn sub(t: &SolType, parent: LocCategory) -> LocCategory {
    if t.is_value() {
        LocCategory::Value
    } else {
        parent
    }
}

fn heap_cell(env: &Env, heap: &str, r: &Value) -> Result<Value, String> {
    match env.get(heap) {
        Some(Value::Array(a)) => Ok(a.get(r)),
        Some(v) => Err(format!("heap `{}` is not an array: {}", heap, v)),
        None => Err(format!("no heap `{}`", heap)),
    }
}

fn int(v: &Value) -> Result<i64, String> {
    v.as_int().map_err(|e| e.to_string())
}

/// Canonical JSON of the IR value `v` encoding an entity of type `t` in
/// category `cat`. Memory values are looked up in the heaps of `env`.
pub fn ir_json(c: &TypedContract, env: &Env, v: &Value, t: &SolType, cat: LocCategory) -> Result<Json, String> {
    if t.is_value() {
        return Ok(match v {
            Value::Int(n) => json!(n),
            Value::Bool(b) => json!(b),
            v => return Err(format!("`{}` value {}", t, v)),
        });
    }
    if cat == LocCategory::Memory {
        let (obj, t) = match t {
            SolType::Struct(s) => (heap_cell(env, &struct_heap_name(s), v)?, t),
            SolType::DynArray(b) | SolType::FixArray(b, _) => (heap_cell(env, &arr_heap_name(b), v)?, t),
            _ => return Err(format!("`{}` in memory", t)),
        };
        return data_json(c, env, &obj, t, LocCategory::Memory);
    }
    match (v, t) {
        (Value::Array(a), SolType::Mapping(k, vt)) => {
            let vc = sub(vt, LocCategory::Storage);
            let td = default_json(c, vt);
            let (default, entries) = if **k == SolType::Bool {
                let mut es = vec![];
                for b in [false, true] {
                    es.push((key_json(k, b as i64), ir_json(c, env, &a.get(&Value::Bool(b)), vt, vc)?));
                }
                (td.clone(), es)
            } else {
                let mut es = vec![];
                for (key, val) in &a.entries {
                    es.push((key_json(k, int(key)?), ir_json(c, env, val, vt, vc)?));
                }
                (ir_json(c, env, &a.default, vt, vc)?, es)
            };
            Ok(mapping_json(&td, default, entries))
        }
        _ => data_json(c, env, v, t, cat),
    }
}

fn data_json(c: &TypedContract, env: &Env, v: &Value, t: &SolType, cat: LocCategory) -> Result<Json, String> {
    let Value::Data(_, ms) = v else { return Err(format!("`{}` value {}", t, v)) };
    match t {
        SolType::Struct(s) => {
            let members = c.struct_info(s).members.iter().filter(|(_, mt)| cat == LocCategory::Storage || !mt.is_mapping());
            let mut o = Map::new();
            for ((name, mt), m) in members.zip(ms) {
                o.insert(name.clone(), ir_json(c, env, m, mt, sub(mt, cat))?);
            }
            Ok(Json::Object(o))
        }
        SolType::DynArray(b) | SolType::FixArray(b, _) => {
            let [Value::Array(arr), len] = ms.as_slice() else { return Err(format!("array value {}", v)) };
            let len = int(len)?;
            let mut es = vec![];
            for i in 0..len {
                es.push(ir_json(c, env, &arr.get(&Value::Int(i)), b, sub(b, cat))?);
            }
            Ok(array_json(len, es))
        }
        _ => Err(format!("`{}` value {}", t, v)),
    }
}
