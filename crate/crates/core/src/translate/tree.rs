// SPDX-License-Identifier: Apache-2.0

//! Storage trees and the path encoding of storage pointers.
//!
//! A pointer to a storage entity of type `T` is an `[int]int` array holding
//! the edge ordinals and index values of the path from the contract root to
//! the entity in the tree of all storage entities of type `T`.

use indexmap::IndexMap;

use super::names::{stor_arr_name, stor_struct_name};
use super::TranslateError;
use crate::frontend::typed::{StructInfo, TypedContract, VarKind};
use crate::frontend::{LocCategory, SolType};
use crate::ir::{IrExpr, IrType};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Contract,
    Struct(String),
    /// Array node; carries the element type.
    Array(SolType),
    Mapping { bool_key: bool },
    Leaf,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub kind: NodeKind,
    pub edges: Vec<Edge>,
}

/// An edge's ordinal is its position in the parent's edge list.
#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    /// State variable or member name; `None` for index steps.
    pub label: Option<String>,
    pub target: Node,
}

/// One step of a storage path.
#[derive(Clone, Debug, PartialEq)]
pub enum PathStep {
    Name(String),
    Index(IrExpr),
}

#[derive(Clone, Debug, PartialEq)]
pub struct StorageTree {
    pub target: SolType,
    pub root: Node,
}

fn subtree(structs: &IndexMap<String, StructInfo>, ty: &SolType, target: &SolType) -> Option<Node> {
    if ty == target {
        return Some(Node { kind: NodeKind::Leaf, edges: vec![] });
    }
    match ty {
        SolType::Struct(s) => {
            let edges: Vec<Edge> = structs[s.as_str()]
                .members
                .iter()
                .filter_map(|(m, mt)| {
                    subtree(structs, mt, target).map(|n| Edge { label: Some(m.clone()), target: n })
                })
                .collect();
            (!edges.is_empty()).then(|| Node { kind: NodeKind::Struct(s.clone()), edges })
        }
        SolType::DynArray(b) | SolType::FixArray(b, _) => subtree(structs, b, target).map(|n| Node {
            kind: NodeKind::Array((**b).clone()),
            edges: vec![Edge { label: None, target: n }],
        }),
        SolType::Mapping(k, v) => subtree(structs, v, target).map(|n| Node {
            kind: NodeKind::Mapping { bool_key: **k == SolType::Bool },
            edges: vec![Edge { label: None, target: n }],
        }),
        _ => None,
    }
}

fn ptr_at(ptr: &IrExpr, d: usize) -> IrExpr {
    ptr.clone().read(IrExpr::Int(d as i64))
}

impl StorageTree {
    /// The tree of storage entities of type `target` reachable from `roots`
    /// (state variables in declaration order, then default contexts).
    pub fn build(structs: &IndexMap<String, StructInfo>, roots: &[(String, SolType)], target: &SolType) -> Self {
        let edges = roots
            .iter()
            .filter_map(|(n, t)| subtree(structs, t, target).map(|s| Edge { label: Some(n.clone()), target: s }))
            .collect();
        StorageTree { target: target.clone(), root: Node { kind: NodeKind::Contract, edges } }
    }

    pub fn leaf_count(&self) -> usize {
        fn go(n: &Node) -> usize {
            if n.kind == NodeKind::Leaf {
                1
            } else {
                n.edges.iter().map(|e| go(&e.target)).sum()
            }
        }
        go(&self.root)
    }

    pub fn is_empty(&self) -> bool {
        self.root.edges.is_empty()
    }

    /// Encodes a path (starting with the root variable name) as a pointer.
    pub fn pack(&self, steps: &[PathStep]) -> Result<IrExpr, TranslateError> {
        let mut result = IrExpr::const_array(IrType::Int, IrType::Int, IrExpr::Int(0));
        let mut node = &self.root;
        for (d, step) in steps.iter().enumerate() {
            let pos = IrExpr::Int(d as i64);
            match (&node.kind, step) {
                (NodeKind::Contract | NodeKind::Struct(_), PathStep::Name(n)) => {
                    let i = node.edges.iter().position(|e| e.label.as_deref() == Some(n.as_str())).ok_or_else(|| {
                        TranslateError::Internal(format!("`{}` is not on a path to `{}`", n, self.target))
                    })?;
                    result = result.write(pos, IrExpr::Int(i as i64));
                    node = &node.edges[i].target;
                }
                (NodeKind::Array(_), PathStep::Index(k)) => {
                    result = result.write(pos, k.clone());
                    node = &node.edges[0].target;
                }
                (NodeKind::Mapping { bool_key }, PathStep::Index(k)) => {
                    let k = if *bool_key { IrExpr::ite(k.clone(), IrExpr::Int(1), IrExpr::Int(0)) } else { k.clone() };
                    result = result.write(pos, k);
                    node = &node.edges[0].target;
                }
                _ => return Err(TranslateError::Internal(format!("path does not fit the storage tree of `{}`", self.target))),
            }
        }
        if node.kind != NodeKind::Leaf {
            return Err(TranslateError::Internal(format!("path does not end at a `{}` entity", self.target)));
        }
        Ok(result)
    }

    /// Decodes `ptr` into a conditional over the leaves of the tree. At each
    /// leaf `leaf` receives the decoded path and the storage expression it
    /// denotes. Edges are folded in reverse so the first edge is the
    /// outermost case; the last edge is the unguarded fall-through.
    pub fn fold(
        &self,
        ptr: &IrExpr,
        leaf: &mut dyn FnMut(&[PathStep], &IrExpr) -> Result<IrExpr, TranslateError>,
    ) -> Result<IrExpr, TranslateError> {
        if self.is_empty() {
            return Err(TranslateError::Internal(format!("no storage entities of type `{}`", self.target)));
        }
        let mut steps = vec![];
        fold_node(ptr, &self.root, 0, &mut steps, &IrExpr::Bool(false), leaf)
    }

    /// `unpack(ptr)`: the storage expression a pointer denotes.
    pub fn unpack(&self, ptr: &IrExpr) -> Result<IrExpr, TranslateError> {
        self.fold(ptr, &mut |_, e| Ok(e.clone()))
    }
}

fn fold_node(
    ptr: &IrExpr,
    node: &Node,
    d: usize,
    steps: &mut Vec<PathStep>,
    sub: &IrExpr,
    leaf: &mut dyn FnMut(&[PathStep], &IrExpr) -> Result<IrExpr, TranslateError>,
) -> Result<IrExpr, TranslateError> {
    match &node.kind {
        NodeKind::Leaf => leaf(steps, sub),
        NodeKind::Contract | NodeKind::Struct(_) => {
            let mut result: Option<IrExpr> = None;
            for (i, e) in node.edges.iter().enumerate().rev() {
                let label = e.label.clone().unwrap_or_default();
                let next = match &node.kind {
                    NodeKind::Struct(s) => sub.clone().select(stor_struct_name(s), label.clone()),
                    _ => IrExpr::Ident(label.clone()),
                };
                steps.push(PathStep::Name(label));
                let branch = fold_node(ptr, &e.target, d + 1, steps, &next, leaf)?;
                steps.pop();
                result = Some(match result {
                    None => branch,
                    Some(r) => IrExpr::ite(IrExpr::eq(ptr_at(ptr, d), IrExpr::Int(i as i64)), branch, r),
                });
            }
            Ok(result.expect("non-leaf nodes have edges"))
        }
        NodeKind::Array(base) => {
            let k = ptr_at(ptr, d);
            let next = sub.clone().select(stor_arr_name(base), "arr").read(k.clone());
            steps.push(PathStep::Index(k));
            let r = fold_node(ptr, &node.edges[0].target, d + 1, steps, &next, leaf);
            steps.pop();
            r
        }
        NodeKind::Mapping { bool_key } => {
            let k = if *bool_key {
                IrExpr::bin(crate::ir::BinOp::Ne, ptr_at(ptr, d), IrExpr::Int(0))
            } else {
                ptr_at(ptr, d)
            };
            let next = sub.clone().read(k.clone());
            steps.push(PathStep::Index(k));
            let r = fold_node(ptr, &node.edges[0].target, d + 1, steps, &next, leaf);
            steps.pop();
            r
        }
    }
}

/// The storage roots of a contract: its state variables followed by one
/// default context per pointee type that would otherwise have no storage
/// entities.
#[derive(Clone, Debug)]
pub struct StorageLayout {
    pub roots: Vec<(String, SolType)>,
    /// Number of leading roots that are real state variables.
    pub state_count: usize,
}

/// Name of the default context for pointers to `t`.
pub fn defctx_name(t: &SolType) -> String {
    let s: String = t.to_string().chars().map(|c| if c.is_ascii_alphanumeric() { c } else { '_' }).collect();
    format!("defctx_{}", s)
}

impl StorageLayout {
    pub fn new(c: &TypedContract) -> Self {
        let mut roots: Vec<(String, SolType)> =
            c.state_vars.iter().map(|v| (c.var(*v).name.clone(), c.var(*v).ty.clone())).collect();
        let state_count = roots.len();
        let mut pointees: Vec<SolType> = vec![];
        for v in &c.vars {
            if v.cat == LocCategory::StorPtr && v.kind != VarKind::State && !pointees.contains(&v.ty) {
                pointees.push(v.ty.clone());
            }
        }
        // a default context can make other pointee types reachable, so
        // repeat until every pointee type has a leaf
        loop {
            let missing = pointees.iter().find(|t| StorageTree::build(&c.structs, &roots, t).is_empty()).cloned();
            match missing {
                Some(t) => roots.push((defctx_name(&t), SolType::mapping(SolType::Int, t))),
                None => break,
            }
        }
        StorageLayout { roots, state_count }
    }

    pub fn tree(&self, c: &TypedContract, target: &SolType) -> StorageTree {
        StorageTree::build(&c.structs, &self.roots, target)
    }

    pub fn contexts(&self) -> &[(String, SolType)] {
        &self.roots[self.state_count..]
    }
}
