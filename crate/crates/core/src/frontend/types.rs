// SPDX-License-Identifier: Apache-2.0

//! Solidity types of the supported fragment and data-location categories.

use std::fmt;

/// A Solidity type. Struct types are referenced by name and resolved against
/// the enclosing contract.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SolType {
    Address,
    Int,
    Uint,
    Bool,
    Mapping(Box<SolType>, Box<SolType>),
    DynArray(Box<SolType>),
    FixArray(Box<SolType>, u64),
    Struct(String),
}

impl SolType {
    pub fn mapping(key: SolType, value: SolType) -> Self {
        SolType::Mapping(Box::new(key), Box::new(value))
    }

    pub fn dyn_array(base: SolType) -> Self {
        SolType::DynArray(Box::new(base))
    }

    pub fn fix_array(base: SolType, size: u64) -> Self {
        SolType::FixArray(Box::new(base), size)
    }

    pub fn is_value(&self) -> bool {
        matches!(
            self,
            SolType::Address | SolType::Int | SolType::Uint | SolType::Bool
        )
    }

    pub fn is_reference(&self) -> bool {
        !self.is_value()
    }

    /// `int`, `uint` and `address` all denote mathematical integers.
    pub fn is_integer(&self) -> bool {
        matches!(self, SolType::Address | SolType::Int | SolType::Uint)
    }

    pub fn is_array(&self) -> bool {
        matches!(self, SolType::DynArray(_) | SolType::FixArray(..))
    }

    pub fn is_mapping(&self) -> bool {
        matches!(self, SolType::Mapping(..))
    }

    pub fn is_struct(&self) -> bool {
        matches!(self, SolType::Struct(_))
    }

    /// Element type of an array.
    pub fn array_base(&self) -> Option<&SolType> {
        match self {
            SolType::DynArray(b) | SolType::FixArray(b, _) => Some(b),
            _ => None,
        }
    }

    pub fn struct_name(&self) -> Option<&str> {
        match self {
            SolType::Struct(n) => Some(n),
            _ => None,
        }
    }

    /// Fixed-size arrays collapse to dynamic arrays in the encoding.
    pub fn collapse_fixed(&self) -> SolType {
        match self {
            SolType::FixArray(b, _) => SolType::DynArray(Box::new(b.collapse_fixed())),
            SolType::DynArray(b) => SolType::DynArray(Box::new(b.collapse_fixed())),
            SolType::Mapping(k, v) => SolType::mapping((**k).clone(), v.collapse_fixed()),
            t => t.clone(),
        }
    }

    /// Type equality where the integer-like value types are interchangeable.
    pub fn compatible_value(&self, other: &SolType) -> bool {
        (self.is_integer() && other.is_integer()) || (*self == SolType::Bool && *other == SolType::Bool)
    }

    /// A name fragment usable inside SMT identifiers, e.g. `arr_int` for `int[]`.
    pub fn mangle(&self) -> String {
        match self {
            SolType::Address => "address".into(),
            SolType::Int => "int".into(),
            SolType::Uint => "uint".into(),
            SolType::Bool => "bool".into(),
            SolType::Mapping(k, v) => format!("map_{}_{}", k.mangle(), v.mangle()),
            SolType::DynArray(b) | SolType::FixArray(b, _) => format!("arr_{}", b.mangle()),
            SolType::Struct(n) => n.clone(),
        }
    }
}

impl fmt::Display for SolType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolType::Address => write!(f, "address"),
            SolType::Int => write!(f, "int"),
            SolType::Uint => write!(f, "uint"),
            SolType::Bool => write!(f, "bool"),
            SolType::Mapping(k, v) => write!(f, "mapping({} => {})", k, v),
            SolType::DynArray(b) => write!(f, "{}[]", b),
            SolType::FixArray(b, n) => write!(f, "{}[{}]", b, n),
            SolType::Struct(n) => write!(f, "{}", n),
        }
    }
}

/// Where the entity denoted by an expression lives.
///
/// `Storage` is the storage entity itself (state variables and anything
/// reached through them), `StorPtr` a local storage pointer, `Memory` a heap
/// reference. Value types always carry `Value`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LocCategory {
    Value,
    Storage,
    StorPtr,
    Memory,
}

impl fmt::Display for LocCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LocCategory::Value => "value",
            LocCategory::Storage => "storage",
            LocCategory::StorPtr => "storptr",
            LocCategory::Memory => "memory",
        };
        f.write_str(s)
    }
}

/// Explicit data location written in source.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DataLoc {
    Storage,
    Memory,
}

impl fmt::Display for DataLoc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataLoc::Storage => f.write_str("storage"),
            DataLoc::Memory => f.write_str("memory"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_nested_types() {
        let t = SolType::fix_array(SolType::dyn_array(SolType::Int), 3);
        assert_eq!(t.to_string(), "int[][3]");
        let m = SolType::mapping(SolType::Address, SolType::Struct("Record".into()));
        assert_eq!(m.to_string(), "mapping(address => Record)");
    }

    #[test]
    fn collapse_and_mangle() {
        let t = SolType::fix_array(SolType::fix_array(SolType::Bool, 2), 3);
        assert_eq!(t.collapse_fixed(), SolType::dyn_array(SolType::dyn_array(SolType::Bool)));
        assert_eq!(t.mangle(), "arr_arr_bool");
        assert_eq!(
            SolType::mapping(SolType::Int, SolType::Struct("S".into())).mangle(),
            "map_int_S"
        );
    }

    #[test]
    fn integer_kinds_interchange() {
        assert!(SolType::Address.compatible_value(&SolType::Uint));
        assert!(!SolType::Bool.compatible_value(&SolType::Int));
    }
}
