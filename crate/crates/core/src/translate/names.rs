// SPDX-License-Identifier: Apache-2.0

//! Names of the datatypes, heaps and counters introduced by the encoding.

use crate::frontend::SolType;

pub const REFCNT: &str = "refcnt";

pub fn stor_arr_name(base: &SolType) -> String {
    format!("StorArr_{}", base.collapse_fixed().mangle())
}

pub fn mem_arr_name(base: &SolType) -> String {
    format!("MemArr_{}", base.collapse_fixed().mangle())
}

pub fn arr_heap_name(base: &SolType) -> String {
    format!("arrHeap_{}", base.collapse_fixed().mangle())
}

pub fn stor_struct_name(s: &str) -> String {
    format!("StorStruct_{}", s)
}

pub fn mem_struct_name(s: &str) -> String {
    format!("MemStruct_{}", s)
}

pub fn struct_heap_name(s: &str) -> String {
    format!("structHeap_{}", s)
}
