// SPDX-License-Identifier: Apache-2.0

//! Verifier for a memory-model-complete Solidity fragment.
//!
//! Contracts are parsed and typed by [`frontend`], translated to a small
//! SMT-based program language ([`ir`]) by [`translate`], and checked assert
//! by assert with an external solver ([`solver`]). The concrete interpreter
//! in [`oracle`] gives ground truth for differential testing, and
//! [`harness`] ties everything together for the command line.

pub mod frontend;
pub mod harness;
pub mod ir;
pub mod oracle;
pub mod solver;
pub mod translate;
