//! Core toolchain for the UCL prompt language.
//!
//! UCL structures a prompt as plain text plus a small set of markers:
//! keyword-gated `^^CONDITION:…^^` blocks, multi-branch `^^SWITCH:…^^` /
//! `^^CASE:…^^` blocks, `[[NAME: …]]` directives, `{{concept:id:domain}}`
//! references, and `<snake_case>` tagged regions. This crate parses that
//! syntax losslessly, measures its structure, evaluates the associated
//! quality and cost models, and compiles a document against a concrete
//! input by expanding only the blocks whose indicators fire.
//!
//! Everything here is a pure function over immutable data: documents are
//! safe to share across threads and a single parsed document can be
//! compiled against many inputs concurrently.

pub mod compiler;
pub mod metrics;
pub mod model;
pub mod syntax;

pub use syntax::{parse, ParseError, UclDocument};
