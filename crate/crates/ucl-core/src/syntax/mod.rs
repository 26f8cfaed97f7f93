//! Lexing, parsing, and semantic validation of UCL source.

mod ast;
mod parser;
mod validate;

pub use ast::{
    emit_nodes, structural_eq_nodes, CompareOp, ConceptRef, ConditionalBlock, Directive,
    DirectiveName, KeywordCondition, Node, ParseWarning, SourceSpan, SwitchBlock, SwitchCase,
    TaggedContent, TextRun, UclDocument, WalkContext, WarningKind,
};
pub use parser::{parse, ParseError};
pub use validate::{
    collect_concept_refs, validate_grammar, SemanticFinding, SemanticRule, Severity,
};
