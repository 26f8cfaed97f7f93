//! Recursive-descent parser for UCL source.
//!
//! The parser is total over bytes: every byte of the input ends up either in
//! a text run or in the marker text of the structured node that owns it, so
//! re-emitting the tree reproduces the source exactly. Markers are recognized
//! only in their uppercase spelling; lowercase look-alikes fall back to text
//! with a diagnostic.

use thiserror::Error;

use super::ast::{
    CompareOp, ConceptRef, ConditionalBlock, Directive, DirectiveName, KeywordCondition, Node,
    ParseWarning, SourceSpan, SwitchBlock, SwitchCase, TaggedContent, TextRun, UclDocument,
    WarningKind,
};

/// Hard parse failures. Anything recoverable is a [`ParseWarning`] on the
/// document instead.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("{span}: unclosed {kind} opened here")]
    UnclosedBlock { kind: &'static str, span: SourceSpan },
    #[error("{span}: closer references '{closer_id}' which is not a prefix of the opener id '{opener_id}'")]
    MismatchedCloser {
        opener_id: String,
        closer_id: String,
        span: SourceSpan,
    },
    #[error("{span}: malformed concept reference: {detail}")]
    MalformedConceptRef { detail: String, span: SourceSpan },
    #[error("{span}: keyword list is empty or contains an empty literal")]
    EmptyKeywordList { span: SourceSpan },
    #[error("{span}: unsupported connective '{connective}' (keyword lists are OR-joined only)")]
    UnsupportedConnective { connective: String, span: SourceSpan },
    #[error("{span}: expected {wanted}, found {found}")]
    Unexpected {
        wanted: &'static str,
        found: String,
        span: SourceSpan,
    },
}

impl ParseError {
    pub fn span(&self) -> SourceSpan {
        match self {
            ParseError::UnclosedBlock { span, .. }
            | ParseError::MismatchedCloser { span, .. }
            | ParseError::MalformedConceptRef { span, .. }
            | ParseError::EmptyKeywordList { span }
            | ParseError::UnsupportedConnective { span, .. }
            | ParseError::Unexpected { span, .. } => *span,
        }
    }
}

/// Parses UCL source into a lossless document.
pub fn parse(source: &str) -> Result<UclDocument, ParseError> {
    let mut parser = Parser::new(source);
    let nodes = parser.parse_nodes(&[])?;
    debug_assert_eq!(parser.pos, source.len());
    Ok(UclDocument {
        nodes,
        source: source.to_string(),
        diagnostics: parser.diagnostics,
    })
}

/// Token that ends the current node list without being consumed by it.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Stop<'a> {
    ConditionCloser,
    SwitchCloser,
    CaseCloser,
    CaseOpener,
    TagCloser(&'a str),
}

#[derive(Clone, Copy)]
struct Mark {
    pos: usize,
    line: u32,
    col: u32,
    diag_len: usize,
}

struct Parser<'s> {
    src: &'s str,
    pos: usize,
    line: u32,
    col: u32,
    diagnostics: Vec<ParseWarning>,
}

impl<'s> Parser<'s> {
    fn new(src: &'s str) -> Self {
        Parser {
            src,
            pos: 0,
            line: 1,
            col: 1,
            diagnostics: Vec::new(),
        }
    }

    fn rest(&self) -> &'s str {
        &self.src[self.pos..]
    }

    fn at_end(&self) -> bool {
        self.pos >= self.src.len()
    }

    fn mark(&self) -> Mark {
        Mark {
            pos: self.pos,
            line: self.line,
            col: self.col,
            diag_len: self.diagnostics.len(),
        }
    }

    fn rewind(&mut self, mark: Mark) {
        self.pos = mark.pos;
        self.line = mark.line;
        self.col = mark.col;
        self.diagnostics.truncate(mark.diag_len);
    }

    fn here(&self) -> SourceSpan {
        SourceSpan::new(self.pos, self.pos, self.line, self.col)
    }

    fn span_from(&self, mark: Mark) -> SourceSpan {
        SourceSpan::new(mark.pos, self.pos, mark.line, mark.col)
    }

    fn advance(&mut self, bytes: usize) {
        let taken = &self.src[self.pos..self.pos + bytes];
        for ch in taken.chars() {
            if ch == '\n' {
                self.line += 1;
                self.col = 1;
            } else {
                self.col += 1;
            }
        }
        self.pos += bytes;
    }

    fn eat(&mut self, lit: &str) -> bool {
        if self.rest().starts_with(lit) {
            self.advance(lit.len());
            true
        } else {
            false
        }
    }

    fn skip_ws(&mut self) {
        let n = self
            .rest()
            .char_indices()
            .find(|(_, c)| !c.is_whitespace())
            .map(|(i, _)| i)
            .unwrap_or_else(|| self.rest().len());
        self.advance(n);
    }

    fn warn(&mut self, kind: WarningKind, message: String, span: SourceSpan) {
        self.diagnostics.push(ParseWarning {
            kind,
            message,
            span,
        });
    }

    // ------------------------------------------------------------------
    // Marker classification
    // ------------------------------------------------------------------

    /// True when the current position holds `^^/KIND` followed by `:` or `^^`.
    fn closer_at(&self, kind: &str) -> bool {
        self.rest()
            .strip_prefix("^^/")
            .and_then(|t| t.strip_prefix(kind))
            .map(|t| t.starts_with(':') || t.starts_with('^'))
            .unwrap_or(false)
    }

    fn opener_at(&self, kind: &str) -> bool {
        self.rest()
            .strip_prefix("^^")
            .and_then(|t| t.strip_prefix(kind))
            .map(|t| t.starts_with(':'))
            .unwrap_or(false)
    }

    fn stop_at(&self, stops: &[Stop]) -> bool {
        stops.iter().any(|stop| match stop {
            Stop::ConditionCloser => self.closer_at("CONDITION"),
            Stop::SwitchCloser => self.closer_at("SWITCH"),
            Stop::CaseCloser => self.closer_at("CASE"),
            Stop::CaseOpener => self.opener_at("CASE"),
            Stop::TagCloser(name) => self
                .rest()
                .strip_prefix("</")
                .and_then(|t| t.strip_prefix(*name))
                .map(|t| t.starts_with('>'))
                .unwrap_or(false),
        })
    }

    /// Detects a lowercase spelling of a block keyword at the current `^^`
    /// marker and returns the diagnostic message.
    fn lowercase_marker_at(&self) -> Option<String> {
        let tail = self.rest().strip_prefix("^^")?;
        let tail = tail.strip_prefix('/').unwrap_or(tail);
        for kw in ["CONDITION", "SWITCH", "CASE"] {
            let len = kw.len();
            if tail.len() > len && tail.is_char_boundary(len) {
                let word = &tail[..len];
                let next = tail.as_bytes()[len];
                if (next == b':' || next == b'^') && word != kw && word.eq_ignore_ascii_case(kw)
                {
                    return Some(format!(
                        "'{word}' is not recognized; block keywords are uppercase ({kw})"
                    ));
                }
            }
        }
        None
    }

    // ------------------------------------------------------------------
    // Node list parsing
    // ------------------------------------------------------------------

    /// Parses nodes until end of input or until one of `stops` is seen at
    /// the current position. Stops are left unconsumed.
    fn parse_nodes(&mut self, stops: &[Stop]) -> Result<Vec<Node>, ParseError> {
        let mut nodes = Vec::new();
        let mut text_start = self.mark();
        loop {
            if self.at_end() || self.stop_at(stops) {
                break;
            }
            if let Some(node) = self.try_parse_structured(stops)? {
                let node_start = node.span().start;
                if node_start > text_start.pos {
                    nodes.push(Node::Text(TextRun {
                        content: self.src[text_start.pos..node_start].to_string(),
                        span: SourceSpan::new(
                            text_start.pos,
                            node_start,
                            text_start.line,
                            text_start.col,
                        ),
                    }));
                }
                nodes.push(node);
                text_start = self.mark();
            }
        }
        if self.pos > text_start.pos {
            nodes.push(Node::Text(TextRun {
                content: self.src[text_start.pos..self.pos].to_string(),
                span: self.span_from(text_start),
            }));
        }
        Ok(nodes)
    }

    /// Attempts to parse a structured node at the current position. Returns
    /// `Ok(None)` after consuming at least one byte as plain text when the
    /// position holds no structured construct.
    fn try_parse_structured(&mut self, stops: &[Stop]) -> Result<Option<Node>, ParseError> {
        let rest = self.rest();
        if rest.starts_with("^^") {
            if self.opener_at("CONDITION") {
                return self.parse_condition_block();
            }
            if self.opener_at("SWITCH") {
                return self.parse_switch_block().map(Some);
            }
            if self.opener_at("CASE") {
                // Reachable only outside a switch interior; the switch
                // parser stops before case openers and consumes them itself.
                let span = SourceSpan::new(self.pos, self.pos + 7, self.line, self.col);
                self.warn(
                    WarningKind::StrayCase,
                    "CASE marker outside any SWITCH block; treated as text".to_string(),
                    span,
                );
                self.advance(2);
                return Ok(None);
            }
            for kind in ["CONDITION", "SWITCH", "CASE"] {
                if self.closer_at(kind) {
                    let span =
                        SourceSpan::new(self.pos, self.pos + 3 + kind.len(), self.line, self.col);
                    self.warn(
                        WarningKind::StrayCloser,
                        format!("{kind} closer has no open {kind} block here; treated as text"),
                        span,
                    );
                    self.advance(2);
                    return Ok(None);
                }
            }
            if let Some(message) = self.lowercase_marker_at() {
                let span = SourceSpan::new(self.pos, self.pos + 2, self.line, self.col);
                self.warn(WarningKind::LowercaseOperator, message, span);
                self.advance(2);
                return Ok(None);
            }
            self.advance(1);
            return Ok(None);
        }
        if rest.starts_with("[[") {
            return self.try_parse_directive();
        }
        if rest.starts_with('<') {
            return self.try_parse_tagged(stops);
        }
        // Plain text: skip ahead to the next byte that could begin a marker
        // or a stop. All markers and stops start with '^', '[', or '<'.
        let skip = rest
            .char_indices()
            .skip(1)
            .find(|(_, c)| matches!(c, '^' | '[' | '<'))
            .map(|(i, _)| i)
            .unwrap_or(rest.len());
        self.advance(skip);
        Ok(None)
    }

    // ------------------------------------------------------------------
    // Concept references and identifiers
    // ------------------------------------------------------------------

    fn ident_at(&self) -> Option<&'s str> {
        let rest = self.rest();
        let mut chars = rest.char_indices();
        match chars.next() {
            Some((_, c)) if c.is_ascii_alphabetic() || c == '_' => {}
            _ => return None,
        }
        let end = chars
            .find(|(_, c)| !(c.is_ascii_alphanumeric() || *c == '_'))
            .map(|(i, _)| i)
            .unwrap_or(rest.len());
        Some(&rest[..end])
    }

    /// Parses a `{{concept:id}}` / `{{concept:id:domain}}` reference. The
    /// position must be at `{{`.
    fn parse_concept_ref(&mut self) -> Result<ConceptRef, ParseError> {
        let start = self.mark();
        macro_rules! malformed {
            ($detail:expr) => {
                return Err(ParseError::MalformedConceptRef {
                    detail: $detail.to_string(),
                    span: self.span_from(start),
                })
            };
        }
        if !self.eat("{{") {
            malformed!("expected '{{'");
        }
        if !self.eat("concept") {
            malformed!("reference must begin with 'concept'");
        }
        if !self.eat(":") {
            malformed!("missing ':' after 'concept'");
        }
        let id = match self.ident_at() {
            Some(id) => {
                self.advance(id.len());
                id.to_string()
            }
            None => malformed!("missing concept id"),
        };
        let domain = if self.eat(":") {
            match self.ident_at() {
                Some(d) => {
                    self.advance(d.len());
                    Some(d.to_string())
                }
                None => malformed!("missing domain after second ':'"),
            }
        } else {
            None
        };
        if !self.eat("}}") {
            malformed!("missing closing '}}'");
        }
        Ok(ConceptRef {
            id,
            domain,
            span: self.span_from(start),
        })
    }

    /// Parses the subject of a condition, switch, or case: a braced concept
    /// reference or a bare identifier.
    fn parse_subject(&mut self) -> Result<ConceptRef, ParseError> {
        if self.rest().starts_with("{{") {
            return self.parse_concept_ref();
        }
        let start = self.mark();
        match self.ident_at() {
            Some(id) => {
                let id = id.to_string();
                self.advance(id.len());
                Ok(ConceptRef {
                    id,
                    domain: None,
                    span: self.span_from(start),
                })
            }
            None => Err(ParseError::Unexpected {
                wanted: "a concept reference or identifier",
                found: preview(self.rest()),
                span: self.here(),
            }),
        }
    }

    fn parse_quoted_literal(&mut self) -> Result<String, ParseError> {
        let start = self.mark();
        if !self.eat("\"") {
            return Err(ParseError::Unexpected {
                wanted: "a quoted keyword literal",
                found: preview(self.rest()),
                span: self.here(),
            });
        }
        match self.rest().find('"') {
            Some(end) => {
                let lit = self.rest()[..end].to_string();
                self.advance(end + 1);
                if lit.is_empty() {
                    return Err(ParseError::EmptyKeywordList {
                        span: self.span_from(start),
                    });
                }
                Ok(lit)
            }
            None => Err(ParseError::Unexpected {
                wanted: "closing '\"'",
                found: "end of input".to_string(),
                span: self.span_from(start),
            }),
        }
    }

    // ------------------------------------------------------------------
    // Blocks
    // ------------------------------------------------------------------

    /// Parses a `^^CONDITION: …^^ … ^^/CONDITION…^^` block. Returns `None`
    /// (with a diagnostic, the marker demoted to text) when the opener uses
    /// a lowercase operator or connective.
    fn parse_condition_block(&mut self) -> Result<Option<Node>, ParseError> {
        let start = self.mark();
        self.advance("^^CONDITION:".len());
        self.skip_ws();
        let subject = self.parse_subject()?;
        self.skip_ws();

        let operator = if self.eat("CONTAINS") {
            CompareOp::Contains
        } else if self.eat("EQUALS") {
            CompareOp::Equals
        } else if self.rest().starts_with("^^") {
            return Err(ParseError::EmptyKeywordList {
                span: self.span_from(start),
            });
        } else if let Some(word) = self.ident_at() {
            if word.eq_ignore_ascii_case("AND") {
                return Err(ParseError::UnsupportedConnective {
                    connective: word.to_string(),
                    span: self.here(),
                });
            }
            if word.eq_ignore_ascii_case("CONTAINS") || word.eq_ignore_ascii_case("EQUALS") {
                let span = SourceSpan::new(self.pos, self.pos + word.len(), self.line, self.col);
                let message =
                    format!("'{word}' is not recognized; comparison operators are uppercase");
                return Ok(self.demote_marker(start, message, span));
            }
            return Err(ParseError::Unexpected {
                wanted: "CONTAINS or EQUALS",
                found: word.to_string(),
                span: self.here(),
            });
        } else {
            return Err(ParseError::Unexpected {
                wanted: "CONTAINS or EQUALS",
                found: preview(self.rest()),
                span: self.here(),
            });
        };

        let mut keywords = Vec::new();
        loop {
            self.skip_ws();
            if self.rest().starts_with("^^") || self.at_end() {
                break;
            }
            if keywords.is_empty() {
                keywords.push(self.parse_quoted_literal()?);
                continue;
            }
            if self.eat("OR") {
                self.skip_ws();
                keywords.push(self.parse_quoted_literal()?);
                continue;
            }
            if let Some(word) = self.ident_at() {
                if word.eq_ignore_ascii_case("AND") {
                    return Err(ParseError::UnsupportedConnective {
                        connective: word.to_string(),
                        span: self.here(),
                    });
                }
                if word.eq_ignore_ascii_case("OR") {
                    let span =
                        SourceSpan::new(self.pos, self.pos + word.len(), self.line, self.col);
                    let message =
                        format!("'{word}' is not recognized; the OR connective is uppercase");
                    return Ok(self.demote_marker(start, message, span));
                }
            }
            return Err(ParseError::Unexpected {
                wanted: "OR or '^^'",
                found: preview(self.rest()),
                span: self.here(),
            });
        }
        if keywords.is_empty() {
            return Err(ParseError::EmptyKeywordList {
                span: self.span_from(start),
            });
        }
        if !self.eat("^^") {
            return Err(ParseError::Unexpected {
                wanted: "'^^' ending the condition opener",
                found: preview(self.rest()),
                span: self.here(),
            });
        }
        let opener_text = self.src[start.pos..self.pos].to_string();

        let children = self.parse_nodes(&[Stop::ConditionCloser])?;
        if self.at_end() {
            return Err(ParseError::UnclosedBlock {
                kind: "CONDITION block",
                span: self.span_from(start),
            });
        }
        let closer_text = self.parse_closer("CONDITION", &subject.id)?;
        Ok(Some(Node::Conditional(ConditionalBlock {
            opener_text,
            condition: KeywordCondition {
                subject,
                operator,
                keywords,
            },
            children,
            closer_text,
            span: self.span_from(start),
        })))
    }

    /// Rolls back a marker that turned out not to be a block, records the
    /// diagnostic, and consumes the caret pair as plain text.
    fn demote_marker(&mut self, start: Mark, message: String, span: SourceSpan) -> Option<Node> {
        self.rewind(start);
        self.warn(WarningKind::LowercaseOperator, message, span);
        self.advance(2);
        None
    }

    fn parse_switch_block(&mut self) -> Result<Node, ParseError> {
        let start = self.mark();
        self.advance("^^SWITCH:".len());
        self.skip_ws();
        let selector = self.parse_subject()?;
        self.skip_ws();
        if !self.eat("^^") {
            return Err(ParseError::Unexpected {
                wanted: "'^^' ending the switch opener",
                found: preview(self.rest()),
                span: self.here(),
            });
        }
        let opener_text = self.src[start.pos..self.pos].to_string();

        let mut cases = Vec::new();
        let tail;
        loop {
            let lead = self.parse_nodes(&[Stop::SwitchCloser, Stop::CaseOpener])?;
            if self.at_end() {
                return Err(ParseError::UnclosedBlock {
                    kind: "SWITCH block",
                    span: self.span_from(start),
                });
            }
            if self.closer_at("SWITCH") {
                tail = lead;
                break;
            }
            cases.push(self.parse_case(lead)?);
        }
        let closer_text = self.parse_closer("SWITCH", &selector.id)?;
        Ok(Node::Switch(SwitchBlock {
            opener_text,
            selector,
            cases,
            tail,
            closer_text,
            span: self.span_from(start),
        }))
    }

    fn parse_case(&mut self, lead: Vec<Node>) -> Result<SwitchCase, ParseError> {
        let start = self.mark();
        self.advance("^^CASE:".len());
        self.skip_ws();
        let label = self.parse_subject()?;
        self.skip_ws();
        if !self.eat("^^") {
            return Err(ParseError::Unexpected {
                wanted: "'^^' ending the case opener",
                found: preview(self.rest()),
                span: self.here(),
            });
        }
        let opener_text = self.src[start.pos..self.pos].to_string();
        let children = self.parse_nodes(&[Stop::CaseCloser])?;
        if self.at_end() {
            return Err(ParseError::UnclosedBlock {
                kind: "CASE block",
                span: self.span_from(start),
            });
        }
        let closer_text = self.parse_closer("CASE", &label.id)?;
        Ok(SwitchCase {
            lead,
            opener_text,
            label,
            children,
            closer_text,
            span: self.span_from(start),
        })
    }

    /// Consumes `^^/KIND^^` or `^^/KIND:ref^^` and checks that the closer's
    /// id, when present, is a prefix of the opener's id. The paper's own
    /// listings abbreviate closers this way.
    fn parse_closer(&mut self, kind: &'static str, opener_id: &str) -> Result<String, ParseError> {
        let start = self.mark();
        self.advance(3 + kind.len()); // ^^/KIND
        if self.eat(":") {
            self.skip_ws();
            let closer_ref = self.parse_subject()?;
            self.skip_ws();
            if !opener_id.starts_with(&closer_ref.id) {
                return Err(ParseError::MismatchedCloser {
                    opener_id: opener_id.to_string(),
                    closer_id: closer_ref.id,
                    span: self.span_from(start),
                });
            }
        }
        if !self.eat("^^") {
            return Err(ParseError::Unexpected {
                wanted: "'^^' ending the closer",
                found: preview(self.rest()),
                span: self.here(),
            });
        }
        Ok(self.src[start.pos..self.pos].to_string())
    }

    // ------------------------------------------------------------------
    // Directives and tagged content
    // ------------------------------------------------------------------

    /// Parses `[[NAME: payload]]`. Anything not matching the directive shape
    /// is consumed as text. Directives may span multiple lines.
    fn try_parse_directive(&mut self) -> Result<Option<Node>, ParseError> {
        let start = self.mark();
        let interior = &self.rest()[2..];
        let name_len = interior
            .bytes()
            .take_while(|b| b.is_ascii_uppercase() || b.is_ascii_digit() || *b == b'_')
            .count();
        let valid = name_len > 0
            && interior.as_bytes()[0].is_ascii_uppercase()
            && interior[name_len..].starts_with(':');
        if !valid {
            self.advance(1);
            return Ok(None);
        }
        let name = &interior[..name_len];
        match interior[name_len + 1..].find("]]") {
            Some(rel_end) => {
                let payload = interior[name_len + 1..name_len + 1 + rel_end]
                    .trim()
                    .to_string();
                self.advance(2 + name_len + 1 + rel_end + 2);
                Ok(Some(Node::Directive(Directive {
                    name: DirectiveName::from_str(name),
                    payload,
                    raw: self.src[start.pos..self.pos].to_string(),
                    span: self.span_from(start),
                })))
            }
            None => Err(ParseError::UnclosedBlock {
                kind: "directive",
                span: SourceSpan::new(
                    start.pos,
                    start.pos + 2 + name_len + 1,
                    start.line,
                    start.col,
                ),
            }),
        }
    }

    /// Parses `<name>…</name>` for snake_case names. When no matching closer
    /// follows, the angle bracket is ordinary text.
    fn try_parse_tagged(&mut self, outer_stops: &[Stop]) -> Result<Option<Node>, ParseError> {
        let start = self.mark();
        let interior = &self.rest()[1..];
        let name_len = interior
            .bytes()
            .take_while(|b| b.is_ascii_lowercase() || *b == b'_')
            .count();
        if name_len == 0 || !interior[name_len..].starts_with('>') {
            self.advance(1);
            return Ok(None);
        }
        let name = interior[..name_len].to_string();
        let closer = format!("</{name}>");
        if !interior[name_len + 1..].contains(&closer) {
            self.advance(1);
            return Ok(None);
        }
        self.advance(1 + name_len + 1);

        let mut stops = Vec::with_capacity(outer_stops.len() + 1);
        stops.push(Stop::TagCloser(&name));
        stops.extend_from_slice(outer_stops);
        let children = self.parse_nodes(&stops)?;
        if self.stop_at(&[Stop::TagCloser(&name)]) {
            self.advance(closer.len());
            return Ok(Some(Node::Tagged(TaggedContent {
                name,
                children,
                span: self.span_from(start),
            })));
        }
        // The closer seen by the lookahead was swallowed by a nested
        // construct, or an enclosing block's closer came first. Not a tag.
        self.rewind(start);
        self.advance(1);
        Ok(None)
    }
}

fn preview(rest: &str) -> String {
    if rest.is_empty() {
        return "end of input".to_string();
    }
    let end = rest
        .char_indices()
        .take_while(|(i, _)| *i < 12)
        .last()
        .map(|(i, c)| i + c.len_utf8())
        .unwrap_or(rest.len());
    format!("'{}'", &rest[..end].replace('\n', "\\n"))
}
