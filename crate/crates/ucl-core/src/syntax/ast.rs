//! AST types for UCL documents.
//!
//! The tree is lossless: every structured node stores the verbatim source
//! text of its markers (`opener_text`, `closer_text`, `raw`), so emitting a
//! parsed document reproduces the original source byte for byte. Documents
//! built programmatically synthesize canonical marker text instead.

use std::fmt;

use serde::Serialize;

/// Byte range of a node in the original source, with the 1-based line and
/// column of its first byte.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub line: u32,
    pub column: u32,
}

impl SourceSpan {
    pub fn new(start: usize, end: usize, line: u32, column: u32) -> Self {
        debug_assert!(end >= start);
        SourceSpan {
            start,
            end,
            line,
            column,
        }
    }

    /// Span for programmatically constructed nodes. Carries no position.
    pub fn synthetic() -> Self {
        SourceSpan {
            start: 0,
            end: 0,
            line: 1,
            column: 1,
        }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start == self.end
    }
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

/// A `{{concept:id}}` or `{{concept:id:domain}}` reference.
///
/// Condition subjects, switch selectors, and case labels may also be written
/// as bare identifiers in source; those parse into a `ConceptRef` with no
/// domain and the block's marker text preserves the original spelling.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConceptRef {
    pub id: String,
    pub domain: Option<String>,
    pub span: SourceSpan,
}

impl ConceptRef {
    pub fn new(id: impl Into<String>) -> Self {
        ConceptRef {
            id: id.into(),
            domain: None,
            span: SourceSpan::synthetic(),
        }
    }

    pub fn scoped(id: impl Into<String>, domain: impl Into<String>) -> Self {
        ConceptRef {
            id: id.into(),
            domain: Some(domain.into()),
            span: SourceSpan::synthetic(),
        }
    }

    pub fn is_scoped(&self) -> bool {
        self.domain.is_some()
    }
}

impl fmt::Display for ConceptRef {
    /// Canonical serialized form.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.domain {
            Some(d) => write!(f, "{{{{concept:{}:{}}}}}", self.id, d),
            None => write!(f, "{{{{concept:{}}}}}", self.id),
        }
    }
}

/// Comparison operator of a keyword condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CompareOp {
    Contains,
    Equals,
}

impl fmt::Display for CompareOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CompareOp::Contains => f.write_str("CONTAINS"),
            CompareOp::Equals => f.write_str("EQUALS"),
        }
    }
}

/// The gate expression of a conditional block: a subject concept, a
/// comparison operator, and an OR-joined list of quoted keyword literals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KeywordCondition {
    pub subject: ConceptRef,
    pub operator: CompareOp,
    pub keywords: Vec<String>,
}

impl KeywordCondition {
    pub fn contains(subject: ConceptRef, keywords: Vec<String>) -> Self {
        KeywordCondition {
            subject,
            operator: CompareOp::Contains,
            keywords,
        }
    }

    pub fn equals(subject: ConceptRef, keywords: Vec<String>) -> Self {
        KeywordCondition {
            subject,
            operator: CompareOp::Equals,
            keywords,
        }
    }

    fn canonical_expr(&self) -> String {
        let joined = self
            .keywords
            .iter()
            .map(|k| format!("\"{k}\""))
            .collect::<Vec<_>>()
            .join(" OR ");
        format!("{} {} {}", self.subject, self.operator, joined)
    }
}

/// `^^CONDITION: …^^` block gated by a keyword condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionalBlock {
    pub opener_text: String,
    pub condition: KeywordCondition,
    pub children: Vec<Node>,
    pub closer_text: String,
    pub span: SourceSpan,
}

impl ConditionalBlock {
    /// Builds a block with canonical marker text.
    pub fn new(condition: KeywordCondition, children: Vec<Node>) -> Self {
        let opener_text = format!("^^CONDITION: {}^^", condition.canonical_expr());
        let closer_text = format!(
            "^^/CONDITION:{}^^",
            ConceptRef::new(condition.subject.id.clone())
        );
        ConditionalBlock {
            opener_text,
            condition,
            children,
            closer_text,
            span: SourceSpan::synthetic(),
        }
    }
}

/// One `^^CASE: …^^` arm of a switch.
///
/// `lead` holds the nodes (typically a whitespace run) between the previous
/// sibling marker and this case's opener, so the switch interior loses no
/// bytes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SwitchCase {
    pub lead: Vec<Node>,
    pub opener_text: String,
    pub label: ConceptRef,
    pub children: Vec<Node>,
    pub closer_text: String,
    pub span: SourceSpan,
}

/// `^^SWITCH: …^^` multi-branch block.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SwitchBlock {
    pub opener_text: String,
    pub selector: ConceptRef,
    pub cases: Vec<SwitchCase>,
    /// Nodes between the last case closer and the switch closer.
    pub tail: Vec<Node>,
    pub closer_text: String,
    pub span: SourceSpan,
}

impl SwitchBlock {
    /// Builds a switch with canonical marker text and newline separators.
    pub fn new(selector: ConceptRef, cases: Vec<(ConceptRef, Vec<Node>)>) -> Self {
        let opener_text = format!("^^SWITCH: {selector}^^");
        let closer_text = format!("^^/SWITCH:{}^^", ConceptRef::new(selector.id.clone()));
        let cases = cases
            .into_iter()
            .map(|(label, children)| SwitchCase {
                lead: vec![Node::Text(TextRun::new("\n"))],
                opener_text: format!("^^CASE: {label}^^"),
                closer_text: format!("^^/CASE:{}^^", ConceptRef::new(label.id.clone())),
                label,
                children,
                span: SourceSpan::synthetic(),
            })
            .collect();
        SwitchBlock {
            opener_text,
            selector,
            cases,
            tail: vec![Node::Text(TextRun::new("\n"))],
            closer_text,
            span: SourceSpan::synthetic(),
        }
    }
}

/// Name of a `[[NAME: …]]` directive. Unknown names are preserved verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum DirectiveName {
    Llm,
    Require,
    Transform,
    Apply,
    Validate,
    Enforce,
    Critical,
    Other(String),
}

impl DirectiveName {
    pub fn from_str(name: &str) -> Self {
        match name {
            "LLM" => DirectiveName::Llm,
            "REQUIRE" => DirectiveName::Require,
            "TRANSFORM" => DirectiveName::Transform,
            "APPLY" => DirectiveName::Apply,
            "VALIDATE" => DirectiveName::Validate,
            "ENFORCE" => DirectiveName::Enforce,
            "CRITICAL" => DirectiveName::Critical,
            other => DirectiveName::Other(other.to_string()),
        }
    }

    pub fn as_str(&self) -> &str {
        match self {
            DirectiveName::Llm => "LLM",
            DirectiveName::Require => "REQUIRE",
            DirectiveName::Transform => "TRANSFORM",
            DirectiveName::Apply => "APPLY",
            DirectiveName::Validate => "VALIDATE",
            DirectiveName::Enforce => "ENFORCE",
            DirectiveName::Critical => "CRITICAL",
            DirectiveName::Other(name) => name,
        }
    }
}

impl fmt::Display for DirectiveName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `[[NAME: payload]]` directive. `raw` is the exact source text including
/// the brackets; `payload` is the interior after the colon, trimmed.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Directive {
    pub name: DirectiveName,
    pub payload: String,
    pub raw: String,
    pub span: SourceSpan,
}

impl Directive {
    /// Builds a directive with canonical raw text. The payload must not
    /// contain a `]]` sequence or the raw form will not re-parse to an
    /// equal node.
    pub fn new(name: impl Into<String>, payload: impl Into<String>) -> Self {
        let name = name.into();
        let payload = payload.into().trim().to_string();
        let raw = if payload.is_empty() {
            format!("[[{name}:]]")
        } else {
            format!("[[{name}: {payload}]]")
        };
        Directive {
            name: DirectiveName::from_str(&name),
            payload,
            raw,
            span: SourceSpan::synthetic(),
        }
    }
}

/// `<name>…</name>` region with a snake_case tag name. The markers are
/// reconstructed from the name, so no raw text is stored.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaggedContent {
    pub name: String,
    pub children: Vec<Node>,
    pub span: SourceSpan,
}

impl TaggedContent {
    pub fn new(name: impl Into<String>, children: Vec<Node>) -> Self {
        TaggedContent {
            name: name.into(),
            children,
            span: SourceSpan::synthetic(),
        }
    }
}

/// Verbatim text between structured constructs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TextRun {
    pub content: String,
    pub span: SourceSpan,
}

impl TextRun {
    pub fn new(content: impl Into<String>) -> Self {
        TextRun {
            content: content.into(),
            span: SourceSpan::synthetic(),
        }
    }
}

/// One node of a UCL document.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Node {
    Text(TextRun),
    Conditional(ConditionalBlock),
    Switch(SwitchBlock),
    Directive(Directive),
    Tagged(TaggedContent),
}

impl Node {
    pub fn span(&self) -> SourceSpan {
        match self {
            Node::Text(t) => t.span,
            Node::Conditional(c) => c.span,
            Node::Switch(s) => s.span,
            Node::Directive(d) => d.span,
            Node::Tagged(t) => t.span,
        }
    }

    fn emit_into(&self, out: &mut String) {
        match self {
            Node::Text(t) => out.push_str(&t.content),
            Node::Conditional(c) => {
                out.push_str(&c.opener_text);
                for child in &c.children {
                    child.emit_into(out);
                }
                out.push_str(&c.closer_text);
            }
            Node::Switch(s) => {
                out.push_str(&s.opener_text);
                for case in &s.cases {
                    for n in &case.lead {
                        n.emit_into(out);
                    }
                    out.push_str(&case.opener_text);
                    for child in &case.children {
                        child.emit_into(out);
                    }
                    out.push_str(&case.closer_text);
                }
                for n in &s.tail {
                    n.emit_into(out);
                }
                out.push_str(&s.closer_text);
            }
            Node::Directive(d) => out.push_str(&d.raw),
            Node::Tagged(t) => {
                out.push('<');
                out.push_str(&t.name);
                out.push('>');
                for child in &t.children {
                    child.emit_into(out);
                }
                out.push_str("</");
                out.push_str(&t.name);
                out.push('>');
            }
        }
    }

    /// Compares semantic content, ignoring spans and marker spellings.
    pub fn structural_eq(&self, other: &Node) -> bool {
        match (self, other) {
            (Node::Text(a), Node::Text(b)) => a.content == b.content,
            (Node::Conditional(a), Node::Conditional(b)) => {
                a.condition.subject.id == b.condition.subject.id
                    && a.condition.subject.domain == b.condition.subject.domain
                    && a.condition.operator == b.condition.operator
                    && a.condition.keywords == b.condition.keywords
                    && structural_eq_nodes(&a.children, &b.children)
            }
            (Node::Switch(a), Node::Switch(b)) => {
                a.selector.id == b.selector.id
                    && a.selector.domain == b.selector.domain
                    && a.cases.len() == b.cases.len()
                    && a.cases.iter().zip(&b.cases).all(|(x, y)| {
                        x.label.id == y.label.id
                            && x.label.domain == y.label.domain
                            && structural_eq_nodes(&x.lead, &y.lead)
                            && structural_eq_nodes(&x.children, &y.children)
                    })
                    && structural_eq_nodes(&a.tail, &b.tail)
            }
            (Node::Directive(a), Node::Directive(b)) => {
                a.name == b.name && a.payload == b.payload
            }
            (Node::Tagged(a), Node::Tagged(b)) => {
                a.name == b.name && structural_eq_nodes(&a.children, &b.children)
            }
            _ => false,
        }
    }
}

pub fn structural_eq_nodes(a: &[Node], b: &[Node]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.structural_eq(y))
}

/// Serializes a node list exactly as [`UclDocument::emit`] would.
pub fn emit_nodes(nodes: &[Node]) -> String {
    let mut out = String::new();
    for node in nodes {
        node.emit_into(&mut out);
    }
    out
}

/// Non-fatal observation recorded while parsing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum WarningKind {
    /// A block or directive keyword written in lowercase; treated as text.
    LowercaseOperator,
    /// A closer marker with no matching open block; treated as text.
    StrayCloser,
    /// A `^^CASE:` opener outside any switch; treated as text.
    StrayCase,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParseWarning {
    pub kind: WarningKind,
    pub message: String,
    pub span: SourceSpan,
}

/// A parsed (or constructed) UCL document.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UclDocument {
    pub nodes: Vec<Node>,
    pub source: String,
    pub diagnostics: Vec<ParseWarning>,
}

impl UclDocument {
    /// Builds a document from nodes; `source` is set to the emitted text so
    /// that `emit` and `source` agree for constructed documents too.
    pub fn from_nodes(nodes: Vec<Node>) -> Self {
        let mut doc = UclDocument {
            nodes,
            source: String::new(),
            diagnostics: Vec::new(),
        };
        doc.source = doc.emit();
        doc
    }

    /// Re-serializes the document from its nodes. For parsed documents the
    /// result equals the original source byte for byte.
    pub fn emit(&self) -> String {
        let mut out = String::with_capacity(self.source.len());
        for node in &self.nodes {
            node.emit_into(&mut out);
        }
        out
    }

    pub fn structural_eq(&self, other: &UclDocument) -> bool {
        structural_eq_nodes(&self.nodes, &other.nodes)
    }

    /// Visits every node in document order, including nodes nested in
    /// switch cases, leads, and tails. `depth` counts enclosing conditional
    /// and switch blocks; `in_switch` is true inside any switch.
    pub fn walk<F: FnMut(&Node, WalkContext)>(&self, f: &mut F) {
        walk_nodes(&self.nodes, WalkContext::root(), f);
    }
}

/// Position information passed to [`UclDocument::walk`] callbacks.
#[derive(Debug, Clone, Copy)]
pub struct WalkContext {
    /// Number of enclosing conditional or switch blocks.
    pub depth: usize,
    /// True when any ancestor is a switch block.
    pub in_switch: bool,
    /// True when any ancestor is a conditional block.
    pub in_condition: bool,
    /// True when any ancestor is tagged content.
    pub in_tagged: bool,
}

impl WalkContext {
    fn root() -> Self {
        WalkContext {
            depth: 0,
            in_switch: false,
            in_condition: false,
            in_tagged: false,
        }
    }

    /// True when the node sits outside every branching construct.
    pub fn unconditional(&self) -> bool {
        !self.in_switch && !self.in_condition
    }
}

fn walk_nodes<F: FnMut(&Node, WalkContext)>(nodes: &[Node], ctx: WalkContext, f: &mut F) {
    for node in nodes {
        f(node, ctx);
        match node {
            Node::Text(_) | Node::Directive(_) => {}
            Node::Conditional(c) => {
                let inner = WalkContext {
                    depth: ctx.depth + 1,
                    in_condition: true,
                    ..ctx
                };
                walk_nodes(&c.children, inner, f);
            }
            Node::Switch(s) => {
                let inner = WalkContext {
                    depth: ctx.depth + 1,
                    in_switch: true,
                    ..ctx
                };
                for case in &s.cases {
                    walk_nodes(&case.lead, inner, f);
                    walk_nodes(&case.children, inner, f);
                }
                walk_nodes(&s.tail, inner, f);
            }
            Node::Tagged(t) => {
                let inner = WalkContext {
                    in_tagged: true,
                    ..ctx
                };
                walk_nodes(&t.children, inner, f);
            }
        }
    }
}
