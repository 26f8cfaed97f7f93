//! Semantic checks over a parsed or constructed document.
//!
//! These are findings, not failures: a document that parses cleanly can
//! still violate the semantic constraints (a constructed document can even
//! carry a closer that names the wrong concept), and the checks report
//! rather than reject.

use std::collections::BTreeMap;

use serde::Serialize;

use super::ast::{ConceptRef, Node, SourceSpan, UclDocument};

/// Severity shared by semantic findings and lint findings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Severity {
    Info,
    Warn,
    Error,
}

impl Severity {
    pub fn as_str(&self) -> &'static str {
        match self {
            Severity::Info => "INFO",
            Severity::Warn => "WARN",
            Severity::Error => "ERROR",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SemanticRule {
    /// A block closer's concept id matches no opener.
    ReferenceClosure,
    /// The same concept id appears with two different domain scopes.
    DomainCoherence,
    /// A condition that cannot be decided by parse-time text matching.
    ParseTimeEvaluation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SemanticFinding {
    pub rule: SemanticRule,
    pub severity: Severity,
    pub message: String,
    pub span: SourceSpan,
}

/// Checks domain coherence, reference closure, and parse-time evaluability.
pub fn validate_grammar(doc: &UclDocument) -> Vec<SemanticFinding> {
    let mut findings = Vec::new();
    check_reference_closure(doc, &mut findings);
    check_domain_coherence(doc, &mut findings);
    check_parse_time_evaluation(doc, &mut findings);
    findings
}

fn check_reference_closure(doc: &UclDocument, findings: &mut Vec<SemanticFinding>) {
    doc.walk(&mut |node, _| {
        let checks: Vec<(&str, &str, &str, SourceSpan)> = match node {
            Node::Conditional(c) => vec![(
                "CONDITION",
                c.condition.subject.id.as_str(),
                c.closer_text.as_str(),
                c.span,
            )],
            Node::Switch(s) => {
                let mut v = vec![(
                    "SWITCH",
                    s.selector.id.as_str(),
                    s.closer_text.as_str(),
                    s.span,
                )];
                for case in &s.cases {
                    v.push(("CASE", case.label.id.as_str(), case.closer_text.as_str(), case.span));
                }
                v
            }
            _ => return,
        };
        for (kind, opener_id, closer_text, span) in checks {
            match closer_ref_id(kind, closer_text) {
                Some(Some(closer_id)) => {
                    if !opener_id.starts_with(&closer_id) {
                        findings.push(SemanticFinding {
                            rule: SemanticRule::ReferenceClosure,
                            severity: Severity::Error,
                            message: format!(
                                "{kind} closer references '{closer_id}', which matches no opener \
                                 (expected a prefix of '{opener_id}')"
                            ),
                            span,
                        });
                    }
                }
                Some(None) => {} // bare closer matches any opener
                None => findings.push(SemanticFinding {
                    rule: SemanticRule::ReferenceClosure,
                    severity: Severity::Error,
                    message: format!("{kind} closer '{closer_text}' is not a well-formed closer"),
                    span,
                }),
            }
        }
    });
}

/// Extracts the concept id named by a closer, `Ok(None)` style: outer None
/// means the closer text is malformed, inner None means a bare closer.
fn closer_ref_id(kind: &str, closer_text: &str) -> Option<Option<String>> {
    let tail = closer_text.strip_prefix("^^/")?.strip_prefix(kind)?;
    if let Some(t) = tail.strip_prefix(':') {
        let t = t.trim_start();
        let id = if let Some((len, r)) = parse_ref_str(t) {
            if t[len..].trim_start() != "^^" {
                return None;
            }
            r.id
        } else {
            let len = ident_len(t);
            if len == 0 || t[len..].trim_start() != "^^" {
                return None;
            }
            t[..len].to_string()
        };
        Some(Some(id))
    } else if tail == "^^" {
        Some(None)
    } else {
        None
    }
}

fn check_domain_coherence(doc: &UclDocument, findings: &mut Vec<SemanticFinding>) {
    let mut seen: BTreeMap<String, (String, SourceSpan)> = BTreeMap::new();
    let mut reported: Vec<String> = Vec::new();
    for r in collect_concept_refs(doc) {
        let Some(domain) = r.domain.clone() else {
            continue;
        };
        match seen.get(&r.id) {
            None => {
                seen.insert(r.id.clone(), (domain, r.span));
            }
            Some((first, _)) if *first != domain && !reported.contains(&r.id) => {
                findings.push(SemanticFinding {
                    rule: SemanticRule::DomainCoherence,
                    severity: Severity::Warn,
                    message: format!(
                        "concept '{}' is used with conflicting domain scopes '{}' and '{}'",
                        r.id, first, domain
                    ),
                    span: r.span,
                });
                reported.push(r.id.clone());
            }
            _ => {}
        }
    }
}

fn check_parse_time_evaluation(doc: &UclDocument, findings: &mut Vec<SemanticFinding>) {
    doc.walk(&mut |node, _| {
        if let Node::Conditional(c) = node {
            if c.condition.operator == super::ast::CompareOp::Equals {
                findings.push(SemanticFinding {
                    rule: SemanticRule::ParseTimeEvaluation,
                    severity: Severity::Info,
                    message: format!(
                        "EQUALS condition on '{}' needs an external binding; it cannot be \
                         decided from the input text at parse time",
                        c.condition.subject.id
                    ),
                    span: c.span,
                });
            }
        }
    });
}

/// Every concept reference in the document: condition subjects, switch
/// selectors, case labels, and well-formed `{{concept:…}}` references
/// embedded in text runs and directive text. Closers are skipped; they
/// abbreviate their opener by convention.
pub fn collect_concept_refs(doc: &UclDocument) -> Vec<ConceptRef> {
    let mut refs = Vec::new();
    doc.walk(&mut |node, _| match node {
        Node::Conditional(c) => refs.push(c.condition.subject.clone()),
        Node::Switch(s) => {
            refs.push(s.selector.clone());
            for case in &s.cases {
                refs.push(case.label.clone());
            }
        }
        Node::Text(t) => scan_embedded_refs(&t.content, t.span, &mut refs),
        Node::Directive(d) => scan_embedded_refs(&d.raw, d.span, &mut refs),
        Node::Tagged(_) => {}
    });
    refs
}

/// Scans free text for well-formed `{{concept:id}}` / `{{concept:id:domain}}`
/// references. Anything else between double braces is plain text.
fn scan_embedded_refs(text: &str, base: SourceSpan, refs: &mut Vec<ConceptRef>) {
    let mut line = base.line;
    let mut col = base.column;
    let mut i = 0;
    while i < text.len() {
        if text[i..].starts_with("{{") {
            if let Some((len, mut r)) = parse_ref_str(&text[i..]) {
                r.span = SourceSpan::new(base.start + i, base.start + i + len, line, col);
                refs.push(r);
                for ch in text[i..i + len].chars() {
                    if ch == '\n' {
                        line += 1;
                        col = 1;
                    } else {
                        col += 1;
                    }
                }
                i += len;
                continue;
            }
        }
        let ch = text[i..].chars().next().expect("in-bounds char");
        if ch == '\n' {
            line += 1;
            col = 1;
        } else {
            col += 1;
        }
        i += ch.len_utf8();
    }
}

/// Strict standalone parse of a concept reference at the start of `text`.
/// Returns the byte length consumed and the reference.
pub(crate) fn parse_ref_str(text: &str) -> Option<(usize, ConceptRef)> {
    let t = text.strip_prefix("{{")?.strip_prefix("concept")?.strip_prefix(':')?;
    let id_len = ident_len(t);
    if id_len == 0 {
        return None;
    }
    let id = t[..id_len].to_string();
    let mut rest = &t[id_len..];
    let mut domain = None;
    if let Some(after) = rest.strip_prefix(':') {
        let d_len = ident_len(after);
        if d_len == 0 {
            return None;
        }
        domain = Some(after[..d_len].to_string());
        rest = &after[d_len..];
    }
    let rest_after = rest.strip_prefix("}}")?;
    let len = text.len() - rest_after.len();
    Some((
        len,
        ConceptRef {
            id,
            domain,
            span: SourceSpan::synthetic(),
        },
    ))
}

fn ident_len(text: &str) -> usize {
    let mut chars = text.char_indices();
    match chars.next() {
        Some((_, c)) if c.is_ascii_alphabetic() || c == '_' => {}
        _ => return 0,
    }
    chars
        .find(|(_, c)| !(c.is_ascii_alphanumeric() || *c == '_'))
        .map(|(i, _)| i)
        .unwrap_or(text.len())
}
