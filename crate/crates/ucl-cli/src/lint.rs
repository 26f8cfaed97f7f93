//! The lint rule catalog.
//!
//! Rule ids are stable identifiers; `explain()` documents every one of
//! them. Only over-specification (and outright syntax errors) are ERROR
//! severity — the one failure mode that reliably wrecks a prompt — while
//! structural guideline deviations stay WARN or INFO.

use serde::Serialize;

use ucl_core::metrics::{estimate_specification, procedural_tokens, profile};
use ucl_core::model::ModelParams;
use ucl_core::syntax::{
    collect_concept_refs, validate_grammar, Node, ParseError, Severity, SourceSpan, UclDocument,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LintFinding {
    pub rule_id: &'static str,
    pub severity: Severity,
    pub span: SourceSpan,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measured: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
}

/// Tunable rule thresholds. The defaults are the shipped guidelines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LintConfig {
    pub keyword_min: usize,
    pub keyword_max: usize,
    pub domain_min: usize,
    pub domain_max: usize,
    pub critical_min: usize,
    pub critical_max: usize,
    /// Unconditional procedural tokens above this trip UCL006.
    pub procedural_token_limit: usize,
    /// Block nesting deeper than this trips UCL009.
    pub nesting_limit: usize,
}

impl Default for LintConfig {
    fn default() -> Self {
        LintConfig {
            keyword_min: 3,
            keyword_max: 7,
            domain_min: 5,
            domain_max: 10,
            critical_min: 1,
            critical_max: 2,
            procedural_token_limit: 50,
            nesting_limit: 3,
        }
    }
}

const RULES: &[(&str, &str, &str)] = &[
    ("UCL000", "ERROR", "source does not parse; the finding carries the parser error"),
    ("UCL001", "ERROR", "over-specification: S above the saturation threshold degrades quality"),
    ("UCL002", "WARN", "SWITCH block: every case is read regardless of the input"),
    ("UCL003", "WARN", "keyword list outside the 3..=7 range discriminates poorly"),
    ("UCL004", "INFO", "conditional domain count outside the 5..=10 coverage range"),
    ("UCL005", "INFO", "CRITICAL directive count outside the 1..=2 range"),
    ("UCL006", "WARN", "unconditional procedural block large enough to inflate overhead"),
    ("UCL007", "INFO", "concept reference without a domain scope"),
    ("UCL008", "varies", "semantic finding: reference closure, domain coherence, or parse-time evaluability"),
    ("UCL009", "WARN", "blocks nested deeper than the configured limit"),
    ("UCL010", "INFO", "parser note: lowercase marker or stray closer treated as text"),
];

/// Human-readable catalog documentation; covers every rule id a finding
/// can carry.
pub fn explain() -> String {
    let mut out = String::from("Lint rule catalog:\n");
    for (id, severity, text) in RULES {
        out.push_str(&format!("  {id}  [{severity}]  {text}\n"));
    }
    out
}

/// Wraps a parse failure as the UCL000 finding so that linting never
/// crashes on bad input.
pub fn parse_failure_finding(err: &ParseError) -> LintFinding {
    LintFinding {
        rule_id: "UCL000",
        severity: Severity::Error,
        span: err.span(),
        message: err.to_string(),
        measured: None,
        threshold: None,
    }
}

pub fn lint(doc: &UclDocument, params: &ModelParams, supplied_s: Option<f64>) -> Vec<LintFinding> {
    lint_with_config(doc, params, supplied_s, &LintConfig::default())
}

pub fn lint_with_config(
    doc: &UclDocument,
    params: &ModelParams,
    supplied_s: Option<f64>,
    config: &LintConfig,
) -> Vec<LintFinding> {
    let mut findings = Vec::new();
    let doc_span = SourceSpan::new(0, doc.source.len(), 1, 1);
    let prof = profile(doc);

    // UCL001: over-specification.
    let s = supplied_s.unwrap_or_else(|| estimate_specification(doc, None).s_value);
    if s > params.s_star {
        findings.push(LintFinding {
            rule_id: "UCL001",
            severity: Severity::Error,
            span: doc_span,
            message: format!(
                "specification level {s:.3} exceeds the saturation threshold {:.3}; \
                 additional specification degrades quality",
                params.s_star
            ),
            measured: Some(s),
            threshold: Some(params.s_star),
        });
    }

    // UCL002 per switch, UCL003 per condition, UCL009 on deep nesting.
    doc.walk(&mut |node, ctx| match node {
        Node::Switch(s) => {
            findings.push(LintFinding {
                rule_id: "UCL002",
                severity: Severity::Warn,
                span: s.span,
                message: format!(
                    "SWITCH on '{}' forces all {} cases to be read before selection; \
                     keyword conditions skip inactive blocks entirely",
                    s.selector.id,
                    s.cases.len()
                ),
                measured: Some(s.cases.len() as f64),
                threshold: None,
            });
            check_depth(ctx.depth + 1, s.span, config, &mut findings);
        }
        Node::Conditional(c) => {
            let count = c.condition.keywords.len();
            if count < config.keyword_min || count > config.keyword_max {
                let threshold = if count < config.keyword_min {
                    config.keyword_min
                } else {
                    config.keyword_max
                };
                findings.push(LintFinding {
                    rule_id: "UCL003",
                    severity: Severity::Warn,
                    span: c.span,
                    message: format!(
                        "condition on '{}' lists {count} keywords; between {} and {} \
                         discriminate best",
                        c.condition.subject.id, config.keyword_min, config.keyword_max
                    ),
                    measured: Some(count as f64),
                    threshold: Some(threshold as f64),
                });
            }
            check_depth(ctx.depth + 1, c.span, config, &mut findings);
        }
        _ => {}
    });

    // UCL004: domain coverage.
    let domains = prof.condition_blocks;
    if domains < config.domain_min || domains > config.domain_max {
        let threshold = if domains < config.domain_min {
            config.domain_min
        } else {
            config.domain_max
        };
        findings.push(LintFinding {
            rule_id: "UCL004",
            severity: Severity::Info,
            span: doc_span,
            message: format!(
                "{domains} conditional domains; {} to {} give good coverage without overhead",
                config.domain_min, config.domain_max
            ),
            measured: Some(domains as f64),
            threshold: Some(threshold as f64),
        });
    }

    // UCL005: CRITICAL usage.
    let criticals = prof.critical_directives;
    if criticals < config.critical_min || criticals > config.critical_max {
        let threshold = if criticals < config.critical_min {
            config.critical_min
        } else {
            config.critical_max
        };
        findings.push(LintFinding {
            rule_id: "UCL005",
            severity: Severity::Info,
            span: doc_span,
            message: format!(
                "{criticals} CRITICAL directives; use {} to {} for the highest-priority \
                 constraints",
                config.critical_min, config.critical_max
            ),
            measured: Some(criticals as f64),
            threshold: Some(threshold as f64),
        });
    }

    // UCL006: unconditional procedural load.
    let proc_tokens = procedural_tokens(doc);
    if proc_tokens > config.procedural_token_limit {
        let span = first_root_tagged_span(doc).unwrap_or(doc_span);
        findings.push(LintFinding {
            rule_id: "UCL006",
            severity: Severity::Warn,
            span,
            message: format!(
                "{proc_tokens} unconditional procedural tokens inflate overhead; gate the \
                 block behind a condition or trim it below {}",
                config.procedural_token_limit
            ),
            measured: Some(proc_tokens as f64),
            threshold: Some(config.procedural_token_limit as f64),
        });
    }

    // UCL007: unscoped concept references.
    for r in collect_concept_refs(doc) {
        if !r.is_scoped() {
            findings.push(LintFinding {
                rule_id: "UCL007",
                severity: Severity::Info,
                span: r.span,
                message: format!(
                    "concept '{}' has no domain scope; scoped concepts disambiguate better",
                    r.id
                ),
                measured: None,
                threshold: None,
            });
        }
    }

    // UCL008: semantic findings, promoted with their own severities.
    for finding in validate_grammar(doc) {
        findings.push(LintFinding {
            rule_id: "UCL008",
            severity: finding.severity,
            span: finding.span,
            message: finding.message,
            measured: None,
            threshold: None,
        });
    }

    // UCL010: parser diagnostics.
    for warning in &doc.diagnostics {
        findings.push(LintFinding {
            rule_id: "UCL010",
            severity: Severity::Info,
            span: warning.span,
            message: warning.message.clone(),
            measured: None,
            threshold: None,
        });
    }

    findings.sort_by_key(|f| (f.span.start, f.rule_id));
    findings
}

fn check_depth(depth: usize, span: SourceSpan, config: &LintConfig, out: &mut Vec<LintFinding>) {
    if depth > config.nesting_limit {
        out.push(LintFinding {
            rule_id: "UCL009",
            severity: Severity::Warn,
            span,
            message: format!(
                "block nested {depth} levels deep; keep nesting at or below {}",
                config.nesting_limit
            ),
            measured: Some(depth as f64),
            threshold: Some(config.nesting_limit as f64),
        });
    }
}

fn first_root_tagged_span(doc: &UclDocument) -> Option<SourceSpan> {
    let mut span = None;
    doc.walk(&mut |node, ctx| {
        if span.is_none() && ctx.unconditional() && !ctx.in_tagged {
            if let Node::Tagged(t) = node {
                span = Some(t.span);
            }
        }
    });
    span
}

/// True when any finding is ERROR severity; drives the process exit code.
pub fn has_errors(findings: &[LintFinding]) -> bool {
    findings.iter().any(|f| f.severity == Severity::Error)
}

/// Every rule id referenced by the linter, for catalog-closure checks.
pub fn rule_ids() -> Vec<&'static str> {
    RULES.iter().map(|(id, _, _)| *id).collect()
}
