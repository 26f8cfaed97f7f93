//! Structural measurements of a parsed document: branch cardinalities,
//! procedural load, structural overhead, architecture classification, and a
//! heuristic specification-level estimate.
//!
//! Token counts everywhere are whitespace tokens (maximal non-whitespace
//! runs), a deterministic proxy; no model tokenizer is emulated.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{Node, SourceSpan, UclDocument};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("overhead reduction is undefined when the baseline overhead is zero")]
    DivisionByZero,
}

/// Deterministic token count: the number of maximal non-whitespace runs.
pub fn count_tokens(text: &str) -> usize {
    text.split_whitespace().count()
}

// ---------------------------------------------------------------------
// Structural overhead
// ---------------------------------------------------------------------

/// One switch's contribution to the branching term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwitchTerm {
    pub selector: String,
    pub cases: usize,
    pub ln_cases: f64,
}

/// Decomposition of structural overhead into its branching and procedural
/// terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OverheadBreakdown {
    /// gamma * sum over switches of ln(case count).
    pub branching: f64,
    /// delta * procedural token count.
    pub procedural: f64,
    pub total: f64,
    pub per_switch: Vec<SwitchTerm>,
    /// Procedural token count before scaling by delta.
    pub procedural_tokens: usize,
    /// Selectors of switches with zero cases, excluded from the sum because
    /// ln(0) is undefined.
    pub zero_case_switches: Vec<String>,
}

/// Computes the structural overhead of a document: the branching term sums
/// `ln(case count)` over every switch block (keyword conditions contribute
/// nothing), and the procedural term scales the token count of root-level
/// unconditional tagged content.
pub fn structural_overhead(doc: &UclDocument, gamma: f64, delta: f64) -> OverheadBreakdown {
    let mut per_switch = Vec::new();
    let mut zero_case_switches = Vec::new();
    doc.walk(&mut |node, _| {
        if let Node::Switch(s) = node {
            let cases = s.cases.len();
            if cases == 0 {
                zero_case_switches.push(s.selector.id.clone());
            } else {
                per_switch.push(SwitchTerm {
                    selector: s.selector.id.clone(),
                    cases,
                    ln_cases: (cases as f64).ln(),
                });
            }
        }
    });
    let branching = gamma * per_switch.iter().map(|t| t.ln_cases).sum::<f64>();
    let procedural_tokens = procedural_tokens(doc);
    let procedural = delta * procedural_tokens as f64;
    OverheadBreakdown {
        branching,
        procedural,
        total: branching + procedural,
        per_switch,
        procedural_tokens,
        zero_case_switches,
    }
}

/// Token count of root-level unconditional tagged content: tagged regions
/// with no conditional, switch, or tagged ancestor. This is the procedural
/// load |L_proc| that the overhead model charges for.
pub fn procedural_tokens(doc: &UclDocument) -> usize {
    let mut total = 0;
    doc.walk(&mut |node, ctx| {
        if let Node::Tagged(t) = node {
            if ctx.unconditional() && !ctx.in_tagged {
                total += count_tokens(&crate::syntax::emit_nodes(&t.children));
            }
        }
    });
    total
}

/// Fractional overhead reduction from `before` to `after`.
pub fn overhead_reduction(
    before: &OverheadBreakdown,
    after: &OverheadBreakdown,
) -> Result<f64, MetricsError> {
    if before.total == 0.0 {
        return Err(MetricsError::DivisionByZero);
    }
    Ok((before.total - after.total) / before.total)
}

// ---------------------------------------------------------------------
// Structure profile
// ---------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Architecture {
    /// No branching constructs at all.
    Standard,
    /// Switch blocks only (conditions, if any, live inside cases).
    Switch,
    /// Keyword conditions only.
    Keyword,
    /// Both top-level conditions and switches.
    Mixed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StructureProfile {
    pub total_lines: usize,
    pub switch_blocks: usize,
    pub condition_blocks: usize,
    pub critical_directives: usize,
    pub directive_histogram: BTreeMap<String, usize>,
    pub max_nesting_depth: usize,
    pub architecture: Architecture,
}

/// Counts constructs and classifies the document's architecture.
///
/// A condition counts as "top level" for classification when it is the
/// outermost branching construct on its path: conditions nested inside
/// switch cases do not make a switch-architecture prompt mixed.
pub fn profile(doc: &UclDocument) -> StructureProfile {
    let mut switch_blocks = 0;
    let mut condition_blocks = 0;
    let mut top_level_conditions = 0;
    let mut critical_directives = 0;
    let mut directive_histogram = BTreeMap::new();
    let mut max_nesting_depth = 0;

    doc.walk(&mut |node, ctx| match node {
        Node::Switch(_) => {
            switch_blocks += 1;
            max_nesting_depth = max_nesting_depth.max(ctx.depth + 1);
        }
        Node::Conditional(_) => {
            condition_blocks += 1;
            max_nesting_depth = max_nesting_depth.max(ctx.depth + 1);
            if ctx.unconditional() {
                top_level_conditions += 1;
            }
        }
        Node::Directive(d) => {
            let name = d.name.as_str().to_string();
            if name == "CRITICAL" {
                critical_directives += 1;
            }
            *directive_histogram.entry(name).or_insert(0) += 1;
        }
        _ => {}
    });

    let architecture = match (switch_blocks, condition_blocks, top_level_conditions) {
        (0, 0, _) => Architecture::Standard,
        (0, _, _) => Architecture::Keyword,
        (_, _, 0) => Architecture::Switch,
        _ => Architecture::Mixed,
    };

    StructureProfile {
        total_lines: doc.source.lines().count(),
        switch_blocks,
        condition_blocks,
        critical_directives,
        directive_histogram,
        max_nesting_depth,
        architecture,
    }
}

// ---------------------------------------------------------------------
// Specification-level estimate
// ---------------------------------------------------------------------

/// Feature weights for the specification-level estimator. All weights are
/// non-negative so the estimate stays monotone in document growth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpecWeights {
    pub line_count: f64,
    pub condition_density: f64,
    pub directive_density: f64,
    pub procedural_share: f64,
}

impl Default for SpecWeights {
    fn default() -> Self {
        // Calibrated against the five reference layouts shipped with the
        // CLI fixtures; see the estimator tests.
        SpecWeights {
            line_count: 0.459,
            condition_density: 0.231,
            directive_density: 0.093,
            procedural_share: 0.204,
        }
    }
}

/// Heuristic estimate of the specification level S.
///
/// The estimator is advisory only: every model operation takes S as an
/// explicit argument, so a supplied value always wins over this guess.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecEstimate {
    pub s_value: f64,
    pub features: BTreeMap<String, f64>,
    pub is_heuristic: bool,
}

pub fn estimate_specification(doc: &UclDocument, weights: Option<SpecWeights>) -> SpecEstimate {
    let w = weights.unwrap_or_default();
    let p = profile(doc);
    let lines = p.total_lines as f64;
    let directives: usize = p.directive_histogram.values().sum();

    let total_tokens = count_tokens(&doc.source);
    let proc_tokens = procedural_tokens(doc);

    let f_lines = (lines / 400.0).min(1.0);
    let f_cond = if lines > 0.0 {
        (10.0 * p.condition_blocks as f64 / lines).min(1.0)
    } else {
        0.0
    };
    let f_dir = if lines > 0.0 {
        (10.0 * directives as f64 / lines).min(1.0)
    } else {
        0.0
    };
    let f_proc = if total_tokens > 0 {
        proc_tokens as f64 / total_tokens as f64
    } else {
        0.0
    };

    let raw = w.line_count * f_lines
        + w.condition_density * f_cond
        + w.directive_density * f_dir
        + w.procedural_share * f_proc;

    let mut features = BTreeMap::new();
    features.insert("line_count_norm".to_string(), f_lines);
    features.insert("condition_density".to_string(), f_cond);
    features.insert("directive_density".to_string(), f_dir);
    features.insert("procedural_share".to_string(), f_proc);

    SpecEstimate {
        s_value: raw.clamp(0.0, 1.0),
        features,
        is_heuristic: true,
    }
}

/// Spans of switches with zero cases, for diagnostics.
pub fn zero_case_switch_spans(doc: &UclDocument) -> Vec<SourceSpan> {
    let mut spans = Vec::new();
    doc.walk(&mut |node, _| {
        if let Node::Switch(s) = node {
            if s.cases.is_empty() {
                spans.push(s.span);
            }
        }
    });
    spans
}
