//! Selective expansion of a document against a concrete input.
//!
//! Indicator evaluation turns each keyword condition into a 0/1 gate;
//! compiling emits only the gated content that fires, strips the block
//! markers, and reports activation and token-savings metrics. Token counts
//! stay conserved because emitted segments are always whitespace-separated
//! from their neighbors and omissions collapse to a single newline.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metrics::count_tokens;
use crate::syntax::{
    CompareOp, ConditionalBlock, KeywordCondition, Node, SourceSpan, SwitchBlock, UclDocument,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CompileError {
    #[error("selector '{selector}' does not name a switch in the document")]
    UnknownSelector { selector: String },
    #[error("case '{case}' does not exist under selector '{selector}'")]
    UnknownCase { selector: String, case: String },
}

/// The concrete input a document is compiled against.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputContext {
    pub text: String,
    /// Concept-id bindings for EQUALS conditions.
    pub bindings: BTreeMap<String, String>,
    /// Lowercased whitespace tokens of `text`.
    pub normalized_tokens: Vec<String>,
    normalized_text: String,
}

impl InputContext {
    pub fn from_text(text: impl Into<String>) -> Self {
        Self::with_bindings(text, BTreeMap::new())
    }

    pub fn with_bindings(text: impl Into<String>, bindings: BTreeMap<String, String>) -> Self {
        let text = text.into();
        let normalized_tokens: Vec<String> = text
            .split_whitespace()
            .map(|t| t.to_lowercase())
            .collect();
        let normalized_text = normalized_tokens.join(" ");
        InputContext {
            text,
            bindings,
            normalized_tokens,
            normalized_text,
        }
    }
}

/// Parses a `key=value` bindings file; `#` starts a comment line.
pub fn parse_bindings(text: &str) -> Result<BTreeMap<String, String>, String> {
    let mut bindings = BTreeMap::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("line {}: expected key=value", idx + 1))?;
        bindings.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(bindings)
}

/// Result of evaluating one indicator, with the unbound-concept warning
/// when an EQUALS condition had no binding to compare against.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorEval {
    pub active: bool,
    pub unbound_concept: Option<String>,
}

pub fn evaluate_indicator(condition: &KeywordCondition, ctx: &InputContext) -> IndicatorEval {
    match condition.operator {
        CompareOp::Contains => {
            let active = condition
                .keywords
                .iter()
                .any(|kw| ctx.normalized_text.contains(&kw.to_lowercase()));
            IndicatorEval {
                active,
                unbound_concept: None,
            }
        }
        CompareOp::Equals => match ctx.bindings.get(&condition.subject.id) {
            Some(value) => {
                let value = value.to_lowercase();
                let active = condition
                    .keywords
                    .iter()
                    .any(|kw| kw.to_lowercase() == value);
                IndicatorEval {
                    active,
                    unbound_concept: None,
                }
            }
            None => IndicatorEval {
                active: false,
                unbound_concept: Some(condition.subject.id.clone()),
            },
        },
    }
}

/// The indicator value itself: true (1) when the condition fires on the
/// input, false (0) otherwise. An EQUALS condition with no binding is 0.
pub fn indicator(condition: &KeywordCondition, ctx: &InputContext) -> bool {
    evaluate_indicator(condition, ctx).active
}

/// One activated conditional block, identified by its document-order index
/// among all conditional blocks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActiveBlock {
    pub index: usize,
    pub concept: String,
    pub line: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompileWarning {
    pub message: String,
    pub span: SourceSpan,
}

/// A document compiled against an input.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompiledPrompt {
    pub emitted: String,
    /// The active domain set: conditional blocks whose indicator fired.
    pub active_set: Vec<ActiveBlock>,
    /// Active blocks over total conditional blocks; absent when the
    /// document has no conditional blocks.
    pub activation_fraction: Option<f64>,
    /// Total conditional blocks in the document.
    pub domain_count: usize,
    /// Token count with every indicator forced to 1 and all cases kept.
    pub tokens_full: usize,
    pub tokens_compiled: usize,
    pub estimated_savings: usize,
    pub warnings: Vec<CompileWarning>,
}

/// Selector map: switch selector id to the case id to keep. Without an
/// entry a switch emits all of its cases.
pub type SwitchSelection = BTreeMap<String, String>;

/// Compiles the document: conditional blocks with a zero indicator vanish,
/// blocks that fire emit their children without the markers, switches emit
/// every case unless the selection names one, and text, directives, and
/// tagged content always emit.
pub fn compile(
    doc: &UclDocument,
    ctx: &InputContext,
    selection: Option<&SwitchSelection>,
) -> Result<CompiledPrompt, CompileError> {
    if let Some(sel) = selection {
        check_selection(doc, sel)?;
    }

    let mut actual = Renderer::new(Mode::Actual, ctx, selection);
    actual.render_nodes(&doc.nodes);
    let emitted = actual.emitter.finish();
    let tokens_compiled = count_tokens(&emitted);

    let mut forced = Renderer::new(Mode::Forced, ctx, None);
    forced.render_nodes(&doc.nodes);
    let tokens_full = count_tokens(&forced.emitter.finish());

    let domain_count = count_conditionals(&doc.nodes);
    let active_set = actual.active_set;
    let activation_fraction = if domain_count > 0 {
        Some(active_set.len() as f64 / domain_count as f64)
    } else {
        None
    };

    Ok(CompiledPrompt {
        emitted,
        active_set,
        activation_fraction,
        domain_count,
        tokens_full,
        tokens_compiled,
        estimated_savings: tokens_full - tokens_compiled,
        warnings: actual.warnings,
    })
}

/// Structural estimate of the tokens removed by compilation: the summed
/// content tokens of skipped conditional blocks plus, when a selection is
/// given, the content tokens of unselected cases. Cross-checks the
/// difference `tokens_full - tokens_compiled` reported by [`compile`].
pub fn savings_estimate(
    doc: &UclDocument,
    ctx: &InputContext,
    selection: Option<&SwitchSelection>,
) -> usize {
    let mut walker = SavingsWalker {
        ctx,
        selection,
        total: 0,
    };
    walker.walk(&doc.nodes);
    walker.total
}

/// Active blocks over total conditional blocks for the given input.
pub fn activation_fraction(doc: &UclDocument, ctx: &InputContext) -> Option<f64> {
    compile(doc, ctx, None)
        .expect("compilation without a selection cannot fail")
        .activation_fraction
}

/// Efficiency of an always-active prompt with `d` domains: 1/d. Undefined
/// for zero domains.
pub fn efficiency_standard(d: usize) -> Option<f64> {
    if d == 0 {
        None
    } else {
        Some(1.0 / d as f64)
    }
}

// ---------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------

#[derive(Clone, Copy, PartialEq)]
enum Mode {
    /// Evaluate indicators and honor the selection.
    Actual,
    /// Force every indicator to 1 and keep every case.
    Forced,
}

/// Output writer that keeps token counts additive: content on either side
/// of a block boundary is separated by at least one whitespace character,
/// and an omitted block collapses the surrounding whitespace to one
/// newline.
struct Emitter {
    buf: String,
    sep_pending: bool,
    collapse_pending: bool,
}

impl Emitter {
    fn new() -> Self {
        Emitter {
            buf: String::new(),
            sep_pending: false,
            collapse_pending: false,
        }
    }

    fn text(&mut self, s: &str) {
        if s.is_empty() {
            return;
        }
        if self.collapse_pending {
            let trimmed = s.trim_start();
            if trimmed.is_empty() {
                return; // swallow whitespace runs around the omission
            }
            self.buf.truncate(self.buf.trim_end().len());
            if !self.buf.is_empty() {
                self.buf.push('\n');
            }
            self.buf.push_str(trimmed);
            self.collapse_pending = false;
            self.sep_pending = false;
        } else if self.sep_pending {
            if !self.buf.is_empty()
                && !self.buf.ends_with(|c: char| c.is_whitespace())
                && !s.starts_with(|c: char| c.is_whitespace())
            {
                self.buf.push('\n');
            }
            self.buf.push_str(s);
            self.sep_pending = false;
        } else {
            self.buf.push_str(s);
        }
    }

    /// Marks the edge of an emitted block's content.
    fn boundary(&mut self) {
        if !self.collapse_pending {
            self.sep_pending = true;
        }
    }

    /// Marks an omitted block.
    fn omitted(&mut self) {
        self.collapse_pending = true;
        self.sep_pending = false;
    }

    fn finish(mut self) -> String {
        if self.collapse_pending {
            self.buf.truncate(self.buf.trim_end().len());
        }
        self.buf
    }
}

struct Renderer<'a> {
    mode: Mode,
    ctx: &'a InputContext,
    selection: Option<&'a SwitchSelection>,
    emitter: Emitter,
    active_set: Vec<ActiveBlock>,
    warnings: Vec<CompileWarning>,
    next_index: usize,
}

impl<'a> Renderer<'a> {
    fn new(mode: Mode, ctx: &'a InputContext, selection: Option<&'a SwitchSelection>) -> Self {
        Renderer {
            mode,
            ctx,
            selection,
            emitter: Emitter::new(),
            active_set: Vec::new(),
            warnings: Vec::new(),
            next_index: 0,
        }
    }

    fn render_nodes(&mut self, nodes: &[Node]) {
        for node in nodes {
            self.render_node(node);
        }
    }

    fn render_node(&mut self, node: &Node) {
        match node {
            Node::Text(t) => self.emitter.text(&t.content),
            Node::Directive(d) => self.emitter.text(&d.raw),
            Node::Tagged(t) => {
                self.emitter.text(&format!("<{}>", t.name));
                self.render_nodes(&t.children);
                self.emitter.text(&format!("</{}>", t.name));
            }
            Node::Conditional(c) => self.render_conditional(c),
            Node::Switch(s) => self.render_switch(s),
        }
    }

    fn render_conditional(&mut self, block: &ConditionalBlock) {
        let index = self.next_index;
        self.next_index += 1;
        let active = match self.mode {
            Mode::Forced => true,
            Mode::Actual => {
                let eval = evaluate_indicator(&block.condition, self.ctx);
                if let Some(concept) = eval.unbound_concept {
                    self.warnings.push(CompileWarning {
                        message: format!(
                            "EQUALS condition on '{concept}' has no binding; indicator \
                             defaults to 0"
                        ),
                        span: block.span,
                    });
                }
                eval.active
            }
        };
        if active {
            if self.mode == Mode::Actual {
                self.active_set.push(ActiveBlock {
                    index,
                    concept: block.condition.subject.id.clone(),
                    line: block.span.line,
                });
            }
            self.emitter.boundary();
            self.render_nodes(&block.children);
            self.emitter.boundary();
        } else {
            self.next_index += count_conditionals(&block.children);
            self.emitter.omitted();
        }
    }

    fn render_switch(&mut self, block: &SwitchBlock) {
        let selected_case = match (self.mode, self.selection) {
            (Mode::Actual, Some(sel)) => sel.get(&block.selector.id),
            _ => None,
        };
        for case in &block.cases {
            self.render_nodes(&case.lead);
            let keep = match selected_case {
                None => true,
                Some(wanted) => case.label.id == *wanted,
            };
            if keep {
                self.emitter.boundary();
                self.render_nodes(&case.children);
                self.emitter.boundary();
            } else {
                self.next_index += count_conditionals(&case.children);
                self.emitter.omitted();
            }
        }
        self.render_nodes(&block.tail);
    }
}

fn count_conditionals(nodes: &[Node]) -> usize {
    let mut count = 0;
    for node in nodes {
        match node {
            Node::Conditional(c) => count += 1 + count_conditionals(&c.children),
            Node::Switch(s) => {
                for case in &s.cases {
                    count += count_conditionals(&case.lead);
                    count += count_conditionals(&case.children);
                }
                count += count_conditionals(&s.tail);
            }
            Node::Tagged(t) => count += count_conditionals(&t.children),
            _ => {}
        }
    }
    count
}

fn check_selection(doc: &UclDocument, selection: &SwitchSelection) -> Result<(), CompileError> {
    let mut switches: BTreeMap<String, Vec<String>> = BTreeMap::new();
    doc.walk(&mut |node, _| {
        if let Node::Switch(s) = node {
            let entry = switches.entry(s.selector.id.clone()).or_default();
            entry.extend(s.cases.iter().map(|c| c.label.id.clone()));
        }
    });
    for (selector, case) in selection {
        match switches.get(selector) {
            None => {
                return Err(CompileError::UnknownSelector {
                    selector: selector.clone(),
                })
            }
            Some(cases) if !cases.contains(case) => {
                return Err(CompileError::UnknownCase {
                    selector: selector.clone(),
                    case: case.clone(),
                })
            }
            Some(_) => {}
        }
    }
    Ok(())
}

struct SavingsWalker<'a> {
    ctx: &'a InputContext,
    selection: Option<&'a SwitchSelection>,
    total: usize,
}

impl SavingsWalker<'_> {
    fn walk(&mut self, nodes: &[Node]) {
        for node in nodes {
            match node {
                Node::Conditional(c) => {
                    if evaluate_indicator(&c.condition, self.ctx).active {
                        self.walk(&c.children);
                    } else {
                        self.total += forced_content_tokens(&c.children, self.ctx);
                    }
                }
                Node::Switch(s) => {
                    let selected = self.selection.and_then(|sel| sel.get(&s.selector.id));
                    for case in &s.cases {
                        self.walk(&case.lead);
                        let keep = match selected {
                            None => true,
                            Some(wanted) => case.label.id == *wanted,
                        };
                        if keep {
                            self.walk(&case.children);
                        } else {
                            self.total += forced_content_tokens(&case.children, self.ctx);
                        }
                    }
                    self.walk(&s.tail);
                }
                Node::Tagged(t) => self.walk(&t.children),
                _ => {}
            }
        }
    }
}

/// Token count of a subtree rendered with every indicator forced on, i.e.
/// what the block would have contributed to the full expansion.
fn forced_content_tokens(nodes: &[Node], ctx: &InputContext) -> usize {
    let mut renderer = Renderer::new(Mode::Forced, ctx, None);
    renderer.render_nodes(nodes);
    count_tokens(&renderer.emitter.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, ConceptRef};

    fn contains(subject: &str, keywords: &[&str]) -> KeywordCondition {
        KeywordCondition::contains(
            ConceptRef::new(subject),
            keywords.iter().map(|k| k.to_string()).collect(),
        )
    }

    #[test]
    fn contains_matches_tokens_of_the_input() {
        let ctx = InputContext::from_text("Evaluate the line integral over C");
        assert!(indicator(&contains("content", &["integral"]), &ctx));
        assert!(!indicator(&contains("content", &["matrix"]), &ctx));
    }

    #[test]
    fn empty_input_matches_nothing() {
        let ctx = InputContext::from_text("");
        assert!(!indicator(&contains("content", &["integral"]), &ctx));
    }

    #[test]
    fn contains_matches_inside_hyphenated_tokens() {
        let ctx = InputContext::from_text("Apply Gram-Schmidt");
        let cond = contains("content", &["gram", "schmidt", "qr", "orthogonalization"]);
        assert!(indicator(&cond, &ctx));
    }

    #[test]
    fn multi_word_keywords_match_across_whitespace() {
        let ctx = InputContext::from_text("about line\nintegral problems");
        assert!(indicator(&contains("content", &["line integral"]), &ctx));
    }

    #[test]
    fn equals_compares_the_bound_value() {
        let mut bindings = BTreeMap::new();
        bindings.insert("mode".to_string(), "Strict".to_string());
        let ctx = InputContext::with_bindings("anything", bindings);
        let cond = KeywordCondition::equals(ConceptRef::new("mode"), vec!["strict".to_string()]);
        assert!(indicator(&cond, &ctx));
        let cond = KeywordCondition::equals(ConceptRef::new("mode"), vec!["loose".to_string()]);
        assert!(!indicator(&cond, &ctx));
    }

    #[test]
    fn unbound_equals_defaults_to_zero_with_a_warning() {
        let ctx = InputContext::from_text("anything");
        let cond = KeywordCondition::equals(ConceptRef::new("mode"), vec!["strict".to_string()]);
        let eval = evaluate_indicator(&cond, &ctx);
        assert!(!eval.active);
        assert_eq!(eval.unbound_concept.as_deref(), Some("mode"));
    }

    fn five_domain_doc() -> UclDocument {
        let topics = [
            ("derivatives", "derivative"),
            ("integrals", "integral"),
            ("limits", "limit"),
            ("series", "series"),
            ("vectors", "vector"),
        ];
        let mut src = String::from("Task header.\n");
        for (id, kw) in topics {
            src.push_str(&format!(
                "^^CONDITION: {{{{concept:{id}}}}} CONTAINS \"{kw}\"^^\n{id} guidance here\n^^/CONDITION:{{{{concept:{id}}}}}^^\n"
            ));
        }
        parse(&src).unwrap()
    }

    #[test]
    fn two_of_five_domains_activate() {
        let doc = five_domain_doc();
        let ctx = InputContext::from_text("compute the line integral of the vector field");
        let compiled = compile(&doc, &ctx, None).unwrap();
        assert_eq!(compiled.domain_count, 5);
        assert_eq!(compiled.active_set.len(), 2);
        assert_eq!(compiled.activation_fraction, Some(0.40));
        assert!(compiled.emitted.contains("integrals guidance"));
        assert!(compiled.emitted.contains("vectors guidance"));
        assert!(!compiled.emitted.contains("derivatives guidance"));
        assert!(!compiled.emitted.contains("^^"));
    }

    #[test]
    fn no_matches_leaves_only_unconditional_content() {
        let doc = five_domain_doc();
        let ctx = InputContext::from_text("prove the identity");
        let compiled = compile(&doc, &ctx, None).unwrap();
        assert!(compiled.active_set.is_empty());
        assert_eq!(compiled.activation_fraction, Some(0.0));
        assert_eq!(compiled.emitted.trim(), "Task header.");
    }

    #[test]
    fn token_conservation_on_the_five_domain_doc() {
        let doc = five_domain_doc();
        let ctx = InputContext::from_text("integral");
        let compiled = compile(&doc, &ctx, None).unwrap();
        assert_eq!(
            compiled.tokens_compiled + compiled.estimated_savings,
            compiled.tokens_full
        );
        assert_eq!(
            savings_estimate(&doc, &ctx, None),
            compiled.estimated_savings
        );
    }

    #[test]
    fn equal_domains_give_an_n_fold_reduction() {
        let n = 5;
        let words_per_domain = 40;
        let mut src = String::new();
        for i in 0..n {
            let content: Vec<String> =
                (0..words_per_domain).map(|w| format!("d{i}w{w}")).collect();
            src.push_str(&format!(
                "^^CONDITION: {{{{concept:domain_{i}}}}} CONTAINS \"key{i}\"^^\n{}\n^^/CONDITION:{{{{concept:domain_{i}}}}}^^\n",
                content.join(" ")
            ));
        }
        let doc = parse(&src).unwrap();
        let ctx = InputContext::from_text("key3");
        let compiled = compile(&doc, &ctx, None).unwrap();
        assert_eq!(compiled.tokens_full, n * words_per_domain);
        assert_eq!(compiled.tokens_compiled, words_per_domain);
        assert_eq!(compiled.tokens_full / compiled.tokens_compiled, n);
    }

    #[test]
    fn skipped_blocks_sum_their_content_tokens() {
        let src = concat!(
            "^^CONDITION: {{concept:a}} CONTAINS \"hit\"^^\nstays in\n^^/CONDITION^^\n",
            "^^CONDITION: {{concept:b}} CONTAINS \"missb\"^^\nw1 w2 w3 w4 w5 w6 w7 w8 w9 w10 ",
            "w11 w12 w13 w14 w15 w16 w17 w18 w19 w20 w21 w22 w23 w24 w25 w26 w27 w28 w29 w30\n",
            "^^/CONDITION^^\n",
            "^^CONDITION: {{concept:c}} CONTAINS \"missc\"^^\nv1 v2 v3 v4 v5 v6 v7 v8 v9 v10 ",
            "v11 v12 v13 v14 v15 v16 v17 v18 v19 v20 v21 v22 v23 v24 v25 v26 v27 v28 v29 v30 ",
            "v31 v32 v33 v34 v35 v36 v37 v38 v39 v40 v41 v42 v43 v44 v45 v46 v47 v48 v49 v50\n",
            "^^/CONDITION^^",
        );
        let doc = parse(src).unwrap();
        let ctx = InputContext::from_text("hit");
        assert_eq!(savings_estimate(&doc, &ctx, None), 80);

        let all = InputContext::from_text("hit missb missc");
        assert_eq!(savings_estimate(&doc, &all, None), 0);
    }

    #[test]
    fn switches_keep_all_cases_unless_selected() {
        let src = concat!(
            "^^SWITCH: {{concept:question_type}}^^\n",
            "^^CASE: {{concept:algebra}}^^\nalgebra path\n^^/CASE:{{concept:algebra}}^^\n",
            "^^CASE: {{concept:geometry}}^^\ngeometry path\n^^/CASE:{{concept:geometry}}^^\n",
            "^^/SWITCH:{{concept:question_type}}^^",
        );
        let doc = parse(src).unwrap();
        let ctx = InputContext::from_text("whatever");

        let all = compile(&doc, &ctx, None).unwrap();
        assert!(all.emitted.contains("algebra path"));
        assert!(all.emitted.contains("geometry path"));
        assert_eq!(all.estimated_savings, 0);

        let mut selection = SwitchSelection::new();
        selection.insert("question_type".to_string(), "algebra".to_string());
        let one = compile(&doc, &ctx, Some(&selection)).unwrap();
        assert!(one.emitted.contains("algebra path"));
        assert!(!one.emitted.contains("geometry path"));
        assert_eq!(one.estimated_savings, 2);
        assert_eq!(savings_estimate(&doc, &ctx, Some(&selection)), 2);
    }

    #[test]
    fn unknown_selectors_and_cases_are_errors() {
        let src = concat!(
            "^^SWITCH: {{concept:question_type}}^^\n",
            "^^CASE: {{concept:algebra}}^^\nx\n^^/CASE:{{concept:algebra}}^^\n",
            "^^/SWITCH:{{concept:question_type}}^^",
        );
        let doc = parse(src).unwrap();
        let ctx = InputContext::from_text("input");

        let mut selection = SwitchSelection::new();
        selection.insert("missing".to_string(), "algebra".to_string());
        assert!(matches!(
            compile(&doc, &ctx, Some(&selection)),
            Err(CompileError::UnknownSelector { .. })
        ));

        let mut selection = SwitchSelection::new();
        selection.insert("question_type".to_string(), "calculus".to_string());
        assert!(matches!(
            compile(&doc, &ctx, Some(&selection)),
            Err(CompileError::UnknownCase { .. })
        ));
    }

    #[test]
    fn compiled_output_reparses_and_recompiles_identically() {
        let doc = five_domain_doc();
        let ctx = InputContext::from_text("integral and vector");
        let compiled = compile(&doc, &ctx, None).unwrap();

        let reparsed = parse(&compiled.emitted).expect("compiled output must parse");
        let second = compile(&reparsed, &ctx, None).unwrap();
        assert_eq!(second.emitted, compiled.emitted);
        assert_eq!(second.estimated_savings, 0);
    }

    #[test]
    fn tagged_content_survives_compilation_verbatim() {
        let src = "^^CONDITION: {{concept:a}} CONTAINS \"kw\"^^\n<steps>\n[[APPLY: rule]]\n</steps>\n^^/CONDITION^^";
        let doc = parse(src).unwrap();
        let ctx = InputContext::from_text("kw");
        let compiled = compile(&doc, &ctx, None).unwrap();
        assert!(compiled.emitted.contains("<steps>"));
        assert!(compiled.emitted.contains("[[APPLY: rule]]"));
        assert!(compiled.emitted.contains("</steps>"));
    }

    #[test]
    fn unbound_equals_is_reported_on_compile() {
        let src = "^^CONDITION: {{concept:mode}} EQUALS \"strict\"^^\nx\n^^/CONDITION^^";
        let doc = parse(src).unwrap();
        let ctx = InputContext::from_text("input");
        let compiled = compile(&doc, &ctx, None).unwrap();
        assert_eq!(compiled.warnings.len(), 1);
        assert!(compiled.active_set.is_empty());
    }

    #[test]
    fn activation_fraction_is_undefined_without_domains() {
        let doc = parse("plain text only").unwrap();
        let ctx = InputContext::from_text("anything");
        assert_eq!(activation_fraction(&doc, &ctx), None);
    }

    #[test]
    fn standard_efficiency_is_the_reciprocal_of_the_domain_count() {
        assert_eq!(efficiency_standard(5), Some(0.2));
        assert_eq!(efficiency_standard(1), Some(1.0));
        assert_eq!(efficiency_standard(0), None);
    }

    #[test]
    fn adding_a_keyword_never_deactivates() {
        let ctx = InputContext::from_text("something about determinants");
        let base = contains("content", &["determinant"]);
        assert!(indicator(&base, &ctx));
        let mut extended = base.clone();
        extended.keywords.push("unrelated".to_string());
        assert!(indicator(&extended, &ctx));
    }
}
