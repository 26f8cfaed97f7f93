//! Report assembly and rendering. Reports serialize with a fixed field
//! order so identical inputs produce byte-identical output.

use serde::Serialize;

use ucl_core::compiler::CompiledPrompt;
use ucl_core::metrics::{
    estimate_specification, profile, structural_overhead, OverheadBreakdown, SpecEstimate,
    StructureProfile,
};
use ucl_core::model::{critical_bonus, q_eff, ModelParams, QualityReport};
use ucl_core::syntax::UclDocument;

use crate::lint::{lint, LintFinding};
use crate::stats::PairedComparison;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub file: Option<String>,
    /// The specification level the quality figures were computed at.
    pub s_used: f64,
    /// "supplied" when the caller passed S, "estimated" otherwise.
    pub s_source: &'static str,
    pub profile: StructureProfile,
    pub overhead: OverheadBreakdown,
    pub spec_estimate: SpecEstimate,
    pub quality: QualityReport,
    pub critical_bonus: f64,
    pub findings: Vec<LintFinding>,
    pub params: ModelParams,
}

pub fn analyze(
    doc: &UclDocument,
    params: &ModelParams,
    supplied_s: Option<f64>,
    file: Option<String>,
) -> AnalysisReport {
    let prof = profile(doc);
    let overhead = structural_overhead(doc, params.gamma, params.delta);
    let spec_estimate = estimate_specification(doc, None);
    let s_used = supplied_s.unwrap_or(spec_estimate.s_value);
    let s_source = if supplied_s.is_some() {
        "supplied"
    } else {
        "estimated"
    };

    let bonus = critical_bonus(doc, params);
    // An empty document still needs a defined log term.
    let lines = prof.total_lines.max(1);
    let mut quality: QualityReport = q_eff(s_used, overhead.total, lines, 1.0, params)
        .expect("lines >= 1 by construction");
    quality.bonus_applied = bonus > 0.0;

    let findings = lint(doc, params, supplied_s);

    AnalysisReport {
        file,
        s_used,
        s_source,
        profile: prof,
        overhead,
        spec_estimate,
        quality,
        critical_bonus: bonus,
        findings,
        params: params.clone(),
    }
}

/// One row of the corpus comparison table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonRow {
    pub file: String,
    pub total_lines: usize,
    pub switch_blocks: usize,
    pub condition_blocks: usize,
    pub critical_directives: usize,
    pub o_s: f64,
    pub s_used: f64,
    pub quality: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusEntry {
    pub file: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<AnalysisReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusReport {
    pub entries: Vec<CorpusEntry>,
    pub comparison: Vec<ComparisonRow>,
}

pub fn comparison_rows(entries: &[CorpusEntry]) -> Vec<ComparisonRow> {
    entries
        .iter()
        .filter_map(|e| {
            e.report.as_ref().map(|r| ComparisonRow {
                file: e.file.clone(),
                total_lines: r.profile.total_lines,
                switch_blocks: r.profile.switch_blocks,
                condition_blocks: r.profile.condition_blocks,
                critical_directives: r.profile.critical_directives,
                o_s: r.overhead.total,
                s_used: r.s_used,
                quality: r.quality.q,
            })
        })
        .collect()
}

// ---------------------------------------------------------------------
// Text rendering
// ---------------------------------------------------------------------

pub fn render_findings_text(file: &str, findings: &[LintFinding]) -> String {
    let mut out = String::new();
    for f in findings {
        out.push_str(&format!(
            "{file}:{} {} {} {}",
            f.span,
            f.severity.as_str(),
            f.rule_id,
            f.message
        ));
        match (f.measured, f.threshold) {
            (Some(m), Some(t)) => out.push_str(&format!(" (measured={m}, threshold={t})")),
            (Some(m), None) => out.push_str(&format!(" (measured={m})")),
            _ => {}
        }
        out.push('\n');
    }
    let errors = findings
        .iter()
        .filter(|f| f.severity == ucl_core::syntax::Severity::Error)
        .count();
    let warns = findings
        .iter()
        .filter(|f| f.severity == ucl_core::syntax::Severity::Warn)
        .count();
    let infos = findings.len() - errors - warns;
    out.push_str(&format!(
        "{} findings ({errors} errors, {warns} warnings, {infos} notes)\n",
        findings.len()
    ));
    out
}

pub fn render_analysis_text(report: &AnalysisReport) -> String {
    let mut out = String::new();
    if let Some(file) = &report.file {
        out.push_str(&format!("file: {file}\n"));
    }
    let p = &report.profile;
    out.push_str(&format!(
        "lines: {}  switches: {}  conditions: {}  critical: {}  max depth: {}\n",
        p.total_lines, p.switch_blocks, p.condition_blocks, p.critical_directives,
        p.max_nesting_depth
    ));
    out.push_str(&format!("architecture: {:?}\n", p.architecture));
    let o = &report.overhead;
    out.push_str(&format!(
        "overhead: total={:.4} (branching={:.4}, procedural={:.4}, procedural_tokens={})\n",
        o.total, o.branching, o.procedural, o.procedural_tokens
    ));
    for term in &o.per_switch {
        out.push_str(&format!(
            "  switch '{}': {} cases, ln={:.4}\n",
            term.selector, term.cases, term.ln_cases
        ));
    }
    out.push_str(&format!(
        "specification: S={:.4} ({}; heuristic estimate {:.4})\n",
        report.s_used, report.s_source, report.spec_estimate.s_value
    ));
    let q = &report.quality;
    out.push_str(&format!(
        "quality: q={:.4} q_eff={:.4} (p_role={:.4}, p_complexity={:.4}, p_perceived={:.4}, eta={:.2})\n",
        q.q, q.q_eff, q.p_role, q.p_complexity, q.p_perceived, q.eta
    ));
    out.push_str(&format!(
        "early binding bonus: {:.3}\n",
        report.critical_bonus
    ));
    if !report.findings.is_empty() {
        out.push_str(&render_findings_text(
            report.file.as_deref().unwrap_or("<input>"),
            &report.findings,
        ));
    }
    out
}

pub fn render_compiled_text(compiled: &CompiledPrompt) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "domains: {}  active: {}",
        compiled.domain_count,
        compiled.active_set.len()
    ));
    match compiled.activation_fraction {
        Some(f) => out.push_str(&format!("  activation_fraction: {f:.4}")),
        None => out.push_str("  activation_fraction: undefined"),
    }
    out.push('\n');
    for block in &compiled.active_set {
        out.push_str(&format!(
            "  active[{}]: {} (line {})\n",
            block.index, block.concept, block.line
        ));
    }
    out.push_str(&format!(
        "tokens: full={} compiled={} saved={}\n",
        compiled.tokens_full, compiled.tokens_compiled, compiled.estimated_savings
    ));
    for w in &compiled.warnings {
        out.push_str(&format!("warning: {} ({})\n", w.message, w.span));
    }
    out
}

pub fn render_comparison_text(comparison: &PairedComparison) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "pairs: {}  df: {}\n",
        comparison.n_pairs, comparison.degrees_of_freedom
    ));
    match comparison.mean_reduction_pct {
        Some(pct) => out.push_str(&format!("mean reduction: {pct:.2}%\n")),
        None => out.push_str("mean reduction: undefined (a zero baseline value)\n"),
    }
    out.push_str(&format!("mean difference: {:.6}\n", comparison.mean_difference));
    match comparison.t_statistic {
        Some(t) => out.push_str(&format!("t: {t:.4}\n")),
        None => out.push_str("t: undefined (fewer than two pairs or zero variance)\n"),
    }
    match comparison.cohens_d {
        Some(d) => out.push_str(&format!("cohen's d: {d:.4}\n")),
        None => out.push_str("cohen's d: undefined\n"),
    }
    match comparison.ci95 {
        Some((lo, hi)) => out.push_str(&format!("95% CI: [{lo:.4}, {hi:.4}]\n")),
        None => out.push_str("95% CI: undefined\n"),
    }
    out
}

pub fn render_corpus_text(corpus: &CorpusReport) -> String {
    let mut out = String::new();
    for entry in &corpus.entries {
        match (&entry.report, &entry.error) {
            (Some(report), _) => {
                out.push_str(&render_analysis_text(report));
                out.push('\n');
            }
            (None, Some(err)) => out.push_str(&format!("file: {}\nerror: {err}\n\n", entry.file)),
            _ => {}
        }
    }
    out.push_str(
        "file | lines | switches | conditions | critical | O_s | S | quality\n",
    );
    for row in &corpus.comparison {
        out.push_str(&format!(
            "{} | {} | {} | {} | {} | {:.2} | {:.3} | {:.3}\n",
            row.file,
            row.total_lines,
            row.switch_blocks,
            row.condition_blocks,
            row.critical_directives,
            row.o_s,
            row.s_used,
            row.quality
        ));
    }
    out
}
