//! Closed-form models: the piecewise quality curve, the three quality
//! penalties, the combined effective quality, the early-binding bonus, the
//! utility decision rule, and KKT constraint status.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::syntax::{DirectiveName, Node, UclDocument};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("prompt length must be at least 1 line, got {0}")]
    NonPositiveLength(usize),
    #[error("invalid model parameter: {0}")]
    InvalidParam(String),
}

/// All calibrated constants in one validated record.
///
/// The defaults are the shipped calibration; any of them can be overridden
/// from a params file. The linear slope of the quality curve is derived as
/// `q_max / s_star`, never stored.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ModelParams {
    /// Optimal specification threshold S*.
    pub s_star: f64,
    /// Maximum achievable quality.
    pub q_max: f64,
    /// Quadratic degradation coefficient past S*.
    pub b: f64,
    /// Role-confusion penalty coefficient.
    pub alpha1: f64,
    /// Cognitive-complexity penalty coefficient.
    pub alpha2: f64,
    /// Perceived-sophistication penalty coefficient.
    pub alpha3: f64,
    /// Branching cost coefficient.
    pub gamma: f64,
    /// Procedural cost coefficient.
    pub delta: f64,
    /// Early-binding quality bonus.
    pub b_critical: f64,
    /// Last line (1-based) at which a CRITICAL directive still earns the
    /// early-binding bonus.
    pub critical_position_limit: usize,
    /// Cost sensitivity above which token savings outweigh the quality gap.
    pub lambda_star: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            s_star: 0.509,
            q_max: 1.0,
            b: 4.0,
            alpha1: 2.5,
            alpha2: 0.08,
            alpha3: 0.05,
            gamma: 1.0,
            delta: 0.1,
            b_critical: 0.093,
            critical_position_limit: 15,
            lambda_star: 4.16e-5,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        let check = |ok: bool, msg: &str| {
            if ok {
                Ok(())
            } else {
                Err(ModelError::InvalidParam(msg.to_string()))
            }
        };
        check(
            self.s_star > 0.0 && self.s_star < 1.0,
            "s_star must lie in (0, 1)",
        )?;
        check(self.q_max > 0.0, "q_max must be positive")?;
        check(self.b >= 0.0, "b must be non-negative")?;
        check(
            self.alpha1 >= 0.0 && self.alpha2 >= 0.0 && self.alpha3 >= 0.0,
            "penalty coefficients must be non-negative",
        )?;
        check(self.gamma >= 0.0, "gamma must be non-negative")?;
        check(self.delta >= 0.0, "delta must be non-negative")?;
        check(self.b_critical >= 0.0, "b_critical must be non-negative")?;
        check(self.lambda_star > 0.0, "lambda_star must be positive")?;
        check(
            self.critical_position_limit >= 1,
            "critical_position_limit must be at least 1",
        )?;
        Ok(())
    }

    /// Parses a params file: either a JSON object or flat `key=value` lines
    /// (with `#` comments). Unspecified fields keep their defaults.
    pub fn from_config_str(text: &str) -> Result<Self, ModelError> {
        let trimmed = text.trim_start();
        let params: ModelParams = if trimmed.starts_with('{') {
            serde_json::from_str(text)
                .map_err(|e| ModelError::InvalidParam(format!("invalid JSON params: {e}")))?
        } else {
            let mut params = ModelParams::default();
            for (idx, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (key, value) = line.split_once('=').ok_or_else(|| {
                    ModelError::InvalidParam(format!("line {}: expected key=value", idx + 1))
                })?;
                let key = key.trim();
                let value = value.trim();
                let bad_value = || {
                    ModelError::InvalidParam(format!("line {}: bad value for {key}", idx + 1))
                };
                match key {
                    "s_star" => params.s_star = value.parse().map_err(|_| bad_value())?,
                    "q_max" => params.q_max = value.parse().map_err(|_| bad_value())?,
                    "b" => params.b = value.parse().map_err(|_| bad_value())?,
                    "alpha1" => params.alpha1 = value.parse().map_err(|_| bad_value())?,
                    "alpha2" => params.alpha2 = value.parse().map_err(|_| bad_value())?,
                    "alpha3" => params.alpha3 = value.parse().map_err(|_| bad_value())?,
                    "gamma" => params.gamma = value.parse().map_err(|_| bad_value())?,
                    "delta" => params.delta = value.parse().map_err(|_| bad_value())?,
                    "b_critical" => params.b_critical = value.parse().map_err(|_| bad_value())?,
                    "critical_position_limit" => {
                        params.critical_position_limit = value.parse().map_err(|_| bad_value())?
                    }
                    "lambda_star" => params.lambda_star = value.parse().map_err(|_| bad_value())?,
                    other => {
                        return Err(ModelError::InvalidParam(format!(
                            "line {}: unknown parameter '{other}'",
                            idx + 1
                        )))
                    }
                }
            }
            params
        };
        params.validate()?;
        Ok(params)
    }
}

// ---------------------------------------------------------------------
// Quality and penalties
// ---------------------------------------------------------------------

/// Quality as a function of specification level: linear up to `s_star`,
/// quadratic degradation past it. Continuity at `s_star` forces the linear
/// slope to be exactly `q_max / s_star`.
pub fn quality(s: f64, p: &ModelParams) -> f64 {
    if s <= p.s_star {
        (p.q_max / p.s_star) * s
    } else {
        p.q_max - p.b * (s - p.s_star) * (s - p.s_star)
    }
}

/// The derived linear slope `q_max / s_star`.
pub fn slope_check(p: &ModelParams) -> f64 {
    p.q_max / p.s_star
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Penalties {
    pub p_role: f64,
    pub p_complexity: f64,
    pub p_perceived: f64,
}

impl Penalties {
    pub fn sum(&self) -> f64 {
        self.p_role + self.p_complexity + self.p_perceived
    }
}

/// The three quality penalties: role confusion (quadratic past `s_star`),
/// cognitive complexity (linear in overhead), and perceived sophistication
/// (logarithmic in prompt length).
pub fn penalties(
    s: f64,
    o_s: f64,
    prompt_lines: usize,
    p: &ModelParams,
) -> Result<Penalties, ModelError> {
    if prompt_lines < 1 {
        return Err(ModelError::NonPositiveLength(prompt_lines));
    }
    let p_role = if s > p.s_star {
        p.alpha1 * (s - p.s_star) * (s - p.s_star)
    } else {
        0.0
    };
    Ok(Penalties {
        p_role,
        p_complexity: p.alpha2 * o_s,
        p_perceived: p.alpha3 * (prompt_lines as f64).ln(),
    })
}

/// Full quality prediction with all components reported.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QualityReport {
    pub q: f64,
    pub p_role: f64,
    pub p_complexity: f64,
    pub p_perceived: f64,
    pub eta: f64,
    pub q_eff: f64,
    /// True when the penalty sum exceeded 1 and the multiplicative factor
    /// was clamped to zero.
    pub penalty_clamped: bool,
    pub bonus_applied: bool,
}

/// Effective quality: `quality(s) * eta * (1 - sum of penalties)`, with the
/// penalty factor clamped to [0, 1]. The formula itself can go negative for
/// extreme overhead; a negative quality multiplier is meaningless, so the
/// clamp is applied and reported.
pub fn q_eff(
    s: f64,
    o_s: f64,
    prompt_lines: usize,
    eta: f64,
    p: &ModelParams,
) -> Result<QualityReport, ModelError> {
    let pen = penalties(s, o_s, prompt_lines, p)?;
    let factor_raw = 1.0 - pen.sum();
    let factor = factor_raw.clamp(0.0, 1.0);
    let q = quality(s, p);
    Ok(QualityReport {
        q,
        p_role: pen.p_role,
        p_complexity: pen.p_complexity,
        p_perceived: pen.p_perceived,
        eta,
        q_eff: q * eta * factor,
        penalty_clamped: factor != factor_raw,
        bonus_applied: false,
    })
}

/// Early-binding bonus: `b_critical` when any CRITICAL directive starts on
/// or before the position limit line, else zero.
pub fn critical_bonus(doc: &UclDocument, p: &ModelParams) -> f64 {
    let mut earned = false;
    doc.walk(&mut |node, _| {
        if let Node::Directive(d) = node {
            if d.name == DirectiveName::Critical
                && (d.span.line as usize) <= p.critical_position_limit
            {
                earned = true;
            }
        }
    });
    if earned {
        p.b_critical
    } else {
        0.0
    }
}

// ---------------------------------------------------------------------
// Decision rule and KKT status
// ---------------------------------------------------------------------

/// Outcome of comparing a selective prompt against a baseline at a given
/// cost sensitivity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionReport {
    /// Utility-comparison verdict: `q - lambda * c` is at least as high for
    /// the selective prompt as for the baseline.
    pub use_ucl: bool,
    pub lambda: f64,
    pub lambda_star: f64,
    /// Quality given up by the selective prompt (baseline minus selective).
    pub delta_q: f64,
    /// Tokens saved by the selective prompt (baseline minus selective).
    pub delta_c: f64,
    pub utility_ucl: f64,
    pub utility_baseline: f64,
    /// Verdict of the scalar threshold rule `lambda > lambda_star`.
    pub threshold_use_ucl: bool,
    /// The two rules coincide only when `delta_q / delta_c` equals
    /// `lambda_star`; disagreement is surfaced, not hidden.
    pub rules_disagree: bool,
    /// The quality constraint is not modeled here, so its multiplier is
    /// inactive; see [`kkt_status`] for the constraint-aware check.
    pub kkt_mu_active: bool,
}

/// Compares utilities `q - lambda * c` for both prompts and also evaluates
/// the scalar threshold rule against `lambda_star`.
pub fn decide(
    lambda: f64,
    q_ucl: f64,
    q_base: f64,
    c_ucl: f64,
    c_base: f64,
    p: &ModelParams,
) -> DecisionReport {
    let utility_ucl = q_ucl - lambda * c_ucl;
    let utility_baseline = q_base - lambda * c_base;
    let use_ucl = utility_ucl >= utility_baseline;
    let threshold_use_ucl = lambda > p.lambda_star;
    DecisionReport {
        use_ucl,
        lambda,
        lambda_star: p.lambda_star,
        delta_q: q_base - q_ucl,
        delta_c: c_base - c_ucl,
        utility_ucl,
        utility_baseline,
        threshold_use_ucl,
        rules_disagree: use_ucl != threshold_use_ucl,
        kkt_mu_active: false,
    }
}

/// Status of the quality constraint `F >= F_req` at an optimum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KktStatus {
    /// Constraint satisfied with slack; its multiplier is zero.
    Inactive,
    /// Constraint met with equality; its multiplier may be positive.
    Binding,
    /// Constraint violated; the point is not feasible.
    Infeasible,
}

/// Tolerance for treating the constraint as exactly binding.
pub const KKT_BINDING_TOLERANCE: f64 = 1e-9;

pub fn kkt_status(f: f64, f_req: f64) -> KktStatus {
    if (f - f_req).abs() <= KKT_BINDING_TOLERANCE {
        KktStatus::Binding
    } else if f > f_req {
        KktStatus::Inactive
    } else {
        KktStatus::Infeasible
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse, Directive, Node, TextRun, UclDocument};
    use approx::assert_abs_diff_eq;

    fn p() -> ModelParams {
        ModelParams::default()
    }

    #[test]
    fn quality_is_linear_below_the_threshold() {
        assert_abs_diff_eq!(quality(0.30, &p()), 0.30 / 0.509, epsilon = 1e-12);
        assert_abs_diff_eq!(quality(0.30, &p()), 0.589, epsilon = 1e-3);
        assert_eq!(quality(0.0, &p()), 0.0);
    }

    #[test]
    fn quality_peaks_at_the_threshold() {
        assert_abs_diff_eq!(quality(0.509, &p()), 1.0, epsilon = 1e-9);
    }

    #[test]
    fn quality_degrades_quadratically_past_the_threshold() {
        assert_abs_diff_eq!(quality(0.609, &p()), 1.0 - 4.0 * 0.01, epsilon = 1e-12);
        // Extreme specification goes negative and is reported as-is.
        assert!(quality(1.5, &p()) < 0.0);
    }

    #[test]
    fn quality_is_continuous_at_the_threshold() {
        let s = p().s_star;
        for eps in [1e-3, 1e-6, 1e-9] {
            let gap = (quality(s - eps, &p()) - quality(s + eps, &p())).abs();
            let bound = (slope_check(&p()) + 2.0 * p().b * eps) * 2.0 * eps;
            assert!(gap <= bound, "eps={eps}: gap {gap} exceeds bound {bound}");
        }
    }

    #[test]
    fn quality_is_unimodal() {
        let params = p();
        let mut prev = quality(0.0, &params);
        let mut s = 0.01;
        while s <= params.s_star {
            let q = quality(s, &params);
            assert!(q > prev, "not increasing at s={s}");
            prev = q;
            s += 0.01;
        }
        let mut prev = quality(params.s_star, &params);
        let mut s = params.s_star + 0.01;
        while s <= 1.5 {
            let q = quality(s, &params);
            assert!(q < prev, "not decreasing at s={s}");
            prev = q;
            s += 0.01;
        }
    }

    #[test]
    fn slope_is_derived_from_the_threshold() {
        assert_abs_diff_eq!(slope_check(&p()), 1.9646, epsilon = 5e-4);
        let custom = ModelParams {
            q_max: 2.0,
            s_star: 0.5,
            ..p()
        };
        assert_eq!(slope_check(&custom), 4.0);
    }

    #[test]
    fn role_penalty_is_quadratic_past_the_threshold() {
        let pen = penalties(0.609, 0.0, 1, &p()).unwrap();
        assert_abs_diff_eq!(pen.p_role, 0.025, epsilon = 1e-12);
        let pen = penalties(0.40, 0.0, 1, &p()).unwrap();
        assert_eq!(pen.p_role, 0.0);
    }

    #[test]
    fn complexity_penalty_scales_overhead() {
        let pen = penalties(0.3, 2.0, 1, &p()).unwrap();
        assert_abs_diff_eq!(pen.p_complexity, 0.16, epsilon = 1e-12);
    }

    #[test]
    fn perceived_penalty_is_logarithmic_in_lines() {
        let pen = penalties(0.3, 0.0, 105, &p()).unwrap();
        assert_abs_diff_eq!(pen.p_perceived, 0.05 * 105.0_f64.ln(), epsilon = 1e-12);
        let pen = penalties(0.3, 0.0, 1, &p()).unwrap();
        assert_eq!(pen.p_perceived, 0.0);
    }

    #[test]
    fn zero_line_prompts_are_rejected() {
        assert_eq!(
            penalties(0.3, 0.0, 0, &p()),
            Err(ModelError::NonPositiveLength(0))
        );
    }

    #[test]
    fn q_eff_is_unity_when_every_factor_is_unity() {
        let report = q_eff(p().s_star, 0.0, 1, 1.0, &p()).unwrap();
        assert_abs_diff_eq!(report.q_eff, 1.0, epsilon = 1e-9);
        assert!(!report.penalty_clamped);
    }

    #[test]
    fn q_eff_composes_quality_and_penalties() {
        let report = q_eff(0.35, 2.0, 105, 1.0, &p()).unwrap();
        let expected = quality(0.35, &p()) * (1.0 - 0.16 - 0.05 * 105.0_f64.ln());
        assert_abs_diff_eq!(report.q_eff, expected, epsilon = 1e-12);
        assert!(report.q_eff <= report.q);
    }

    #[test]
    fn q_eff_is_zero_when_eta_is_zero() {
        let report = q_eff(0.35, 2.0, 105, 0.0, &p()).unwrap();
        assert_eq!(report.q_eff, 0.0);
    }

    #[test]
    fn q_eff_clamps_runaway_penalties() {
        let report = q_eff(0.35, 100.0, 105, 1.0, &p()).unwrap();
        assert_eq!(report.q_eff, 0.0);
        assert!(report.penalty_clamped);
    }

    #[test]
    fn critical_bonus_requires_an_early_directive() {
        let early = parse("[[CRITICAL: fence]]\nrest of the prompt").unwrap();
        assert_eq!(critical_bonus(&early, &p()), 0.093);

        let missing = parse("no directives here").unwrap();
        assert_eq!(critical_bonus(&missing, &p()), 0.0);

        let late_src = format!("{}[[CRITICAL: fence]]", "line\n".repeat(15));
        let late = parse(&late_src).unwrap();
        assert_eq!(critical_bonus(&late, &p()), 0.0);

        let boundary_src = format!("{}[[CRITICAL: fence]]", "line\n".repeat(14));
        let boundary = parse(&boundary_src).unwrap();
        assert_eq!(critical_bonus(&boundary, &p()), 0.093);
    }

    #[test]
    fn constructed_directive_on_line_one_earns_the_bonus() {
        let doc = UclDocument::from_nodes(vec![
            Node::Directive(Directive::new("CRITICAL", "fence")),
            Node::Text(TextRun::new("\nbody")),
        ]);
        assert_eq!(critical_bonus(&doc, &p()), 0.093);
    }

    #[test]
    fn utilities_balance_at_the_critical_lambda() {
        let lambda = 0.093 / 2235.0;
        let report = decide(lambda, 0.907, 1.0, 4993.0, 7228.0, &p());
        assert_abs_diff_eq!(report.utility_ucl, report.utility_baseline, epsilon = 1e-12);
        assert_abs_diff_eq!(report.delta_q, 0.093, epsilon = 1e-12);
        assert_abs_diff_eq!(report.delta_c, 2235.0, epsilon = 1e-12);
    }

    #[test]
    fn quality_wins_when_cost_is_free() {
        let report = decide(0.0, 0.907, 1.0, 4993.0, 7228.0, &p());
        assert!(!report.use_ucl);
        assert!(!report.threshold_use_ucl);
    }

    #[test]
    fn savings_win_above_the_threshold() {
        let report = decide(1e-4, 0.907, 1.0, 4993.0, 7228.0, &p());
        assert!(report.use_ucl);
        assert!(report.threshold_use_ucl);
        assert!(!report.rules_disagree);
    }

    #[test]
    fn decision_is_monotone_in_lambda() {
        let mut previous = false;
        for i in 0..=100 {
            let lambda = 1e-4 * i as f64 / 100.0;
            let report = decide(lambda, 0.907, 1.0, 4993.0, 7228.0, &p());
            assert!(
                report.use_ucl || !previous,
                "verdict flipped back off at lambda={lambda}"
            );
            previous = report.use_ucl;
        }
        assert!(previous);
    }

    #[test]
    fn kkt_trichotomy_on_the_reference_point() {
        assert_eq!(kkt_status(1.00, 0.907), KktStatus::Inactive);
        assert_eq!(kkt_status(0.907, 0.907), KktStatus::Binding);
        assert_eq!(kkt_status(0.5, 0.9), KktStatus::Infeasible);
    }

    #[test]
    fn params_parse_from_key_value_text() {
        let text = "# calibration\ns_star = 0.45\nlambda_star = 5e-5\n";
        let params = ModelParams::from_config_str(text).unwrap();
        assert_eq!(params.s_star, 0.45);
        assert_eq!(params.lambda_star, 5e-5);
        assert_eq!(params.b, 4.0); // untouched default
    }

    #[test]
    fn params_parse_from_json() {
        let params = ModelParams::from_config_str(r#"{"gamma": 2.0, "delta": 0.2}"#).unwrap();
        assert_eq!(params.gamma, 2.0);
        assert_eq!(params.delta, 0.2);
        assert_eq!(params.s_star, 0.509);
    }

    #[test]
    fn unknown_keys_and_bad_values_are_rejected() {
        assert!(ModelParams::from_config_str("bogus = 1\n").is_err());
        assert!(ModelParams::from_config_str("s_star = up\n").is_err());
        assert!(ModelParams::from_config_str("s_star = 1.5\n").is_err());
    }

    #[test]
    fn default_params_validate() {
        assert!(ModelParams::default().validate().is_ok());
    }
}
