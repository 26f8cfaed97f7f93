//! Paired corpus comparison: mean reduction, paired t statistic, effect
//! size, and a 95% confidence interval on the mean difference.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StatsError {
    #[error("paired comparison needs at least one pair")]
    InsufficientPairs,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairObs {
    pub label: String,
    pub value_a: f64,
    pub value_b: f64,
}

/// Results of a paired comparison of `value_a` against `value_b`.
///
/// The t statistic, effect size, and interval are reported as absent
/// (rather than NaN or a crash) when they are undefined: fewer than two
/// pairs, or zero variance in the differences.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairedComparison {
    pub pairs: Vec<PairObs>,
    pub n_pairs: usize,
    pub degrees_of_freedom: usize,
    /// Mean of (a - b) / a in percent; absent when some `value_a` is zero.
    pub mean_reduction_pct: Option<f64>,
    pub mean_difference: f64,
    /// Sample standard deviation of the differences (n - 1 divisor).
    pub sd_difference: Option<f64>,
    pub t_statistic: Option<f64>,
    pub cohens_d: Option<f64>,
    pub ci95: Option<(f64, f64)>,
}

/// Paired comparison over (label, a, b) observations. Differences are
/// `a - b`, so positive values mean the second condition is smaller.
pub fn compare_paired(pairs: &[PairObs]) -> Result<PairedComparison, StatsError> {
    let n = pairs.len();
    if n == 0 {
        return Err(StatsError::InsufficientPairs);
    }

    let diffs: Vec<f64> = pairs.iter().map(|p| p.value_a - p.value_b).collect();
    let mean_difference = diffs.iter().sum::<f64>() / n as f64;

    let mean_reduction_pct = if pairs.iter().any(|p| p.value_a == 0.0) {
        None
    } else {
        Some(
            pairs
                .iter()
                .map(|p| (p.value_a - p.value_b) / p.value_a * 100.0)
                .sum::<f64>()
                / n as f64,
        )
    };

    let mut sd_difference = None;
    let mut t_statistic = None;
    let mut cohens_d = None;
    let mut ci95 = None;
    if n >= 2 {
        let var = diffs
            .iter()
            .map(|d| (d - mean_difference).powi(2))
            .sum::<f64>()
            / (n - 1) as f64;
        let sd = var.sqrt();
        sd_difference = Some(sd);
        if sd > 0.0 {
            let se = sd / (n as f64).sqrt();
            t_statistic = Some(mean_difference / se);
            cohens_d = Some(mean_difference / sd);
            let t_dist = StudentsT::new(0.0, 1.0, (n - 1) as f64)
                .expect("n >= 2 gives a valid t distribution");
            let t_crit = t_dist.inverse_cdf(0.975);
            ci95 = Some((mean_difference - t_crit * se, mean_difference + t_crit * se));
        }
    }

    Ok(PairedComparison {
        pairs: pairs.to_vec(),
        n_pairs: n,
        degrees_of_freedom: n - 1,
        mean_reduction_pct,
        mean_difference,
        sd_difference,
        t_statistic,
        cohens_d,
        ci95,
    })
}

/// Parses a header-bearing CSV with columns `label,value_a,value_b`.
pub fn parse_pairs_csv(text: &str) -> Result<Vec<PairObs>, String> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| e.to_string())?.clone();
    let expected = ["label", "value_a", "value_b"];
    let actual: Vec<&str> = headers.iter().collect();
    if actual != expected {
        return Err(format!(
            "expected header 'label,value_a,value_b', found '{}'",
            actual.join(",")
        ));
    }
    let mut pairs = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| e.to_string())?;
        let parse_field = |i: usize, name: &str| -> Result<f64, String> {
            record
                .get(i)
                .ok_or_else(|| format!("row {}: missing {name}", idx + 2))?
                .parse::<f64>()
                .map_err(|_| format!("row {}: {name} is not a number", idx + 2))
        };
        pairs.push(PairObs {
            label: record.get(0).unwrap_or_default().to_string(),
            value_a: parse_field(1, "value_a")?,
            value_b: parse_field(2, "value_b")?,
        });
    }
    Ok(pairs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn pairs_from(values: &[(f64, f64)]) -> Vec<PairObs> {
        values
            .iter()
            .enumerate()
            .map(|(i, (a, b))| PairObs {
                label: format!("m{i}"),
                value_a: *a,
                value_b: *b,
            })
            .collect()
    }

    #[test]
    fn df_is_one_less_than_the_pair_count() {
        let pairs = pairs_from(&[(1.0, 0.5); 11]);
        let c = compare_paired(&pairs).unwrap();
        assert_eq!(c.n_pairs, 11);
        assert_eq!(c.degrees_of_freedom, 10);
    }

    #[test]
    fn identical_pairs_have_no_defined_t() {
        let pairs = pairs_from(&[(5.0, 5.0); 4]);
        let c = compare_paired(&pairs).unwrap();
        assert_eq!(c.mean_reduction_pct, Some(0.0));
        assert_eq!(c.t_statistic, None);
        assert_eq!(c.cohens_d, None);
        assert_eq!(c.ci95, None);
    }

    #[test]
    fn single_pair_has_a_mean_but_no_t() {
        let pairs = pairs_from(&[(10.0, 7.0)]);
        let c = compare_paired(&pairs).unwrap();
        assert_eq!(c.degrees_of_freedom, 0);
        assert_eq!(c.mean_difference, 3.0);
        assert_eq!(c.mean_reduction_pct, Some(30.0));
        assert_eq!(c.t_statistic, None);
    }

    #[test]
    fn no_pairs_is_an_error() {
        assert_eq!(compare_paired(&[]), Err(StatsError::InsufficientPairs));
    }

    #[test]
    fn zero_baseline_leaves_reduction_undefined() {
        let pairs = pairs_from(&[(0.0, 1.0), (2.0, 1.0)]);
        let c = compare_paired(&pairs).unwrap();
        assert_eq!(c.mean_reduction_pct, None);
        assert!(c.t_statistic.is_some());
    }

    #[test]
    fn hand_computed_example() {
        // diffs: 2, 4, 6 -> mean 4, sd 2, se 2/sqrt(3)
        let pairs = pairs_from(&[(10.0, 8.0), (10.0, 6.0), (10.0, 4.0)]);
        let c = compare_paired(&pairs).unwrap();
        assert_abs_diff_eq!(c.mean_difference, 4.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.sd_difference.unwrap(), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(
            c.t_statistic.unwrap(),
            4.0 / (2.0 / 3.0_f64.sqrt()),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(c.cohens_d.unwrap(), 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(c.mean_reduction_pct.unwrap(), 40.0, epsilon = 1e-12);
    }

    #[test]
    fn csv_parsing_round_trips() {
        let text = "label,value_a,value_b\nalpha,10,8\nbeta,12.5,9\n";
        let pairs = parse_pairs_csv(text).unwrap();
        assert_eq!(pairs.len(), 2);
        assert_eq!(pairs[0].label, "alpha");
        assert_eq!(pairs[1].value_b, 9.0);
    }

    #[test]
    fn csv_with_the_wrong_header_is_rejected() {
        assert!(parse_pairs_csv("a,b,c\n1,2,3\n").is_err());
    }
}
