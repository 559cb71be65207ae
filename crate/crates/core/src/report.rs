//! Structured comparison of two numbers produced by different pipelines.

use std::fmt;

use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Agree,
    Disagree,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Agree => "AGREE",
            Verdict::Disagree => "DISAGREE",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

/// Relative deviation at or below `agree` is agreement, at or above
/// `disagree` a disagreement, anything between is inconclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    pub agree: f64,
    pub disagree: f64,
}

impl Thresholds {
    pub const fn new(agree: f64) -> Self {
        Self { agree, disagree: 10.0 * agree }
    }

    pub fn classify(&self, rel_diff: f64) -> Verdict {
        if rel_diff <= self.agree {
            Verdict::Agree
        } else if rel_diff >= self.disagree {
            Verdict::Disagree
        } else {
            Verdict::Inconclusive
        }
    }
}

impl Default for Thresholds {
    fn default() -> Self {
        Self::new(1e-3)
    }
}

/// `|a - b| / max(|a|, |b|, tiny)`.
pub fn rel_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).abs();
    if d == 0.0 {
        return 0.0;
    }
    d / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscrepancyReport {
    pub label: String,
    pub value_a: f64,
    pub value_b: f64,
    pub abs_diff: f64,
    pub rel_diff: f64,
    pub fitted_slope: Option<f64>,
    pub verdict: Verdict,
    pub thresholds: Thresholds,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl DiscrepancyReport {
    pub fn compare(label: impl Into<String>, value_a: f64, value_b: f64, thresholds: Thresholds) -> Self {
        let rel = rel_diff(value_a, value_b);
        Self {
            label: label.into(),
            value_a,
            value_b,
            abs_diff: (value_a - value_b).abs(),
            rel_diff: rel,
            fitted_slope: None,
            verdict: thresholds.classify(rel),
            thresholds,
            note: None,
        }
    }

    /// Measured log-log slope against a claimed one; agreement means the
    /// absolute slope difference is within `tol`.
    pub fn slope(label: impl Into<String>, measured: f64, claimed: f64, tol: f64) -> Self {
        let d = (measured - claimed).abs();
        let thresholds = Thresholds { agree: tol, disagree: tol };
        Self {
            label: label.into(),
            value_a: measured,
            value_b: claimed,
            abs_diff: d,
            rel_diff: rel_diff(measured, claimed),
            fitted_slope: Some(measured),
            verdict: thresholds.classify(d),
            thresholds,
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn with_slope(mut self, slope: f64) -> Self {
        self.fitted_slope = Some(slope);
        self
    }
}

impl fmt::Display for DiscrepancyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<44} {:>13} a={:<+.9e} b={:<+.9e} rel={:.3e}",
            self.label, self.verdict, self.value_a, self.value_b, self.rel_diff
        )?;
        if let Some(s) = self.fitted_slope {
            write!(f, " slope={s:+.4}")?;
        }
        if let Some(n) = &self.note {
            write!(f, "  [{n}]")?;
        }
        Ok(())
    }
}

/// Grid-level verdict: agreement everywhere, disagreement everywhere with
/// one sign of `a - b`, otherwise inconclusive.
pub fn aggregate(reports: &[DiscrepancyReport]) -> Verdict {
    if reports.is_empty() {
        return Verdict::Inconclusive;
    }
    if reports.iter().all(|r| r.verdict == Verdict::Agree) {
        return Verdict::Agree;
    }
    let all_disagree = reports.iter().all(|r| r.verdict == Verdict::Disagree);
    let positive = reports.iter().filter(|r| r.value_a > r.value_b).count();
    if all_disagree && (positive == 0 || positive == reports.len()) {
        Verdict::Disagree
    } else {
        Verdict::Inconclusive
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification() {
        let t = Thresholds::default();
        assert_eq!(DiscrepancyReport::compare("x", 1.0, 1.0005, t).verdict, Verdict::Agree);
        assert_eq!(DiscrepancyReport::compare("x", 1.0, 1.005, t).verdict, Verdict::Inconclusive);
        assert_eq!(DiscrepancyReport::compare("x", 1.0, 2.0, t).verdict, Verdict::Disagree);
        let r = DiscrepancyReport::compare("zero", 0.0, 0.0, t);
        assert_eq!((r.rel_diff, r.verdict), (0.0, Verdict::Agree));
    }

    #[test]
    fn slope_reports() {
        assert_eq!(DiscrepancyReport::slope("s", -2.95, -3.0, 0.1).verdict, Verdict::Agree);
        assert_eq!(DiscrepancyReport::slope("s", -2.0, -3.0, 0.1).verdict, Verdict::Disagree);
    }

    #[test]
    fn aggregation_needs_stable_sign() {
        let t = Thresholds::default();
        let up = DiscrepancyReport::compare("a", 2.0, 1.0, t);
        let down = DiscrepancyReport::compare("b", 1.0, 2.0, t);
        let ok = DiscrepancyReport::compare("c", 1.0, 1.0, t);
        assert_eq!(aggregate(&[up.clone(), up.clone()]), Verdict::Disagree);
        assert_eq!(aggregate(&[up.clone(), down]), Verdict::Inconclusive);
        assert_eq!(aggregate(&[ok.clone(), ok.clone()]), Verdict::Agree);
        assert_eq!(aggregate(&[ok, up]), Verdict::Inconclusive);
        assert_eq!(aggregate(&[]), Verdict::Inconclusive);
    }
}
