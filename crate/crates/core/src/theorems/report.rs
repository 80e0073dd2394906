//! Structured check results and the verification report.

use std::collections::BTreeMap;
use std::time::Duration;

use serde::Serialize;

use crate::theorems::transform::CalibrationRecord;

/// Pass condition for the per-point residuals of a check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Criterion {
    /// Every residual is at most `tolerance * scale`.
    AtMost { tolerance: f64 },
    /// At least `min_fraction` of residuals are at least `tolerance * scale`.
    AtLeast { tolerance: f64, min_fraction: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// Not applicable to the subject (for example a dimension restriction).
    Skipped,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckResult {
    pub check_id: String,
    pub metric_id: String,
    pub connection: String,
    pub seed: u64,
    pub points: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub scales: Vec<f64>,
    pub criterion: Criterion,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    /// Per-point side quantities, keyed by name, aligned with `points`.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub diagnostics: BTreeMap<String, Vec<f64>>,
    /// Points that could not be sampled at all.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sampling_failures: Vec<String>,
    /// Kept out of the JSON so reports are byte-identical across runs.
    #[serde(skip)]
    pub wall_time: Duration,
}

impl CheckResult {
    pub fn new(
        check_id: impl Into<String>,
        metric_id: impl Into<String>,
        connection: impl Into<String>,
        seed: u64,
        criterion: Criterion,
    ) -> CheckResult {
        CheckResult {
            check_id: check_id.into(),
            metric_id: metric_id.into(),
            connection: connection.into(),
            seed,
            points: Vec::new(),
            residuals: Vec::new(),
            scales: Vec::new(),
            criterion,
            verdict: Verdict::Skipped,
            note: None,
            diagnostics: BTreeMap::new(),
            sampling_failures: Vec::new(),
            wall_time: Duration::ZERO,
        }
    }

    pub fn skipped(mut self, why: impl Into<String>) -> CheckResult {
        self.verdict = Verdict::Skipped;
        self.note = Some(why.into());
        self
    }

    pub fn push(&mut self, point: Vec<f64>, residual: f64, scale: f64) {
        self.points.push(point);
        self.residuals.push(residual);
        self.scales.push(scale);
    }

    pub fn push_diagnostic(&mut self, key: &str, value: f64) {
        self.diagnostics
            .entry(key.to_string())
            .or_default()
            .push(value);
    }

    /// Whether the residual at `i` meets the criterion on its own.
    pub fn point_ok(&self, i: usize) -> bool {
        let (r, s) = (self.residuals[i], self.scales[i]);
        match self.criterion {
            Criterion::AtMost { tolerance } => r <= tolerance * s,
            Criterion::AtLeast { tolerance, .. } => r >= tolerance * s,
        }
    }

    /// Sets the verdict from the recorded residuals. Sampling failures and
    /// empty results fail.
    pub fn finish(mut self) -> CheckResult {
        let n = self.residuals.len();
        let ok = (0..n).filter(|&i| self.point_ok(i)).count();
        let pass = n > 0
            && self.sampling_failures.is_empty()
            && match self.criterion {
                Criterion::AtMost { .. } => ok == n,
                Criterion::AtLeast { min_fraction, .. } => ok as f64 >= min_fraction * n as f64,
            };
        self.verdict = if pass { Verdict::Pass } else { Verdict::Fail };
        self
    }

    /// `max residual / scale` over the recorded points.
    pub fn worst_ratio(&self) -> f64 {
        let ratios = self.residuals.iter().zip(&self.scales).map(|(r, s)| r / s);
        match self.criterion {
            Criterion::AtMost { .. } => ratios.fold(0.0, f64::max),
            Criterion::AtLeast { .. } => ratios.fold(f64::INFINITY, f64::min),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub tool_version: String,
    pub suite: String,
    pub seed: u64,
    pub samples: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance_factor: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transformation_convention: Option<CalibrationRecord>,
    pub checks: Vec<CheckResult>,
    pub verdict: Verdict,
}

impl VerificationReport {
    pub fn new(suite: &str, seed: u64, samples: usize, tolerance_factor: Option<f64>) -> Self {
        VerificationReport {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            suite: suite.to_string(),
            seed,
            samples,
            tolerance_factor,
            transformation_convention: None,
            checks: Vec::new(),
            verdict: Verdict::Skipped,
        }
    }

    pub fn finish(mut self) -> Self {
        self.verdict = if self.checks.iter().any(|c| c.verdict == Verdict::Fail) {
            Verdict::Fail
        } else if self.checks.iter().any(|c| c.verdict == Verdict::Pass) {
            Verdict::Pass
        } else {
            Verdict::Skipped
        };
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }

    /// Fixed-width table: one row per check.
    pub fn summary_table(&self) -> String {
        let mut out = format!(
            "{:<26} {:<16} {:<12} {:>7} {:>11}  {}\n",
            "check", "metric", "connection", "points", "worst/tol", "verdict"
        );
        for c in &self.checks {
            let tol = match c.criterion {
                Criterion::AtMost { tolerance } | Criterion::AtLeast { tolerance, .. } => tolerance,
            };
            let ratio = if c.residuals.is_empty() || tol == 0.0 {
                "-".to_string()
            } else {
                format!("{:.2e}", c.worst_ratio() / tol)
            };
            let verdict = match c.verdict {
                Verdict::Pass => "PASS",
                Verdict::Fail => "FAIL",
                Verdict::Skipped => "skip",
            };
            out.push_str(&format!(
                "{:<26} {:<16} {:<12} {:>7} {:>11}  {}",
                c.check_id,
                c.metric_id,
                c.connection,
                c.points.len(),
                ratio,
                verdict
            ));
            if let Some(note) = &c.note {
                out.push_str(&format!("  ({note})"));
            }
            out.push('\n');
        }
        let overall = match self.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Skipped => "nothing to check",
        };
        out.push_str(&format!(
            "suite {} seed {} samples {}: {}\n",
            self.suite, self.seed, self.samples, overall
        ));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn at_most_verdicts() {
        let mut c = CheckResult::new("x", "m", "lc", 1, Criterion::AtMost { tolerance: 1e-8 });
        c.push(vec![0.0], 1e-9, 2.0);
        c.push(vec![1.0], 1.9e-8, 2.0);
        assert_eq!(c.clone().finish().verdict, Verdict::Pass);
        c.push(vec![2.0], 3e-8, 2.0);
        assert_eq!(c.finish().verdict, Verdict::Fail);
    }

    #[test]
    fn at_least_fraction() {
        let crit = Criterion::AtLeast {
            tolerance: 1e-5,
            min_fraction: 0.9,
        };
        let mut c = CheckResult::new("x", "m", "lc", 1, crit);
        for i in 0..10 {
            c.push(vec![i as f64], if i == 0 { 0.0 } else { 1.0 }, 1.0);
        }
        assert_eq!(c.clone().finish().verdict, Verdict::Pass);
        c.residuals[1] = 0.0;
        assert_eq!(c.finish().verdict, Verdict::Fail);
    }

    #[test]
    fn empty_or_failed_sampling_fails() {
        let c = CheckResult::new("x", "m", "lc", 1, Criterion::AtMost { tolerance: 1.0 });
        assert_eq!(c.finish().verdict, Verdict::Fail);
        let mut c = CheckResult::new("x", "m", "lc", 1, Criterion::AtMost { tolerance: 1.0 });
        c.push(vec![0.0], 0.0, 1.0);
        c.sampling_failures.push("singular".into());
        assert_eq!(c.finish().verdict, Verdict::Fail);
    }

    #[test]
    fn wall_time_not_serialized() {
        let mut c = CheckResult::new("x", "m", "lc", 1, Criterion::AtMost { tolerance: 1.0 });
        c.wall_time = Duration::from_millis(5);
        let json = serde_json::to_string(&c).unwrap();
        assert!(!json.contains("wall"));
    }
}
