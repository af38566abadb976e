//! Inequality monitors: one measured left side, one measured right side (or
//! envelope), and a verdict. Report-only monitors never fail a run; they are
//! used where the underlying constants are generic.

use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    ReportOnly,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::ReportOnly => "report-only",
        }
    }
}

#[derive(Debug, Clone)]
pub struct MonitorReport {
    pub id: String,
    /// Stable identifier of the inequality being checked; printed with every
    /// report so output lines can be traced back to the monitored estimate.
    pub anchor: String,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub verdict: Verdict,
}

impl MonitorReport {
    /// Pass/fail monitor: passes when `lhs ≤ rhs · (1 + slack)`.
    pub fn checked(id: &str, anchor: &str, lhs: f64, rhs: f64, slack: f64) -> Self {
        let ratio = if rhs != 0.0 { lhs / rhs } else { f64::INFINITY };
        let verdict = if lhs <= rhs * (1.0 + slack) || (lhs == 0.0 && rhs == 0.0) {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        MonitorReport {
            id: id.into(),
            anchor: anchor.into(),
            lhs,
            rhs,
            ratio,
            verdict,
        }
    }

    pub fn report_only(id: &str, anchor: &str, lhs: f64, rhs: f64) -> Self {
        let ratio = if rhs != 0.0 { lhs / rhs } else { f64::INFINITY };
        MonitorReport {
            id: id.into(),
            anchor: anchor.into(),
            lhs,
            rhs,
            ratio,
            verdict: Verdict::ReportOnly,
        }
    }

    pub fn failed(&self) -> bool {
        self.verdict == Verdict::Fail
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "monitor: {}", self.id);
        let _ = writeln!(out, "anchor: {}", self.anchor);
        let _ = writeln!(out, "lhs: {}", self.lhs);
        let _ = writeln!(out, "rhs: {}", self.rhs);
        let _ = writeln!(out, "ratio: {}", self.ratio);
        let _ = writeln!(out, "verdict: {}", self.verdict.as_str());
        out
    }
}

/// Render a batch as newline-separated text blocks.
pub fn render_reports(reports: &[MonitorReport]) -> String {
    reports
        .iter()
        .map(MonitorReport::render)
        .collect::<Vec<_>>()
        .join("\n")
}
