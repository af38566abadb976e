//! Time-stamped named-norm records and their CSV form.

use crate::error::{EstimatesError, Result};
use std::fmt::Write as _;

#[derive(Debug, Clone, PartialEq)]
pub struct NormRecord {
    pub t: f64,
    pub name: String,
    pub value: f64,
}

/// Append-only record of `(t, name, value)` samples. Within one name the
/// timestamps must increase strictly and every value must be finite.
#[derive(Debug, Clone, Default)]
pub struct NormSeries {
    records: Vec<NormRecord>,
}

impl NormSeries {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, t: f64, name: &str, value: f64) {
        assert!(value.is_finite(), "norm `{name}` at t={t} is not finite");
        if let Some(prev) = self.records.iter().rev().find(|r| r.name == name) {
            assert!(
                t > prev.t,
                "norm `{name}`: time {t} does not increase past {}",
                prev.t
            );
        }
        self.records.push(NormRecord {
            t,
            name: name.to_string(),
            value,
        });
    }

    pub fn records(&self) -> &[NormRecord] {
        &self.records
    }

    pub fn names(&self) -> Vec<String> {
        let mut names: Vec<String> = Vec::new();
        for r in &self.records {
            if !names.contains(&r.name) {
                names.push(r.name.clone());
            }
        }
        names
    }

    /// All `(t, value)` samples of one named series, in time order.
    pub fn get(&self, name: &str) -> Vec<(f64, f64)> {
        self.records
            .iter()
            .filter(|r| r.name == name)
            .map(|r| (r.t, r.value))
            .collect()
    }

    pub fn require(&self, name: &str) -> Result<Vec<(f64, f64)>> {
        let points = self.get(name);
        if points.is_empty() {
            return Err(EstimatesError::MissingSeries(name.to_string()));
        }
        Ok(points)
    }

    pub fn extend(&mut self, other: &NormSeries) {
        for r in other.records() {
            self.push(r.t, &r.name, r.value);
        }
    }

    /// CSV with header `t,name,value`; floats printed shortest-roundtrip.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,name,value\n");
        for r in &self.records {
            let _ = writeln!(out, "{},{},{}", r.t, r.name, r.value);
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut series = NormSeries::new();
        for (lineno, line) in text.lines().enumerate() {
            if lineno == 0 {
                if line.trim() != "t,name,value" {
                    return Err(EstimatesError::ConfigRange(format!(
                        "csv line 1: expected header `t,name,value`, got `{line}`"
                    )));
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.splitn(3, ',').collect();
            if parts.len() != 3 {
                return Err(EstimatesError::ConfigRange(format!(
                    "csv line {}: expected 3 fields",
                    lineno + 1
                )));
            }
            let t: f64 = parts[0].parse().map_err(|_| {
                EstimatesError::ConfigRange(format!("csv line {}: bad time", lineno + 1))
            })?;
            let value: f64 = parts[2].parse().map_err(|_| {
                EstimatesError::ConfigRange(format!("csv line {}: bad value", lineno + 1))
            })?;
            series.push(t, parts[1], value);
        }
        Ok(series)
    }
}

/// Trapezoidal integral of a sampled function of time.
pub fn trapezoid(points: &[(f64, f64)]) -> f64 {
    points
        .windows(2)
        .map(|w| 0.5 * (w[1].0 - w[0].0) * (w[0].1 + w[1].1))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_roundtrip() {
        let mut s = NormSeries::new();
        s.push(0.0, "l2", 1.5);
        s.push(0.1, "l2", 1.25);
        s.push(0.0, "linf", 2.0);
        let text = s.to_csv();
        let back = NormSeries::from_csv(&text).unwrap();
        assert_eq!(s.records(), back.records());
    }

    #[test]
    #[should_panic(expected = "does not increase")]
    fn rejects_non_increasing_time() {
        let mut s = NormSeries::new();
        s.push(0.1, "l2", 1.0);
        s.push(0.1, "l2", 2.0);
    }

    #[test]
    fn trapezoid_on_linear_data_is_exact() {
        let pts: Vec<(f64, f64)> = (0..11).map(|i| (i as f64 * 0.1, 2.0 * i as f64 * 0.1)).collect();
        assert!((trapezoid(&pts) - 1.0).abs() < 1e-14);
    }
}
