//! Structured results of property experiments.
//!
//! A [`Report`] is a table of labelled rows, each holding named real metrics,
//! plus the [`PassRule`] and tolerance that decide its verdict. The verdict is
//! always recomputable from the rows via [`Report::evaluate`].

use std::fmt::Write as _;

use serde::Serialize;

/// Formats a real with 17 significant digits, enough to round-trip an `f64`.
pub fn fmt_real(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        format!("{v}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub label: String,
    pub values: Vec<(String, f64)>,
}

impl Row {
    pub fn new(label: impl Into<String>) -> Self {
        Row {
            label: label.into(),
            values: Vec::new(),
        }
    }

    pub fn with(mut self, metric: impl Into<String>, value: f64) -> Self {
        self.values.push((metric.into(), value));
        self
    }

    pub fn get(&self, metric: &str) -> Option<f64> {
        self.values
            .iter()
            .find(|(name, _)| name == metric)
            .map(|&(_, v)| v)
    }
}

/// How a report's pass flag is derived from its rows and tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum PassRule {
    /// Every row's `metric` is at most the tolerance.
    MaxAtMost { metric: String },
    /// The last row's `metric` is at most the tolerance.
    FinalAtMost { metric: String },
    /// Each metric either vanishes (all rows within tolerance) or shrinks from
    /// row to row with a geometric-mean factor inside `[lo, hi]`.
    ShrinkFactor {
        metrics: Vec<String>,
        lo: f64,
        hi: f64,
    },
    /// `metric` is nonincreasing up to a relative `slack`, or identically within tolerance.
    Decreasing { metric: String, slack: f64 },
    /// `output` nonincreasing up to `slack`, and the final output is at most
    /// `tolerance * (final input + gap)`.
    Continuity {
        input: String,
        output: String,
        gap: String,
        slack: f64,
    },
    /// Measurement only; always passes.
    Informational,
}

impl PassRule {
    fn describe(&self) -> String {
        match self {
            PassRule::MaxAtMost { metric } => format!("max({metric}) <= tolerance"),
            PassRule::FinalAtMost { metric } => format!("final({metric}) <= tolerance"),
            PassRule::ShrinkFactor { metrics, lo, hi } => {
                format!("shrink factor of {} in [{lo}, {hi}]", metrics.join(", "))
            }
            PassRule::Decreasing { metric, slack } => {
                format!("{metric} nonincreasing (slack {slack})")
            }
            PassRule::Continuity {
                input,
                output,
                gap,
                slack,
            } => format!(
                "{output} nonincreasing (slack {slack}); final {output} <= tolerance * (final {input} + {gap})"
            ),
            PassRule::Informational => "informational".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub name: String,
    pub rows: Vec<Row>,
    pub pass: bool,
    pub tolerance_used: f64,
    pub rule: PassRule,
}

impl Report {
    pub fn new(name: impl Into<String>, rows: Vec<Row>, tolerance: f64, rule: PassRule) -> Self {
        let mut report = Report {
            name: name.into(),
            rows,
            pass: false,
            tolerance_used: tolerance,
            rule,
        };
        report.pass = report.evaluate();
        report
    }

    /// Values of `metric` in row order; rows missing the metric are skipped.
    pub fn column(&self, metric: &str) -> Vec<f64> {
        self.rows.iter().filter_map(|r| r.get(metric)).collect()
    }

    pub fn row(&self, label: &str) -> Option<&Row> {
        self.rows.iter().find(|r| r.label == label)
    }

    /// Successive ratios `col[i] / col[i + 1]`.
    pub fn ratios(&self, metric: &str) -> Vec<f64> {
        self.column(metric)
            .windows(2)
            .map(|w| w[0] / w[1])
            .collect()
    }

    /// Recomputes the verdict from rows, tolerance and rule alone.
    pub fn evaluate(&self) -> bool {
        let tol = self.tolerance_used;
        match &self.rule {
            PassRule::MaxAtMost { metric } => {
                let col = self.column(metric);
                !col.is_empty() && col.iter().all(|v| *v <= tol)
            }
            PassRule::FinalAtMost { metric } => {
                matches!(self.column(metric).last(), Some(v) if *v <= tol)
            }
            PassRule::ShrinkFactor { metrics, lo, hi } => metrics.iter().all(|m| {
                let col = self.column(m);
                if col.len() < 2 {
                    return false;
                }
                if col.iter().all(|v| v.abs() <= tol) {
                    return true;
                }
                if col.iter().any(|v| *v <= 0.0 || !v.is_finite()) {
                    return false;
                }
                let mean_log = col.windows(2).map(|w| (w[0] / w[1]).ln()).sum::<f64>()
                    / (col.len() - 1) as f64;
                let factor = mean_log.exp();
                factor >= *lo && factor <= *hi
            }),
            PassRule::Decreasing { metric, slack } => {
                let col = self.column(metric);
                !col.is_empty()
                    && (col.iter().all(|v| v.abs() <= tol) || nonincreasing(&col, *slack))
            }
            PassRule::Continuity {
                input,
                output,
                gap,
                slack,
            } => {
                let out = self.column(output);
                let inp = self.column(input);
                let gaps = self.column(gap);
                match (out.last(), inp.last(), gaps.last()) {
                    (Some(o), Some(i), Some(g)) => {
                        nonincreasing(&out, *slack) && *o <= tol * (i + g)
                    }
                    _ => false,
                }
            }
            PassRule::Informational => true,
        }
    }

    /// Key-value text form.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "report = {}", self.name);
        let _ = writeln!(out, "pass = {}", self.pass);
        let _ = writeln!(out, "tolerance = {}", fmt_real(self.tolerance_used));
        let _ = writeln!(out, "rule = {}", self.rule.describe());
        for row in &self.rows {
            let _ = writeln!(out, "[{}]", row.label);
            for (metric, value) in &row.values {
                let _ = writeln!(out, "{metric} = {}", fmt_real(*value));
            }
        }
        out
    }

    /// `(label, metric, value)` triples in row order.
    pub fn csv_records(&self) -> Vec<[String; 3]> {
        self.rows
            .iter()
            .flat_map(|row| {
                row.values
                    .iter()
                    .map(|(m, v)| [row.label.clone(), m.clone(), fmt_real(*v)])
            })
            .collect()
    }
}

fn nonincreasing(col: &[f64], slack: f64) -> bool {
    col.windows(2).all(|w| w[1] <= w[0] * (1.0 + slack))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows(metric: &str, vals: &[f64]) -> Vec<Row> {
        vals.iter()
            .enumerate()
            .map(|(i, &v)| Row::new(format!("level{i}")).with(metric, v))
            .collect()
    }

    #[test]
    fn shrink_rule() {
        let rule = PassRule::ShrinkFactor {
            metrics: vec!["e".into()],
            lo: 1.4,
            hi: 2.6,
        };
        assert!(Report::new("a", rows("e", &[4.0, 2.0, 1.0]), 1e-14, rule.clone()).pass);
        assert!(!Report::new("b", rows("e", &[4.0, 1.0, 0.25]), 1e-14, rule.clone()).pass);
        assert!(Report::new("c", rows("e", &[0.0, 0.0, 0.0]), 1e-14, rule).pass);
    }

    #[test]
    fn pass_is_recomputable() {
        let mut r = Report::new(
            "x",
            rows("e", &[1e-13, 2e-13]),
            1e-12,
            PassRule::MaxAtMost { metric: "e".into() },
        );
        assert!(r.pass);
        r.rows[1].values[0].1 = 1.0;
        assert!(!r.evaluate());
    }

    #[test]
    fn text_and_csv_forms() {
        let r = Report::new(
            "demo",
            vec![Row::new("base").with("e", 0.5)],
            1.0,
            PassRule::Informational,
        );
        let text = r.to_text();
        assert!(text.contains("report = demo"));
        assert!(text.contains("e = 5.0000000000000000e-1"));
        assert_eq!(
            r.csv_records(),
            vec![["base".to_string(), "e".to_string(), fmt_real(0.5)]]
        );
    }
}
