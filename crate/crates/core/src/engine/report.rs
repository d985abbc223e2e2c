use std::fmt::Write;

use serde::Serialize;

use super::{outcome, EvalBudget, Judgement, Verdict};
use crate::dsl::{Expect, Identity};
use crate::mpball::{rational_to_decimal_trunc, BallReal};

/// How a verdict compares with the identity's `expect` clause.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Matched,
    Mismatched,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SideReport {
    pub mid: String,
    pub rad: String,
}

impl SideReport {
    fn new(b: &BallReal, requested: u32) -> Self {
        SideReport {
            mid: b.mid_to_decimal(mid_digits(b, requested)),
            rad: b.rad_to_string(),
        }
    }
}

/// Significant digits worth printing: those the radius leaves meaningful,
/// plus two, within `[6, requested + 5]`.
fn mid_digits(b: &BallReal, requested: u32) -> usize {
    let hi = requested as usize + 5;
    let rad = b.rad();
    let mid = b.mid_mag();
    if rad.is_zero() || mid.is_zero() {
        return hi;
    }
    let useful = mid.log10_approx().floor() - rad.log10_approx().floor() + 2.0;
    (useful.max(6.0) as usize).min(hi).max(6)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Record {
    pub id: String,
    pub param: Option<i64>,
    pub verdict: &'static str,
    pub digits_matched: Option<u32>,
    /// Certified lower bound on the separation, truncated toward zero.
    pub gap: Option<String>,
    pub lhs: Option<SideReport>,
    pub rhs: Option<SideReport>,
    pub terms_used: u64,
    pub prime_limit: u64,
    pub expected: String,
    pub outcome: Outcome,
    pub rigorous: bool,
    pub reason: Option<String>,
    /// Term caps that bounded the achievable digits.
    pub capped: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ms: Option<u64>,
}

impl Record {
    pub(crate) fn new(
        id: &Identity,
        param: Option<i64>,
        j: Judgement,
        requested: u32,
        ms: Option<u64>,
    ) -> Self {
        let (digits_matched, gap, reason) = match &j.verdict {
            Verdict::Confirmed { digits } => (Some(*digits), None, None),
            Verdict::Refuted { gap } => (None, Some(rational_to_decimal_trunc(gap, 6)), None),
            Verdict::Inconclusive { reason } => (None, None, Some(reason.clone())),
        };
        Record {
            id: id.id.clone(),
            param,
            verdict: j.verdict.name(),
            digits_matched,
            gap,
            lhs: j.lhs.as_ref().map(|b| SideReport::new(b, requested)),
            rhs: j.rhs.as_ref().map(|b| SideReport::new(b, requested)),
            terms_used: j.stats.terms_used,
            prime_limit: j.stats.prime_limit,
            expected: match id.expect {
                Expect::Confirmed(d) => format!("confirmed>={d}"),
                Expect::Refuted => "refuted".to_string(),
            },
            outcome: outcome(id.expect, &j.verdict),
            rigorous: !j.stats.heuristic,
            reason,
            capped: j.stats.capped,
            ms,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub matched: usize,
    pub mismatched: usize,
    pub inconclusive: usize,
}

impl Summary {
    /// 0 all matched, 1 any mismatch, 2 inconclusive without mismatch.
    pub fn exit_code(&self) -> i32 {
        if self.mismatched > 0 {
            1
        } else if self.inconclusive > 0 {
            2
        } else {
            0
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Report {
    pub corpus: String,
    pub digits_requested: u32,
    pub mode: &'static str,
    pub max_terms: u64,
    pub prime_limit: u64,
    pub results: Vec<Record>,
    pub summary: Summary,
}

impl Report {
    pub(crate) fn new(corpus: String, budget: &EvalBudget, results: Vec<Record>) -> Self {
        let mut summary = Summary::default();
        for r in &results {
            match r.outcome {
                Outcome::Matched => summary.matched += 1,
                Outcome::Mismatched => summary.mismatched += 1,
                Outcome::Inconclusive => summary.inconclusive += 1,
            }
        }
        Report {
            corpus,
            digits_requested: budget.digits,
            mode: budget.mode.name(),
            max_terms: budget.max_terms,
            prime_limit: budget.prime_limit,
            results,
            summary,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One row per record, then the summary and any inconclusive reasons.
    pub fn to_text(&self) -> String {
        let timed = self.results.iter().any(|r| r.ms.is_some());
        let mut rows = vec![[
            "id", "param", "verdict", "digits/gap", "lhs", "rhs", "terms", "primes", "outcome",
            "ms",
        ]
        .map(String::from)];
        for r in &self.results {
            let side = |s: &Option<SideReport>| match s {
                Some(s) => format!("{} ± {}", s.mid, s.rad),
                None => "-".to_string(),
            };
            let measure = match (&r.digits_matched, &r.gap) {
                (Some(d), _) => d.to_string(),
                (_, Some(g)) => format!("gap {g}"),
                _ => "-".to_string(),
            };
            let mut verdict = r.verdict.to_string();
            if !r.rigorous {
                verdict.push('*');
            }
            rows.push([
                r.id.clone(),
                r.param.map_or("-".to_string(), |p| p.to_string()),
                verdict,
                measure,
                side(&r.lhs),
                side(&r.rhs),
                r.terms_used.to_string(),
                r.prime_limit.to_string(),
                format!("{:?}", r.outcome).to_lowercase(),
                r.ms.map_or(String::new(), |ms| ms.to_string()),
            ]);
        }
        let columns = if timed { 10 } else { 9 };
        let mut widths = [0usize; 10];
        for row in &rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        for row in &rows {
            let mut line = String::new();
            for (i, cell) in row.iter().take(columns).enumerate() {
                if i > 0 {
                    line.push_str("  ");
                }
                let pad = widths[i] - cell.chars().count();
                line.push_str(cell);
                line.push_str(&" ".repeat(pad));
            }
            out.push_str(line.trim_end());
            out.push('\n');
        }
        let _ = writeln!(
            out,
            "\n{} matched, {} mismatched, {} inconclusive ({} digits, {} mode)",
            self.summary.matched,
            self.summary.mismatched,
            self.summary.inconclusive,
            self.digits_requested,
            self.mode
        );
        if self.results.iter().any(|r| !r.rigorous) {
            out.push_str("* heuristic truncation, no tail bound\n");
        }
        for r in &self.results {
            let param = r.param.map_or(String::new(), |p| format!(" [{p}]"));
            if let Some(reason) = &r.reason {
                let _ = writeln!(out, "{}{}: {}", r.id, param, reason);
            } else {
                for c in &r.capped {
                    let _ = writeln!(out, "{}{}: capped, {}", r.id, param, c);
                }
            }
        }
        out
    }
}

