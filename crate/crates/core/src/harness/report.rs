//! Claim reports and tolerance policies.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CzError, Result};

/// How a group of rows is judged. `ratio` is `lhs / rhs` except for
/// [`Policy::Absolute`], where it is `|lhs - rhs|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Policy {
    /// Identities: every `|lhs - rhs| <= tol`.
    Absolute { tol: f64 },
    /// Every `lhs / rhs <= bound`.
    UpperBound { bound: f64 },
    /// One-sided estimates: every ratio at most `factor` times the first row's.
    UpperBand { factor: f64 },
    /// Two-sided estimates: `max ratio / min ratio <= factor`.
    TwoSidedBand { factor: f64 },
    /// Consecutive growth `lhs[i+1] / lhs[i]` within a factor of the
    /// predicted `rhs[i+1] / rhs[i]`, in both directions.
    SuccessiveRatio { factor: f64 },
    /// Every ratio within `rel` of the first row's, relative.
    Stability { rel: f64 },
    /// Every ratio in `[1/factor, factor]`.
    Within { factor: f64 },
}

impl Policy {
    pub fn ratio(&self, lhs: f64, rhs: f64) -> f64 {
        match self {
            Policy::Absolute { .. } => (lhs - rhs).abs(),
            _ => lhs / rhs,
        }
    }

    /// Verdict and the measured statistic compared against the tolerance.
    pub fn judge(&self, rows: &[Row]) -> (bool, f64) {
        let ratios: Vec<f64> = rows.iter().map(|r| r.ratio).collect();
        if ratios.is_empty() || ratios.iter().any(|r| !r.is_finite()) {
            return (false, f64::NAN);
        }
        let max = ratios.iter().cloned().fold(f64::MIN, f64::max);
        let min = ratios.iter().cloned().fold(f64::MAX, f64::min);
        match *self {
            Policy::Absolute { tol } => (max <= tol, max),
            Policy::UpperBound { bound } => (max <= bound, max),
            Policy::UpperBand { factor } => {
                let s = max / ratios[0];
                (s <= factor, s)
            }
            Policy::TwoSidedBand { factor } => {
                let s = max / min;
                (min > 0.0 && s <= factor, s)
            }
            Policy::SuccessiveRatio { factor } => {
                let mut worst: f64 = 1.0;
                for w in rows.windows(2) {
                    let measured = w[1].lhs / w[0].lhs;
                    let predicted = w[1].rhs / w[0].rhs;
                    let q = measured / predicted;
                    worst = worst.max(q.max(1.0 / q));
                }
                (worst <= factor, worst)
            }
            Policy::Stability { rel } => {
                let s = ratios.iter().map(|r| (r / ratios[0] - 1.0).abs()).fold(0.0, f64::max);
                (s <= rel, s)
            }
            Policy::Within { factor } => {
                let s = max.max(1.0 / min);
                (min > 0.0 && s <= factor, s)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Row {
    pub params: BTreeMap<String, Value>,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupReport {
    pub name: String,
    pub policy: Policy,
    pub rows: Vec<Row>,
    pub statistic: f64,
    pub pass: bool,
}

impl GroupReport {
    pub fn new(name: impl Into<String>, policy: Policy) -> Self {
        GroupReport { name: name.into(), policy, rows: Vec::new(), statistic: f64::NAN, pass: false }
    }

    pub fn push(&mut self, params: BTreeMap<String, Value>, lhs: f64, rhs: f64) {
        let ratio = self.policy.ratio(lhs, rhs);
        self.rows.push(Row { params, lhs, rhs, ratio });
    }

    pub fn finish(mut self) -> Self {
        let (pass, statistic) = self.policy.judge(&self.rows);
        self.pass = pass;
        self.statistic = statistic;
        self
    }
}

/// `params!{"n" => 4, "eps" => 0.5}` builds a row parameter map.
#[macro_export]
macro_rules! params {
    ($($k:expr => $v:expr),* $(,)?) => {{
        let mut m = std::collections::BTreeMap::new();
        $( m.insert($k.to_string(), serde_json::json!($v)); )*
        m
    }};
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimReport {
    pub claim_id: String,
    pub description: String,
    pub groups: Vec<GroupReport>,
    pub verdict: bool,
    /// Caveats about the finite sweep standing in for an asymptotic statement.
    pub extrapolation_note: String,
    pub config_hash: String,
}

impl ClaimReport {
    pub fn new(
        claim_id: &str,
        description: &str,
        groups: Vec<GroupReport>,
        extrapolation_note: &str,
        config_hash: String,
    ) -> Self {
        let verdict = !groups.is_empty() && groups.iter().all(|g| g.pass);
        ClaimReport {
            claim_id: claim_id.to_string(),
            description: description.to_string(),
            groups,
            verdict,
            extrapolation_note: extrapolation_note.to_string(),
            config_hash,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// One CSV line per row: claim, group, params as JSON, lhs, rhs, ratio, group verdict.
    pub fn write_csv<W: Write>(&self, mut out: W, header: bool) -> Result<()> {
        let io = |e| CzError::io("<claim csv>", e);
        if header {
            writeln!(out, "claim,group,params,lhs,rhs,ratio,pass").map_err(io)?;
        }
        for g in &self.groups {
            for r in &g.rows {
                let p = serde_json::to_string(&r.params)?.replace('"', "\"\"");
                writeln!(
                    out,
                    "{},{},\"{}\",{:e},{:e},{:e},{}",
                    self.claim_id, g.name, p, r.lhs, r.rhs, r.ratio, g.pass
                )
                .map_err(io)?;
            }
        }
        Ok(())
    }

    /// One human-readable line per group.
    pub fn summary_lines(&self) -> Vec<String> {
        self.groups
            .iter()
            .map(|g| {
                format!(
                    "{} [{}] {} {:?}: statistic {:.4e} over {} rows",
                    self.claim_id,
                    g.name,
                    if g.pass { "PASS" } else { "FAIL" },
                    g.policy,
                    g.statistic,
                    g.rows.len()
                )
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn group(policy: Policy, pairs: &[(f64, f64)]) -> GroupReport {
        let mut g = GroupReport::new("g", policy);
        for (i, &(l, r)) in pairs.iter().enumerate() {
            g.push(params! {"i" => i}, l, r);
        }
        g.finish()
    }

    #[test]
    fn policies() {
        assert!(group(Policy::Absolute { tol: 1e-3 }, &[(1.0, 1.0005)]).pass);
        assert!(!group(Policy::Absolute { tol: 1e-4 }, &[(1.0, 1.0005)]).pass);
        assert!(group(Policy::UpperBound { bound: 2.0 }, &[(1.0, 1.0), (3.0, 2.0)]).pass);
        assert!(group(Policy::UpperBand { factor: 2.0 }, &[(1.0, 1.0), (0.01, 1.0), (1.9, 1.0)]).pass);
        assert!(!group(Policy::UpperBand { factor: 2.0 }, &[(1.0, 1.0), (2.1, 1.0)]).pass);
        assert!(!group(Policy::TwoSidedBand { factor: 4.0 }, &[(1.0, 1.0), (0.2, 1.0)]).pass);
        assert!(group(Policy::TwoSidedBand { factor: 4.0 }, &[(1.0, 1.0), (0.3, 1.0)]).pass);
        assert!(group(Policy::SuccessiveRatio { factor: 2.0 }, &[(1.0, 1.0), (4.0, 2.0), (4.0, 4.0)]).pass);
        let g = group(Policy::SuccessiveRatio { factor: 2.0 }, &[(1.0, 1.0), (5.0, 2.0)]);
        assert!(!g.pass);
        assert!((g.statistic - 2.5).abs() < 1e-12);
        assert!(group(Policy::Stability { rel: 0.2 }, &[(1.0, 1.0), (1.1, 1.0), (0.85, 1.0)]).pass);
        assert!(group(Policy::Within { factor: 2.0 }, &[(1.0, 1.9), (1.9, 1.0)]).pass);
        assert!(!group(Policy::Within { factor: 2.0 }, &[(1.0, 2.1)]).pass);
        assert!(!group(Policy::Absolute { tol: 1.0 }, &[]).pass);
        assert!(!group(Policy::UpperBound { bound: 1.0 }, &[(f64::NAN, 1.0)]).pass);
    }

    #[test]
    fn report_serializes_deterministically() {
        let g = group(Policy::UpperBound { bound: 2.0 }, &[(1.0, 1.0)]);
        let r = ClaimReport::new("x", "desc", vec![g], "", "abc".into());
        assert!(r.verdict);
        assert_eq!(r.to_json().unwrap(), r.clone().to_json().unwrap());
        let mut buf = Vec::new();
        r.write_csv(&mut buf, true).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert_eq!(s.lines().count(), 2);
        assert!(s.contains("\"{\"\"i\"\":0}\""));
    }
}
