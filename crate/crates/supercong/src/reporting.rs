//! Report serialization: JSON, CSV and fixed-width tables, plus summary
//! statistics. Output ordering is (check id, p, x, strategy) regardless of
//! execution order; residues are decimal strings so large moduli survive
//! consumers with 53-bit numbers.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::checks::{CheckOutcome, SuiteResult};
use crate::numeric::rat_to_string;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub seed: u64,
    pub primes: String,
    pub strategy: String,
    pub x_policy: String,
    pub version: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeRecord {
    pub check: String,
    pub p: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub x: Option<String>,
    pub modulus: String,
    pub lhs: String,
    pub rhs: String,
    pub pass: bool,
    pub strategy: String,
    pub prec: i64,
    pub us: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SummaryCounts {
    pub pass: u64,
    pub fail: u64,
    pub skip: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub meta: Meta,
    pub outcomes: Vec<OutcomeRecord>,
    pub summary: BTreeMap<String, SummaryCounts>,
    /// histogram of modulus_audit values 0..=3 per check, when audited
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub audit: Option<BTreeMap<String, [u64; 4]>>,
}

fn record(o: &CheckOutcome, timings: bool) -> OutcomeRecord {
    OutcomeRecord {
        check: o.check_id.to_string(),
        p: o.p,
        x: o.x.as_ref().map(rat_to_string),
        modulus: o.modulus().to_string(),
        lhs: o.lhs.as_string(),
        rhs: o.rhs.as_string(),
        pass: o.pass,
        strategy: o.strategy.name().to_string(),
        prec: o.prec,
        us: if timings { o.micros } else { 0 },
    }
}

/// Assemble a report from a suite run. Timings default to zero so identical
/// seeds reproduce identical bytes; pass `timings` to keep measurements.
pub fn build_report(result: &SuiteResult, meta: Meta, timings: bool) -> Report {
    let outcomes: Vec<OutcomeRecord> =
        result.outcomes.iter().map(|o| record(o, timings)).collect();
    let mut summary: BTreeMap<String, SummaryCounts> = BTreeMap::new();
    for o in &result.outcomes {
        let e = summary.entry(o.check_id.to_string()).or_default();
        if o.pass {
            e.pass += 1;
        } else {
            e.fail += 1;
        }
    }
    for s in &result.skips {
        summary.entry(s.check_id.to_string()).or_default().skip += 1;
    }
    let audit = if result.audits.is_empty() {
        None
    } else {
        let mut hist: BTreeMap<String, [u64; 4]> = BTreeMap::new();
        for (id, _, _, k) in &result.audits {
            hist.entry(id.clone()).or_default()[(*k).min(3) as usize] += 1;
        }
        Some(hist)
    };
    Report { meta, outcomes, summary, audit }
}

pub fn to_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("serializable");
    s.push('\n');
    s
}

pub fn from_json(s: &str) -> serde_json::Result<Report> {
    serde_json::from_str(s)
}

pub fn to_csv(report: &Report) -> String {
    let mut out = String::from("check,p,x,modulus,lhs,rhs,pass,strategy,prec,us\n");
    for o in &report.outcomes {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            o.check,
            o.p,
            o.x.as_deref().unwrap_or(""),
            o.modulus,
            o.lhs,
            o.rhs,
            o.pass,
            o.strategy,
            o.prec,
            o.us
        ));
    }
    out
}

pub fn to_table(report: &Report) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "run: primes {}  strategy {}  x {}  seed {}\n\n",
        report.meta.primes, report.meta.strategy, report.meta.x_policy, report.meta.seed
    ));
    out.push_str(&format!(
        "{:<12} {:>6} {:>10} {:>12} {:>14} {:>14} {:>6} {:>6}\n",
        "check", "p", "x", "modulus", "lhs", "rhs", "pass", "strat"
    ));
    for o in &report.outcomes {
        out.push_str(&format!(
            "{:<12} {:>6} {:>10} {:>12} {:>14} {:>14} {:>6} {:>6}\n",
            o.check,
            o.p,
            o.x.as_deref().unwrap_or("-"),
            o.modulus,
            o.lhs,
            o.rhs,
            if o.pass { "ok" } else { "FAIL" },
            o.strategy
        ));
    }
    out.push('\n');
    out.push_str(&format!("{:<12} {:>6} {:>6} {:>6}\n", "summary", "pass", "fail", "skip"));
    for (id, c) in &report.summary {
        out.push_str(&format!("{:<12} {:>6} {:>6} {:>6}\n", id, c.pass, c.fail, c.skip));
    }
    if let Some(audit) = &report.audit {
        out.push('\n');
        out.push_str(&format!(
            "{:<12} {:>5} {:>5} {:>5} {:>5}\n",
            "audit k=", 0, 1, 2, 3
        ));
        for (id, h) in audit {
            out.push_str(&format!(
                "{:<12} {:>5} {:>5} {:>5} {:>5}\n",
                id, h[0], h[1], h[2], h[3]
            ));
        }
    }
    out
}

/// True when no outcome failed (skips do not fail a run).
pub fn run_passed(report: &Report) -> bool {
    report.outcomes.iter().all(|o| o.pass)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::checks::{run_suite, select_checks, StrategyChoice, XPolicy, XSet};
    use crate::primes::odd_primes_in;

    fn meta() -> Meta {
        Meta {
            seed: 42,
            primes: "3:13".into(),
            strategy: "both".into(),
            x_policy: "canonical+random:2".into(),
            version: "0.1.0".into(),
        }
    }

    fn small_run(audit: bool) -> SuiteResult {
        let checks = select_checks("thm1,cor1.3c,aux-zws1,aux-zps").unwrap();
        run_suite(
            &checks,
            &odd_primes_in(3, 13),
            &XPolicy { set: XSet::Canonical, random_per_prime: 2, seed: 42, residue_targeted: false },
            StrategyChoice::Both,
            1,
            audit,
        )
    }

    #[test]
    fn empty_run_serializes() {
        let r = build_report(&SuiteResult::default(), meta(), false);
        let js = to_json(&r);
        assert!(js.contains("\"outcomes\": []"));
        let back = from_json(&js).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn json_round_trip() {
        let result = small_run(true);
        let report = build_report(&result, meta(), false);
        let js = to_json(&report);
        let back = from_json(&js).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn single_outcome_fields() {
        let checks = select_checks("thm1").unwrap();
        let result = run_suite(
            &checks,
            &[5],
            &XPolicy {
                set: XSet::List(vec![crate::numeric::rat(-1, 3)]),
                random_per_prime: 0,
                seed: 0,
                residue_targeted: false,
            },
            StrategyChoice::Exact,
            1,
            false,
        );
        let report = build_report(&result, meta(), false);
        assert_eq!(report.outcomes.len(), 1);
        let o = &report.outcomes[0];
        assert_eq!(o.check, "thm1");
        assert_eq!(o.x.as_deref(), Some("-1/3"));
        assert_eq!(o.modulus, "25");
        assert_eq!(o.lhs, "22");
        assert_eq!(o.rhs, "22");
        assert!(o.pass);
    }

    #[test]
    fn csv_and_json_same_outcomes() {
        let result = small_run(false);
        let report = build_report(&result, meta(), false);
        let csv = to_csv(&report);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "check,p,x,modulus,lhs,rhs,pass,strategy,prec,us");
        assert_eq!(lines.len() - 1, report.outcomes.len());
        for (line, o) in lines[1..].iter().zip(&report.outcomes) {
            assert!(line.starts_with(&format!("{},{}", o.check, o.p)));
        }
    }

    #[test]
    fn ordering_is_stable() {
        let result = small_run(false);
        let report = build_report(&result, meta(), false);
        let mut sorted = report.outcomes.clone();
        sorted.sort_by(|a, b| {
            (&a.check, a.p, a.x.clone().unwrap_or_default(), &a.strategy).cmp(&(
                &b.check,
                b.p,
                b.x.clone().unwrap_or_default(),
                &b.strategy,
            ))
        });
        // outcomes arrive sorted by (check, p, x, strategy) up to the hidden
        // sample tiebreak, which never reorders distinct keys
        for (a, b) in report.outcomes.iter().zip(&sorted) {
            assert_eq!((&a.check, a.p), (&b.check, b.p));
        }
    }

    #[test]
    fn summary_counts_match() {
        let result = small_run(false);
        let report = build_report(&result, meta(), false);
        let total: u64 = report.summary.values().map(|c| c.pass + c.fail).sum();
        assert_eq!(total, report.outcomes.len() as u64);
        let skips: u64 = report.summary.values().map(|c| c.skip).sum();
        assert_eq!(skips, result.skips.len() as u64);
        // aux-zps needs p > 5, so 3 and 5 are skipped
        assert_eq!(report.summary["aux-zps"].skip, 2);
        assert!(run_passed(&report));
    }

    #[test]
    fn table_renders() {
        let result = small_run(true);
        let report = build_report(&result, meta(), false);
        let t = to_table(&report);
        assert!(t.contains("summary"));
        assert!(t.contains("audit"));
    }
}
