//! JSON and plain-text rendering of run results.

use std::fmt::Write;

use serde::Serialize;

use deckgroup_core::{ClassificationReport, DeckChain, Verdict};

use crate::oracle::VerifyReport;
use crate::suite::SuiteReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Json,
    Table,
}

pub fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn verdict_text(v: &Verdict) -> String {
    match v {
        Verdict::Consistent => "consistent".into(),
        Verdict::Violation(msg) => format!("VIOLATION: {msg}"),
    }
}

pub fn classification_table(r: &ClassificationReport) -> String {
    let mut out = String::new();
    writeln!(out, "degree {}  power_map {}  critically_coalescing {}", r.degree, r.power_map, r.critically_coalescing).unwrap();
    writeln!(out, "{:>3}  {:>6}  type", "k", "order").unwrap();
    for l in &r.levels {
        writeln!(out, "{:>3}  {:>6}  {}", l.k, l.order, l.group_type).unwrap();
    }
    for w in &r.warnings {
        writeln!(out, "warning: {w}").unwrap();
    }
    writeln!(out, "verdict: {}", verdict_text(&r.verdict)).unwrap();
    out
}

pub fn chain_table(chain: &DeckChain) -> String {
    let mut out = String::new();
    writeln!(out, "degree {}  power_map {}", chain.map.degree(), chain.power_map).unwrap();
    if let Some(k) = chain.stabilized_at {
        writeln!(out, "stabilized at k = {k}").unwrap();
    }
    for g in &chain.groups {
        writeln!(out, "k = {}: {} of order {} ({} new)", g.k, g.group_type, g.order(), g.new_elements.len()).unwrap();
        for gen in &g.generators {
            writeln!(out, "    generator {gen}").unwrap();
        }
    }
    out
}

pub fn verify_table(r: &VerifyReport) -> String {
    let mut out = String::new();
    writeln!(out, "{:>3}  {:>6}  {:>6}  {:>8}  {:>8}  result", "k", "engine", "oracle", "type", "oracle").unwrap();
    for l in &r.levels {
        let oracle_type = l.oracle_type.map_or("?".to_string(), |t| t.to_string());
        let result = if l.matched { "match".to_string() } else {
            format!("MISMATCH ({} missing from oracle, {} extra)", l.missing_from_oracle, l.missing_from_engine)
        };
        writeln!(out, "{:>3}  {:>6}  {:>6}  {:>8}  {:>8}  {result}", l.k, l.engine_order, l.oracle_order, l.engine_type.to_string(), oracle_type).unwrap();
    }
    out
}

pub fn suite_table(r: &SuiteReport) -> String {
    let mut out = String::new();
    writeln!(out, "{} maps, seed {}, degrees {:?}, coalescing {}", r.count, r.seed, r.degrees, r.coalescing).unwrap();
    for (seq, n) in &r.type_sequences {
        writeln!(out, "{n:>6}  {seq}").unwrap();
    }
    writeln!(out, "passed {}  failed {}", r.passed, r.failed).unwrap();
    for f in &r.failures {
        let problems: Vec<&str> = f.violations.iter().chain(&f.audit_failures).map(String::as_str).collect();
        writeln!(out, "sample {} (d = {}): {}", f.index, f.degree, problems.join("; ")).unwrap();
    }
    out
}
