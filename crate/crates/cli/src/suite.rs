//! Seeded random property runs over many maps.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use deckgroup_core::sampling::{coalescing_bicritical, random_bicritical};
use deckgroup_core::{
    audit_chain, check_dihedral_coalescing, classify_chain, deck_chain, BicriticalMap, LevelSummary,
    Tolerance, Verdict,
};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteConfig {
    pub count: usize,
    /// Degrees are assigned round robin in sample order.
    pub degrees: Vec<u32>,
    pub seed: u64,
    /// Sample conjugates of `(z^d - a)/(z^d + a)` instead of generic maps.
    pub coalescing: bool,
    pub k_max: usize,
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(CliError::input("--count", "must be at least 1"));
        }
        if self.degrees.is_empty() {
            return Err(CliError::input("--degrees", "at least one degree is required"));
        }
        if let Some(d) = self.degrees.iter().find(|&&d| d < 2) {
            return Err(CliError::input("--degrees", format!("degree {d} is below 2")));
        }
        if self.k_max == 0 {
            return Err(CliError::input("--k-max", "must be at least 1"));
        }
        Ok(())
    }

    /// The map of sample `index`; depends only on the seed and the index.
    pub fn sample(&self, index: usize, tol: &Tolerance) -> BicriticalMap {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(index as u64);
        let degree = self.degrees[index % self.degrees.len()];
        if self.coalescing {
            coalescing_bicritical(&mut rng, degree)
        } else {
            random_bicritical(&mut rng, degree, tol)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleFailure {
    pub index: usize,
    pub degree: u32,
    pub map: BicriticalMap,
    pub levels: Vec<LevelSummary>,
    /// Classification violations and engine errors.
    pub violations: Vec<String>,
    /// Structural invariant failures found by the audit.
    pub audit_failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub count: usize,
    pub degrees: Vec<u32>,
    pub seed: u64,
    pub coalescing: bool,
    pub k_max: usize,
    pub passed: usize,
    pub failed: usize,
    /// How often each type sequence `Z_3 Z_3 Z_3 Z_3` occurred, by degree.
    pub type_sequences: BTreeMap<String, usize>,
    pub failures: Vec<SampleFailure>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }
}

struct SampleResult {
    degree: u32,
    sequence: String,
    failure: Option<SampleFailure>,
}

fn run_sample(config: &SuiteConfig, index: usize, tol: &Tolerance) -> SampleResult {
    let f = config.sample(index, tol);
    let degree = f.degree();
    let mut violations = Vec::new();
    let mut audit_failures = Vec::new();
    let (levels, sequence) = match deck_chain(&f, config.k_max, tol) {
        Ok(chain) => {
            let report = classify_chain(&chain, tol);
            if let Verdict::Violation(v) = &report.verdict {
                violations.push(v.clone());
            }
            if !check_dihedral_coalescing(&f, &report, tol) {
                violations.push("dihedral level on a map that is not critically coalescing".into());
            }
            audit_failures.extend(
                audit_chain(&chain, tol)
                    .into_iter()
                    .map(|fail| format!("k={} {}: {}", fail.k, fail.invariant, fail.detail)),
            );
            let names: Vec<String> = report.levels.iter().map(|l| l.group_type.to_string()).collect();
            (report.levels, names.join(" "))
        }
        Err(e) => {
            violations.push(e.to_string());
            (Vec::new(), "error".into())
        }
    };
    let failure = (!violations.is_empty() || !audit_failures.is_empty())
        .then_some(SampleFailure { index, degree, map: f, levels, violations, audit_failures });
    SampleResult { degree, sequence, failure }
}

/// Classifies and audits `config.count` seeded maps in parallel. The report
/// is identical for identical configs, whatever the thread schedule.
pub fn run_random_suite(config: &SuiteConfig, tol: &Tolerance) -> Result<SuiteReport> {
    config.validate()?;
    let results: Vec<SampleResult> =
        (0..config.count).into_par_iter().map(|i| run_sample(config, i, tol)).collect();

    let mut type_sequences = BTreeMap::new();
    let mut failures = Vec::new();
    for r in results {
        *type_sequences.entry(format!("d={}: {}", r.degree, r.sequence)).or_insert(0) += 1;
        failures.extend(r.failure);
    }
    Ok(SuiteReport {
        count: config.count,
        degrees: config.degrees.clone(),
        seed: config.seed,
        coalescing: config.coalescing,
        k_max: config.k_max,
        passed: config.count - failures.len(),
        failed: failures.len(),
        type_sequences,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(degrees: Vec<u32>, coalescing: bool) -> SuiteConfig {
        SuiteConfig { count: 12, degrees, seed: 7, coalescing, k_max: 4 }
    }

    #[test]
    fn validation() {
        let tol = Tolerance::default();
        let zero = SuiteConfig { count: 0, ..config(vec![3], false) };
        assert_eq!(run_random_suite(&zero, &tol).unwrap_err().exit_code(), 1);
        assert!(config(vec![], false).validate().is_err());
        assert!(config(vec![1], false).validate().is_err());
    }

    #[test]
    fn samples_are_reproducible() {
        let tol = Tolerance::default();
        let c = config(vec![2, 3], true);
        assert_eq!(c.sample(5, &tol), c.sample(5, &tol));
        assert_ne!(c.sample(5, &tol), c.sample(6, &tol));
        assert_eq!(c.sample(5, &tol).degree(), 3);
    }

    #[test]
    fn small_runs_pass() {
        let tol = Tolerance::default();
        for c in [config(vec![3, 5], false), config(vec![2, 4], true)] {
            let report = run_random_suite(&c, &tol).unwrap();
            assert!(report.all_passed(), "{:?}", report.failures);
            assert_eq!(report, run_random_suite(&c, &tol).unwrap());
        }
    }
}
