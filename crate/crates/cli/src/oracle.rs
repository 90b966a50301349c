//! Brute-force recomputation of `Deck(f^k)` from fibers.
//!
//! A deck element of `f^k` permutes every fiber of `f^k`. Fixing two points
//! of one regular fiber and one point of a second fiber, every candidate is
//! the Möbius map sending them to an ordered triple of fiber points. The
//! candidates that satisfy `f^k ∘ φ = f^k` on fresh samples are the group.
//! Nothing here uses lifting or projection.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use deckgroup_core::{
    chordal_distance, deck_group, identify_group, BicriticalMap, ElementSet, GroupType, MoebiusMap,
    SpherePoint, Tolerance,
};

use crate::error::{CliError, Result};

/// Largest fiber the oracle enumerates.
pub const MAX_FIBER: u64 = 64;
const STREAM_ORACLE: u64 = 0x0_7ac1e;
/// Fiber points closer than this make the value too close to a critical value.
const MIN_FIBER_GAP: f64 = 1e-6;
const FIBER_TRIES: usize = 32;
/// Loose check on a fourth point before the full sample check.
const FILTER_TOL: f64 = 1e-6;

fn fiber_size(f: &BicriticalMap, k: usize) -> Result<u64> {
    let count = (f.degree() as u64).checked_pow(k as u32).filter(|&n| n <= MAX_FIBER);
    count.ok_or(CliError::OracleTooLarge {
        degree: f.degree(),
        k,
        count: (f.degree() as u64).saturating_pow(k as u32),
    })
}

fn min_gap(points: &[SpherePoint]) -> f64 {
    let mut gap = f64::INFINITY;
    for (j, p) in points.iter().enumerate() {
        for q in &points[j + 1..] {
            gap = gap.min(chordal_distance(p, q));
        }
    }
    gap
}

/// The best separated fiber of `f^k` over a few random values.
fn regular_fiber(f: &BicriticalMap, k: usize, rng: &mut ChaCha8Rng) -> Result<Vec<SpherePoint>> {
    let (gap, fiber) = (0..FIBER_TRIES)
        .map(|_| {
            let fiber = f.iterate_preimages(k, &SpherePoint::random(rng));
            (min_gap(&fiber), fiber)
        })
        .max_by(|a, b| a.0.total_cmp(&b.0))
        .expect("at least one try");
    if gap > MIN_FIBER_GAP {
        Ok(fiber)
    } else {
        Err(CliError::Core(deckgroup_core::Error::VerificationFailed(format!(
            "oracle found no regular value (best fiber gap {gap:e})"
        ))))
    }
}

/// Largest `chordal_distance(f^k(φ(p)), f^k(p))` over `n_samples` points.
fn residual(f: &BicriticalMap, k: usize, phi: &MoebiusMap, samples: &[SpherePoint]) -> f64 {
    samples
        .iter()
        .map(|p| chordal_distance(&f.iterate_eval(k, &phi.apply(p)), &f.iterate_eval(k, p)))
        .fold(0.0, f64::max)
}

/// `Deck(f^k)` by fiber enumeration; refuses fibers larger than
/// [`MAX_FIBER`].
pub fn oracle_group(f: &BicriticalMap, k: usize, tol: &Tolerance) -> Result<Vec<MoebiusMap>> {
    fiber_size(f, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(tol.rng_seed ^ STREAM_ORACLE ^ ((k as u64) << 32));
    let first = regular_fiber(f, k, &mut rng)?;
    let second = regular_fiber(f, k, &mut rng)?;
    let samples: Vec<SpherePoint> = (0..tol.n_samples).map(|_| SpherePoint::random(&mut rng)).collect();

    // Reference points: a far-apart pair in the first fiber, one point of the
    // second, and a probe for the quick filter.
    let p1 = first[0];
    let far = (1..first.len())
        .max_by(|&a, &b| chordal_distance(&p1, &first[a]).total_cmp(&chordal_distance(&p1, &first[b])))
        .expect("fiber has at least two points");
    let p2 = first[far];
    let p3 = second[0];
    let probe = second.get(1).copied().unwrap_or(p1);
    let probe_value = f.iterate_eval(k, &probe);

    let mut found = ElementSet::new(tol.check_eps());
    for (ia, a) in first.iter().enumerate() {
        for (ib, b) in first.iter().enumerate() {
            if ia == ib {
                continue;
            }
            for c in &second {
                let Ok(phi) = MoebiusMap::from_three_points([p1, p2, p3], [*a, *b, *c], tol.eps) else {
                    continue;
                };
                if chordal_distance(&f.iterate_eval(k, &phi.apply(&probe)), &probe_value) > FILTER_TOL {
                    continue;
                }
                if residual(f, k, &phi, &samples) < tol.check_eps() {
                    found.insert(phi);
                }
            }
        }
    }
    Ok(found.into_vec())
}

/// Engine and oracle results for one level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelCheck {
    pub k: usize,
    pub engine_order: usize,
    pub oracle_order: usize,
    pub engine_type: GroupType,
    pub oracle_type: Option<GroupType>,
    /// Engine elements with no oracle counterpart.
    pub missing_from_oracle: usize,
    /// Oracle elements with no engine counterpart.
    pub missing_from_engine: usize,
    pub matched: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub degree: u32,
    pub levels: Vec<LevelCheck>,
    pub matched: bool,
}

/// Compares the engine with the oracle for `k = 1..=k_max`, elementwise
/// within `10·eps`.
pub fn run_verify(f: &BicriticalMap, k_max: usize, tol: &Tolerance) -> Result<VerifyReport> {
    fiber_size(f, k_max)?;
    let eps = tol.check_eps();
    let mut levels = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let engine = deck_group(f, k, tol)?;
        let oracle = oracle_group(f, k, tol)?;
        let engine_set = ElementSet::from_elements(eps, &engine.elements);
        let oracle_set = ElementSet::from_elements(eps, &oracle);
        let missing_from_oracle = engine.elements.iter().filter(|g| !oracle_set.contains(g)).count();
        let missing_from_engine = oracle.iter().filter(|g| !engine_set.contains(g)).count();
        let oracle_type = identify_group(&oracle, tol).ok();
        let matched = missing_from_oracle == 0
            && missing_from_engine == 0
            && oracle.len() == engine.order()
            && oracle_type == Some(engine.group_type);
        levels.push(LevelCheck {
            k,
            engine_order: engine.order(),
            oracle_order: oracle.len(),
            engine_type: engine.group_type,
            oracle_type,
            missing_from_oracle,
            missing_from_engine,
            matched,
        });
    }
    let matched = levels.iter().all(|l| l.matched);
    Ok(VerifyReport { degree: f.degree(), levels, matched })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn squaring_map() {
        let tol = Tolerance::default();
        let sq = BicriticalMap::power(2).unwrap();
        let group = oracle_group(&sq, 2, &tol).unwrap();
        assert_eq!(group.len(), 4);
        let set = ElementSet::from_elements(1e-8, &group);
        for z in [c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 1.0), c(0.0, -1.0)] {
            assert!(set.contains(&MoebiusMap::scaling(z)));
        }
    }

    #[test]
    fn fixture_orders() {
        let tol = Tolerance::default();
        let one = c(1.0, 0.0);
        let g = BicriticalMap::from_normal_form(one, -one, one, one, 2).unwrap();
        assert_eq!(oracle_group(&g, 2, &tol).unwrap().len(), 4);
        let f = BicriticalMap::from_normal_form(one, one, one, -one, 3).unwrap();
        assert_eq!(oracle_group(&f, 2, &tol).unwrap().len(), 3);
        let report = run_verify(&g, 3, &tol).unwrap();
        assert!(report.matched, "{report:?}");
        assert_eq!(report.levels[2].oracle_type, Some(GroupType::Dihedral(8)));
    }

    #[test]
    fn large_fibers_are_refused() {
        let tol = Tolerance::default();
        let f = BicriticalMap::power(3).unwrap();
        match run_verify(&f, 4, &tol) {
            Err(CliError::OracleTooLarge { count: 81, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(oracle_group(&BicriticalMap::power(4).unwrap(), 3, &tol).is_ok());
    }
}
