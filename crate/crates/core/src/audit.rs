//! Independent re-checks of a computed [`DeckChain`].
//!
//! Each check samples fresh points or recomputes a level from scratch, so a
//! passing audit does not rely on the bookkeeping that built the chain.

use std::fmt;

use serde::Serialize;

use crate::bicritical::BicriticalMap;
use crate::deck::{deck_residual, lift, next_level, project, rng_for, value_preserving_subset, DeckChain};
use crate::elements::ElementSet;
use crate::moebius::{FixedPoints, MoebiusMap};
use crate::sphere::Tolerance;

const STREAM_AUDIT: u64 = 0xa0d1;
/// Round-trip checks look at no more than this many elements per level.
const ROUND_TRIP_SAMPLE: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Invariant {
    /// `f^k ∘ φ = f^k` on fresh random points.
    DefiningIdentity,
    /// `Deck(f^{k-1}) ⊆ Deck(f^k)`.
    Nesting,
    /// `φ(C_f) = C_f`.
    CriticalPairPreserved,
    /// Every prime factor of an element order divides `d`.
    PrimeOrderExclusion,
    /// `|Deck(f^k)| / |Deck(f^{k-1})|` is an integer at most `d`, at most 2
    /// for maps that are not power maps.
    GrowthQuotient,
    /// `|Deck(f^k)|` divides `d^k` and is at least `d`.
    OrderDividesDegreePower,
    /// An element of order `m` fixes a point of local degree at least `m`.
    LocalDegreeBound,
    /// `|Deck(f^k)| = d · |{μ ∈ Deck(f^{k-1}) : μ(V_f) = V_f}|`.
    SizeLaw,
    /// Projection inverts lifting, and lifting a projection recovers the
    /// element's coset.
    LiftProjectRoundTrip,
    /// Two equal consecutive levels force the next one to agree.
    Stabilization,
    /// Recomputing level four from level three adds nothing.
    LevelThreeSuffices,
}

impl Invariant {
    pub fn name(&self) -> &'static str {
        match self {
            Invariant::DefiningIdentity => "defining_identity",
            Invariant::Nesting => "nesting",
            Invariant::CriticalPairPreserved => "critical_pair_preserved",
            Invariant::PrimeOrderExclusion => "prime_order_exclusion",
            Invariant::GrowthQuotient => "growth_quotient",
            Invariant::OrderDividesDegreePower => "order_divides_degree_power",
            Invariant::LocalDegreeBound => "local_degree_bound",
            Invariant::SizeLaw => "size_law",
            Invariant::LiftProjectRoundTrip => "lift_project_round_trip",
            Invariant::Stabilization => "stabilization",
            Invariant::LevelThreeSuffices => "level_three_suffices",
        }
    }
}

impl fmt::Display for Invariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvariantFailure {
    pub invariant: Invariant,
    pub k: usize,
    pub detail: String,
}

fn prime_factors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            out.push(p);
            while n.is_multiple_of(p) {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Order of a group element; iterated composition for small groups, the
/// divisor test otherwise.
fn element_order(g: &MoebiusMap, group_order: usize, tol: &Tolerance) -> Option<usize> {
    if group_order <= 128 {
        let capped = Tolerance { max_order: group_order, eps: tol.check_eps(), ..*tol };
        g.order_of(&capped).ok()
    } else {
        (1..=group_order)
            .filter(|m| group_order.is_multiple_of(*m))
            .find(|&m| g.pow(m as u64).is_identity(tol.check_eps()))
    }
}

struct Auditor<'a> {
    f: &'a BicriticalMap,
    tol: &'a Tolerance,
    failures: Vec<InvariantFailure>,
}

impl Auditor<'_> {
    fn fail(&mut self, invariant: Invariant, k: usize, detail: impl Into<String>) {
        self.failures.push(InvariantFailure { invariant, k, detail: detail.into() });
    }

    fn level(&mut self, k: usize, elements: &[MoebiusMap]) {
        let f = self.f;
        let tol = self.tol;
        let d = f.degree() as usize;
        let n = elements.len();

        let mut rng = rng_for(tol, STREAM_AUDIT ^ ((k as u64) << 16));
        for phi in elements {
            let residual = deck_residual(f, k, phi, tol, &mut rng);
            if !(residual < tol.check_eps()) {
                self.fail(Invariant::DefiningIdentity, k, format!("{phi}: residual {residual:e}"));
            }
        }

        let crit = f.critical_points();
        if let Some(phi) = elements.iter().find(|phi| !crit.preserved_by(phi, tol.check_eps())) {
            self.fail(Invariant::CriticalPairPreserved, k, format!("{phi} moves C_f"));
        }

        let top = d.checked_pow(k as u32);
        if n < d || top.is_some_and(|t| t % n != 0) {
            self.fail(Invariant::OrderDividesDegreePower, k, format!("order {n} with d = {d}"));
        }

        for phi in elements {
            let Some(m) = element_order(phi, n, tol) else {
                self.fail(Invariant::PrimeOrderExclusion, k, format!("{phi} has no order dividing {n}"));
                continue;
            };
            if let Some(p) = prime_factors(m).into_iter().find(|p| !d.is_multiple_of(*p)) {
                self.fail(Invariant::PrimeOrderExclusion, k, format!("element of order {m} (prime {p})"));
            }
            if m > 1 {
                self.local_degree(k, phi, m);
            }
        }
    }

    fn local_degree(&mut self, k: usize, phi: &MoebiusMap, m: usize) {
        let points = match phi.fixed_points(self.tol.eps) {
            FixedPoints::Points(ps) => ps,
            FixedPoints::All => return,
        };
        let best = points.iter().map(|z| self.f.local_degree(k, z, self.tol)).max().unwrap_or(1);
        if best < m as u64 {
            self.fail(Invariant::LocalDegreeBound, k, format!("order {m} but max local degree {best}"));
        }
    }

    fn transition(&mut self, k: usize, prev: &[MoebiusMap], cur: &[MoebiusMap], power: bool) {
        let f = self.f;
        let tol = self.tol;
        let d = f.degree() as usize;
        let eps = tol.check_eps();

        let cur_set = ElementSet::from_elements(eps, cur);
        if prev.iter().any(|g| !cur_set.contains(g)) {
            self.fail(Invariant::Nesting, k, "previous level not contained");
        }

        let limit = if power { d } else { 2 };
        if !cur.len().is_multiple_of(prev.len()) || cur.len() / prev.len() > limit {
            self.fail(
                Invariant::GrowthQuotient,
                k,
                format!("{} / {} exceeds {limit} or is not integral", cur.len(), prev.len()),
            );
        }

        let preserving = value_preserving_subset(prev, &f.critical_values(), tol);
        if cur.len() != d * preserving.len() {
            self.fail(
                Invariant::SizeLaw,
                k,
                format!("|G_k| = {} but d * |VPS| = {}", cur.len(), d * preserving.len()),
            );
        }

        for mu in preserving.iter().take(ROUND_TRIP_SAMPLE) {
            let lifts = match lift(f, mu, tol) {
                Ok(l) => l,
                Err(e) => {
                    self.fail(Invariant::LiftProjectRoundTrip, k, format!("lift failed: {e}"));
                    continue;
                }
            };
            for psi in lifts.iter().take(ROUND_TRIP_SAMPLE) {
                match project(f, psi, k, tol) {
                    Ok(back) if back.approx_eq(mu, eps) => {}
                    Ok(back) => self.fail(Invariant::LiftProjectRoundTrip, k, format!("{mu} came back as {back}")),
                    Err(e) => self.fail(Invariant::LiftProjectRoundTrip, k, format!("project failed: {e}")),
                }
            }
        }
        for phi in cur.iter().take(ROUND_TRIP_SAMPLE) {
            let coset = project(f, phi, k, tol).and_then(|mu| lift(f, &mu, tol));
            match coset {
                Ok(c) if c.iter().any(|psi| psi.approx_eq(phi, eps)) => {}
                Ok(_) => self.fail(Invariant::LiftProjectRoundTrip, k, format!("{phi} not in its lifted coset")),
                Err(e) => self.fail(Invariant::LiftProjectRoundTrip, k, format!("{e}")),
            }
        }
    }

    fn recompute(&mut self, invariant: Invariant, k: usize, from: &[MoebiusMap]) {
        match next_level(self.f, from, self.tol) {
            Ok(next) if next.len() == from.len() => {}
            Ok(next) => self.fail(invariant, k, format!("level grew from {} to {}", from.len(), next.len())),
            Err(e) => self.fail(invariant, k, format!("recomputation failed: {e}")),
        }
    }
}

/// Checks every structural invariant on `chain`; an empty result means all
/// passed.
pub fn audit_chain(chain: &DeckChain, tol: &Tolerance) -> Vec<InvariantFailure> {
    let mut auditor = Auditor { f: &chain.map, tol, failures: Vec::new() };
    let power = chain.power_map;
    for (i, g) in chain.groups.iter().enumerate() {
        auditor.level(g.k, &g.elements);
        if i > 0 {
            auditor.transition(g.k, &chain.groups[i - 1].elements, &g.elements, power);
        }
    }
    if !power {
        for pair in chain.groups.windows(2) {
            if pair[0].order() == pair[1].order() {
                auditor.recompute(Invariant::Stabilization, pair[1].k + 1, &pair[1].elements);
                break;
            }
        }
        if let Some(third) = chain.level(3) {
            auditor.recompute(Invariant::LevelThreeSuffices, 4, &third.elements);
        }
    }
    auditor.failures
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deck::deck_chain;
    use num_complex::Complex64;

    #[test]
    fn primes() {
        assert_eq!(prime_factors(1), Vec::<usize>::new());
        assert_eq!(prime_factors(12), vec![2, 3]);
        assert_eq!(prime_factors(49), vec![7]);
    }

    #[test]
    fn fixtures_pass() {
        let tol = Tolerance::default();
        let one = Complex64::new(1.0, 0.0);
        let maps = [
            BicriticalMap::from_normal_form(one, -one, one, one, 2).unwrap(),
            BicriticalMap::from_normal_form(one, -one, one, Complex64::new(0.0, 1.0), 4).unwrap(),
            BicriticalMap::power(3).unwrap(),
        ];
        for f in maps {
            let chain = deck_chain(&f, 4, &tol).unwrap();
            let failures = audit_chain(&chain, &tol);
            assert!(failures.is_empty(), "{failures:?}");
        }
    }

    #[test]
    fn tampered_chain_is_caught() {
        let tol = Tolerance::default();
        let one = Complex64::new(1.0, 0.0);
        let g = BicriticalMap::from_normal_form(one, -one, one, one, 2).unwrap();
        let mut chain = deck_chain(&g, 3, &tol).unwrap();
        // Replace an element of level 3 by a map that is not a deck element.
        let last = chain.groups[2].elements.len() - 1;
        chain.groups[2].elements[last] = MoebiusMap::scaling(Complex64::new(0.0, 1.0).sqrt());
        let failures = audit_chain(&chain, &tol);
        assert!(failures.iter().any(|f| f.invariant == Invariant::DefiningIdentity));
    }
}
