//! Isomorphism types of finite Möbius groups, and the classification checks
//! for deck groups of iterates.

use std::fmt;

use serde::{Deserialize, Serialize, Serializer};

use crate::bicritical::BicriticalMap;
use crate::deck::{deck_chain, DeckChain};
use crate::elements::ElementSet;
use crate::error::{Error, Result};
use crate::moebius::MoebiusMap;
use crate::sphere::Tolerance;

/// `Cyclic(n) ≅ Z_n`; `Dihedral(n)` is the dihedral group of order `n`
/// (`n ≥ 4` even, with `V₄ = Dihedral(4)`). Groups of order two are cyclic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupType {
    Cyclic(usize),
    Dihedral(usize),
}

impl GroupType {
    pub fn order(&self) -> usize {
        match *self {
            GroupType::Cyclic(n) | GroupType::Dihedral(n) => n,
        }
    }

    pub fn is_dihedral(&self) -> bool {
        matches!(self, GroupType::Dihedral(_))
    }
}

impl fmt::Display for GroupType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupType::Cyclic(n) => write!(f, "Z_{n}"),
            GroupType::Dihedral(n) => write!(f, "D_{n}"),
        }
    }
}

impl Serialize for GroupType {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for GroupType {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(de)?;
        let parse = |rest: &str| rest.parse::<usize>().map_err(serde::de::Error::custom);
        if let Some(rest) = s.strip_prefix("Z_") {
            Ok(GroupType::Cyclic(parse(rest)?))
        } else if let Some(rest) = s.strip_prefix("D_") {
            Ok(GroupType::Dihedral(parse(rest)?))
        } else {
            Err(serde::de::Error::custom(format!("unknown group type {s:?}")))
        }
    }
}

fn divisors(n: usize) -> Vec<usize> {
    (1..=n).filter(|m| n.is_multiple_of(*m)).collect()
}

/// Order of `g` inside a group of order `n` (it divides `n`).
fn order_in_group(g: &MoebiusMap, n: usize, eps: f64) -> Option<usize> {
    divisors(n).into_iter().find(|&m| g.pow(m as u64).is_identity(eps))
}

fn check_closure(set: &ElementSet) -> Result<()> {
    let elements = set.as_slice();
    for g in elements {
        if !set.contains(&g.inverse()) {
            return Err(Error::NotAGroup(format!("inverse of {g} missing")));
        }
        for h in elements {
            if !set.contains(&g.compose(h)) {
                return Err(Error::NotAGroup(format!("product of {g} and {h} missing")));
            }
        }
    }
    Ok(())
}

/// Isomorphism type plus generators: `[g]` for cyclic groups, `[R, F]` with
/// `R^n = F² = (RF)² = id` for dihedral ones.
pub fn identify_with_generators(
    elements: &[MoebiusMap],
    tol: &Tolerance,
) -> Result<(GroupType, Vec<MoebiusMap>)> {
    let eps = tol.check_eps();
    let n = elements.len();
    if n == 0 {
        return Err(Error::NotAGroup("empty element list".into()));
    }
    let set = ElementSet::from_elements(eps, elements);
    if set.len() != n {
        return Err(Error::NotAGroup("duplicate elements".into()));
    }
    if !set.contains(&MoebiusMap::IDENTITY) {
        return Err(Error::NotAGroup("identity missing".into()));
    }
    let mut orders = Vec::with_capacity(n);
    for g in elements {
        match order_in_group(g, n, eps) {
            Some(m) => orders.push(m),
            None => return Err(Error::NotAGroup(format!("order of {g} does not divide {n}"))),
        }
    }

    let powers_of = |g: &MoebiusMap, m: usize| -> Vec<MoebiusMap> {
        std::iter::successors(Some(MoebiusMap::IDENTITY), |p| Some(p.compose(g))).take(m).collect()
    };

    // Cyclic certificate: an element of order n whose powers are all present.
    if let Some(i) = orders.iter().position(|&m| m == n) {
        let g = elements[i];
        if powers_of(&g, n).iter().all(|p| set.contains(p)) {
            return Ok((GroupType::Cyclic(n), vec![g]));
        }
        return Err(Error::NotAGroup(format!("powers of an order-{n} element are missing")));
    }

    // Dihedral certificate: R of order n/2 and an involution F outside <R>
    // with F R F = R⁻¹, such that <R> ∪ F<R> is everything.
    if n >= 4 && n.is_multiple_of(2) {
        let m = n / 2;
        if let Some(i) = orders.iter().position(|&o| o == m) {
            let r = elements[i];
            let rotations = powers_of(&r, m);
            let rotation_set = ElementSet::from_elements(eps, &rotations);
            let flip = elements
                .iter()
                .zip(&orders)
                .find(|(g, &o)| o == 2 && !rotation_set.contains(g))
                .map(|(g, _)| *g);
            if let Some(flip) = flip {
                let relation = flip.compose(&r).compose(&flip).approx_eq(&r.inverse(), eps);
                let covered = rotations
                    .iter()
                    .all(|p| set.contains(p) && set.contains(&flip.compose(p)));
                if relation && covered {
                    return Ok((GroupType::Dihedral(n), vec![r, flip]));
                }
            }
        }
    }

    check_closure(&set)?;
    let mut sorted = orders;
    sorted.sort_unstable();
    Err(Error::UnrecognizedGroup { order: n, orders: sorted })
}

/// Cyclic or dihedral type of a finite Möbius group.
pub fn identify_group(elements: &[MoebiusMap], tol: &Tolerance) -> Result<GroupType> {
    identify_with_generators(elements, tol).map(|(t, _)| t)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub k: usize,
    pub order: usize,
    #[serde(rename = "type")]
    pub group_type: GroupType,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Consistent,
    Violation(String),
}

impl Verdict {
    pub fn is_consistent(&self) -> bool {
        matches!(self, Verdict::Consistent)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub degree: u32,
    pub power_map: bool,
    pub critically_coalescing: bool,
    pub levels: Vec<LevelSummary>,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// Types allowed for `Deck(f^k)` by the odd/even degree classification.
fn level_violations(d: usize, power: bool, level: &LevelSummary) -> Option<String> {
    let k = level.k as u32;
    let t = level.group_type;
    if t.order() != level.order {
        return Some(format!("k={k}: type {t} does not match order {}", level.order));
    }
    if power {
        let expected = GroupType::Cyclic(d.pow(k));
        return (t != expected).then(|| format!("k={k}: power map gives {t}, expected {expected}"));
    }
    if d % 2 == 1 {
        let expected = GroupType::Cyclic(d);
        return (t != expected).then(|| format!("k={k}: odd degree non-power map gives {t}, expected {expected}"));
    }
    let allowed = match t {
        GroupType::Cyclic(n) => is_power_of(n, d),
        GroupType::Dihedral(n) => n == 2 * d || n == 4 * d,
    };
    if !allowed {
        return Some(format!("k={k}: even degree gives {t}, outside {{Z_(d^n), D_{}, D_{}}}", 2 * d, 4 * d));
    }
    (level.order > 4 * d).then(|| format!("k={k}: non-power map has order {} > 4d = {}", level.order, 4 * d))
}

/// `n = d^j` for some `j ≥ 1`.
fn is_power_of(n: usize, d: usize) -> bool {
    let mut p = d;
    while p < n {
        p *= d;
    }
    p == n
}

/// Runs the deck engine for `k = 1..=k_max`, identifies every level and
/// checks the result against the odd/even degree classification, the
/// critical-pair preservation property and "dihedral implies critically
/// coalescing".
pub fn classify_map(f: &BicriticalMap, k_max: usize, tol: &Tolerance) -> Result<ClassificationReport> {
    let chain = deck_chain(f, k_max, tol)?;
    Ok(classify_chain(&chain, tol))
}

/// The checks of [`classify_map`] on a chain that is already computed.
pub fn classify_chain(chain: &DeckChain, tol: &Tolerance) -> ClassificationReport {
    let f = &chain.map;
    let d = f.degree() as usize;
    let coalescing = f.is_critically_coalescing(tol);
    let levels: Vec<LevelSummary> = chain
        .groups
        .iter()
        .map(|g| LevelSummary { k: g.k, order: g.order(), group_type: g.group_type })
        .collect();

    let mut violations: Vec<String> =
        levels.iter().filter_map(|l| level_violations(d, chain.power_map, l)).collect();
    let crit = f.critical_points();
    for g in &chain.groups {
        if g.elements.iter().any(|phi| !crit.preserved_by(phi, tol.check_eps())) {
            violations.push(format!("k={}: an element does not preserve C_f", g.k));
        }
    }
    if levels.iter().any(|l| l.group_type.is_dihedral()) && !coalescing {
        violations.push("dihedral deck group but the map is not critically coalescing".into());
    }

    let mut warnings = Vec::new();
    if chain.near_power_map {
        warnings.push("critical points and critical values nearly coincide; result is numerically fragile".into());
    }
    if chain.power_map && coalescing {
        warnings.push("power map flagged as critically coalescing".into());
    }
    let verdict = if violations.is_empty() {
        Verdict::Consistent
    } else {
        Verdict::Violation(violations.join("; "))
    };
    ClassificationReport {
        degree: f.degree(),
        power_map: chain.power_map,
        critically_coalescing: coalescing,
        levels,
        verdict,
        warnings,
    }
}

/// No dihedral level, or the map is critically coalescing. The converse
/// fails in general.
pub fn check_dihedral_coalescing(f: &BicriticalMap, report: &ClassificationReport, tol: &Tolerance) -> bool {
    !report.levels.iter().any(|l| l.group_type.is_dihedral()) || f.is_critically_coalescing(tol)
}
