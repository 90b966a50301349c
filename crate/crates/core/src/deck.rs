//! Deck groups `Deck(f^k) = { φ ∈ Möb : f^k ∘ φ = f^k }`.
//!
//! Level one is the rotation group about the critical points. Level `k + 1`
//! is obtained by lifting every element of level `k` that preserves the
//! critical value pair: the solutions of `f ∘ φ = μ ∘ f` form one coset of
//! `Deck(f)`, and every element of `Deck(f^{k+1})` arises this way. Levels
//! stop growing once two consecutive levels agree, and for maps that are not
//! power maps never grow past level three. Power maps take a closed-form
//! branch: their deck groups are rotation groups of order `d^k`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::bicritical::{BicriticalMap, PointPair, PowerMapStatus};
use crate::classify::{identify_with_generators, GroupType};
use crate::elements::ElementSet;
use crate::error::{Error, Result};
use crate::moebius::MoebiusMap;
use crate::sphere::{chordal_distance, SpherePoint, Tolerance};

/// Largest power-map deck group the closed-form branch will build.
pub const POWER_GROUP_CAP: usize = 4096;

/// Stream identifiers mixed into `Tolerance::rng_seed`.
const STREAM_VERIFY: u64 = 0x01;
const STREAM_PROJECT: u64 = 0x02;

pub(crate) fn rng_for(tol: &Tolerance, stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(tol.rng_seed ^ stream.wrapping_mul(0x9e37_79b9_7f4a_7c15))
}

/// `Deck(f^k)` together with its isomorphism type.
#[derive(Debug, Clone)]
pub struct DeckGroup {
    pub k: usize,
    /// Identity first; elements of the previous level precede new ones.
    pub elements: Vec<MoebiusMap>,
    pub group_type: GroupType,
    pub generators: Vec<MoebiusMap>,
    /// `Deck(f^k) \ Deck(f^{k-1})`.
    pub new_elements: Vec<MoebiusMap>,
}

impl DeckGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn element_set(&self, eps: f64) -> ElementSet {
        ElementSet::from_elements(eps, &self.elements)
    }
}

impl Serialize for DeckGroup {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Wire<'a> {
            k: usize,
            order: usize,
            group_type: GroupType,
            elements: &'a [MoebiusMap],
            generators: &'a [MoebiusMap],
            new_elements_count: usize,
        }
        Wire {
            k: self.k,
            order: self.order(),
            group_type: self.group_type,
            elements: &self.elements,
            generators: &self.generators,
            new_elements_count: self.new_elements.len(),
        }
        .serialize(s)
    }
}

/// The nested groups `Deck(f) ⊆ Deck(f²) ⊆ … ⊆ Deck(f^{k_max})`.
#[derive(Debug, Clone, Serialize)]
pub struct DeckChain {
    pub map: BicriticalMap,
    /// `groups[j]` holds level `j + 1`.
    pub groups: Vec<DeckGroup>,
    /// Smallest `k` with `Deck(f^k) = Deck(f^{k+1})`, when known.
    pub stabilized_at: Option<usize>,
    pub power_map: bool,
    /// `C_f` and `V_f` nearly coincide; the result may be numerically fragile.
    pub near_power_map: bool,
}

impl DeckChain {
    pub fn level(&self, k: usize) -> Option<&DeckGroup> {
        k.checked_sub(1).and_then(|i| self.groups.get(i))
    }

    pub fn top(&self) -> &DeckGroup {
        self.groups.last().expect("chains have at least one level")
    }
}

/// `max_p d(f^k(φ(p)), f^k(p))` over `tol.n_samples` random points.
pub fn deck_residual<R: rand::Rng>(
    f: &BicriticalMap,
    k: usize,
    phi: &MoebiusMap,
    tol: &Tolerance,
    rng: &mut R,
) -> f64 {
    (0..tol.n_samples)
        .map(|_| {
            let p = SpherePoint::random(rng);
            chordal_distance(&f.iterate_eval(k, &phi.apply(&p)), &f.iterate_eval(k, &p))
        })
        .fold(0.0, f64::max)
}

/// `max_p d(f(φ(p)), μ(f(p)))` over `tol.n_samples` random points.
pub fn semiconjugacy_residual<R: rand::Rng>(
    f: &BicriticalMap,
    phi: &MoebiusMap,
    mu: &MoebiusMap,
    tol: &Tolerance,
    rng: &mut R,
) -> f64 {
    (0..tol.n_samples)
        .map(|_| {
            let p = SpherePoint::random(rng);
            chordal_distance(&f.eval(&phi.apply(&p)), &mu.apply(&f.eval(&p)))
        })
        .fold(0.0, f64::max)
}

fn roots_of_unity(n: usize) -> impl Iterator<Item = Complex64> {
    (0..n).map(move |j| Complex64::from_polar(1.0, 2.0 * PI * j as f64 / n as f64))
}

/// `pre⁻¹ ∘ (z ↦ ζ z) ∘ pre` for every `n`-th root of unity `ζ`.
fn conjugated_rotations(f: &BicriticalMap, n: usize) -> Vec<MoebiusMap> {
    roots_of_unity(n)
        .map(|zeta| MoebiusMap::scaling(zeta).conjugate_by(&f.pre().inverse()))
        .collect()
}

fn verify_level(f: &BicriticalMap, k: usize, elements: &[MoebiusMap], tol: &Tolerance) -> Result<()> {
    let mut rng = rng_for(tol, STREAM_VERIFY ^ ((k as u64) << 8));
    for phi in elements {
        let residual = deck_residual(f, k, phi, tol, &mut rng);
        if !(residual < tol.check_eps()) {
            return Err(Error::VerificationFailed(format!(
                "f^{k} o phi != f^{k} for {phi} (residual {residual:e})"
            )));
        }
    }
    Ok(())
}

fn finish_level(
    f: &BicriticalMap,
    k: usize,
    elements: Vec<MoebiusMap>,
    previous_len: usize,
    tol: &Tolerance,
) -> Result<DeckGroup> {
    verify_level(f, k, &elements, tol)?;
    let (group_type, generators) = identify_with_generators(&elements, tol)
        .map_err(|e| Error::VerificationFailed(format!("level {k}: {e}")))?;
    let new_elements = elements[previous_len.min(elements.len())..].to_vec();
    Ok(DeckGroup { k, elements, group_type, generators, new_elements })
}

/// `Deck(f)`: the `d` rotations about the critical points.
pub fn base_deck(f: &BicriticalMap, tol: &Tolerance) -> Result<DeckGroup> {
    let elements = conjugated_rotations(f, f.degree() as usize);
    finish_level(f, 1, elements, 0, tol)
}

/// All `d` Möbius maps `φ` with `f ∘ φ = μ ∘ f`, one full `Deck(f)`-coset.
///
/// Conjugating by the factors reduces to `g(z) = z^d`: `μ' = post⁻¹ μ post`
/// preserves `{0, ∞}`, so it is `z ↦ a z` or `z ↦ a / z`, and the lifts of
/// `μ'` through `g` are `z ↦ c z` (resp. `z ↦ c / z`) with `c^d = a`.
pub fn lift(f: &BicriticalMap, mu: &MoebiusMap, tol: &Tolerance) -> Result<Vec<MoebiusMap>> {
    if !f.critical_values().preserved_by(mu, tol.check_eps()) {
        return Err(Error::ValueSetNotPreserved);
    }
    let reduced = mu.conjugate_by(&f.post().inverse());
    let [p, q, r, s] = reduced.entries();
    let diagonal = p.norm().max(s.norm()) >= q.norm().max(r.norm());
    let a = if diagonal { p / s } else { q / r };
    let d = f.degree();
    let root = a.powf(1.0 / d as f64);
    let pre = f.pre();
    let lifts: Vec<MoebiusMap> = roots_of_unity(d as usize)
        .map(|zeta| {
            let c = root * zeta;
            let reduced_lift =
                if diagonal { MoebiusMap::scaling(c) } else { MoebiusMap::scaled_inversion(c) };
            pre.inverse().compose(&reduced_lift).compose(pre)
        })
        .collect();

    let mut rng = rng_for(tol, STREAM_VERIFY ^ 0x11);
    for phi in &lifts {
        let residual = semiconjugacy_residual(f, phi, mu, tol, &mut rng);
        if !(residual < tol.check_eps()) {
            return Err(Error::LiftVerificationFailed { residual });
        }
    }
    Ok(lifts)
}

/// Three sample points away from `C_f` whose images are well separated.
fn regular_triple<R: rand::Rng>(f: &BicriticalMap, rng: &mut R) -> Option<[SpherePoint; 3]> {
    let crit = f.critical_points();
    let mut chosen: Vec<(SpherePoint, SpherePoint)> = Vec::with_capacity(3);
    for _ in 0..256 {
        let p = SpherePoint::random(rng);
        if crit.distance_to(&p) < 1e-3 {
            continue;
        }
        let fp = f.eval(&p);
        if chosen.iter().all(|(_, fq)| chordal_distance(fq, &fp) > 0.05) {
            chosen.push((p, fp));
            if chosen.len() == 3 {
                return Some([chosen[0].0, chosen[1].0, chosen[2].0]);
            }
        }
    }
    None
}

/// The unique `μ` with `f ∘ φ = μ ∘ f` for `φ ∈ Deck(f^k)`, `k ≥ 2`.
///
/// Reconstructed from three regular points, then checked on fresh samples,
/// on `μ(V_f) = V_f`, and on `μ ∈ Deck(f^{k-1})`.
pub fn project(f: &BicriticalMap, phi: &MoebiusMap, k: usize, tol: &Tolerance) -> Result<MoebiusMap> {
    let mut rng = rng_for(tol, STREAM_PROJECT);
    let triple = regular_triple(f, &mut rng)
        .ok_or_else(|| Error::ProjectionVerificationFailed("no regular sample points".into()))?;
    let from = triple.map(|p| f.eval(&p));
    let to = triple.map(|p| f.eval(&phi.apply(&p)));
    let mu = MoebiusMap::from_three_points(from, to, tol.eps)
        .map_err(|e| Error::ProjectionVerificationFailed(e.to_string()))?;

    let residual = semiconjugacy_residual(f, phi, &mu, tol, &mut rng);
    if !(residual < tol.check_eps()) {
        return Err(Error::ProjectionVerificationFailed(format!(
            "f o phi != mu o f (residual {residual:e})"
        )));
    }
    if !f.critical_values().preserved_by(&mu, tol.check_eps()) {
        return Err(Error::ProjectionVerificationFailed("mu does not preserve V_f".into()));
    }
    if k >= 2 {
        let residual = deck_residual(f, k - 1, &mu, tol, &mut rng);
        if !(residual < tol.check_eps()) {
            return Err(Error::ProjectionVerificationFailed(format!(
                "mu is not in Deck(f^{}) (residual {residual:e})",
                k - 1
            )));
        }
    }
    Ok(mu)
}

/// Elements of `group` mapping the pair `values` onto itself.
pub fn value_preserving_subset(group: &[MoebiusMap], values: &PointPair, tol: &Tolerance) -> Vec<MoebiusMap> {
    group.iter().filter(|g| values.preserved_by(g, tol.check_eps())).copied().collect()
}

/// The maps preserving both `C_f` and `V_f` (a subgroup of `V₄`), for maps
/// that are not power maps.
pub fn gamma_group(f: &BicriticalMap, tol: &Tolerance) -> Result<Vec<MoebiusMap>> {
    let eps = tol.check_eps();
    let crit = f.critical_points();
    let vals = f.critical_values();
    if crit.approx_eq(&vals, eps) {
        return Err(Error::PowerMapInput);
    }
    let [c1, c2] = crit.points();
    let [v1, v2] = vals.points();
    if crit.contains(&v1, eps) || crit.contains(&v2, eps) {
        return Ok(vec![MoebiusMap::IDENTITY]);
    }

    let close = |p: SpherePoint, q: SpherePoint| chordal_distance(&p, &q) < eps;
    // (source triple, target triple, fourth point, its required image)
    let candidates = [
        ([c1, c2, v1], [c1, c2, v2], v2, v1),
        ([v1, v2, c1], [v1, v2, c2], c2, c1),
        ([c1, c2, v1], [c2, c1, v2], v2, v1),
    ];
    let mut group = vec![MoebiusMap::IDENTITY];
    for (from, to, extra, image) in candidates {
        let mu = MoebiusMap::from_three_points(from, to, tol.eps)?;
        if close(mu.apply(&extra), image) && mu.compose(&mu).is_identity(eps) {
            group.push(mu);
        }
    }
    Ok(group)
}

/// Lifts of every value-preserving element of `current`, with `current`'s
/// elements first. Fails if `current` is not contained in the result.
pub fn next_level(f: &BicriticalMap, current: &[MoebiusMap], tol: &Tolerance) -> Result<Vec<MoebiusMap>> {
    let values = f.critical_values();
    let mut lifted = ElementSet::new(tol.check_eps());
    for mu in value_preserving_subset(current, &values, tol) {
        for phi in lift(f, &mu, tol)? {
            lifted.insert(phi);
        }
    }
    let mut out = ElementSet::from_elements(tol.check_eps(), current);
    if current.iter().any(|g| !lifted.contains(g)) {
        return Err(Error::VerificationFailed("lifted level does not contain the previous level".into()));
    }
    for phi in lifted.into_vec() {
        out.insert(phi);
    }
    Ok(out.into_vec())
}

fn power_chain(f: &BicriticalMap, k_max: usize, near: bool, tol: &Tolerance) -> Result<DeckChain> {
    let d = f.degree() as usize;
    let too_large = || Error::GroupTooLarge { degree: f.degree(), k: k_max, cap: POWER_GROUP_CAP };
    let top = (0..k_max).try_fold(1usize, |acc, _| acc.checked_mul(d)).ok_or_else(too_large)?;
    if top > POWER_GROUP_CAP {
        return Err(too_large());
    }
    let mut groups: Vec<DeckGroup> = Vec::with_capacity(k_max);
    let mut order = 1;
    for k in 1..=k_max {
        order *= d;
        // Previous level first, keeping the nesting visible in the element order.
        let mut set = ElementSet::new(tol.check_eps());
        if let Some(prev) = groups.last() {
            prev.elements.iter().for_each(|g| {
                set.insert(*g);
            });
        }
        for g in conjugated_rotations(f, order) {
            set.insert(g);
        }
        let previous_len = groups.last().map_or(0, |g| g.order());
        groups.push(finish_level(f, k, set.into_vec(), previous_len, tol)?);
    }
    Ok(DeckChain { map: *f, groups, stabilized_at: None, power_map: true, near_power_map: near })
}

/// `Deck(f^k)` for `k = 1..=k_max`.
pub fn deck_chain(f: &BicriticalMap, k_max: usize, tol: &Tolerance) -> Result<DeckChain> {
    let tol = tol.validated()?;
    let k_max = k_max.max(1);
    let status = f.power_map_status(&tol);
    let near = status == PowerMapStatus::NearPowerMap;
    if status == PowerMapStatus::PowerMap {
        return power_chain(f, k_max, near, &tol);
    }

    let mut groups = vec![base_deck(f, &tol)?];
    let mut stabilized_at = None;
    for k in 2..=k_max {
        let prev = groups.last().expect("nonempty");
        let elements = if stabilized_at.is_some() || k > 3 {
            prev.elements.clone()
        } else {
            next_level(f, &prev.elements, &tol)?
        };
        if stabilized_at.is_none() {
            if elements.len() == prev.order() {
                stabilized_at = Some(k - 1);
            } else if k > 3 {
                // Levels never grow past three for maps that are not power maps.
                stabilized_at = Some(3);
            }
        }
        let previous_len = prev.order();
        groups.push(finish_level(f, k, elements, previous_len, &tol)?);
    }
    Ok(DeckChain { map: *f, groups, stabilized_at, power_map: false, near_power_map: near })
}

/// `Deck(f^k)`.
pub fn deck_group(f: &BicriticalMap, k: usize, tol: &Tolerance) -> Result<DeckGroup> {
    let mut chain = deck_chain(f, k, tol)?;
    Ok(chain.groups.pop().expect("nonempty chain"))
}
