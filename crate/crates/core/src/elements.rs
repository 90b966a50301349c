//! Tolerance-aware set of Möbius maps.
//!
//! Elements are bucketed by where they send a fixed probe point, so lookup
//! costs a handful of matrix comparisons instead of a scan. Two maps that
//! agree within `eps` send the probe to nearby points and land in the same
//! or a neighboring cell; the final decision is always a matrix comparison.

use std::collections::HashMap;

use num_complex::Complex64;

use crate::moebius::MoebiusMap;
use crate::sphere::SpherePoint;

const CELL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub struct ElementSet {
    eps: f64,
    probe: SpherePoint,
    elements: Vec<MoebiusMap>,
    buckets: HashMap<[i64; 3], Vec<usize>>,
}

impl ElementSet {
    pub fn new(eps: f64) -> Self {
        ElementSet {
            eps,
            probe: SpherePoint::finite(Complex64::new(0.318_309_886, 0.577_215_664)),
            elements: Vec::new(),
            buckets: HashMap::new(),
        }
    }

    pub fn from_elements<'a>(eps: f64, elements: impl IntoIterator<Item = &'a MoebiusMap>) -> Self {
        let mut set = Self::new(eps);
        for g in elements {
            set.insert(*g);
        }
        set
    }

    fn cell(&self, g: &MoebiusMap) -> [i64; 3] {
        let v = g.apply(&self.probe).to_unit_vector();
        [(v[0] / CELL).floor() as i64, (v[1] / CELL).floor() as i64, (v[2] / CELL).floor() as i64]
    }

    /// Index of the stored element equal to `g`, if any.
    pub fn find(&self, g: &MoebiusMap) -> Option<usize> {
        let [x, y, z] = self.cell(g);
        for dx in -1..=1 {
            for dy in -1..=1 {
                for dz in -1..=1 {
                    if let Some(ids) = self.buckets.get(&[x + dx, y + dy, z + dz]) {
                        if let Some(&i) = ids.iter().find(|&&i| self.elements[i].approx_eq(g, self.eps)) {
                            return Some(i);
                        }
                    }
                }
            }
        }
        None
    }

    pub fn contains(&self, g: &MoebiusMap) -> bool {
        self.find(g).is_some()
    }

    /// Adds `g` unless an equal element is present; returns whether it was new.
    pub fn insert(&mut self, g: MoebiusMap) -> bool {
        if self.contains(&g) {
            return false;
        }
        let key = self.cell(&g);
        self.buckets.entry(key).or_default().push(self.elements.len());
        self.elements.push(g);
        true
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn as_slice(&self) -> &[MoebiusMap] {
        &self.elements
    }

    pub fn into_vec(self) -> Vec<MoebiusMap> {
        self.elements
    }

    /// Equality as sets.
    pub fn same_elements(&self, other: &[MoebiusMap]) -> bool {
        let other_set = ElementSet::from_elements(self.eps, other);
        other_set.len() == self.len() && other.iter().all(|g| self.contains(g))
    }
}
