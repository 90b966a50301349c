//! Deck groups of iterates of bicritical rational maps.
//!
//! A bicritical map is stored as `post ∘ (z ↦ z^d) ∘ pre` with Möbius factors
//! `pre` and `post`. [`deck::deck_chain`] computes `Deck(f^k)` level by level,
//! [`classify::classify_map`] identifies each group as cyclic or dihedral and
//! checks the result against the degree-parity classification, and
//! [`audit::audit_chain`] re-checks the structural properties of a computed
//! chain on fresh samples.
//!
//! ```
//! use deckgroup_core::{BicriticalMap, GroupType, Tolerance, classify_map};
//! use num_complex::Complex64;
//!
//! let one = Complex64::new(1.0, 0.0);
//! // (z² − 1)/(z² + 1)
//! let g = BicriticalMap::from_normal_form(one, -one, one, one, 2).unwrap();
//! let report = classify_map(&g, 3, &Tolerance::default()).unwrap();
//! assert_eq!(report.levels[2].group_type, GroupType::Dihedral(8));
//! ```

// `!(x < tol)` is deliberate throughout: NaN residuals must fail.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod audit;
pub mod bicritical;
pub mod classify;
pub mod deck;
pub mod elements;
pub mod error;
pub mod moebius;
pub mod sampling;
pub mod sphere;

pub use bicritical::{BicriticalMap, PointPair, PowerMapStatus};
pub use classify::{
    check_dihedral_coalescing, classify_chain, classify_map, identify_group, ClassificationReport, GroupType,
    LevelSummary, Verdict,
};
pub use deck::{
    base_deck, deck_chain, deck_group, gamma_group, lift, project, value_preserving_subset,
    DeckChain, DeckGroup,
};
pub use audit::{audit_chain, Invariant, InvariantFailure};
pub use elements::ElementSet;
pub use error::{Error, Result};
pub use moebius::{FixedPoints, MoebiusMap};
pub use sphere::{chordal_distance, SpherePoint, Tolerance};
