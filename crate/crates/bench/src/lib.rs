//! Fixture maps shared by the criterion benches.

use deckgroup_core::BicriticalMap;
use num_complex::Complex64;

/// `(z^d - a)/(z^d + a)`.
pub fn symmetric(d: u32, a: Complex64) -> BicriticalMap {
    let one = Complex64::new(1.0, 0.0);
    BicriticalMap::from_normal_form(one, -a, one, a, d).expect("a != 0")
}

/// `(z^4 - 1)/(z^4 + i)`.
pub fn quartic() -> BicriticalMap {
    let one = Complex64::new(1.0, 0.0);
    BicriticalMap::from_normal_form(one, -one, one, Complex64::new(0.0, 1.0), 4).expect("nonsingular")
}
