//! Random Möbius maps and bicritical maps for property checks.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::bicritical::{BicriticalMap, PowerMapStatus};
use crate::moebius::MoebiusMap;
use crate::sphere::Tolerance;

/// Minimum `|det|` of a unit-Frobenius-norm matrix; bounds the condition
/// number of sampled maps by roughly ten.
pub const MIN_NORMALIZED_DET: f64 = 0.1;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Entries are independent complex Gaussians; matrices whose determinant is
/// at most [`MIN_NORMALIZED_DET`] after scaling to unit Frobenius norm are
/// rejected.
pub fn random_moebius<R: Rng + ?Sized>(rng: &mut R) -> MoebiusMap {
    loop {
        let m = [gaussian(rng), gaussian(rng), gaussian(rng), gaussian(rng)];
        let frob2: f64 = m.iter().map(|e| e.norm_sqr()).sum();
        let det = (m[0] * m[3] - m[1] * m[2]).norm() / frob2;
        if det > MIN_NORMALIZED_DET {
            if let Ok(map) = MoebiusMap::new(m[0], m[1], m[2], m[3]) {
                return map;
            }
        }
    }
}

/// Random `pre` and `post`, rejecting maps near the power-map locus.
pub fn random_bicritical<R: Rng + ?Sized>(rng: &mut R, degree: u32, tol: &Tolerance) -> BicriticalMap {
    loop {
        let f = BicriticalMap::new(random_moebius(rng), degree, random_moebius(rng))
            .expect("caller passes degree >= 2");
        if f.power_map_status(tol) == PowerMapStatus::Generic {
            return f;
        }
    }
}

/// A random conjugate of `(z^d - a)/(z^d + a)`. The parameter is `1`, `-1`
/// or a random complex number, so both dihedral branches show up for even
/// degree.
pub fn coalescing_bicritical<R: Rng + ?Sized>(rng: &mut R, degree: u32) -> BicriticalMap {
    let a = match rng.random_range(0..3) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(-1.0, 0.0),
        _ => loop {
            let a = gaussian(rng);
            if a.norm() > 0.1 {
                break a;
            }
        },
    };
    let one = Complex64::new(1.0, 0.0);
    let base = BicriticalMap::from_normal_form(one, -a, one, a, degree)
        .expect("a is nonzero and degree >= 2");
    base.conjugate_by(&random_moebius(rng))
}
