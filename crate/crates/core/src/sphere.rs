//! Points of the Riemann sphere in homogeneous coordinates.
//!
//! A point is a pair `[z : w]` up to a nonzero complex scalar. The canonical
//! representative scales the larger-modulus coordinate to exactly one (ties go
//! to `w`), so finite points look like `[z : 1]` and infinity is `[1 : 0]`.
//! All comparisons go through [`chordal_distance`], which treats infinity like
//! any other point.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpherePoint {
    z: Complex64,
    w: Complex64,
}

impl SpherePoint {
    pub const INFINITY: SpherePoint = SpherePoint { z: ONE, w: ZERO };
    pub const ZERO: SpherePoint = SpherePoint { z: ZERO, w: ONE };
    pub const ONE: SpherePoint = SpherePoint { z: ONE, w: ONE };

    /// Normalizes the projective pair `[z : w]`.
    pub fn new(z: Complex64, w: Complex64) -> Result<Self> {
        let (mz, mw) = (z.norm(), w.norm());
        if !(mz.is_finite() && mw.is_finite()) || mz.max(mw) <= f64::MIN_POSITIVE {
            return Err(Error::ZeroVector);
        }
        Ok(if mz > mw {
            SpherePoint { z: ONE, w: w / z }
        } else {
            SpherePoint { z: z / w, w: ONE }
        })
    }

    /// The finite point `z`.
    pub fn finite(z: Complex64) -> Self {
        SpherePoint::new(z, ONE).expect("w = 1 is never zero")
    }

    pub fn from_re_im(re: f64, im: f64) -> Self {
        Self::finite(Complex64::new(re, im))
    }

    pub fn z(&self) -> Complex64 {
        self.z
    }

    pub fn w(&self) -> Complex64 {
        self.w
    }

    pub fn is_infinity(&self) -> bool {
        self.w == ZERO
    }

    /// Affine coordinate, `None` at infinity.
    pub fn to_complex(&self) -> Option<Complex64> {
        if self.is_infinity() {
            None
        } else {
            Some(self.z / self.w)
        }
    }

    fn norm(&self) -> f64 {
        (self.z.norm_sqr() + self.w.norm_sqr()).sqrt()
    }

    /// Position on the unit sphere in R^3 (stereographic embedding).
    pub fn to_unit_vector(&self) -> [f64; 3] {
        let s = self.z.norm_sqr() + self.w.norm_sqr();
        let zw = self.z * self.w.conj();
        [2.0 * zw.re / s, 2.0 * zw.im / s, (self.z.norm_sqr() - self.w.norm_sqr()) / s]
    }

    /// Uniform sample on the sphere: the ratio of two independent complex
    /// Gaussians is rotation invariant.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let z = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
            let w = Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal));
            if let Ok(p) = SpherePoint::new(z, w) {
                return p;
            }
        }
    }
}

/// `|z_p w_q - z_q w_p| / (|p| |q|)`: symmetric, zero iff the points agree,
/// at most one (attained by antipodal points).
pub fn chordal_distance(p: &SpherePoint, q: &SpherePoint) -> f64 {
    (p.z * q.w - q.z * p.w).norm() / (p.norm() * q.norm())
}

impl std::fmt::Display for SpherePoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.to_complex() {
            None => write!(f, "inf"),
            Some(z) => write!(f, "{}{:+}i", z.re, z.im),
        }
    }
}

impl<'de> Deserialize<'de> for SpherePoint {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            z: Complex64,
            w: Complex64,
        }
        let raw = Raw::deserialize(de)?;
        SpherePoint::new(raw.z, raw.w).map_err(serde::de::Error::custom)
    }
}

/// Numerical tolerances shared by every computation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Point and matrix comparison threshold.
    pub eps: f64,
    /// Number of random points used to verify functional identities.
    pub n_samples: usize,
    /// Cap for the finite-order search.
    pub max_order: usize,
    pub rng_seed: u64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { eps: 1e-9, n_samples: 24, max_order: 4096, rng_seed: 0x5eed_dec4 }
    }
}

impl Tolerance {
    pub fn with_eps(eps: f64) -> Result<Self> {
        Tolerance { eps, ..Default::default() }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        if !(self.eps > 0.0 && self.eps.is_finite()) {
            return Err(Error::InvalidTolerance(format!("eps must be positive, got {}", self.eps)));
        }
        if self.n_samples < 3 {
            return Err(Error::InvalidTolerance(format!(
                "n_samples must be at least 3, got {}",
                self.n_samples
            )));
        }
        if self.max_order == 0 {
            return Err(Error::InvalidTolerance("max_order must be positive".into()));
        }
        Ok(self)
    }

    /// Threshold for verified functional identities.
    pub fn check_eps(&self) -> f64 {
        10.0 * self.eps
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn normalize_examples() {
        let p = SpherePoint::new(c(3.0, 0.0), c(3.0, 0.0)).unwrap();
        assert_eq!((p.z(), p.w()), (c(1.0, 0.0), c(1.0, 0.0)));

        let p = SpherePoint::new(c(5.0, 0.0), ZERO).unwrap();
        assert!(p.is_infinity());
        assert_eq!(p.z(), ONE);

        let p = SpherePoint::new(c(1.0, 1.0), c(2.0, 0.0)).unwrap();
        assert_eq!((p.z(), p.w()), (c(0.5, 0.5), ONE));
    }

    #[test]
    fn zero_vector_rejected() {
        assert_eq!(SpherePoint::new(ZERO, ZERO), Err(Error::ZeroVector));
    }

    #[test]
    fn ties_go_to_w() {
        let p = SpherePoint::new(c(0.0, 2.0), c(2.0, 0.0)).unwrap();
        assert_eq!(p.w(), ONE);
        assert_eq!(p.z(), c(0.0, 1.0));
    }

    #[test]
    fn chordal_examples() {
        let zero = SpherePoint::ZERO;
        let inf = SpherePoint::INFINITY;
        assert_eq!(chordal_distance(&zero, &inf), 1.0);
        let p = SpherePoint::from_re_im(0.3, -2.0);
        assert_eq!(chordal_distance(&p, &p), 0.0);
        let one = SpherePoint::ONE;
        let minus_one = SpherePoint::from_re_im(-1.0, 0.0);
        assert!((chordal_distance(&one, &minus_one) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn normalization_is_projective() {
        let raw = (c(0.7, -1.3), c(2.1, 0.4));
        let p = SpherePoint::new(raw.0, raw.1).unwrap();
        let scaled = SpherePoint::new(raw.0 * c(-3.0, 5.0), raw.1 * c(-3.0, 5.0)).unwrap();
        assert!(chordal_distance(&p, &scaled) < 1e-15);
    }

    #[test]
    fn tolerance_validation() {
        assert!(Tolerance::with_eps(0.0).is_err());
        assert!(Tolerance { n_samples: 2, ..Default::default() }.validated().is_err());
        assert!(Tolerance::default().validated().is_ok());
    }

    #[test]
    fn serde_shape() {
        let p = SpherePoint::from_re_im(0.5, -0.25);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"z":[0.5,-0.25],"w":[1.0,0.0]}"#);
        // Outside the unit disk the first coordinate is the one scaled to 1.
        let q = SpherePoint::from_re_im(0.5, -1.0);
        assert_eq!(serde_json::to_string(&q).unwrap(), r#"{"z":[1.0,0.0],"w":[0.4,0.8]}"#);
        let back: SpherePoint = serde_json::from_str(r#"{"z":[4.0,0.0],"w":[0.0,0.0]}"#).unwrap();
        assert!(back.is_infinity());
        assert!(serde_json::from_str::<SpherePoint>(r#"{"z":[0,0],"w":[0,0]}"#).is_err());
    }
}
