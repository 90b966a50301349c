//! Möbius transformations as 2x2 complex matrices modulo scalars.

use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sphere::{chordal_distance, SpherePoint, Tolerance};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Relative determinant threshold below which a matrix is treated as singular.
const SINGULAR_DET: f64 = 1e-12;
/// Relative band used to pick the sign-fixing entry robustly.
const TIE_BAND: f64 = 1e-9;

/// An invertible Möbius map `z ↦ (a z + b) / (c z + d)`.
///
/// Stored in canonical form: determinant one, and the first entry whose
/// modulus is (within a relative band) maximal lies in the right half plane
/// (positive imaginary axis included). Equality tests compare against both
/// `M` and `-M`, so rounding near the sign convention boundary is harmless.
#[derive(Clone, Copy, PartialEq, Serialize)]
pub struct MoebiusMap {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
}

/// Fixed-point set of a Möbius map.
#[derive(Debug, Clone, PartialEq)]
pub enum FixedPoints {
    /// The identity fixes every point.
    All,
    /// One point (parabolic) or two points.
    Points(Vec<SpherePoint>),
}

impl MoebiusMap {
    pub const IDENTITY: MoebiusMap = MoebiusMap { a: ONE, b: ZERO, c: ZERO, d: ONE };

    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let scale = [a, b, c, d].iter().map(|e| e.norm()).fold(0.0, f64::max);
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::SingularMatrix { det: 0.0 });
        }
        let (a, b, c, d) = (a / scale, b / scale, c / scale, d / scale);
        let det = a * d - b * c;
        if det.norm() <= SINGULAR_DET {
            return Err(Error::SingularMatrix { det: det.norm() });
        }
        Ok(Self::canonical(a, b, c, d, det))
    }

    pub fn from_real(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Self::new(a.into(), b.into(), c.into(), d.into())
    }

    fn canonical(a: Complex64, b: Complex64, c: Complex64, d: Complex64, det: Complex64) -> Self {
        let s = det.sqrt();
        let mut m = [a / s, b / s, c / s, d / s];
        let max = m.iter().map(|e| e.norm()).fold(0.0, f64::max);
        let lead = *m.iter().find(|e| e.norm() >= max * (1.0 - TIE_BAND)).expect("nonzero matrix");
        let flip = if lead.re.abs() <= TIE_BAND * lead.norm() { lead.im < 0.0 } else { lead.re < 0.0 };
        if flip {
            m.iter_mut().for_each(|e| *e = -*e);
        }
        MoebiusMap { a: m[0], b: m[1], c: m[2], d: m[3] }
    }

    /// Product of two canonical matrices; the determinant stays near one.
    fn from_product(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Self {
        let scale = [a, b, c, d].iter().map(|e| e.norm()).fold(0.0, f64::max);
        let (a, b, c, d) = (a / scale, b / scale, c / scale, d / scale);
        Self::canonical(a, b, c, d, a * d - b * c)
    }

    pub fn identity() -> Self {
        Self::IDENTITY
    }

    /// `z ↦ factor · z`.
    pub fn scaling(factor: Complex64) -> Self {
        Self::new(factor, ZERO, ZERO, ONE).expect("nonzero scaling factor")
    }

    /// `z ↦ factor / z`.
    pub fn scaled_inversion(factor: Complex64) -> Self {
        Self::new(ZERO, factor, ONE, ZERO).expect("nonzero inversion factor")
    }

    pub fn entries(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn a(&self) -> Complex64 {
        self.a
    }
    pub fn b(&self) -> Complex64 {
        self.b
    }
    pub fn c(&self) -> Complex64 {
        self.c
    }
    pub fn d(&self) -> Complex64 {
        self.d
    }

    pub fn trace(&self) -> Complex64 {
        self.a + self.d
    }

    /// Largest entry modulus of the determinant-one matrix.
    pub fn scale(&self) -> f64 {
        self.entries().iter().map(|e| e.norm()).fold(0.0, f64::max)
    }

    pub fn apply(&self, p: &SpherePoint) -> SpherePoint {
        let (z, w) = (p.z(), p.w());
        SpherePoint::new(self.a * z + self.b * w, self.c * z + self.d * w)
            .expect("invertible map sends nonzero vectors to nonzero vectors")
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &MoebiusMap) -> MoebiusMap {
        Self::from_product(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )
    }

    pub fn inverse(&self) -> MoebiusMap {
        Self::from_product(self.d, -self.b, -self.c, self.a)
    }

    /// `h ∘ self ∘ h⁻¹`.
    pub fn conjugate_by(&self, h: &MoebiusMap) -> MoebiusMap {
        h.compose(self).compose(&h.inverse())
    }

    pub fn pow(&self, mut n: u64) -> MoebiusMap {
        let mut base = *self;
        let mut acc = Self::IDENTITY;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.compose(&base);
            }
            base = base.compose(&base);
            n >>= 1;
        }
        acc
    }

    /// Largest entrywise deviation between the two maps, minimized over the
    /// sign ambiguity of `SL(2)` representatives.
    pub fn distance(&self, other: &MoebiusMap) -> f64 {
        let x = self.entries();
        let y = other.entries();
        let plus = x.iter().zip(&y).map(|(p, q)| (p - q).norm()).fold(0.0, f64::max);
        let minus = x.iter().zip(&y).map(|(p, q)| (p + q).norm()).fold(0.0, f64::max);
        plus.min(minus)
    }

    /// Projective equality within `eps`, relative to the entry scale.
    pub fn approx_eq(&self, other: &MoebiusMap, eps: f64) -> bool {
        self.distance(other) <= eps * self.scale().max(other.scale()).max(1.0)
    }

    pub fn is_identity(&self, eps: f64) -> bool {
        self.approx_eq(&Self::IDENTITY, eps)
    }

    /// Fixed points from the homogeneous quadratic `c z² + (d - a) z w - b w² = 0`.
    pub fn fixed_points(&self, eps: f64) -> FixedPoints {
        if self.is_identity(eps) {
            return FixedPoints::All;
        }
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        let amd = a - d;
        let disc = amd * amd + 4.0 * b * c;
        let tol = eps * self.scale().max(1.0);
        if disc.norm() <= tol {
            // parabolic: single fixed point
            let p = if c.norm() <= tol {
                SpherePoint::INFINITY
            } else {
                SpherePoint::new(amd, 2.0 * c).expect("c is nonzero")
            };
            return FixedPoints::Points(vec![p]);
        }
        let s = disc.sqrt();
        let q = if (amd + s).norm() >= (amd - s).norm() { amd + s } else { amd - s };
        let first = SpherePoint::new(q, 2.0 * c).expect("|q| >= |s| > 0");
        let second = SpherePoint::new(-2.0 * b, q).expect("|q| >= |s| > 0");
        FixedPoints::Points(vec![first, second])
    }

    /// Smallest `n ≤ max_order` with `selfⁿ = id`, by iterated composition.
    pub fn order_of(&self, tol: &Tolerance) -> Result<usize> {
        // Nontrivial elements of finite order are elliptic: real trace in (-2, 2).
        let t = self.trace();
        if !self.is_identity(tol.eps) && (t.im.abs() > tol.eps.sqrt() || t.re.abs() > 2.0 + tol.eps.sqrt()) {
            return Err(Error::NotFiniteOrder { max_order: tol.max_order });
        }
        let mut power = *self;
        for n in 1..=tol.max_order {
            if power.is_identity(tol.eps) {
                return Ok(n);
            }
            power = power.compose(self);
        }
        Err(Error::NotFiniteOrder { max_order: tol.max_order })
    }

    /// The unique map with `p_i ↦ q_i` for `i = 1, 2, 3`.
    pub fn from_three_points(
        from: [SpherePoint; 3],
        to: [SpherePoint; 3],
        eps: f64,
    ) -> Result<MoebiusMap> {
        let source = to_standard_frame(&from, eps)?;
        let target = to_standard_frame(&to, eps)?;
        Ok(target.inverse().compose(&source))
    }

    pub fn commutes_with(&self, other: &MoebiusMap, eps: f64) -> bool {
        self.compose(other).approx_eq(&other.compose(self), eps)
    }
}

/// Map sending `p1 ↦ 0`, `p2 ↦ 1`, `p3 ↦ ∞`.
fn to_standard_frame(p: &[SpherePoint; 3], eps: f64) -> Result<MoebiusMap> {
    for (i, j) in [(0, 1), (0, 2), (1, 2)] {
        if chordal_distance(&p[i], &p[j]) <= eps {
            return Err(Error::DegenerateTriple);
        }
    }
    let [p1, p2, p3] = p;
    // l_i(z, w) = z w_i - w z_i vanishes exactly at p_i.
    let l1_at_p2 = p2.z() * p1.w() - p2.w() * p1.z();
    let l3_at_p2 = p2.z() * p3.w() - p2.w() * p3.z();
    MoebiusMap::new(
        l3_at_p2 * p1.w(),
        -l3_at_p2 * p1.z(),
        l1_at_p2 * p3.w(),
        -l1_at_p2 * p3.z(),
    )
    .map_err(|_| Error::DegenerateTriple)
}

/// Whether `map` sends the two-point set `set` onto itself.
pub fn preserves_pair(map: &MoebiusMap, set: [SpherePoint; 2], eps: f64) -> bool {
    let [u, v] = set;
    let (mu, mv) = (map.apply(&u), map.apply(&v));
    let straight = chordal_distance(&mu, &u).max(chordal_distance(&mv, &v));
    let swapped = chordal_distance(&mu, &v).max(chordal_distance(&mv, &u));
    straight.min(swapped) < eps
}

impl fmt::Debug for MoebiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Moebius[{}, {}; {}, {}]", self.a, self.b, self.c, self.d)
    }
}

impl fmt::Display for MoebiusMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let e = |z: Complex64| format!("({:.6}{:+.6}i)", z.re, z.im);
        write!(f, "z -> ({} z + {}) / ({} z + {})", e(self.a), e(self.b), e(self.c), e(self.d))
    }
}

impl<'de> Deserialize<'de> for MoebiusMap {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            a: Complex64,
            b: Complex64,
            c: Complex64,
            d: Complex64,
        }
        let r = Raw::deserialize(de)?;
        MoebiusMap::new(r.a, r.b, r.c, r.d).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const EPS: f64 = 1e-9;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn pt(re: f64, im: f64) -> SpherePoint {
        SpherePoint::from_re_im(re, im)
    }

    fn neg() -> MoebiusMap {
        MoebiusMap::scaling(c(-1.0, 0.0))
    }

    fn inv() -> MoebiusMap {
        MoebiusMap::scaled_inversion(ONE)
    }

    fn close(p: SpherePoint, q: SpherePoint) -> bool {
        chordal_distance(&p, &q) < EPS
    }

    #[test]
    fn apply_examples() {
        assert!(inv().apply(&SpherePoint::ZERO).is_infinity());
        assert!(close(neg().apply(&pt(3.0, 0.0)), pt(-3.0, 0.0)));
        let cayley = MoebiusMap::from_real(1.0, -1.0, 1.0, 1.0).unwrap();
        assert!(close(cayley.apply(&SpherePoint::INFINITY), SpherePoint::ONE));
        assert!(close(MoebiusMap::IDENTITY.apply(&pt(0.2, 7.0)), pt(0.2, 7.0)));
    }

    #[test]
    fn compose_examples() {
        assert!(neg().compose(&neg()).is_identity(EPS));
        let a = c(2.0, -0.5);
        let lhs = inv().compose(&MoebiusMap::scaling(a));
        // 1/(a z) = (1/a)/z
        assert!(lhs.approx_eq(&MoebiusMap::scaled_inversion(a.inv()), EPS));
    }

    #[test]
    fn singular_rejected() {
        assert!(matches!(
            MoebiusMap::from_real(1.0, 2.0, 2.0, 4.0),
            Err(Error::SingularMatrix { .. })
        ));
    }

    #[test]
    fn canonical_sign_is_stable_near_real_axis() {
        let m1 = MoebiusMap::new(c(1.0, 1e-17), ZERO, ZERO, c(1.0, -1e-17)).unwrap();
        let m2 = MoebiusMap::new(c(1.0, -1e-17), ZERO, ZERO, c(1.0, 1e-17)).unwrap();
        assert!((m1.a() - m2.a()).norm() < 1e-15);
        let m3 = MoebiusMap::from_real(-2.0, 0.0, 0.0, -0.5).unwrap();
        assert!(m3.a().re > 0.0);
    }

    #[test]
    fn fixed_point_examples() {
        match neg().fixed_points(EPS) {
            FixedPoints::Points(ps) => {
                assert_eq!(ps.len(), 2);
                assert!(ps.iter().any(|p| close(*p, SpherePoint::ZERO)));
                assert!(ps.iter().any(|p| p.is_infinity()));
            }
            FixedPoints::All => panic!("not the identity"),
        }
        match inv().fixed_points(EPS) {
            FixedPoints::Points(ps) => {
                assert_eq!(ps.len(), 2);
                assert!(ps.iter().any(|p| close(*p, pt(1.0, 0.0))));
                assert!(ps.iter().any(|p| close(*p, pt(-1.0, 0.0))));
            }
            FixedPoints::All => panic!("not the identity"),
        }
        let translation = MoebiusMap::from_real(1.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(translation.fixed_points(EPS), FixedPoints::Points(vec![SpherePoint::INFINITY]));
        assert_eq!(MoebiusMap::IDENTITY.fixed_points(EPS), FixedPoints::All);
    }

    #[test]
    fn order_examples() {
        let tol = Tolerance::default();
        assert_eq!(MoebiusMap::IDENTITY.order_of(&tol), Ok(1));
        let zeta = Complex64::from_polar(1.0, 2.0 * PI / 5.0);
        assert_eq!(MoebiusMap::scaling(zeta).order_of(&tol), Ok(5));
        assert!(matches!(
            MoebiusMap::scaling(c(2.0, 0.0)).order_of(&tol),
            Err(Error::NotFiniteOrder { .. })
        ));
    }

    #[test]
    fn three_point_examples() {
        let (zero, one, inf) = (SpherePoint::ZERO, SpherePoint::ONE, SpherePoint::INFINITY);
        let id = MoebiusMap::from_three_points([zero, one, inf], [zero, one, inf], EPS).unwrap();
        assert!(id.is_identity(EPS));
        let t = MoebiusMap::from_three_points([zero, inf, one], [inf, zero, one], EPS).unwrap();
        assert!(t.approx_eq(&inv(), EPS));
        let t = MoebiusMap::from_three_points([zero, one, inf], [one, inf, zero], EPS).unwrap();
        // 1/(1 - z)
        assert!(t.approx_eq(&MoebiusMap::from_real(0.0, 1.0, -1.0, 1.0).unwrap(), EPS));
        assert_eq!(
            MoebiusMap::from_three_points([zero, zero, inf], [zero, one, inf], EPS),
            Err(Error::DegenerateTriple)
        );
    }

    #[test]
    fn commute_examples() {
        assert!(neg().commutes_with(&inv(), EPS));
        let rot = MoebiusMap::scaling(c(0.0, 1.0));
        let translation = MoebiusMap::from_real(1.0, 1.0, 0.0, 1.0).unwrap();
        assert!(!rot.commutes_with(&translation, EPS));
        let t = MoebiusMap::new(c(0.3, 1.0), c(2.0, -1.0), c(0.1, 0.0), c(1.0, 1.0)).unwrap();
        assert!(t.commutes_with(&t.inverse(), EPS));
    }

    #[test]
    fn serde_shape() {
        let s = serde_json::to_string(&neg()).unwrap();
        assert_eq!(s, r#"{"a":[0.0,1.0],"b":[0.0,0.0],"c":[0.0,0.0],"d":[0.0,-1.0]}"#);
        let back: MoebiusMap = serde_json::from_str(r#"{"a":[-3,0],"b":[0,0],"c":[0,0],"d":[3,0]}"#).unwrap();
        assert!(back.approx_eq(&neg(), EPS));
    }
}
