//! Bicritical rational maps in factored form `post ∘ (z ↦ z^d) ∘ pre`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moebius::MoebiusMap;
use crate::sphere::{chordal_distance, SpherePoint, Tolerance};

/// Unordered pair of distinct points (the sets `C_f` and `V_f`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointPair {
    pub first: SpherePoint,
    pub second: SpherePoint,
}

impl PointPair {
    pub fn new(first: SpherePoint, second: SpherePoint) -> Self {
        PointPair { first, second }
    }

    pub fn points(&self) -> [SpherePoint; 2] {
        [self.first, self.second]
    }

    /// Hausdorff-style distance between the two unordered pairs.
    pub fn distance(&self, other: &PointPair) -> f64 {
        let straight = chordal_distance(&self.first, &other.first)
            .max(chordal_distance(&self.second, &other.second));
        let swapped = chordal_distance(&self.first, &other.second)
            .max(chordal_distance(&self.second, &other.first));
        straight.min(swapped)
    }

    pub fn approx_eq(&self, other: &PointPair, eps: f64) -> bool {
        self.distance(other) < eps
    }

    pub fn contains(&self, p: &SpherePoint, eps: f64) -> bool {
        self.distance_to(p) < eps
    }

    pub fn distance_to(&self, p: &SpherePoint) -> f64 {
        chordal_distance(&self.first, p).min(chordal_distance(&self.second, p))
    }

    pub fn image(&self, map: &MoebiusMap) -> PointPair {
        PointPair::new(map.apply(&self.first), map.apply(&self.second))
    }

    /// `map(self) = self` setwise.
    pub fn preserved_by(&self, map: &MoebiusMap, eps: f64) -> bool {
        self.image(map).approx_eq(self, eps)
    }
}

/// How close a map is to the power-map locus `C_f = V_f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PowerMapStatus {
    PowerMap,
    /// `C_f` and `V_f` agree within `10·eps` but not within `eps`: the
    /// classification is numerically fragile.
    NearPowerMap,
    Generic,
}

/// A degree-`d` bicritical map `post ∘ (z ↦ z^d) ∘ pre`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BicriticalMap {
    pre: MoebiusMap,
    d: u32,
    post: MoebiusMap,
}

impl BicriticalMap {
    pub fn new(pre: MoebiusMap, degree: u32, post: MoebiusMap) -> Result<Self> {
        if degree < 2 {
            return Err(Error::BadDegree(degree));
        }
        Ok(BicriticalMap { pre, d: degree, post })
    }

    /// `z ↦ (α z^d + β) / (γ z^d + δ)`.
    pub fn from_normal_form(
        alpha: Complex64,
        beta: Complex64,
        gamma: Complex64,
        delta: Complex64,
        degree: u32,
    ) -> Result<Self> {
        if degree < 2 {
            return Err(Error::BadDegree(degree));
        }
        let post = MoebiusMap::new(alpha, beta, gamma, delta).map_err(|e| match e {
            Error::SingularMatrix { det } => Error::SingularCoefficients { det },
            other => other,
        })?;
        Self::new(MoebiusMap::IDENTITY, degree, post)
    }

    /// `z ↦ z^d`.
    pub fn power(degree: u32) -> Result<Self> {
        Self::new(MoebiusMap::IDENTITY, degree, MoebiusMap::IDENTITY)
    }

    pub fn pre(&self) -> &MoebiusMap {
        &self.pre
    }

    pub fn post(&self) -> &MoebiusMap {
        &self.post
    }

    pub fn degree(&self) -> u32 {
        self.d
    }

    /// `h ∘ f ∘ h⁻¹`.
    pub fn conjugate_by(&self, h: &MoebiusMap) -> BicriticalMap {
        BicriticalMap {
            pre: self.pre.compose(&h.inverse()),
            d: self.d,
            post: h.compose(&self.post),
        }
    }

    pub fn eval(&self, p: &SpherePoint) -> SpherePoint {
        let q = self.pre.apply(p);
        // q is normalized, so both coordinates have modulus at most one.
        let n = self.d as i32;
        let raised = SpherePoint::new(q.z().powi(n), q.w().powi(n))
            .expect("one coordinate of a normalized point is exactly one");
        self.post.apply(&raised)
    }

    /// Pointwise equality on `tol.n_samples` seeded random points. The
    /// factors themselves are not unique: `z^d ∘ (a z) = (a^d z) ∘ z^d`.
    pub fn same_map(&self, other: &BicriticalMap, tol: &Tolerance) -> bool {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(tol.rng_seed);
        self.d == other.d
            && (0..tol.n_samples).all(|_| {
                let p = SpherePoint::random(&mut rng);
                chordal_distance(&self.eval(&p), &other.eval(&p)) < tol.check_eps()
            })
    }

    /// `f^k(p)` by repeated evaluation.
    pub fn iterate_eval(&self, k: usize, p: &SpherePoint) -> SpherePoint {
        (0..k).fold(*p, |q, _| self.eval(&q))
    }

    /// `C_f = pre⁻¹({0, ∞})`.
    pub fn critical_points(&self) -> PointPair {
        let inv = self.pre.inverse();
        PointPair::new(inv.apply(&SpherePoint::ZERO), inv.apply(&SpherePoint::INFINITY))
    }

    /// `V_f = post({0, ∞})`.
    pub fn critical_values(&self) -> PointPair {
        PointPair::new(self.post.apply(&SpherePoint::ZERO), self.post.apply(&SpherePoint::INFINITY))
    }

    pub fn power_map_status(&self, tol: &Tolerance) -> PowerMapStatus {
        let gap = self.critical_points().distance(&self.critical_values());
        if gap < tol.eps {
            PowerMapStatus::PowerMap
        } else if gap < tol.check_eps() {
            PowerMapStatus::NearPowerMap
        } else {
            PowerMapStatus::Generic
        }
    }

    /// `C_f = V_f` as unordered pairs.
    pub fn is_power_map(&self, tol: &Tolerance) -> bool {
        self.power_map_status(tol) == PowerMapStatus::PowerMap
    }

    /// `f(v₁) = f(v₂)`.
    pub fn is_critically_coalescing(&self, tol: &Tolerance) -> bool {
        let v = self.critical_values();
        chordal_distance(&self.eval(&v.first), &self.eval(&v.second)) < tol.eps
    }

    /// Local degree of `f` at a single point: `d` on `C_f`, else one. Membership
    /// uses the looser `10·eps` threshold since orbit points carry rounding.
    pub fn point_degree(&self, p: &SpherePoint, tol: &Tolerance) -> u64 {
        if self.critical_points().contains(p, tol.check_eps()) {
            self.d as u64
        } else {
            1
        }
    }

    /// Local degree of `f^k` at `p`: the product of `deg_f` along the orbit
    /// `p, f(p), …, f^{k-1}(p)`.
    pub fn local_degree(&self, k: usize, p: &SpherePoint, tol: &Tolerance) -> u64 {
        let mut q = *p;
        let mut degree = 1u64;
        for _ in 0..k {
            degree = degree.saturating_mul(self.point_degree(&q, tol));
            q = self.eval(&q);
        }
        degree
    }

    /// All `d` preimages of `q`, listed with multiplicity.
    pub fn preimages(&self, q: &SpherePoint) -> Vec<SpherePoint> {
        let y = self.post.inverse().apply(q);
        let pre_inv = self.pre.inverse();
        let d = self.d as usize;
        let roots: Vec<SpherePoint> = match y.to_complex() {
            None => vec![SpherePoint::INFINITY; d],
            Some(r) if r == Complex64::new(0.0, 0.0) => vec![SpherePoint::ZERO; d],
            Some(r) => {
                let base = r.powf(1.0 / self.d as f64);
                (0..d)
                    .map(|j| {
                        let zeta = Complex64::from_polar(1.0, 2.0 * PI * j as f64 / self.d as f64);
                        SpherePoint::finite(base * zeta)
                    })
                    .collect()
            }
        };
        roots.iter().map(|p| pre_inv.apply(p)).collect()
    }

    /// The full fiber `f^{-k}(q)` (`d^k` points with multiplicity).
    pub fn iterate_preimages(&self, k: usize, q: &SpherePoint) -> Vec<SpherePoint> {
        let mut fiber = vec![*q];
        for _ in 0..k {
            fiber = fiber.iter().flat_map(|p| self.preimages(p)).collect();
        }
        fiber
    }
}

impl<'de> Deserialize<'de> for BicriticalMap {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct NormalForm {
            alpha: Complex64,
            beta: Complex64,
            gamma: Complex64,
            delta: Complex64,
            d: u32,
        }
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Factored { pre: MoebiusMap, d: u32, post: MoebiusMap },
            Normal { normal_form: NormalForm },
        }
        match Raw::deserialize(de)? {
            Raw::Factored { pre, d, post } => BicriticalMap::new(pre, d, post),
            Raw::Normal { normal_form: n } => {
                BicriticalMap::from_normal_form(n.alpha, n.beta, n.gamma, n.delta, n.d)
            }
        }
        .map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const I: Complex64 = Complex64::new(0.0, 1.0);

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn pt(re: f64, im: f64) -> SpherePoint {
        SpherePoint::from_re_im(re, im)
    }

    #[test]
    fn equality_ignores_the_factorization() {
        let tol = Tolerance::default();
        let a = Complex64::new(0.3, 1.1);
        let f = BicriticalMap::from_normal_form(c(1.0), c(-1.0), c(1.0), I, 3).unwrap();
        let refactored = BicriticalMap::new(
            MoebiusMap::scaling(a).compose(f.pre()),
            3,
            f.post().compose(&MoebiusMap::scaling(a.powi(-3))),
        )
        .unwrap();
        assert_ne!(f, refactored);
        assert!(f.same_map(&refactored, &tol));
        assert!(!f.same_map(&f.conjugate_by(&MoebiusMap::scaling(a)), &tol));
        assert!(!f.same_map(&BicriticalMap::from_normal_form(c(1.0), c(-1.0), c(1.0), I, 4).unwrap(), &tol));
    }

    fn close(p: &SpherePoint, q: &SpherePoint) -> bool {
        chordal_distance(p, q) < 1e-12
    }

    /// (z⁴ − 1)/(z⁴ + i)
    fn quartic() -> BicriticalMap {
        BicriticalMap::from_normal_form(c(1.0), c(-1.0), c(1.0), I, 4).unwrap()
    }

    #[test]
    fn normal_form_validation() {
        assert_eq!(
            BicriticalMap::from_normal_form(c(1.0), c(0.0), c(0.0), c(1.0), 1),
            Err(Error::BadDegree(1))
        );
        assert!(matches!(
            BicriticalMap::from_normal_form(c(1.0), c(2.0), c(2.0), c(4.0), 3),
            Err(Error::SingularCoefficients { .. })
        ));
    }

    #[test]
    fn quartic_example_values() {
        let f = quartic();
        assert!(close(&f.eval(&pt(1.0, 0.0)), &SpherePoint::ZERO));
        assert!(close(&f.eval(&pt(0.0, 1.0)), &SpherePoint::ZERO));
        let v = f.critical_values();
        assert!(v.approx_eq(&PointPair::new(pt(1.0, 0.0), pt(0.0, 1.0)), 1e-12));
        let cp = f.critical_points();
        assert!(cp.approx_eq(&PointPair::new(SpherePoint::ZERO, SpherePoint::INFINITY), 1e-12));
        let tol = Tolerance::default();
        assert!(!f.is_power_map(&tol));
        assert!(f.is_critically_coalescing(&tol));
        // f(f(1)) = f(0) = -1/i = i
        assert!(close(&f.iterate_eval(2, &pt(1.0, 0.0)), &pt(0.0, 1.0)));
    }

    #[test]
    fn reciprocal_quadratic_values() {
        // 1/(z² − 1)
        let f = BicriticalMap::from_normal_form(c(0.0), c(1.0), c(1.0), c(-1.0), 2).unwrap();
        let v = f.critical_values();
        assert!(v.approx_eq(&PointPair::new(pt(-1.0, 0.0), SpherePoint::ZERO), 1e-12));
    }

    #[test]
    fn power_map_predicates() {
        let tol = Tolerance::default();
        let f = BicriticalMap::power(5).unwrap();
        assert!(f.is_power_map(&tol));
        assert!(f.critical_values().approx_eq(&f.critical_points(), 1e-15));
        // 3/z²
        let g = BicriticalMap::from_normal_form(c(0.0), c(3.0), c(1.0), c(0.0), 2).unwrap();
        assert!(g.is_power_map(&tol));
    }

    #[test]
    fn critical_points_map_to_critical_values() {
        let h = MoebiusMap::new(c(1.0), Complex64::new(0.5, 2.0), c(-0.3), c(2.0)).unwrap();
        let f = quartic().conjugate_by(&h);
        let cp = f.critical_points();
        let v = f.critical_values();
        assert!(v.contains(&f.eval(&cp.first), 1e-12));
        assert!(v.contains(&f.eval(&cp.second), 1e-12));
        assert!(close(&f.eval(&cp.first), &f.post().apply(&SpherePoint::ZERO)));
    }

    #[test]
    fn symmetric_family_is_coalescing() {
        let tol = Tolerance::default();
        for a in [c(1.0), c(-2.0), Complex64::new(0.3, -1.7)] {
            for d in [2, 3, 4] {
                let f = BicriticalMap::from_normal_form(c(1.0), -a, c(1.0), a, d).unwrap();
                assert_eq!(f.is_critically_coalescing(&tol), d % 2 == 0, "a = {a}, d = {d}");
            }
        }
    }

    #[test]
    fn iterate_examples() {
        let sq = BicriticalMap::power(2).unwrap();
        let out = sq.iterate_eval(3, &pt(2.0, 0.0));
        assert!((out.to_complex().unwrap() - c(256.0)).norm() < 1e-9);
        assert!(close(&sq.iterate_eval(5, &SpherePoint::ONE), &SpherePoint::ONE));
    }

    #[test]
    fn local_degree_examples() {
        let tol = Tolerance::default();
        let sq = BicriticalMap::power(2).unwrap();
        assert_eq!(sq.local_degree(2, &SpherePoint::ZERO, &tol), 4);
        assert_eq!(sq.local_degree(2, &SpherePoint::ONE, &tol), 1);
        // (z² − 1)/(z² + 1): ∞ ↦ 1 ↦ 0 ↦ −1 ↦ 0, so ∞ meets C_f at steps 0 and 2.
        let g = BicriticalMap::from_normal_form(c(1.0), c(-1.0), c(1.0), c(1.0), 2).unwrap();
        assert_eq!(g.local_degree(2, &SpherePoint::INFINITY, &tol), 2);
        assert_eq!(g.local_degree(3, &SpherePoint::INFINITY, &tol), 4);
        assert_eq!(g.local_degree(2, &SpherePoint::ZERO, &tol), 2);
        assert_eq!(g.local_degree(3, &SpherePoint::ZERO, &tol), 4);
    }

    #[test]
    fn preimages_have_multiplicity() {
        let f = quartic();
        let q = pt(0.3, 0.8);
        let fiber = f.preimages(&q);
        assert_eq!(fiber.len(), 4);
        for p in &fiber {
            assert!(chordal_distance(&f.eval(p), &q) < 1e-12);
        }
        let v = f.critical_values();
        assert!(f.preimages(&v.first).iter().all(|p| close(p, &SpherePoint::ZERO)));
    }

    #[test]
    fn serde_forms() {
        let f: BicriticalMap = serde_json::from_str(
            r#"{"normal_form":{"alpha":[1,0],"beta":[-1,0],"gamma":[1,0],"delta":[0,1],"d":4}}"#,
        )
        .unwrap();
        assert_eq!(f, quartic());
        let s = serde_json::to_string(&f).unwrap();
        let back: BicriticalMap = serde_json::from_str(&s).unwrap();
        assert_eq!(back.degree(), 4);
        assert!(back.post().approx_eq(f.post(), 1e-15));
        assert!(serde_json::from_str::<BicriticalMap>(
            r#"{"normal_form":{"alpha":[1,0],"beta":[0,0],"gamma":[0,0],"delta":[1,0],"d":1}}"#
        )
        .is_err());
    }
}
