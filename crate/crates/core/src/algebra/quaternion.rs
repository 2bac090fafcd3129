use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;
use serde::{Deserialize, Serialize};

/// A real quaternion `w + xi + yj + zk`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    pub fn real(w: f64) -> Self {
        Self::new(w, 0.0, 0.0, 0.0)
    }

    /// Pure quaternion from a vector in R³.
    pub fn pure(v: [f64; 3]) -> Self {
        Self::new(0.0, v[0], v[1], v[2])
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn imag(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }

    pub fn conj(self) -> Self {
        quat_conj(self)
    }

    pub fn dot(self, other: Self) -> f64 {
        self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm_sqr(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn scale(self, s: f64) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    /// Returns `self / |self|`; the zero quaternion is returned unchanged.
    pub fn normalize(self) -> Self {
        let n = self.norm();
        if n == 0.0 {
            self
        } else {
            self.scale(1.0 / n)
        }
    }

    pub fn inverse(self) -> Self {
        self.conj().scale(1.0 / self.norm_sqr())
    }

    /// `exp(angle * axis)` for a unit pure quaternion `axis`.
    pub fn exp_axis(axis: [f64; 3], angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self::new(c, s * axis[0], s * axis[1], s * axis[2])
    }

    /// The unit quaternion `e^{iθ}` of the circle subgroup.
    pub fn circle(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::new(c, s, 0.0, 0.0)
    }

    /// Rotates the pure quaternion `v` by conjugation: `q v q̄`.
    pub fn conjugate_pure(self, v: [f64; 3]) -> [f64; 3] {
        (self * Quaternion::pure(v) * self.conj()).imag()
    }

    pub fn distance(self, other: Self) -> f64 {
        (self - other).norm()
    }

    /// Uniform sample on the unit sphere S³.
    pub fn random_unit<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let q = Self::random_gaussian(rng);
            let n = q.norm();
            if n > 1e-8 {
                return q.scale(1.0 / n);
            }
        }
    }

    /// Four independent standard normal components (Box–Muller).
    pub fn random_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut g = [0.0; 4];
        for pair in g.chunks_mut(2) {
            let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
            let u2: f64 = rng.gen();
            let r = (-2.0 * u1.ln()).sqrt();
            let t = std::f64::consts::TAU * u2;
            pair[0] = r * t.cos();
            pair[1] = r * t.sin();
        }
        Self::from_array(g)
    }
}

/// Hamilton product.
pub fn quat_mul(p: Quaternion, q: Quaternion) -> Quaternion {
    Quaternion::new(
        p.w * q.w - p.x * q.x - p.y * q.y - p.z * q.z,
        p.w * q.x + p.x * q.w + p.y * q.z - p.z * q.y,
        p.w * q.y - p.x * q.z + p.y * q.w + p.z * q.x,
        p.w * q.z + p.x * q.y - p.y * q.x + p.z * q.w,
    )
}

pub fn quat_conj(q: Quaternion) -> Quaternion {
    Quaternion::new(q.w, -q.x, -q.y, -q.z)
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, rhs: Quaternion) -> Quaternion {
        quat_mul(self, rhs)
    }
}

impl Mul<f64> for Quaternion {
    type Output = Quaternion;
    fn mul(self, rhs: f64) -> Quaternion {
        self.scale(rhs)
    }
}

impl Add for Quaternion {
    type Output = Quaternion;
    fn add(self, rhs: Quaternion) -> Quaternion {
        Quaternion::new(self.w + rhs.w, self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Quaternion {
    type Output = Quaternion;
    fn sub(self, rhs: Quaternion) -> Quaternion {
        Quaternion::new(self.w - rhs.w, self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Neg for Quaternion {
    type Output = Quaternion;
    fn neg(self) -> Quaternion {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn close(p: Quaternion, q: Quaternion, tol: f64) -> bool {
        (p - q).norm() <= tol
    }

    #[test]
    fn identity_and_defining_relations() {
        let q = Quaternion::new(0.3, -1.2, 2.5, 0.7);
        assert_eq!(quat_mul(Quaternion::ONE, q), q);
        assert_eq!(Quaternion::I * Quaternion::J, Quaternion::K);
        assert_eq!(Quaternion::J * Quaternion::K, Quaternion::I);
        assert_eq!(Quaternion::K * Quaternion::I, Quaternion::J);
        assert_eq!(Quaternion::I * Quaternion::I, Quaternion::real(-1.0));
    }

    #[test]
    fn hand_expanded_product() {
        // (1 + i)(1 + j) = 1 + j + i + ij = 1 + i + j + k
        let p = Quaternion::new(1.0, 1.0, 0.0, 0.0);
        let q = Quaternion::new(1.0, 0.0, 1.0, 0.0);
        assert_eq!(p * q, Quaternion::new(1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn conjugation_examples() {
        assert_eq!(quat_conj(Quaternion::ONE), Quaternion::ONE);
        assert_eq!(
            quat_conj(Quaternion::new(0.0, 1.0, 2.0, 3.0)),
            Quaternion::new(0.0, -1.0, -2.0, -3.0)
        );
    }

    #[test]
    fn algebra_laws_on_random_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..1000 {
            let p = Quaternion::random_gaussian(&mut rng);
            let q = Quaternion::random_gaussian(&mut rng);
            let r = Quaternion::random_gaussian(&mut rng);
            assert!(close((p * q) * r, p * (q * r), 1e-12));
            assert!(close(p * (q + r), p * q + p * r, 1e-12));
            assert!(((p * q).norm() - p.norm() * q.norm()).abs() <= 1e-12 * (1.0 + p.norm() * q.norm()));
            assert!(close((p * q).conj(), q.conj() * p.conj(), 1e-14 * (1.0 + p.norm() * q.norm())));
        }
    }

    #[test]
    fn conjugation_by_unit_rotates() {
        let q = Quaternion::exp_axis([0.0, 0.0, 1.0], std::f64::consts::FRAC_PI_4);
        let v = q.conjugate_pure([1.0, 0.0, 0.0]);
        assert!((v[0]).abs() < 1e-15 && (v[1] - 1.0).abs() < 1e-15);
    }
}
