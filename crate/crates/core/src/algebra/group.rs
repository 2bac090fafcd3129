use std::f64::consts::TAU;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::quaternion::Quaternion;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupId {
    /// The circle group, realized as angles mod 2π (or `e^{iθ}` inside S³).
    Circle,
    /// Unit quaternions.
    S3,
    /// Quaternionic unitary 2×2 matrices.
    Sp2,
}

impl GroupId {
    pub fn dim(self) -> usize {
        match self {
            GroupId::Circle => 1,
            GroupId::S3 => 3,
            GroupId::Sp2 => 10,
        }
    }
}

/// A 2×2 quaternionic matrix laid out as
///
/// ```text
/// | a  c |
/// | b  d |
/// ```
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QMat2 {
    pub a: Quaternion,
    pub b: Quaternion,
    pub c: Quaternion,
    pub d: Quaternion,
}

impl QMat2 {
    pub const IDENTITY: QMat2 = QMat2 {
        a: Quaternion::ONE,
        b: Quaternion::ZERO,
        c: Quaternion::ZERO,
        d: Quaternion::ONE,
    };

    pub fn new(a: Quaternion, b: Quaternion, c: Quaternion, d: Quaternion) -> Self {
        Self { a, b, c, d }
    }

    pub fn mul(&self, o: &QMat2) -> QMat2 {
        QMat2 {
            a: self.a * o.a + self.c * o.b,
            b: self.b * o.a + self.d * o.b,
            c: self.a * o.c + self.c * o.d,
            d: self.b * o.c + self.d * o.d,
        }
    }

    /// Quaternionic conjugate transpose, the inverse on Sp(2).
    pub fn adjoint(&self) -> QMat2 {
        QMat2 {
            a: self.a.conj(),
            b: self.c.conj(),
            c: self.b.conj(),
            d: self.d.conj(),
        }
    }

    pub fn to_array(&self) -> [f64; 16] {
        let mut out = [0.0; 16];
        for (k, q) in [self.a, self.b, self.c, self.d].iter().enumerate() {
            out[4 * k..4 * k + 4].copy_from_slice(&q.to_array());
        }
        out
    }

    pub fn distance(&self, o: &QMat2) -> f64 {
        ((self.a - o.a).norm_sqr()
            + (self.b - o.b).norm_sqr()
            + (self.c - o.c).norm_sqr()
            + (self.d - o.d).norm_sqr())
        .sqrt()
    }

    /// Largest violation of the Sp(2) constraints: unit rows and `a b̄ + c d̄ = 0`.
    pub fn sp2_defect(&self) -> f64 {
        let r1 = (self.a.norm_sqr() + self.c.norm_sqr()).sqrt();
        let r2 = (self.b.norm_sqr() + self.d.norm_sqr()).sqrt();
        let cross = (self.a * self.b.conj() + self.c * self.d.conj()).norm();
        (r1 - 1.0).abs().max((r2 - 1.0).abs()).max(cross)
    }

    /// Re-orthonormalizes the rows (quaternionic Gram–Schmidt).
    pub fn renormalize(&self) -> QMat2 {
        let n1 = (self.a.norm_sqr() + self.c.norm_sqr()).sqrt();
        let (a, c) = (self.a.scale(1.0 / n1), self.c.scale(1.0 / n1));
        // h(r1, r2) = a b̄ + c d̄; subtracting h̄ r1 from r2 clears it.
        let h = a * self.b.conj() + c * self.d.conj();
        let hb = h.conj();
        let b = self.b - hb * a;
        let d = self.d - hb * c;
        let n2 = (b.norm_sqr() + d.norm_sqr()).sqrt();
        QMat2 { a, b: b.scale(1.0 / n2), c, d: d.scale(1.0 / n2) }
    }

    /// Completes a unit first column `(a, b)` to an element of Sp(2).
    pub fn complete_column(a: Quaternion, b: Quaternion) -> QMat2 {
        if a.norm_sqr() >= b.norm_sqr() {
            let c = -(a * b.conj() * a).scale(1.0 / a.norm_sqr());
            QMat2 { a, b, c, d: a }
        } else {
            let d = -(b * a.conj() * b).scale(1.0 / b.norm_sqr());
            QMat2 { a, b, c: b, d }
        }
    }

    pub fn random_sp2<R: Rng + ?Sized>(rng: &mut R) -> QMat2 {
        let g = [Quaternion::random_gaussian(rng), Quaternion::random_gaussian(rng)];
        let n = (g[0].norm_sqr() + g[1].norm_sqr()).sqrt();
        let base = QMat2::complete_column(g[0].scale(1.0 / n), g[1].scale(1.0 / n));
        let q = Quaternion::random_unit(rng);
        QMat2 { c: base.c * q, d: base.d * q, ..base }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "group", rename_all = "kebab-case")]
pub enum GroupElement {
    Circle { angle: f64 },
    S3 { q: Quaternion },
    Sp2 { m: QMat2 },
}

impl GroupElement {
    pub fn circle(angle: f64) -> Self {
        GroupElement::Circle { angle: angle.rem_euclid(TAU) }
    }

    pub fn unit(q: Quaternion) -> Self {
        GroupElement::S3 { q: q.normalize() }
    }

    pub fn sp2(m: QMat2) -> Self {
        GroupElement::Sp2 { m }
    }

    pub fn group(&self) -> GroupId {
        match self {
            GroupElement::Circle { .. } => GroupId::Circle,
            GroupElement::S3 { .. } => GroupId::S3,
            GroupElement::Sp2 { .. } => GroupId::Sp2,
        }
    }

    pub fn identity(group: GroupId) -> Self {
        match group {
            GroupId::Circle => GroupElement::Circle { angle: 0.0 },
            GroupId::S3 => GroupElement::S3 { q: Quaternion::ONE },
            GroupId::Sp2 => GroupElement::Sp2 { m: QMat2::IDENTITY },
        }
    }

    pub fn inverse(&self) -> Self {
        match self {
            GroupElement::Circle { angle } => GroupElement::circle(-angle),
            GroupElement::S3 { q } => GroupElement::S3 { q: q.conj() },
            GroupElement::Sp2 { m } => GroupElement::Sp2 { m: m.adjoint() },
        }
    }

    /// Unit quaternion carried by a circle or S³ element; circle elements map to `e^{iθ}`.
    pub fn as_quaternion(&self) -> Option<Quaternion> {
        match self {
            GroupElement::Circle { angle } => Some(Quaternion::circle(*angle)),
            GroupElement::S3 { q } => Some(*q),
            GroupElement::Sp2 { .. } => None,
        }
    }

    /// Circle angle, or `None` for non-circle elements.
    pub fn angle(&self) -> Option<f64> {
        match self {
            GroupElement::Circle { angle } => Some(*angle),
            _ => None,
        }
    }

    /// Distance from the identity in the ambient embedding (chordal for the circle).
    pub fn distance_to_identity(&self) -> f64 {
        self.distance(&GroupElement::identity(self.group()))
    }

    pub fn distance(&self, other: &GroupElement) -> f64 {
        match (self, other) {
            (GroupElement::Circle { angle: a }, GroupElement::Circle { angle: b }) => {
                Quaternion::circle(*a).distance(Quaternion::circle(*b))
            }
            (GroupElement::S3 { q: a }, GroupElement::S3 { q: b }) => a.distance(*b),
            (GroupElement::Sp2 { m: a }, GroupElement::Sp2 { m: b }) => a.distance(b),
            _ => f64::INFINITY,
        }
    }

    /// Violation of the group's membership constraints.
    pub fn membership_defect(&self) -> f64 {
        match self {
            GroupElement::Circle { angle } => {
                if (0.0..TAU).contains(angle) {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            GroupElement::S3 { q } => (q.norm() - 1.0).abs(),
            GroupElement::Sp2 { m } => m.sp2_defect(),
        }
    }

    pub fn random<R: Rng + ?Sized>(group: GroupId, rng: &mut R) -> Self {
        match group {
            GroupId::Circle => GroupElement::circle(rng.gen_range(0.0..TAU)),
            GroupId::S3 => GroupElement::S3 { q: Quaternion::random_unit(rng) },
            GroupId::Sp2 => GroupElement::Sp2 { m: QMat2::random_sp2(rng) },
        }
    }
}

/// Group product with renormalization onto the group.
pub fn group_mul(a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
    match (a, b) {
        (GroupElement::Circle { angle: x }, GroupElement::Circle { angle: y }) => {
            Ok(GroupElement::circle(x + y))
        }
        (GroupElement::S3 { q: p }, GroupElement::S3 { q }) => {
            Ok(GroupElement::S3 { q: (*p * *q).normalize() })
        }
        (GroupElement::Sp2 { m: p }, GroupElement::Sp2 { m: q }) => {
            Ok(GroupElement::Sp2 { m: p.mul(q).renormalize() })
        }
        _ => Err(Error::GroupMismatch(a.group(), b.group())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn circle_angles_add_mod_tau() {
        let p = group_mul(&GroupElement::circle(5.0), &GroupElement::circle(2.0)).unwrap();
        assert!((p.angle().unwrap() - (7.0 - TAU)).abs() < 1e-15);
    }

    #[test]
    fn sp2_identity_is_neutral() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = GroupElement::random(GroupId::Sp2, &mut rng);
        let p = group_mul(&GroupElement::identity(GroupId::Sp2), &a).unwrap();
        assert!(p.distance(&a) < 1e-14);
    }

    #[test]
    fn products_stay_on_group() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for group in [GroupId::Circle, GroupId::S3, GroupId::Sp2] {
            let mut acc = GroupElement::identity(group);
            for _ in 0..1000 {
                let g = GroupElement::random(group, &mut rng);
                assert!(g.membership_defect() <= 1e-12);
                acc = group_mul(&acc, &g).unwrap();
                assert!(acc.membership_defect() <= 1e-12, "{group:?}: {}", acc.membership_defect());
            }
        }
    }

    #[test]
    fn mismatched_groups_are_rejected() {
        let e = group_mul(&GroupElement::circle(0.1), &GroupElement::identity(GroupId::S3));
        assert!(matches!(e, Err(Error::GroupMismatch(GroupId::Circle, GroupId::S3))));
    }

    #[test]
    fn completed_column_is_symplectic() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..200 {
            let m = QMat2::random_sp2(&mut rng);
            assert!(m.sp2_defect() < 1e-13);
            let prod = m.mul(&m.adjoint());
            assert!(prod.distance(&QMat2::IDENTITY) < 1e-13);
        }
        // a = 0 forces the second branch
        let m = QMat2::complete_column(Quaternion::ZERO, Quaternion::J);
        assert!(m.sp2_defect() < 1e-15);
    }
}
