//! Star diagrams `M ← P → M'`: one total space with two commuting free
//! actions of the same group, and the two quotient maps.
//!
//! Three diagrams are catalogued:
//!
//! * `trivial-s2`: `P = S² × S¹`, `g⋆(x, g') = (g·x, gg')`,
//!   `g•(x, g') = (x, g'g⁻¹)`, `π(x, g') = x`, `π'(x, g') = g'⁻¹x`, where the
//!   circle rotates S² about the z-axis.
//! * `hopf`: `P = S³`, the circle `e^{iθ}` acting by `p ↦ p q̄` (•) and
//!   `p ↦ q p` (⋆); `π(p) = p i p̄` and `π'(p) = p̄ i p`.
//! * `gm`: `P = Sp(2)`, S³ acting by `(a, c q̄; b, d q̄)` (•) and
//!   `(q a q̄, q c; q b q̄, q d)` (⋆). `π` takes the first column in S⁷; `π'`
//!   returns the star-normal form of the matrix, a chart on the exotic sphere.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{GroupElement, GroupId, QMat2, Quaternion};
use crate::error::{Error, Result};

/// Residual tolerance for fixed points and well-definedness checks.
pub const FIXED_POINT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DiagramId {
    #[serde(rename = "trivial-s2")]
    TrivialS2,
    #[serde(rename = "hopf")]
    Hopf,
    #[serde(rename = "gm")]
    Gm,
}

impl DiagramId {
    pub const ALL: [DiagramId; 3] = [DiagramId::TrivialS2, DiagramId::Hopf, DiagramId::Gm];

    pub fn as_str(self) -> &'static str {
        match self {
            DiagramId::TrivialS2 => "trivial-s2",
            DiagramId::Hopf => "hopf",
            DiagramId::Gm => "gm",
        }
    }
}

impl fmt::Display for DiagramId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for DiagramId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "trivial-s2" => Ok(DiagramId::TrivialS2),
            "hopf" => Ok(DiagramId::Hopf),
            "gm" => Ok(DiagramId::Gm),
            other => Err(Error::UnknownId(other.to_string())),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub id: DiagramId,
    pub description: String,
    pub group: GroupId,
    pub total_space: String,
    pub quotient_m: String,
    pub quotient_m_prime: String,
    pub cohomogeneity_one: bool,
}

/// Which of the two actions on `P`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    Bullet,
    Star,
}

/// A point of a catalogued total space.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Point {
    /// `(x, g') ∈ S² × S¹`, with `x` a unit vector and `g'` an angle.
    Product { x: [f64; 3], angle: f64 },
    /// A unit quaternion.
    Quat(Quaternion),
    /// An element of Sp(2).
    Sp2(QMat2),
}

impl Point {
    pub fn distance(&self, other: &Point) -> f64 {
        match (self, other) {
            (Point::Product { x, angle }, Point::Product { x: y, angle: b }) => {
                dist(x, y) + Quaternion::circle(*angle).distance(Quaternion::circle(*b))
            }
            (Point::Quat(p), Point::Quat(q)) => p.distance(*q),
            (Point::Sp2(a), Point::Sp2(b)) => a.distance(b),
            _ => f64::INFINITY,
        }
    }

    pub fn membership_defect(&self) -> f64 {
        match self {
            Point::Product { x, angle } => {
                let r = norm(x);
                let ang = if (0.0..std::f64::consts::TAU).contains(angle) { 0.0 } else { f64::INFINITY };
                (r - 1.0).abs() + ang
            }
            Point::Quat(q) => (q.norm() - 1.0).abs(),
            Point::Sp2(m) => m.sp2_defect(),
        }
    }
}

/// A point of a quotient `M` or `M'`, as coordinates in its ambient chart.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BasePoint(pub Vec<f64>);

impl BasePoint {
    pub fn distance(&self, other: &BasePoint) -> f64 {
        dist(&self.0, &other.0)
    }
}

/// A catalogued star diagram. All operations are pure.
#[derive(Clone, Debug)]
pub struct StarDiagram {
    pub entry: CatalogEntry,
}

pub fn catalog_entries() -> Vec<CatalogEntry> {
    DiagramId::ALL.iter().map(|&id| entry_for(id)).collect()
}

fn entry_for(id: DiagramId) -> CatalogEntry {
    match id {
        DiagramId::TrivialS2 => CatalogEntry {
            id,
            description: "S² × S¹ with the circle rotating S²; both quotients are S²".into(),
            group: GroupId::Circle,
            total_space: "S2 x S1".into(),
            quotient_m: "S2".into(),
            quotient_m_prime: "S2".into(),
            cohomogeneity_one: true,
        },
        DiagramId::Hopf => CatalogEntry {
            id,
            description: "S³ with left and right multiplication by the circle e^{iθ}; both quotients are S²"
                .into(),
            group: GroupId::Circle,
            total_space: "S3".into(),
            quotient_m: "S2".into(),
            quotient_m_prime: "S2".into(),
            cohomogeneity_one: true,
        },
        DiagramId::Gm => CatalogEntry {
            id,
            description: "Sp(2) with the principal S³ action and the Gromoll–Meyer star action; \
                          quotients are S⁷ and the Gromoll–Meyer exotic sphere"
                .into(),
            group: GroupId::S3,
            total_space: "Sp(2)".into(),
            quotient_m: "S7".into(),
            quotient_m_prime: "Sigma7_GM".into(),
            cohomogeneity_one: false,
        },
    }
}

pub fn catalog(id: &str) -> Result<StarDiagram> {
    let id: DiagramId = id.parse()?;
    Ok(StarDiagram::new(id))
}

impl StarDiagram {
    pub fn new(id: DiagramId) -> Self {
        Self { entry: entry_for(id) }
    }

    pub fn id(&self) -> DiagramId {
        self.entry.id
    }

    pub fn group(&self) -> GroupId {
        self.entry.group
    }

    pub fn act(&self, which: Action, g: &GroupElement, p: &Point) -> Point {
        match which {
            Action::Bullet => self.bullet(g, p),
            Action::Star => self.star(g, p),
        }
    }

    /// The principal action •, whose quotient is `M`.
    pub fn bullet(&self, g: &GroupElement, p: &Point) -> Point {
        match (self.id(), p) {
            (DiagramId::TrivialS2, Point::Product { x, angle }) => {
                let a = g.angle().expect("circle element");
                Point::Product { x: *x, angle: (angle - a).rem_euclid(std::f64::consts::TAU) }
            }
            (DiagramId::Hopf, Point::Quat(p)) => {
                let q = g.as_quaternion().expect("circle element");
                Point::Quat(*p * q.conj())
            }
            (DiagramId::Gm, Point::Sp2(m)) => {
                let qb = g.as_quaternion().expect("S3 element").conj();
                Point::Sp2(QMat2 { c: m.c * qb, d: m.d * qb, ..*m })
            }
            _ => panic!("point does not belong to {}", self.id()),
        }
    }

    /// The star action ⋆, whose quotient is `M'`.
    pub fn star(&self, g: &GroupElement, p: &Point) -> Point {
        match (self.id(), p) {
            (DiagramId::TrivialS2, Point::Product { x, angle }) => {
                let a = g.angle().expect("circle element");
                Point::Product {
                    x: rotate_z(x, a),
                    angle: (angle + a).rem_euclid(std::f64::consts::TAU),
                }
            }
            (DiagramId::Hopf, Point::Quat(p)) => {
                let q = g.as_quaternion().expect("circle element");
                Point::Quat(q * *p)
            }
            (DiagramId::Gm, Point::Sp2(m)) => {
                let q = g.as_quaternion().expect("S3 element");
                Point::Sp2(gm_star(q, m))
            }
            _ => panic!("point does not belong to {}", self.id()),
        }
    }

    /// π : P → M, invariant under •.
    pub fn proj_bullet(&self, p: &Point) -> BasePoint {
        match p {
            Point::Product { x, .. } => BasePoint(x.to_vec()),
            Point::Quat(p) => BasePoint(p.conjugate_pure([1.0, 0.0, 0.0]).to_vec()),
            Point::Sp2(m) => {
                let mut v = m.a.to_array().to_vec();
                v.extend_from_slice(&m.b.to_array());
                BasePoint(v)
            }
        }
    }

    /// π' : P → M', invariant under ⋆.
    pub fn proj_star(&self, p: &Point) -> BasePoint {
        match p {
            Point::Product { x, angle } => BasePoint(rotate_z(x, -angle).to_vec()),
            Point::Quat(p) => BasePoint(p.conj().conjugate_pure([1.0, 0.0, 0.0]).to_vec()),
            Point::Sp2(m) => BasePoint(gm_star_normal_form(m).to_array().to_vec()),
        }
    }

    pub fn project(&self, which: Action, p: &Point) -> BasePoint {
        match which {
            Action::Bullet => self.proj_bullet(p),
            Action::Star => self.proj_star(p),
        }
    }

    /// A point of `P` over `x ∈ M` (closed-form section of π).
    pub fn section_bullet(&self, x: &BasePoint) -> Point {
        match self.id() {
            DiagramId::TrivialS2 => Point::Product { x: vec3(&x.0), angle: 0.0 },
            DiagramId::Hopf => Point::Quat(hopf_lift(vec3(&x.0))),
            DiagramId::Gm => {
                let a = Quaternion::from_array([x.0[0], x.0[1], x.0[2], x.0[3]]);
                let b = Quaternion::from_array([x.0[4], x.0[5], x.0[6], x.0[7]]);
                Point::Sp2(QMat2::complete_column(a, b))
            }
        }
    }

    /// A point of `P` over `y ∈ M'` (closed-form section of π').
    pub fn section_star(&self, y: &BasePoint) -> Point {
        match self.id() {
            DiagramId::TrivialS2 => Point::Product { x: vec3(&y.0), angle: 0.0 },
            DiagramId::Hopf => Point::Quat(hopf_lift(vec3(&y.0)).conj()),
            DiagramId::Gm => {
                let q = |k: usize| Quaternion::from_array([y.0[k], y.0[k + 1], y.0[k + 2], y.0[k + 3]]);
                Point::Sp2(QMat2::new(q(0), q(4), q(8), q(12)))
            }
        }
    }

    /// The action induced on `M` by ⋆.
    pub fn residual_on_m(&self, g: &GroupElement, x: &BasePoint) -> BasePoint {
        self.proj_bullet(&self.star(g, &self.section_bullet(x)))
    }

    /// The action induced on `M'` by •.
    pub fn residual_on_m_prime(&self, g: &GroupElement, y: &BasePoint) -> BasePoint {
        self.proj_star(&self.bullet(g, &self.section_star(y)))
    }

    pub fn random_point<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        match self.id() {
            DiagramId::TrivialS2 => {
                let q = Quaternion::random_unit(rng);
                Point::Product {
                    x: normalize3([q.x, q.y, q.z]),
                    angle: rng.gen_range(0.0..std::f64::consts::TAU),
                }
            }
            DiagramId::Hopf => Point::Quat(Quaternion::random_unit(rng)),
            DiagramId::Gm => Point::Sp2(QMat2::random_sp2(rng)),
        }
    }

    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R) -> GroupElement {
        GroupElement::random(self.group(), rng)
    }
}

fn gm_star(q: Quaternion, m: &QMat2) -> QMat2 {
    let qb = q.conj();
    QMat2 { a: q * m.a * qb, b: q * m.b * qb, c: q * m.c, d: q * m.d }
}

/// Star-orbit representative: `q` is chosen so that `q c` (or `q d` when `c`
/// is small) is real and positive. `|c|` is constant on G×G orbits, so the
/// chart choice never changes along an orbit.
fn gm_star_normal_form(m: &QMat2) -> QMat2 {
    let pivot = if m.c.norm() >= 1e-3 { m.c } else { m.d };
    let q = pivot.conj().normalize();
    gm_star(q, m)
}

/// A unit quaternion `p` with `p i p̄ = x`.
fn hopf_lift(x: [f64; 3]) -> Quaternion {
    let xq = Quaternion::pure(normalize3(x));
    if x[0] > -0.5 {
        (Quaternion::ONE - xq * Quaternion::I).normalize()
    } else {
        // rotate i to -i with j, then -i to x
        (Quaternion::ONE + xq * Quaternion::I).normalize() * Quaternion::J
    }
}

pub(crate) fn rotate_z(x: &[f64; 3], a: f64) -> [f64; 3] {
    let (s, c) = a.sin_cos();
    [c * x[0] - s * x[1], s * x[0] + c * x[1], x[2]]
}

fn vec3(v: &[f64]) -> [f64; 3] {
    [v[0], v[1], v[2]]
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

fn normalize3(v: [f64; 3]) -> [f64; 3] {
    let n = norm(&v);
    [v[0] / n, v[1] / n, v[2] / n]
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Largest distance between `star(g, bullet(h, p))` and `bullet(h, star(g, p))`
/// over `samples` random triples.
pub fn check_commute(d: &StarDiagram, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let p = d.random_point(&mut rng);
            let g = d.random_element(&mut rng);
            let h = d.random_element(&mut rng);
            let one = d.star(&g, &d.bullet(&h, &p));
            let two = d.bullet(&h, &d.star(&g, &p));
            one.distance(&two)
        })
        .fold(0.0, f64::max)
}

/// Largest membership defect of `P` after applying either action to random points.
pub fn check_membership(d: &StarDiagram, samples: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = (0.0f64, 0.0f64);
    for _ in 0..samples {
        let p = d.random_point(&mut rng);
        let g = d.random_element(&mut rng);
        worst.0 = worst.0.max(d.bullet(&g, &p).membership_defect());
        worst.1 = worst.1.max(d.star(&g, &p).membership_defect());
    }
    worst
}

/// Largest change of π under • and of π' under ⋆ on random samples.
pub fn check_projection_invariance(d: &StarDiagram, samples: usize, seed: u64) -> (f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = (0.0f64, 0.0f64);
    for _ in 0..samples {
        let p = d.random_point(&mut rng);
        let g = d.random_element(&mut rng);
        worst.0 = worst.0.max(d.proj_bullet(&d.bullet(&g, &p)).distance(&d.proj_bullet(&p)));
        worst.1 = worst.1.max(d.proj_star(&d.star(&g, &p)).distance(&d.proj_star(&p)));
    }
    worst
}

/// A finite net on the structure group that contains the identity.
///
/// Circle: `grid` equally spaced angles. S³: the identity, `-1`, and
/// `exp(α X)` for `grid` quasi-uniform unit directions `X` and
/// `α ∈ {π/4, π/2, 3π/4}`.
pub fn group_net(group: GroupId, grid: usize) -> Vec<GroupElement> {
    let grid = grid.max(1);
    match group {
        GroupId::Circle => (0..grid)
            .map(|j| GroupElement::circle(std::f64::consts::TAU * j as f64 / grid as f64))
            .collect(),
        GroupId::S3 | GroupId::Sp2 => {
            let mut net = vec![GroupElement::identity(GroupId::S3), GroupElement::unit(Quaternion::real(-1.0))];
            for dir in fibonacci_directions(grid) {
                for k in 1..=3 {
                    let alpha = std::f64::consts::FRAC_PI_4 * k as f64;
                    net.push(GroupElement::unit(Quaternion::exp_axis(dir, alpha)));
                }
            }
            net
        }
    }
}

fn fibonacci_directions(n: usize) -> Vec<[f64; 3]> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|k| {
            let z = 1.0 - (2.0 * k as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * k as f64;
            [r * phi.cos(), r * phi.sin(), z]
        })
        .collect()
}

/// Elements of the group net fixing `p` under the chosen action.
pub fn isotropy_probe(d: &StarDiagram, which: Action, p: &Point, grid: usize) -> Vec<GroupElement> {
    group_net(d.group(), grid)
        .into_iter()
        .filter(|g| d.act(which, g, p).distance(p) < FIXED_POINT_TOL)
        .collect()
}

/// Isotropy dimensions of the residual actions at `π(p) ∈ M` and `π'(p) ∈ M'`.
///
/// The rank of the infinitesimal action (central differences along a basis of
/// the Lie algebra) gives the candidate dimension; each null direction must be
/// confirmed by finite elements of the net that fix the point to within
/// [`FIXED_POINT_TOL`].
pub fn isotropy_compare(d: &StarDiagram, p: &Point, grid: usize) -> (usize, usize) {
    let x = d.proj_bullet(p);
    let y = d.proj_star(p);
    let on_m = |g: &GroupElement| d.residual_on_m(g, &x);
    let on_m_prime = |g: &GroupElement| d.residual_on_m_prime(g, &y);
    (
        isotropy_dimension(d.group(), &x, on_m, grid),
        isotropy_dimension(d.group(), &y, on_m_prime, grid),
    )
}

fn isotropy_dimension<F>(group: GroupId, x: &BasePoint, act: F, grid: usize) -> usize
where
    F: Fn(&GroupElement) -> BasePoint,
{
    let fixes = |g: &GroupElement| act(g).distance(x) < FIXED_POINT_TOL;
    match group {
        GroupId::Circle => {
            let net = group_net(group, grid.max(4));
            usize::from(net.iter().all(fixes))
        }
        GroupId::S3 | GroupId::Sp2 => {
            if group_net(group, grid).iter().all(fixes) {
                return 3;
            }
            let h = 1e-5;
            let basis = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
            let gens: Vec<Vec<f64>> = basis
                .iter()
                .map(|&axis| {
                    let plus = act(&GroupElement::unit(Quaternion::exp_axis(axis, h)));
                    let minus = act(&GroupElement::unit(Quaternion::exp_axis(axis, -h)));
                    plus.0.iter().zip(&minus.0).map(|(a, b)| (a - b) / (2.0 * h)).collect()
                })
                .collect();
            let mut gram = [[0.0; 3]; 3];
            for i in 0..3 {
                for j in 0..3 {
                    gram[i][j] = gens[i].iter().zip(&gens[j]).map(|(a, b)| a * b).sum();
                }
            }
            let (vals, vecs) = jacobi_eigen3(gram);
            let scale = vals.iter().cloned().fold(0.0, f64::max).max(1.0);
            let mut dim = 0;
            for k in 0..3 {
                if vals[k] < 1e-12 * scale {
                    let dir = [vecs[0][k], vecs[1][k], vecs[2][k]];
                    let confirmed = (1..=3).all(|m| {
                        let alpha = std::f64::consts::FRAC_PI_4 * m as f64;
                        fixes(&GroupElement::unit(Quaternion::exp_axis(normalize3(dir), alpha)))
                    });
                    if confirmed {
                        dim += 1;
                    }
                }
            }
            dim
        }
    }
}

/// Eigen-decomposition of a symmetric 3×3 matrix by cyclic Jacobi rotations.
/// Eigenvectors are the columns of the returned matrix.
fn jacobi_eigen3(mut a: [[f64; 3]; 3]) -> ([f64; 3], [[f64; 3]; 3]) {
    let mut v = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    for _ in 0..50 {
        let off = a[0][1].abs() + a[0][2].abs() + a[1][2].abs();
        if off < 1e-300 {
            break;
        }
        for (p, q) in [(0, 1), (0, 2), (1, 2)] {
            if a[p][q].abs() < 1e-300 {
                continue;
            }
            let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
            let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
            let t = sign / (theta.abs() + (theta * theta + 1.0).sqrt());
            let c = 1.0 / (t * t + 1.0).sqrt();
            let s = t * c;
            for k in 0..3 {
                let (akp, akq) = (a[k][p], a[k][q]);
                a[k][p] = c * akp - s * akq;
                a[k][q] = s * akp + c * akq;
            }
            for k in 0..3 {
                let (apk, aqk) = (a[p][k], a[q][k]);
                a[p][k] = c * apk - s * aqk;
                a[q][k] = s * apk + c * aqk;
            }
            for row in v.iter_mut() {
                let (vp, vq) = (row[p], row[q]);
                row[p] = c * vp - s * vq;
                row[q] = s * vp + c * vq;
            }
        }
    }
    ([a[0][0], a[1][1], a[2][2]], v)
}

/// Direction of transport across the diagram.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Transport {
    /// Invariant functions on `M` to invariant functions on `M'`.
    ToPrime,
    /// Invariant functions on `M'` to invariant functions on `M`.
    FromPrime,
}

/// An invariant function carried across a star diagram.
pub struct Transported<F> {
    diagram: StarDiagram,
    direction: Transport,
    f: F,
}

impl<F: Fn(&BasePoint) -> f64> Transported<F> {
    /// Evaluates by lifting through the closed-form section and projecting.
    pub fn eval(&self, target: &BasePoint) -> f64 {
        let d = &self.diagram;
        match self.direction {
            Transport::ToPrime => (self.f)(&d.proj_bullet(&d.section_star(target))),
            Transport::FromPrime => (self.f)(&d.proj_star(&d.section_bullet(target))),
        }
    }

    pub fn into_fn(self) -> impl Fn(&BasePoint) -> f64 {
        move |x| self.eval(x)
    }
}

const TRANSPORT_SAMPLES: usize = 64;
const TRANSPORT_SEED: u64 = 0x5eed_7a11;

/// Carries a G-invariant function across the diagram: `f'(π'(p)) = f(π(p))`
/// (or the reverse for [`Transport::FromPrime`]).
///
/// Invariance of `f` and well-definedness of the result are checked on a fixed
/// set of samples.
pub fn transport_invariant<F>(d: &StarDiagram, f: F, direction: Transport) -> Result<Transported<F>>
where
    F: Fn(&BasePoint) -> f64,
{
    let mut rng = ChaCha8Rng::seed_from_u64(TRANSPORT_SEED);
    let mut not_inv = 0.0f64;
    let mut ill = 0.0f64;
    for _ in 0..TRANSPORT_SAMPLES {
        let p = d.random_point(&mut rng);
        let g = d.random_element(&mut rng);
        let h = d.random_element(&mut rng);
        match direction {
            Transport::ToPrime => {
                let x = d.proj_bullet(&p);
                not_inv = not_inv.max(((f)(&d.residual_on_m(&g, &x)) - (f)(&x)).abs());
                let y = d.proj_star(&p);
                let lift = d.section_star(&y);
                let other = d.star(&h, &lift);
                ill = ill.max(((f)(&d.proj_bullet(&lift)) - (f)(&d.proj_bullet(&other))).abs());
            }
            Transport::FromPrime => {
                let y = d.proj_star(&p);
                not_inv = not_inv.max(((f)(&d.residual_on_m_prime(&g, &y)) - (f)(&y)).abs());
                let x = d.proj_bullet(&p);
                let lift = d.section_bullet(&x);
                let other = d.bullet(&h, &lift);
                ill = ill.max(((f)(&d.proj_star(&lift)) - (f)(&d.proj_star(&other))).abs());
            }
        }
    }
    if not_inv > FIXED_POINT_TOL {
        return Err(Error::NotInvariant { defect: not_inv });
    }
    if ill > FIXED_POINT_TOL {
        return Err(Error::IllDefined { defect: ill });
    }
    Ok(Transported { diagram: d.clone(), direction, f })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_ids_round_trip() {
        for id in DiagramId::ALL {
            assert_eq!(catalog(id.as_str()).unwrap().id(), id);
        }
        assert!(matches!(catalog("nope"), Err(Error::UnknownId(_))));
        let flags: Vec<bool> = catalog_entries().iter().map(|e| e.cohomogeneity_one).collect();
        assert_eq!(flags, vec![true, true, false]);
    }

    #[test]
    fn identity_acts_trivially_on_gm() {
        let d = catalog("gm").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let e = GroupElement::identity(GroupId::S3);
        for _ in 0..20 {
            let p = d.random_point(&mut rng);
            assert!(d.bullet(&e, &p).distance(&p) < 1e-15);
            assert!(d.star(&e, &p).distance(&p) < 1e-15);
        }
    }

    #[test]
    fn trivial_product_prime_projection_is_inverse_rotation() {
        let d = catalog("trivial-s2").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let p = d.random_point(&mut rng);
            let Point::Product { x, angle } = p else { unreachable!() };
            let y = d.proj_star(&p);
            let expected = rotate_z(&x, -angle);
            assert!(dist(&y.0, &expected) < 1e-15);
        }
    }

    #[test]
    fn commutation_residuals() {
        // only the circle coordinate is rounded differently in the two orders
        assert!(check_commute(&catalog("trivial-s2").unwrap(), 1000, 1) <= 1e-14);
        assert!(check_commute(&catalog("hopf").unwrap(), 1000, 1) <= 1e-13);
        assert!(check_commute(&catalog("gm").unwrap(), 1000, 1) <= 1e-12);
    }

    #[test]
    fn projections_are_invariant_and_sections_are_right_inverses() {
        for id in DiagramId::ALL {
            let d = StarDiagram::new(id);
            let (pb, ps) = check_projection_invariance(&d, 200, 8);
            assert!(pb < 1e-13 && ps < 1e-13, "{id}: {pb} {ps}");
            let mut rng = ChaCha8Rng::seed_from_u64(6);
            for _ in 0..100 {
                let p = d.random_point(&mut rng);
                let x = d.proj_bullet(&p);
                assert!(d.proj_bullet(&d.section_bullet(&x)).distance(&x) < 1e-13, "{id}");
                let y = d.proj_star(&p);
                assert!(d.proj_star(&d.section_star(&y)).distance(&y) < 1e-13, "{id}");
            }
        }
    }

    #[test]
    fn hopf_lift_handles_both_hemispheres() {
        for x in [[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 0.6, 0.8], [-0.6, 0.0, 0.8]] {
            let p = hopf_lift(x);
            let back = p.conjugate_pure([1.0, 0.0, 0.0]);
            assert!(dist(&back, &x) < 1e-15, "{x:?}");
        }
    }

    #[test]
    fn free_actions_have_trivial_isotropy() {
        let hopf = catalog("hopf").unwrap();
        let one = Point::Quat(Quaternion::ONE);
        let fixers = isotropy_probe(&hopf, Action::Bullet, &one, 64);
        assert_eq!(fixers.len(), 1);
        assert!(fixers[0].distance_to_identity() < 1e-15);

        let triv = catalog("trivial-s2").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..20 {
            let p = triv.random_point(&mut rng);
            assert_eq!(isotropy_probe(&triv, Action::Bullet, &p, 64).len(), 1);
            assert_eq!(isotropy_probe(&triv, Action::Star, &p, 64).len(), 1);
        }
    }

    #[test]
    fn gm_star_fixes_identity_matrix_only_for_identity() {
        let gm = catalog("gm").unwrap();
        let fixers = isotropy_probe(&gm, Action::Star, &Point::Sp2(QMat2::IDENTITY), 50);
        assert_eq!(fixers.len(), 1);
        assert!(fixers[0].distance_to_identity() < 1e-15);
    }

    #[test]
    fn isotropy_dimensions_agree() {
        let triv = catalog("trivial-s2").unwrap();
        let pole = Point::Product { x: [0.0, 0.0, 1.0], angle: 1.3 };
        assert_eq!(isotropy_compare(&triv, &pole, 32), (1, 1));
        let generic = Point::Product { x: [0.6, 0.0, 0.8], angle: 0.4 };
        assert_eq!(isotropy_compare(&triv, &generic, 32), (0, 0));

        let hopf = catalog("hopf").unwrap();
        let p = Point::Quat(Quaternion::new(0.3, 0.5, -0.2, 0.7).normalize());
        assert_eq!(isotropy_compare(&hopf, &p, 32), (0, 0));
        assert_eq!(isotropy_compare(&hopf, &Point::Quat(Quaternion::ONE), 32), (1, 1));

        let gm = catalog("gm").unwrap();
        assert_eq!(isotropy_compare(&gm, &Point::Sp2(QMat2::IDENTITY), 32), (3, 3));
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let p = gm.random_point(&mut rng);
        assert_eq!(isotropy_compare(&gm, &p, 32), (0, 0));
        // real first column with imaginary parts along one axis: circle isotropy
        let a = Quaternion::new(0.6, 0.0, 0.0, 0.0);
        let b = Quaternion::new(0.0, 0.8, 0.0, 0.0);
        let p = Point::Sp2(QMat2::complete_column(a, b));
        assert_eq!(isotropy_compare(&gm, &p, 32), (1, 1));
    }

    #[test]
    fn transport_constants_and_rejects_non_invariant() {
        let d = catalog("hopf").unwrap();
        let one = transport_invariant(&d, |_: &BasePoint| 1.0, Transport::ToPrime).unwrap();
        assert_eq!(one.eval(&BasePoint(vec![0.0, 0.0, 1.0])), 1.0);
        let bad = transport_invariant(&d, |x: &BasePoint| x.0[1], Transport::ToPrime);
        assert!(matches!(bad, Err(Error::NotInvariant { .. })));
    }

    #[test]
    fn trivial_product_transport_is_identity_on_invariants() {
        let d = catalog("trivial-s2").unwrap();
        let lat2 = |x: &BasePoint| x.0[2].asin().powi(2);
        let f = transport_invariant(&d, lat2, Transport::ToPrime).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        for _ in 0..100 {
            let y = d.proj_star(&d.random_point(&mut rng));
            assert!((f.eval(&y) - lat2(&y)).abs() < 1e-14);
        }
    }
}
