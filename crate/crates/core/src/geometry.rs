//! Invariant metrics on the total space and their one-dimensional orbit-space
//! reductions.
//!
//! A metric on `P` is a connection metric `π*g_M + e^{2cu} Q ω⊗ω`, where `ω`
//! is a connection form for the principal action •, `Q > 0` scales the fiber,
//! and `u` is an optional invariant warp function scaled by `c`. For the
//! cohomogeneity-one entries the orbit space is an interval `[0, L]`
//! parameterized by arc length, and every invariant quantity is a function of
//! that coordinate.
//!
//! Orbit volumes are computed by pushing a circle Haar rule through the
//! actions and integrating the Gram determinant of the orbit generators in
//! the metric of `P`:
//!
//! * side `P`: `sqrt det Gram(L, R)` over `G × G`,
//! * side `M`: the length of the component of the ⋆-generator `L`
//!   orthogonal to the •-fiber, `sqrt(det / |R|²)`,
//! * side `M'`: symmetrically `sqrt(det / |L|²)`.
//!
//! Volumes are divided by the order of the ineffective kernel of each action.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::algebra::{gauss_legendre, haar_rule, GroupId, Quaternion};
use crate::diagrams::{Action, BasePoint, DiagramId, Point, StarDiagram};
use crate::error::{Error, Result};

/// Circle Haar rule order used for orbit volumes.
pub const ORBIT_RULE_ORDER: usize = 8;

/// Minimum number of cells for a profile.
pub const MIN_CELLS: usize = 16;

/// Connection form for the trivial product diagram.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Connection {
    /// The standard connection of the entry. For `trivial-s2` this is
    /// `dθ' + a(σ) dφ` with `a` chosen so that every ⋆-orbit has length
    /// `2π √Q`; for `hopf` it is the round Hopf connection.
    Standard,
    /// The flat connection `dθ'` on `S² × S¹`. The induced metric on `M'` is a
    /// Cheeger deformation of the round sphere.
    Flat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    P,
    M,
    #[serde(rename = "M'")]
    MPrime,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::P => "P",
            Side::M => "M",
            Side::MPrime => "M'",
        }
    }

    pub fn parse(s: &str) -> Result<Side> {
        match s {
            "P" | "p" => Ok(Side::P),
            "M" | "m" => Ok(Side::M),
            "M'" | "m'" | "Mprime" | "mprime" | "M-prime" => Ok(Side::MPrime),
            other => Err(Error::InvalidParameter(format!("unknown side `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Endpoint {
    /// Orbits collapse to lower dimension and the weight vanishes.
    Collapsing,
    /// A regular boundary with a Neumann condition.
    Reflecting,
}

/// An invariant function sampled on the orbit space, evaluated by a cubic
/// spline. Values are reflected evenly across both endpoints before the
/// spline is built, matching the smoothness of invariant functions at
/// collapsing orbits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WarpFunction {
    pub t: Vec<f64>,
    pub u: Vec<f64>,
    #[serde(skip)]
    spline: Option<Spline>,
}

impl WarpFunction {
    pub fn new(t: Vec<f64>, u: Vec<f64>, length: f64) -> Result<Self> {
        if t.len() != u.len() {
            return Err(Error::GridMismatch { expected: t.len(), got: u.len() });
        }
        if t.len() < 4 {
            return Err(Error::InvalidParameter("warp table needs at least 4 nodes".into()));
        }
        if t.windows(2).any(|w| w[1] <= w[0]) || t[0] < 0.0 || *t.last().unwrap() > length {
            return Err(Error::InvalidParameter("warp nodes must increase inside [0, L]".into()));
        }
        if u.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("warp values must be finite".into()));
        }
        let spline = Spline::reflected(&t, &u, length);
        Ok(Self { t, u, spline: Some(spline) })
    }

    pub fn constant(value: f64, length: f64, nodes: usize) -> Result<Self> {
        let h = length / nodes as f64;
        let t = (0..nodes).map(|i| (i as f64 + 0.5) * h).collect();
        Self::new(t, vec![value; nodes], length)
    }

    pub fn eval(&self, t: f64) -> f64 {
        match &self.spline {
            Some(s) => s.eval(t),
            None => panic!("warp function used before its spline was built"),
        }
    }

    fn rebuild(&mut self, length: f64) {
        self.spline = Some(Spline::reflected(&self.t, &self.u, length));
    }
}

/// Natural cubic spline.
#[derive(Clone, Debug, PartialEq)]
struct Spline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl Spline {
    fn reflected(t: &[f64], u: &[f64], length: f64) -> Spline {
        let k = t.len().min(8);
        let mut x = Vec::with_capacity(t.len() + 2 * k);
        let mut y = Vec::with_capacity(t.len() + 2 * k);
        for i in (0..k).rev() {
            if t[i] > 0.0 {
                x.push(-t[i]);
                y.push(u[i]);
            }
        }
        x.extend_from_slice(t);
        y.extend_from_slice(u);
        let n = t.len();
        for i in 0..k {
            let j = n - 1 - i;
            if t[j] < length {
                x.push(2.0 * length - t[j]);
                y.push(u[j]);
            }
        }
        Spline::natural(x, y)
    }

    fn natural(x: Vec<f64>, y: Vec<f64>) -> Spline {
        let n = x.len();
        let mut m = vec![0.0; n];
        if n > 2 {
            // tridiagonal system for interior second derivatives
            let mut diag = vec![0.0; n];
            let mut rhs = vec![0.0; n];
            let mut sup = vec![0.0; n];
            for i in 1..n - 1 {
                let h0 = x[i] - x[i - 1];
                let h1 = x[i + 1] - x[i];
                diag[i] = 2.0 * (h0 + h1);
                sup[i] = h1;
                rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h1 - (y[i] - y[i - 1]) / h0);
            }
            for i in 2..n - 1 {
                let sub = x[i] - x[i - 1];
                let f = sub / diag[i - 1];
                diag[i] -= f * sup[i - 1];
                rhs[i] -= f * rhs[i - 1];
            }
            for i in (1..n - 1).rev() {
                let next = if i + 1 < n - 1 { sup[i] * m[i + 1] } else { 0.0 };
                m[i] = (rhs[i] - next) / diag[i];
            }
        }
        Spline { x, y, m }
    }

    fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        let i = self.x.partition_point(|&xi| xi <= t).clamp(1, n - 1) - 1;
        let h = self.x[i + 1] - self.x[i];
        let a = (self.x[i + 1] - t) / h;
        let b = (t - self.x[i]) / h;
        a * self.y[i]
            + b * self.y[i + 1]
            + ((a * a * a - a) * self.m[i] + (b * b * b - b) * self.m[i + 1]) * h * h / 6.0
    }
}

/// A G×G-invariant metric on the total space of a catalogued diagram.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricSpec {
    pub diagram: DiagramId,
    /// Radius of the round base sphere `M`.
    pub base_radius: f64,
    /// Scale `Q` of the bi-invariant fiber metric.
    pub fiber_scale: f64,
    pub connection: Connection,
    pub warp: Option<WarpFunction>,
    pub warp_scale: f64,
}

impl MetricSpec {
    /// The catalog's default Kaluza–Klein metric for a cohomogeneity-one entry.
    pub fn default_for(id: DiagramId) -> Result<MetricSpec> {
        let d = StarDiagram::new(id);
        match id {
            DiagramId::TrivialS2 => kaluza_klein(&d, 1.0, 2.0),
            DiagramId::Hopf => kaluza_klein(&d, 0.5, 1.0),
            DiagramId::Gm => Err(Error::NotCohomogeneityOne(id.to_string())),
        }
    }

    pub fn with_connection(mut self, connection: Connection) -> Self {
        self.connection = connection;
        self
    }

    /// Arc length of the orbit space.
    pub fn orbit_space_length(&self) -> f64 {
        PI * self.base_radius
    }

    /// `c · u(t)`, the exponent of the fiber warp.
    pub fn warp_at(&self, t: f64) -> f64 {
        match &self.warp {
            Some(u) if self.warp_scale != 0.0 => self.warp_scale * u.eval(t),
            _ => 0.0,
        }
    }

    /// Hex digest identifying the metric.
    pub fn fingerprint(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("metric serializes");
        let digest = Sha256::digest(&bytes);
        hex::encode(&digest[..12])
    }

    pub fn from_json(s: &str) -> Result<MetricSpec> {
        let mut m: MetricSpec = serde_json::from_str(s)?;
        let length = m.orbit_space_length();
        if let Some(w) = m.warp.as_mut() {
            w.rebuild(length);
        }
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        if !(self.base_radius > 0.0 && self.base_radius.is_finite()) {
            return Err(Error::InvalidParameter("base radius must be positive".into()));
        }
        if !(self.fiber_scale > 0.0 && self.fiber_scale.is_finite()) {
            return Err(Error::InvalidParameter("fiber scale Q must be positive".into()));
        }
        if !(self.warp_scale >= 0.0 && self.warp_scale.is_finite()) {
            return Err(Error::InvalidParameter("warp scale must be non-negative".into()));
        }
        if self.diagram == DiagramId::TrivialS2
            && self.connection == Connection::Standard
            && self.fiber_scale <= self.base_radius * self.base_radius
        {
            return Err(Error::InvalidParameter(format!(
                "the standard trivial-s2 connection needs Q > r² (Q = {}, r = {})",
                self.fiber_scale, self.base_radius
            )));
        }
        Ok(())
    }

    fn model(&self) -> Result<Model<'_>> {
        match self.diagram {
            DiagramId::TrivialS2 | DiagramId::Hopf => Ok(Model { m: self, d: StarDiagram::new(self.diagram) }),
            DiagramId::Gm => Err(Error::NotCohomogeneityOne(self.diagram.to_string())),
        }
    }
}

/// Kaluza–Klein metric `π*g_M + Q ω⊗ω` with a round base of radius `base_radius`.
pub fn kaluza_klein(d: &StarDiagram, base_radius: f64, q: f64) -> Result<MetricSpec> {
    if !d.entry.cohomogeneity_one {
        return Err(Error::UnknownDiagram(d.id().to_string()));
    }
    let m = MetricSpec {
        diagram: d.id(),
        base_radius,
        fiber_scale: q,
        connection: Connection::Standard,
        warp: None,
        warp_scale: 1.0,
    };
    m.validate()?;
    Ok(m)
}

/// Vertical warping `π*g_M + e^{2cu} Q ω⊗ω`. The horizontal part is unchanged.
pub fn warp(m: &MetricSpec, t: &[f64], u: &[f64], c: f64) -> Result<MetricSpec> {
    if t.len() != u.len() {
        return Err(Error::GridMismatch { expected: t.len(), got: u.len() });
    }
    let table = WarpFunction::new(t.to_vec(), u.to_vec(), m.orbit_space_length())?;
    let out = MetricSpec { warp: Some(table), warp_scale: c, ..m.clone() };
    out.validate()?;
    Ok(out)
}

type Tangent = [f64; 4];

/// Closed-form geometry of a cohomogeneity-one catalog entry.
struct Model<'a> {
    m: &'a MetricSpec,
    d: StarDiagram,
}

impl Model<'_> {
    fn radius(&self) -> f64 {
        self.m.base_radius
    }

    /// Angle on the unit sphere model of `M` (or `M'`) for a base point.
    fn polar_angle(&self, x: &BasePoint) -> f64 {
        let c = match self.m.diagram {
            DiagramId::Hopf => x.0[0],
            _ => x.0[2],
        };
        c.clamp(-1.0, 1.0).acos()
    }

    fn coordinate(&self, p: &Point) -> f64 {
        self.radius() * self.polar_angle(&self.d.proj_bullet(p))
    }

    /// A unit-speed curve in `P` orthogonal to all G×G orbits.
    fn representative(&self, t: f64) -> Point {
        let sigma = t / self.radius();
        match self.m.diagram {
            DiagramId::Hopf => {
                let (s, c) = (0.5 * sigma).sin_cos();
                Point::Quat(Quaternion::new(c, 0.0, 0.0, s))
            }
            _ => Point::Product { x: [sigma.sin(), 0.0, sigma.cos()], angle: 0.0 },
        }
    }

    /// Splits a tangent vector into its horizontal part, scaled so that the
    /// horizontal metric is the Euclidean dot product, and its connection-form
    /// value.
    fn split(&self, p: &Point, x: &Tangent) -> (Tangent, f64) {
        match p {
            Point::Quat(q) => {
                let s = 2.0 * self.radius();
                let e = (*q * Quaternion::I).to_array();
                let w = dot4(x, &e);
                ([s * (x[0] - w * e[0]), s * (x[1] - w * e[1]), s * (x[2] - w * e[2]), s * (x[3] - w * e[3])], w)
            }
            Point::Product { x: base, .. } => {
                let r = self.radius();
                let b = self.connection_coefficient(base[2].clamp(-1.0, 1.0).acos());
                let w = x[3] + b * (-x[0] * base[1] + x[1] * base[0]);
                ([r * x[0], r * x[1], r * x[2], 0.0], w)
            }
            Point::Sp2(_) => unreachable!("gm has no metric model"),
        }
    }

    /// `Q e^{2cu}` at `p`.
    fn vertical_scale(&self, p: &Point) -> f64 {
        self.m.fiber_scale * (2.0 * self.m.warp_at(self.coordinate(p))).exp()
    }

    fn inner(&self, p: &Point, x: &Tangent, y: &Tangent) -> f64 {
        let (hx, wx) = self.split(p, x);
        let (hy, wy) = self.split(p, y);
        dot4(&hx, &hy) + self.vertical_scale(p) * wx * wy
    }

    /// `b(σ)` in `ω = dθ' + b(σ)⟨·, K⟩`, where `K = e₃ × x`.
    fn connection_coefficient(&self, sigma: f64) -> f64 {
        match self.m.connection {
            Connection::Flat => 0.0,
            Connection::Standard => {
                let ratio = self.radius() * self.radius() / self.m.fiber_scale;
                let s = sigma.sin();
                -ratio / ((1.0 - ratio * s * s).sqrt() + 1.0)
            }
        }
    }

    fn generator(&self, which: Action, p: &Point) -> Tangent {
        match (which, p) {
            (Action::Star, Point::Quat(q)) => (Quaternion::I * *q).to_array(),
            (Action::Bullet, Point::Quat(q)) => (-(*q * Quaternion::I)).to_array(),
            (Action::Star, Point::Product { x, .. }) => [-x[1], x[0], 0.0, 1.0],
            (Action::Bullet, Point::Product { .. }) => [0.0, 0.0, 0.0, -1.0],
            _ => unreachable!("gm has no metric model"),
        }
    }

    /// `(|L|², |R|², det Gram(L, R))`. The determinant is expanded as
    /// `det H + V |ω(R) L_h − ω(L) R_h|²`, which has no cancellation between
    /// the horizontal and vertical parts.
    fn gram(&self, p: &Point) -> (f64, f64, f64) {
        let (hl, wl) = self.split(p, &self.generator(Action::Star, p));
        let (hr, wr) = self.split(p, &self.generator(Action::Bullet, p));
        let v = self.vertical_scale(p);
        let (a, b, c) = (dot4(&hl, &hl), dot4(&hl, &hr), dot4(&hr, &hr));
        let z: Tangent = std::array::from_fn(|k| wr * hl[k] - wl * hr[k]);
        let det = (a * c - b * b).max(0.0) + v * dot4(&z, &z);
        (a + v * wl * wl, c + v * wr * wr, det)
    }

    /// Order of the kernel of the action whose orbits are measured on `side`.
    fn kernel_order(&self, _side: Side) -> f64 {
        match self.m.diagram {
            // −1 acts trivially on both sides and on the torus orbits
            DiagramId::Hopf => 2.0,
            _ => 1.0,
        }
    }

    fn orbit_volume(&self, side: Side, t: f64) -> f64 {
        let rule = haar_rule(GroupId::Circle, ORBIT_RULE_ORDER).expect("circle rule");
        let p = self.representative(t);
        let density = |q: &Point| {
            let (ll, rr, det) = self.gram(q);
            match side {
                Side::P => det.sqrt(),
                Side::M => (det / rr).sqrt(),
                Side::MPrime => (det / ll).sqrt(),
            }
        };
        let total = match side {
            Side::P => rule.integrate(|g| {
                let q = self.d.star(g, &p);
                rule.integrate(|h| density(&self.d.bullet(h, &q)))
            }),
            Side::M => rule.integrate(|g| density(&self.d.star(g, &p))),
            Side::MPrime => rule.integrate(|g| density(&self.d.bullet(g, &p))),
        };
        total / self.kernel_order(side)
    }

    fn fiber_volume(&self, which: Action, t: f64) -> f64 {
        let rule = haar_rule(GroupId::Circle, ORBIT_RULE_ORDER).expect("circle rule");
        let p = self.representative(t);
        rule.integrate(|g| {
            let q = self.d.act(which, g, &p);
            let v = self.generator(which, &q);
            self.inner(&q, &v, &v).sqrt()
        })
    }
}

fn dot4(a: &Tangent, b: &Tangent) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3]
}

/// The orbit-space reduction of one side of a diagram: the interval
/// `[0, L]` split into `n` uniform cells, with orbit volumes at the cell
/// centers `t_i = (i + ½) L / n` and at the faces `i L / n`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct OrbitProfile {
    pub diagram: Option<DiagramId>,
    pub side: Side,
    pub fingerprint: String,
    pub length: f64,
    pub n: usize,
    pub t: Vec<f64>,
    pub w: Vec<f64>,
    pub w_face: Vec<f64>,
    pub endpoints: [Endpoint; 2],
    pub fiber_scale: Option<f64>,
    pub warp_scale: Option<f64>,
}

impl OrbitProfile {
    /// A profile from an explicit weight function, for model problems.
    pub fn from_weight_fn<F: Fn(f64) -> f64>(
        length: f64,
        n: usize,
        endpoints: [Endpoint; 2],
        w: F,
    ) -> OrbitProfile {
        let dt = length / n as f64;
        let t: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * dt).collect();
        let mut w_face: Vec<f64> = (0..=n).map(|i| w(i as f64 * dt)).collect();
        if endpoints[0] == Endpoint::Collapsing {
            w_face[0] = 0.0;
        }
        if endpoints[1] == Endpoint::Collapsing {
            w_face[n] = 0.0;
        }
        OrbitProfile {
            diagram: None,
            side: Side::M,
            fingerprint: "model".to_string(),
            length,
            n,
            w: t.iter().map(|&s| w(s)).collect(),
            t,
            w_face,
            endpoints,
            fiber_scale: None,
            warp_scale: None,
        }
    }

    pub fn dt(&self) -> f64 {
        self.length / self.n as f64
    }

    /// Samples an invariant function at the cell centers.
    pub fn sample<F: Fn(f64) -> f64>(&self, f: F) -> Vec<f64> {
        self.t.iter().map(|&t| f(t)).collect()
    }

    /// Midpoint-rule integral `∫ f dμ` of a table over this side.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        self.w.iter().zip(f).map(|(w, f)| w * f).sum::<f64>() * self.dt()
    }

    pub fn volume(&self) -> f64 {
        self.w.iter().sum::<f64>() * self.dt()
    }

    /// CSV with header `t,w,h`.
    pub fn to_csv(&self) -> String {
        let h = mean_curvature(self);
        let mut out = String::from("t,w,h\n");
        for i in 0..self.n {
            out.push_str(&format!("{},{},{}\n", self.t[i], self.w[i], h[i]));
        }
        out
    }
}

/// Orbit-volume profile of one side of a cohomogeneity-one diagram.
pub fn orbit_profile(m: &MetricSpec, side: Side, n: usize) -> Result<OrbitProfile> {
    let model = m.model()?;
    if n < MIN_CELLS {
        return Err(Error::InvalidParameter(format!("profiles need n ≥ {MIN_CELLS}")));
    }
    let length = m.orbit_space_length();
    let dt = length / n as f64;
    let t: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * dt).collect();
    let w: Vec<f64> = t.iter().map(|&s| model.orbit_volume(side, s)).collect();
    let mut w_face: Vec<f64> = (0..=n).map(|i| model.orbit_volume(side, i as f64 * dt)).collect();
    // poles of the base sphere: every catalogued orbit collapses there
    w_face[0] = 0.0;
    w_face[n] = 0.0;
    Ok(OrbitProfile {
        diagram: Some(m.diagram),
        side,
        fingerprint: m.fingerprint(),
        length,
        n,
        t,
        w,
        w_face,
        endpoints: [Endpoint::Collapsing, Endpoint::Collapsing],
        fiber_scale: Some(m.fiber_scale),
        warp_scale: Some(m.warp_scale),
    })
}

/// Fiber volumes of one action at cell centers and faces.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FiberProfile {
    pub action: Action,
    pub length: f64,
    pub n: usize,
    pub volume: Vec<f64>,
    pub volume_face: Vec<f64>,
}

impl FiberProfile {
    /// `max / min` of the fiber volume over the cell centers.
    pub fn variation(&self) -> f64 {
        let max = self.volume.iter().cloned().fold(f64::MIN, f64::max);
        let min = self.volume.iter().cloned().fold(f64::MAX, f64::min);
        max / min
    }

    /// Mean curvature of the fibers along the orbit-space direction,
    /// `−d/dt log vol`, in the same flux form as [`mean_curvature`].
    pub fn mean_curvature(&self) -> Vec<f64> {
        let dt = self.length / self.n as f64;
        (0..self.n)
            .map(|i| -(self.volume_face[i + 1] - self.volume_face[i]) / (dt * self.volume[i]))
            .collect()
    }
}

pub fn fiber_volume_profile(m: &MetricSpec, which: Action, n: usize) -> Result<FiberProfile> {
    let model = m.model()?;
    let length = m.orbit_space_length();
    let dt = length / n as f64;
    Ok(FiberProfile {
        action: which,
        length,
        n,
        volume: (0..n).map(|i| model.fiber_volume(which, (i as f64 + 0.5) * dt)).collect(),
        volume_face: (0..=n).map(|i| model.fiber_volume(which, i as f64 * dt)).collect(),
    })
}

/// Orbit volume at an arbitrary orbit-space coordinate.
pub fn orbit_volume_at(m: &MetricSpec, side: Side, t: f64) -> Result<f64> {
    Ok(m.model()?.orbit_volume(side, t))
}

/// Volume of the fiber of one action over orbit-space coordinate `t`.
pub fn fiber_volume_at(m: &MetricSpec, which: Action, t: f64) -> Result<f64> {
    Ok(m.model()?.fiber_volume(which, t))
}

/// Orbit-space coordinate of a point of `M` or `M'`.
pub fn orbit_coordinate(m: &MetricSpec, x: &BasePoint) -> Result<f64> {
    let model = m.model()?;
    Ok(model.radius() * model.polar_angle(x))
}

/// Representative point of `P` over orbit-space coordinate `t`.
pub fn representative_point(m: &MetricSpec, t: f64) -> Result<Point> {
    Ok(m.model()?.representative(t))
}

/// Mean curvature `h = −d/dt log w` of the orbits at the cell centers,
/// written as `−(w_{i+½} − w_{i−½}) / (Δt w_i)` with the face weights.
pub fn mean_curvature(p: &OrbitProfile) -> Vec<f64> {
    let dt = p.dt();
    (0..p.n).map(|i| -(p.w_face[i + 1] - p.w_face[i]) / (dt * p.w[i])).collect()
}

/// Applies the reduced operator `−(1/w)(w φ')'` in finite-volume form.
pub(crate) fn reduced_laplacian(p: &OrbitProfile, phi: &[f64]) -> Vec<f64> {
    let n = p.n;
    let dt2 = p.dt() * p.dt();
    (0..n)
        .map(|i| {
            let right = if i + 1 < n { p.w_face[i + 1] * (phi[i + 1] - phi[i]) } else { 0.0 };
            let left = if i > 0 { p.w_face[i] * (phi[i] - phi[i - 1]) } else { 0.0 };
            -(right - left) / (p.w[i] * dt2)
        })
        .collect()
}

fn derivative(phi: &[f64], dt: f64) -> Vec<f64> {
    let n = phi.len();
    (0..n)
        .map(|i| {
            if i == 0 {
                (-3.0 * phi[0] + 4.0 * phi[1] - phi[2]) / (2.0 * dt)
            } else if i == n - 1 {
                (3.0 * phi[n - 1] - 4.0 * phi[n - 2] + phi[n - 3]) / (2.0 * dt)
            } else {
                (phi[i + 1] - phi[i - 1]) / (2.0 * dt)
            }
        })
        .collect()
}

/// Max-norm residual of `−Δ_P φ = −Δ_M φ + dφ(H^π)` for an invariant table
/// `φ`, each term reduced and discretized independently: both Laplacians
/// from their own orbit profiles, and `H^π` from the •-fiber volumes.
pub fn laplacian_identity_residual(m: &MetricSpec, phi: &[f64], n: usize) -> Result<f64> {
    if phi.len() != n {
        return Err(Error::GridMismatch { expected: n, got: phi.len() });
    }
    let total = orbit_profile(m, Side::P, n)?;
    let base = orbit_profile(m, Side::M, n)?;
    let fiber = fiber_volume_profile(m, Action::Bullet, n)?;
    let lap_p = reduced_laplacian(&total, phi);
    let lap_m = reduced_laplacian(&base, phi);
    let h = fiber.mean_curvature();
    let dphi = derivative(phi, total.dt());
    Ok((0..n)
        .map(|i| (lap_p[i] - lap_m[i] - dphi[i] * h[i]).abs())
        .fold(0.0, f64::max))
}

/// Arc length of the representative curve, measured in the metric of `P`
/// with Gauss–Legendre quadrature and central differences.
pub fn measured_orbit_space_length(m: &MetricSpec) -> Result<f64> {
    let model = m.model()?;
    let length = m.orbit_space_length();
    let (nodes, weights) = gauss_legendre(32, 0.0, length);
    let eps = 1e-6;
    let mut total = 0.0;
    for (t, w) in nodes.iter().zip(&weights) {
        let v = tangent_between(&model.representative(t - eps), &model.representative(t + eps), 2.0 * eps);
        let p = model.representative(*t);
        total += w * model.inner(&p, &v, &v).sqrt();
    }
    Ok(total)
}

fn tangent_between(a: &Point, b: &Point, span: f64) -> Tangent {
    match (a, b) {
        (Point::Quat(p), Point::Quat(q)) => {
            let d = (*q - *p).to_array();
            [d[0] / span, d[1] / span, d[2] / span, d[3] / span]
        }
        (Point::Product { x, angle: a }, Point::Product { x: y, angle: b }) => {
            let mut da = b - a;
            if da > PI {
                da -= 2.0 * PI;
            } else if da < -PI {
                da += 2.0 * PI;
            }
            [(y[0] - x[0]) / span, (y[1] - x[1]) / span, (y[2] - x[2]) / span, da / span]
        }
        _ => unreachable!(),
    }
}

/// Horizontal-space comparison at random points of `P`: for the unit vector
/// `v` orthogonal to the G×G orbit, returns the largest of
/// `|g_P(v,v) − r²|dπ v|²|` and `|g_P(v,v) − r²|dπ' v|²|`, with the
/// differentials taken by central differences in the unit-sphere models.
pub fn horizontal_isometry_defect(m: &MetricSpec, samples: usize, seed: u64) -> Result<f64> {
    use rand::SeedableRng;
    let model = m.model()?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let r2 = model.radius() * model.radius();
    let eps = 1e-6;
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let p = model.d.random_point(&mut rng);
        let l = model.generator(Action::Star, &p);
        let r = model.generator(Action::Bullet, &p);
        let mut v = match &p {
            Point::Quat(q) => (*q * Quaternion::J).to_array(),
            Point::Product { x, .. } => {
                // a tangent vector of S² not parallel to the rotation field
                let e = if x[2].abs() < 0.9 { [0.0, 0.0, 1.0] } else { [1.0, 0.0, 0.0] };
                let d = e[0] * x[0] + e[1] * x[1] + e[2] * x[2];
                [e[0] - d * x[0], e[1] - d * x[1], e[2] - d * x[2], 0.0]
            }
            Point::Sp2(_) => unreachable!(),
        };
        // Gram–Schmidt against the orbit directions in g_P
        let mut basis: Vec<Tangent> = Vec::new();
        for g in [l, r] {
            let mut g = g;
            for b in &basis {
                let c = model.inner(&p, &g, b);
                for k in 0..4 {
                    g[k] -= c * b[k];
                }
            }
            let nrm = model.inner(&p, &g, &g).sqrt();
            if nrm > 1e-12 {
                basis.push(g.map(|c| c / nrm));
            }
        }
        for b in &basis {
            let c = model.inner(&p, &v, b);
            for k in 0..4 {
                v[k] -= c * b[k];
            }
        }
        let gv = model.inner(&p, &v, &v);
        let nv = gv.sqrt();
        let v = v.map(|c| c / nv);
        let plus = step(&p, &v, eps);
        let minus = step(&p, &v, -eps);
        for which in [Action::Bullet, Action::Star] {
            let a = model.d.project(which, &plus);
            let b = model.d.project(which, &minus);
            let d2: f64 = a.0.iter().zip(&b.0).map(|(x, y)| ((x - y) / (2.0 * eps)).powi(2)).sum();
            worst = worst.max((1.0 - r2 * d2).abs());
        }
    }
    Ok(worst)
}

fn step(p: &Point, v: &Tangent, eps: f64) -> Point {
    match p {
        Point::Quat(q) => Point::Quat((*q + Quaternion::from_array(*v).scale(eps)).normalize()),
        Point::Product { x, angle } => {
            let y = [x[0] + eps * v[0], x[1] + eps * v[1], x[2] + eps * v[2]];
            let n = (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt();
            Point::Product {
                x: [y[0] / n, y[1] / n, y[2] / n],
                angle: (angle + eps * v[3]).rem_euclid(2.0 * PI),
            }
        }
        Point::Sp2(_) => unreachable!(),
    }
}

/// Largest `g_P`-pairing of the representative curve's velocity with the
/// orbit generators at `t`.
pub fn orbit_orthogonality_defect(m: &MetricSpec, t: f64) -> Result<f64> {
    let model = m.model()?;
    let eps = 1e-6;
    let p = model.representative(t);
    let v = tangent_between(&model.representative(t - eps), &model.representative(t + eps), 2.0 * eps);
    let l = model.generator(Action::Star, &p);
    let r = model.generator(Action::Bullet, &p);
    Ok(model.inner(&p, &v, &l).abs().max(model.inner(&p, &v, &r).abs()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hopf() -> MetricSpec {
        MetricSpec::default_for(DiagramId::Hopf).unwrap()
    }

    fn triv() -> MetricSpec {
        MetricSpec::default_for(DiagramId::TrivialS2).unwrap()
    }

    #[test]
    fn round_sphere_profile() {
        let p = orbit_profile(&triv(), Side::M, 1024).unwrap();
        assert!((p.length - PI).abs() < 1e-15);
        assert_eq!(p.endpoints, [Endpoint::Collapsing, Endpoint::Collapsing]);
        for (t, w) in p.t.iter().zip(&p.w) {
            assert!((w - 2.0 * PI * t.sin()).abs() < 1e-12, "{t}: {w}");
        }
    }

    #[test]
    fn hopf_round_total_space() {
        let m = hopf();
        let p = orbit_profile(&m, Side::P, 256).unwrap();
        for (t, w) in p.t.iter().zip(&p.w) {
            // Clifford tori of the unit 3-sphere
            assert!((w - 2.0 * PI * PI * (2.0 * t).sin()).abs() < 1e-12);
        }
        let base = orbit_profile(&m, Side::M, 256).unwrap();
        for (t, w) in base.t.iter().zip(&base.w) {
            assert!((w - PI * (2.0 * t).sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn unwarped_sides_agree() {
        for m in [hopf(), triv()] {
            let a = orbit_profile(&m, Side::M, 512).unwrap();
            let b = orbit_profile(&m, Side::MPrime, 512).unwrap();
            for i in 0..512 {
                assert!((a.w[i] - b.w[i]).abs() <= 1e-10, "{:?} {i}", m.diagram);
            }
            assert_eq!(a.length, b.length);
        }
    }

    #[test]
    fn flat_connection_deforms_the_prime_side() {
        let m = triv().with_connection(Connection::Flat);
        let a = orbit_profile(&m, Side::M, 64).unwrap();
        let b = orbit_profile(&m, Side::MPrime, 64).unwrap();
        let q = m.fiber_scale;
        for i in 0..64 {
            let s = a.t[i].sin();
            let cheeger = 2.0 * PI * s * (q / (q + s * s)).sqrt();
            assert!((b.w[i] - cheeger).abs() < 1e-12);
        }
        assert!((a.w[32] - b.w[32]).abs() > 0.1);
    }

    #[test]
    fn fiber_volume_ratio_is_constant_when_unwarped() {
        for m in [hopf(), triv()] {
            let total = orbit_profile(&m, Side::P, 128).unwrap();
            let base = orbit_profile(&m, Side::M, 128).unwrap();
            let r0 = total.w[0] / base.w[0];
            for i in 0..128 {
                assert!((total.w[i] / base.w[i] - r0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn trivial_total_space_is_base_times_fiber() {
        let m = triv();
        let total = orbit_profile(&m, Side::P, 64).unwrap();
        let base = orbit_profile(&m, Side::M, 64).unwrap();
        let fiber = 2.0 * PI * m.fiber_scale.sqrt();
        for i in 0..64 {
            assert!((total.w[i] - base.w[i] * fiber).abs() < 1e-12);
        }
    }

    #[test]
    fn orbit_space_length_matches_closed_form() {
        for m in [hopf(), triv()] {
            let measured = measured_orbit_space_length(&m).unwrap();
            assert!((measured - m.orbit_space_length()).abs() < 1e-8, "{measured}");
            for t in [0.1, 0.7, 1.3] {
                assert!(orbit_orthogonality_defect(&m, t).unwrap() < 1e-8);
            }
        }
    }

    #[test]
    fn horizontal_spaces_are_isometric() {
        for m in [hopf(), triv(), triv().with_connection(Connection::Flat)] {
            assert!(horizontal_isometry_defect(&m, 100, 17).unwrap() < 1e-8);
        }
    }

    #[test]
    fn mean_curvature_of_constant_weight_vanishes() {
        let p = OrbitProfile::from_weight_fn(2.0, 64, [Endpoint::Reflecting; 2], |_| 3.0);
        assert!(mean_curvature(&p).iter().all(|h| *h == 0.0));
    }

    #[test]
    fn mean_curvature_of_latitude_circles() {
        let err = |n: usize| {
            let p = OrbitProfile::from_weight_fn(PI, n, [Endpoint::Collapsing; 2], |t| 2.0 * PI * t.sin());
            let h = mean_curvature(&p);
            p.t.iter()
                .zip(&h)
                .map(|(t, h)| (h + 1.0 / t.tan()).abs() / (1.0 / t.tan()).abs().max(1.0))
                .fold(0.0, f64::max)
        };
        let (e1, e2) = (err(256), err(512));
        assert!(e1 < 1e-4);
        assert!((e1 / e2 - 4.0).abs() < 0.1, "{}", e1 / e2);
    }

    #[test]
    fn zero_warp_scale_is_bitwise_identity() {
        let m = hopf();
        let t: Vec<f64> = (0..32).map(|i| (i as f64 + 0.5) * m.orbit_space_length() / 32.0).collect();
        let u: Vec<f64> = t.iter().map(|t| (2.0 * t).cos()).collect();
        let w = warp(&m, &t, &u, 0.0).unwrap();
        for side in [Side::P, Side::M, Side::MPrime] {
            let a = orbit_profile(&m, side, 64).unwrap();
            let b = orbit_profile(&w, side, 64).unwrap();
            assert_eq!(a.w, b.w);
            assert_eq!(a.w_face, b.w_face);
        }
    }

    #[test]
    fn constant_warp_scales_bullet_fibers() {
        let m = hopf();
        let length = m.orbit_space_length();
        let k0 = 0.3;
        let u = WarpFunction::constant(k0, length, 16).unwrap();
        let w = warp(&m, &u.t, &u.u, 1.5).unwrap();
        let a = fiber_volume_profile(&m, Action::Bullet, 32).unwrap();
        let b = fiber_volume_profile(&w, Action::Bullet, 32).unwrap();
        for i in 0..32 {
            assert!((b.volume[i] / a.volume[i] - (k0 * 1.5f64).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn nonconstant_warp_changes_prime_side_only() {
        let m = hopf();
        let n = 128;
        let t: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * m.orbit_space_length() / n as f64).collect();
        let u: Vec<f64> = t.iter().map(|t| (2.0 * t).cos()).collect();
        let w = warp(&m, &t, &u, 1.0).unwrap();
        let base0 = orbit_profile(&m, Side::M, n).unwrap();
        let base1 = orbit_profile(&w, Side::M, n).unwrap();
        let prime1 = orbit_profile(&w, Side::MPrime, n).unwrap();
        for i in 0..n {
            assert!((base0.w[i] - base1.w[i]).abs() < 1e-12);
        }
        let shape = |p: &OrbitProfile, i: usize| p.w[i] / p.w[n / 2];
        assert!((shape(&prime1, 10) - shape(&base1, 10)).abs() > 1e-3);
    }

    #[test]
    fn warp_shifts_total_space_mean_curvature_by_gradient() {
        // H of the warped fibers is −k∇u with k = dim G = 1
        let m = hopf();
        let n = 1024;
        let length = m.orbit_space_length();
        let t: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * length / n as f64).collect();
        let u: Vec<f64> = t.iter().map(|t| (2.0 * t).cos()).collect();
        let w = warp(&m, &t, &u, 1.0).unwrap();
        let h0 = mean_curvature(&orbit_profile(&m, Side::P, n).unwrap());
        let h1 = mean_curvature(&orbit_profile(&w, Side::P, n).unwrap());
        let hf = fiber_volume_profile(&w, Action::Bullet, n).unwrap().mean_curvature();
        for i in 0..n {
            let du = -2.0 * (2.0 * t[i]).sin();
            assert!((hf[i] + du).abs() < 1e-5, "{i}: {} vs {}", hf[i], -du);
            if i > n / 20 && i < n - n / 20 {
                assert!((h1[i] - h0[i] + du).abs() < 1e-4, "{i}");
            }
        }
    }

    #[test]
    fn spline_reproduces_smooth_functions() {
        let length = PI / 2.0;
        let n = 64;
        let t: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * length / n as f64).collect();
        let u: Vec<f64> = t.iter().map(|t| (2.0 * t).cos()).collect();
        let f = WarpFunction::new(t, u, length).unwrap();
        for k in 0..=100 {
            let s = length * k as f64 / 100.0;
            assert!((f.eval(s) - (2.0 * s).cos()).abs() < 1e-6, "{s}");
        }
    }

    #[test]
    fn errors() {
        let gm = StarDiagram::new(DiagramId::Gm);
        assert!(matches!(kaluza_klein(&gm, 1.0, 1.0), Err(Error::UnknownDiagram(_))));
        let mut m = hopf();
        m.diagram = DiagramId::Gm;
        assert!(matches!(orbit_profile(&m, Side::M, 64), Err(Error::NotCohomogeneityOne(_))));
        assert!(matches!(warp(&hopf(), &[0.1, 0.2], &[1.0], 1.0), Err(Error::GridMismatch { .. })));
        let triv = StarDiagram::new(DiagramId::TrivialS2);
        assert!(kaluza_klein(&triv, 1.0, 0.5).is_err());
        assert!(laplacian_identity_residual(&hopf(), &[0.0; 10], 64).is_err());
    }

    #[test]
    fn identity_residual_vanishes_on_constants() {
        let m = hopf();
        let n = 64;
        let length = m.orbit_space_length();
        let t: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * length / n as f64).collect();
        let u: Vec<f64> = t.iter().map(|t| (2.0 * t).cos()).collect();
        let w = warp(&m, &t, &u, 0.7).unwrap();
        assert!(laplacian_identity_residual(&w, &vec![2.5; n], n).unwrap() < 1e-9);
    }

    #[test]
    fn metric_json_round_trip_keeps_fingerprint() {
        let m = hopf();
        let n = 16;
        let t: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * m.orbit_space_length() / n as f64).collect();
        let w = warp(&m, &t, &vec![0.25; n], 0.5).unwrap();
        let back = MetricSpec::from_json(&serde_json::to_string(&w).unwrap()).unwrap();
        assert_eq!(back.fingerprint(), w.fingerprint());
        assert_eq!(back.warp_at(0.3), w.warp_at(0.3));
    }
}
