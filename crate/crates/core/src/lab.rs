//! Experiments across a star diagram: comparison of the two basic spectra,
//! joint eigenfunctions, the vertical-warping construction that separates
//! them, and consistency checks of the actions, transport and integration.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{gauss_legendre, haar_rule, GroupId, Quaternion};
use crate::diagrams::{
    check_commute, check_membership, check_projection_invariance, isotropy_probe, transport_invariant,
    Action, BasePoint, DiagramId, Point, StarDiagram, Transport,
};
use crate::eigen::{extrapolate, solve, BasicSpectrum};
use crate::error::{Error, Result};
use crate::geometry::{
    fiber_volume_at, fiber_volume_profile, orbit_coordinate, orbit_profile, orbit_volume_at,
    representative_point, warp, MetricSpec, OrbitProfile, Side,
};
use crate::sturm::{assemble, DiscreteOperator};

/// Floor of the isospectrality tolerance.
pub const COMPARE_TOL_FLOOR: f64 = 1e-8;
/// `broke_isospectrality` requires a shift larger than this many combined error estimates.
pub const BREAK_FACTOR: f64 = 10.0;

/// Default warp scales `2⁻⁴, …, 2⁴`.
pub fn default_scales() -> Vec<f64> {
    (-4..=4).map(|e| 2f64.powi(e)).collect()
}

fn check_diagram(d: DiagramId, m: &MetricSpec) -> Result<()> {
    if d == DiagramId::Gm || m.diagram == DiagramId::Gm {
        return Err(Error::NotCohomogeneityOne(DiagramId::Gm.to_string()));
    }
    if d != m.diagram {
        return Err(Error::InvalidParameter(format!("metric is for {}, not {d}", m.diagram)));
    }
    Ok(())
}

/// Operators on grids `n` and `2n`, their spectra, and the extrapolation.
struct SidePair {
    op: DiscreteOperator,
    coarse: BasicSpectrum,
    spectrum: BasicSpectrum,
}

fn solve_side(m: &MetricSpec, side: Side, n: usize, k: usize) -> Result<SidePair> {
    let run = |n: usize| -> Result<(DiscreteOperator, BasicSpectrum)> {
        let op = assemble(&orbit_profile(m, side, n)?)?;
        let s = solve(&op, k)?;
        Ok((op, s))
    };
    let (a, b) = rayon::join(|| run(n), || run(2 * n));
    let (op, coarse) = a?;
    let (_, fine) = b?;
    let spectrum = extrapolate(&coarse, &fine)?;
    Ok(SidePair { op, coarse, spectrum })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComparePair {
    pub index: usize,
    pub lambda_m: f64,
    pub lambda_m_prime: f64,
    pub err_m: f64,
    pub err_m_prime: f64,
    pub relgap: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CompareReport {
    pub diagram: DiagramId,
    pub fingerprint: String,
    pub n: usize,
    pub k: usize,
    pub pairs: Vec<ComparePair>,
    pub max_relative_gap: f64,
    pub tolerance: f64,
    pub isospectral: bool,
}

impl CompareReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,lambda_M,lambda_Mprime,relgap\n");
        for p in &self.pairs {
            out.push_str(&format!("{},{},{},{}\n", p.index, p.lambda_m, p.lambda_m_prime, p.relgap));
        }
        out
    }
}

/// Compares the extrapolated basic spectra of `M` and `M'` index by index.
///
/// The default tolerance is `max(1e-8, 3 × largest combined error estimate)`.
pub fn compare_basic_spectra(d: DiagramId, m: &MetricSpec, k: usize, n: usize) -> Result<CompareReport> {
    compare_with_tolerance(d, m, k, n, None)
}

pub fn compare_with_tolerance(
    d: DiagramId,
    m: &MetricSpec,
    k: usize,
    n: usize,
    tolerance: Option<f64>,
) -> Result<CompareReport> {
    check_diagram(d, m)?;
    let (a, b) = rayon::join(|| solve_side(m, Side::M, n, k), || solve_side(m, Side::MPrime, n, k));
    let (a, b) = (a?.spectrum, b?.spectrum);
    let pairs: Vec<ComparePair> = a
        .raw
        .iter()
        .zip(&b.raw)
        .enumerate()
        .map(|(i, (x, y))| ComparePair {
            index: i + 1,
            lambda_m: x.0,
            lambda_m_prime: y.0,
            err_m: x.1,
            err_m_prime: y.1,
            relgap: (x.0 - y.0).abs() / x.0.abs().max(y.0.abs()),
        })
        .collect();
    let max_relative_gap = pairs.iter().map(|p| p.relgap).fold(0.0, f64::max);
    let combined = pairs
        .iter()
        .map(|p| (p.err_m + p.err_m_prime) / p.lambda_m.abs().max(p.lambda_m_prime.abs()))
        .fold(0.0, f64::max);
    let tolerance = tolerance.unwrap_or(f64::max(COMPARE_TOL_FLOOR, 3.0 * combined));
    Ok(CompareReport {
        diagram: d,
        fingerprint: m.fingerprint(),
        n,
        k,
        pairs,
        max_relative_gap,
        tolerance,
        isospectral: max_relative_gap <= tolerance,
    })
}

/// Piecewise-linear interpolation of a cell-centered table, constant beyond
/// the outermost centers.
pub fn interpolate(t: &[f64], u: &[f64], s: f64) -> f64 {
    let n = t.len();
    if s <= t[0] {
        return u[0];
    }
    if s >= t[n - 1] {
        return u[n - 1];
    }
    let i = t.partition_point(|&x| x <= s) - 1;
    let a = (s - t[i]) / (t[i + 1] - t[i]);
    u[i] + a * (u[i + 1] - u[i])
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JointCheck {
    pub index: usize,
    pub lambda: f64,
    /// `‖A'u − λB'u‖/‖B'u‖` for the transported eigenvector.
    pub residual: f64,
    /// The same residual for the eigenvector on `M`.
    pub native_residual: f64,
}

/// Transports the `index`-th eigenvector of `M` to `M'` and measures how far
/// it is from an eigenvector of the `M'` operator with the same eigenvalue.
/// Index 0 is the constant function.
pub fn joint_eigenfunction_check(d: DiagramId, m: &MetricSpec, index: usize, n: usize) -> Result<JointCheck> {
    check_diagram(d, m)?;
    let diagram = StarDiagram::new(d);
    let op = assemble(&orbit_profile(m, Side::M, n)?)?;
    let op_prime = assemble(&orbit_profile(m, Side::MPrime, n)?)?;
    let (lambda, u, native) = if index == 0 {
        (0.0, vec![1.0; n], op.residual(&vec![1.0; n], 0.0))
    } else {
        let s = solve(&op, index)?;
        (s.raw[index - 1].0, s.eigenvectors[index - 1].clone(), s.residuals[index - 1])
    };
    let f = |x: &BasePoint| interpolate(&op.t, &u, orbit_coordinate(m, x).expect("cohomogeneity one"));
    let transported = transport_invariant(&diagram, f, Transport::ToPrime)?;
    let moved = op_prime
        .t
        .iter()
        .map(|&t| Ok(transported.eval(&diagram.proj_star(&representative_point(m, t)?))))
        .collect::<Result<Vec<f64>>>()?;
    Ok(JointCheck { index, lambda, residual: op_prime.residual(&moved, lambda), native_residual: native })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AuditVerdict {
    Consistent,
    Inconsistent,
    Undefined,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WarpReport {
    pub scale: f64,
    /// `λ₁` of the unwarped quotient `M'`.
    pub lambda1_unwarped: f64,
    pub err_unwarped: f64,
    /// `λ₁` of the quotient `M'` of the warped metric.
    pub lambda1_warped: f64,
    pub err_warped: f64,
    pub lhs: f64,
    /// Right-hand side with every integral over `M'`; `None` when `∫φ` vanishes.
    pub rhs: Option<f64>,
    /// Right-hand side with every integral over `P` in the warped measure.
    pub rhs_total_space: Option<f64>,
    pub mean_of_phi: f64,
    pub mean_of_phi_total_space: f64,
    /// `(∫ (cu)²)^½` over `M'`.
    pub warp_norm: f64,
    /// `max / min` of the ⋆-fiber volume under the warped metric.
    pub fiber_volume_variation: f64,
    pub broke_isospectrality: bool,
}

fn ratio_guarded(num: f64, mean: f64, l2: f64, vol: f64) -> Option<f64> {
    // |∫φ| ≤ vol^½ ‖φ‖ bounds the admissible denominator
    if mean.abs() < 1e-10 * (vol * l2 * l2).sqrt() {
        None
    } else {
        Some(num / mean)
    }
}

fn integrate_on(p: &OrbitProfile, f: &[f64]) -> f64 {
    p.integrate(f)
}

/// Warps the fibers of π by multiples of the first `M'` eigenfunction and
/// reports the first `M'` eigenvalue for every scale in `scales`.
pub fn warp_break(d: DiagramId, m: &MetricSpec, scales: &[f64], k: usize, n: usize) -> Result<Vec<WarpReport>> {
    check_diagram(d, m)?;
    if m.warp.is_some() && m.warp_scale != 0.0 {
        return Err(Error::InvalidParameter("warp_break starts from an unwarped metric".into()));
    }
    let base = solve_side(m, Side::MPrime, n, k)?;
    let u = base.coarse.eigenvectors[0].clone();
    let t = base.op.t.clone();
    let (lambda0, err0) = base.spectrum.raw[0];
    let u_profile = orbit_profile(m, Side::MPrime, n)?;
    let u_l2 = integrate_on(&u_profile, &u.iter().map(|x| x * x).collect::<Vec<_>>()).sqrt();
    scales
        .par_iter()
        .map(|&c| {
            let warped = warp(m, &t, &u, c)?;
            let side = solve_side(&warped, Side::MPrime, n, k)?;
            let (lambda1, err1) = side.spectrum.raw[0];
            let phi = &side.coarse.eigenvectors[0];
            let prime = orbit_profile(&warped, Side::MPrime, n)?;
            let total = orbit_profile(&warped, Side::P, n)?;
            let phi2: Vec<f64> = phi.iter().map(|x| x * x).collect();
            let cu2: Vec<f64> = u.iter().map(|x| c * c * x * x).collect();

            let mean = integrate_on(&prime, phi);
            let phi_l2 = integrate_on(&prime, &phi2).sqrt();
            let rhs = ratio_guarded(c * u_l2 * phi_l2, mean, phi_l2, prime.volume());

            let mean_p = integrate_on(&total, phi);
            let phi_l2_p = integrate_on(&total, &phi2).sqrt();
            let u_l2_p = integrate_on(&total, &cu2).sqrt();
            let rhs_p = ratio_guarded(u_l2_p * phi_l2_p, mean_p, phi_l2_p, total.volume());

            let fiber = fiber_volume_profile(&warped, Action::Star, n)?;
            Ok(WarpReport {
                scale: c,
                lambda1_unwarped: lambda0,
                err_unwarped: err0,
                lambda1_warped: lambda1,
                err_warped: err1,
                lhs: (lambda1 / lambda0).sqrt(),
                rhs,
                rhs_total_space: rhs_p,
                mean_of_phi: mean,
                mean_of_phi_total_space: mean_p,
                warp_norm: c * u_l2,
                fiber_volume_variation: fiber.variation(),
                broke_isospectrality: (lambda1 - lambda0).abs() > BREAK_FACTOR * (err0 + err1),
            })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Audit {
    pub lhs: f64,
    pub rhs: Option<f64>,
    pub verdict: AuditVerdict,
}

/// Compares the two sides of the warping inequality without asserting a direction.
pub fn inequality_audit(r: &WarpReport) -> Audit {
    let verdict = match r.rhs {
        None => AuditVerdict::Undefined,
        Some(rhs) if r.lhs <= rhs => AuditVerdict::Consistent,
        Some(_) => AuditVerdict::Inconsistent,
    };
    Audit { lhs: r.lhs, rhs: r.rhs, verdict }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FubiniCheck {
    /// `∫_P f` by direct quadrature on the total space.
    pub total_direct: f64,
    /// `∫_P f` from the `P` orbit profile.
    pub total_profile: f64,
    pub fiber_volume: f64,
    /// `∫_M f` by Gauss–Legendre quadrature on the orbit space.
    pub base: f64,
    /// `∫_M f` from the `M` orbit profile.
    pub base_profile: f64,
    pub relative_error: f64,
}

fn total_space_density(m: &MetricSpec, t: f64) -> f64 {
    let r = m.base_radius;
    let horizontal = match m.diagram {
        DiagramId::Hopf => 4.0 * r * r,
        _ => r * r,
    };
    horizontal * m.fiber_scale.sqrt() * m.warp_at(t).exp()
}

/// Integrates an invariant function `f(t)` over `P` directly (Haar
/// quadrature on S³, or a product rule on S² × S¹) and through the
/// submersion `π` as fiber volume times the base integral. The profile-based
/// totals on grid `n` are compared as well.
pub fn fubini_check<F: Fn(f64) -> f64 + Sync>(m: &MetricSpec, f: F, n: usize) -> Result<FubiniCheck> {
    check_diagram(m.diagram, m)?;
    let d = StarDiagram::new(m.diagram);
    let coord = |p: &Point| orbit_coordinate(m, &d.proj_bullet(p));
    let total_direct = match m.diagram {
        DiagramId::Hopf => {
            let rule = haar_rule(GroupId::S3, 24)?;
            let mut s = 0.0;
            for (g, w) in &rule.nodes {
                let p = Point::Quat(g.as_quaternion().unwrap_or(Quaternion::ONE));
                let t = coord(&p)?;
                s += w * f(t) * total_space_density(m, t);
            }
            s
        }
        _ => {
            let (zs, wz) = gauss_legendre(24, -1.0, 1.0);
            let k = 16;
            let step = std::f64::consts::TAU / k as f64;
            let mut s = 0.0;
            for (z, wz) in zs.iter().zip(&wz) {
                let rho = (1.0 - z * z).sqrt();
                for a in 0..k {
                    for b in 0..k {
                        let phi = step * a as f64;
                        let p = Point::Product { x: [rho * phi.cos(), rho * phi.sin(), *z], angle: step * b as f64 };
                        let t = coord(&p)?;
                        s += wz * step * step * f(t) * total_space_density(m, t);
                    }
                }
            }
            s
        }
    };
    let length = m.orbit_space_length();
    let (ts, ws) = gauss_legendre(48, 0.0, length);
    let mut base = 0.0;
    let mut base_abs = 0.0;
    for (t, w) in ts.iter().zip(&ws) {
        let v = orbit_volume_at(m, Side::M, *t)?;
        base += w * v * f(*t);
        base_abs += w * v * f(*t).abs();
    }
    let fiber_volume = fiber_volume_at(m, Action::Bullet, 0.5 * length)?;
    let pm = orbit_profile(m, Side::M, n)?;
    let pp = orbit_profile(m, Side::P, n)?;
    let base_profile = pm.integrate(&pm.sample(&f));
    let total_profile = pp.integrate(&pp.sample(&f));
    let scale = (fiber_volume * base_abs).max(total_direct.abs());
    let relative_error = ((total_direct - fiber_volume * base).abs() / scale)
        .max((total_profile - fiber_volume * base_profile).abs() / scale);
    Ok(FubiniCheck { total_direct, total_profile, fiber_volume, base, base_profile, relative_error })
}

/// A random polynomial in `cos(t/r)` of degree ≤ 5; invariant on every side.
pub fn random_invariant(m: &MetricSpec, rng: &mut impl Rng) -> impl Fn(f64) -> f64 + Sync {
    let coeffs: Vec<f64> = (0..6).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let r = m.base_radius;
    move |t: f64| {
        let c = (t / r).cos();
        coeffs.iter().rev().fold(0.0, |acc, a| acc * c + a)
    }
}

/// Invariant functions on `M` used to probe transport: each is constant on
/// the orbits of the residual ⋆-action.
pub fn invariant_family(d: DiagramId) -> Vec<(&'static str, fn(&BasePoint) -> f64)> {
    match d {
        DiagramId::TrivialS2 => vec![
            ("z", |x| x.0[2]),
            ("z^2+1", |x| x.0[2] * x.0[2] + 1.0),
            ("exp(z)", |x| x.0[2].exp()),
        ],
        DiagramId::Hopf => vec![
            ("x", |x| x.0[0]),
            ("x^3-x", |x| x.0[0].powi(3) - x.0[0]),
            ("cos(2x)", |x| (2.0 * x.0[0]).cos()),
        ],
        DiagramId::Gm => vec![
            ("Re a", |x| x.0[0]),
            ("|a|^2", |x| x.0[..4].iter().map(|v| v * v).sum()),
            ("<a,b>", |x| (0..4).map(|i| x.0[i] * x.0[4 + i]).sum()),
            ("Re b", |x| x.0[4]),
        ],
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransportAudit {
    pub diagram: DiagramId,
    pub samples: usize,
    /// `max |T(f + g) − T f − T g|` over samples and pairs.
    pub additive: f64,
    /// `max |T(f g) − T f · T g|`.
    pub multiplicative: f64,
    /// `max |T⁻¹(T f) − f|` on `M`.
    pub involution: f64,
    /// `max |T 1 − 1|`.
    pub unit: f64,
}

pub fn transport_audit(d: DiagramId, samples: usize, seed: u64) -> Result<TransportAudit> {
    let diagram = StarDiagram::new(d);
    let family = invariant_family(d);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let points: Vec<Point> = (0..samples).map(|_| diagram.random_point(&mut rng)).collect();
    let ys: Vec<BasePoint> = points.iter().map(|p| diagram.proj_star(p)).collect();
    let xs: Vec<BasePoint> = points.iter().map(|p| diagram.proj_bullet(p)).collect();
    let mut audit = TransportAudit { diagram: d, samples, additive: 0.0, multiplicative: 0.0, involution: 0.0, unit: 0.0 };

    let one = transport_invariant(&diagram, |_: &BasePoint| 1.0, Transport::ToPrime)?;
    for y in &ys {
        audit.unit = audit.unit.max((one.eval(y) - 1.0).abs());
    }
    for (_, f) in &family {
        let tf = transport_invariant(&diagram, f, Transport::ToPrime)?;
        let back = transport_invariant(&diagram, |y: &BasePoint| tf.eval(y), Transport::FromPrime)?;
        for x in &xs {
            audit.involution = audit.involution.max((back.eval(x) - f(x)).abs());
        }
        for (_, g) in &family {
            let tg = transport_invariant(&diagram, g, Transport::ToPrime)?;
            let sum = transport_invariant(&diagram, |x: &BasePoint| f(x) + g(x), Transport::ToPrime)?;
            let prod = transport_invariant(&diagram, |x: &BasePoint| f(x) * g(x), Transport::ToPrime)?;
            for y in &ys {
                let (a, b) = (tf.eval(y), tg.eval(y));
                audit.additive = audit.additive.max((sum.eval(y) - (a + b)).abs());
                audit.multiplicative = audit.multiplicative.max((prod.eval(y) - a * b).abs());
            }
        }
    }
    Ok(audit)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerifyReport {
    pub diagram: DiagramId,
    pub samples: usize,
    pub seed: u64,
    pub commute_residual: f64,
    pub membership_bullet: f64,
    pub membership_star: f64,
    pub projection_bullet: f64,
    pub projection_star: f64,
    /// Points probed for •-isotropy.
    pub freeness_points: usize,
    /// Points where a non-identity element of the probe net fixed the point.
    pub freeness_violations: usize,
    pub bullet_free: bool,
}

/// Probe-net resolution used for freeness checks.
pub const FREENESS_GRID: usize = 64;

pub fn verify_diagram(d: DiagramId, samples: usize, seed: u64) -> VerifyReport {
    let diagram = StarDiagram::new(d);
    let commute = check_commute(&diagram, samples, seed);
    let (mb, ms) = check_membership(&diagram, samples, seed.wrapping_add(1));
    let (pb, ps) = check_projection_invariance(&diagram, samples, seed.wrapping_add(2));
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(3));
    let points: Vec<Point> = (0..100).map(|_| diagram.random_point(&mut rng)).collect();
    let violations = points
        .par_iter()
        .filter(|p| {
            isotropy_probe(&diagram, Action::Bullet, p, FREENESS_GRID)
                .iter()
                .any(|g| g.distance_to_identity() > 1e-12)
        })
        .count();
    VerifyReport {
        diagram: d,
        samples,
        seed,
        commute_residual: commute,
        membership_bullet: mb,
        membership_star: ms,
        projection_bullet: pb,
        projection_star: ps,
        freeness_points: points.len(),
        freeness_violations: violations,
        bullet_free: violations == 0,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Connection;

    fn hopf() -> MetricSpec {
        MetricSpec::default_for(DiagramId::Hopf).unwrap()
    }

    fn triv() -> MetricSpec {
        MetricSpec::default_for(DiagramId::TrivialS2).unwrap()
    }

    #[test]
    fn trivial_sides_coincide() {
        let r = compare_basic_spectra(DiagramId::TrivialS2, &triv(), 4, 256).unwrap();
        assert!(r.max_relative_gap <= 1e-12, "{}", r.max_relative_gap);
        assert!(r.isospectral);
    }

    #[test]
    fn hopf_is_isospectral_and_matches_zonal_values() {
        let r = compare_basic_spectra(DiagramId::Hopf, &hopf(), 5, 512).unwrap();
        assert!(r.isospectral);
        for (p, l) in r.pairs.iter().zip([8.0, 24.0, 48.0, 80.0, 120.0]) {
            assert!((p.lambda_m - l).abs() < 1e-5 * l, "{}", p.lambda_m);
        }
    }

    #[test]
    fn flat_connection_is_not_isospectral() {
        let m = triv().with_connection(Connection::Flat);
        let r = compare_basic_spectra(DiagramId::TrivialS2, &m, 3, 256).unwrap();
        assert!(!r.isospectral);
    }

    #[test]
    fn gm_is_rejected() {
        assert!(matches!(
            compare_basic_spectra(DiagramId::Gm, &hopf(), 3, 64),
            Err(Error::NotCohomogeneityOne(_))
        ));
        assert!(compare_basic_spectra(DiagramId::TrivialS2, &hopf(), 3, 64).is_err());
    }

    #[test]
    fn joint_eigenfunctions() {
        let c = joint_eigenfunction_check(DiagramId::Hopf, &hopf(), 1, 256).unwrap();
        assert!(c.residual <= 1e-8, "{c:?}");
        let c = joint_eigenfunction_check(DiagramId::TrivialS2, &triv(), 1, 256).unwrap();
        // both sides are computed independently, so agreement is to rounding
        assert!(c.residual <= 2.0 * c.native_residual + 1e-12, "{c:?}");
        let c = joint_eigenfunction_check(DiagramId::Hopf, &hopf(), 0, 128).unwrap();
        assert_eq!((c.residual, c.lambda), (0.0, 0.0));
    }

    #[test]
    fn zero_scale_is_a_control() {
        let r = warp_break(DiagramId::Hopf, &hopf(), &[0.0, 1.0], 2, 256).unwrap();
        assert_eq!(r[0].lambda1_warped, r[0].lambda1_unwarped);
        assert!(!r[0].broke_isospectrality);
        assert_eq!(r[0].lhs, 1.0);
        assert!(r[1].broke_isospectrality);
        assert_eq!(inequality_audit(&r[0]).lhs, 1.0);
    }

    #[test]
    fn constant_warp_keeps_base_side() {
        let m = hopf();
        let n = 128;
        let t: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) * m.orbit_space_length() / n as f64).collect();
        let w = warp(&m, &t, &vec![0.4; n], 1.0).unwrap();
        let a = solve_side(&m, Side::M, n, 2).unwrap().spectrum;
        let b = solve_side(&w, Side::M, n, 2).unwrap().spectrum;
        assert!((a.first() - b.first()).abs() <= 1e-10 * a.first());
    }

    #[test]
    fn audit_verdicts() {
        let mut r = warp_break(DiagramId::Hopf, &hopf(), &[0.5], 1, 128).unwrap().remove(0);
        r.rhs = None;
        assert_eq!(inequality_audit(&r).verdict, AuditVerdict::Undefined);
        r.rhs = Some(r.lhs + 1.0);
        assert_eq!(inequality_audit(&r).verdict, AuditVerdict::Consistent);
    }

    #[test]
    fn fubini() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for m in [hopf(), triv()] {
            for _ in 0..3 {
                let f = random_invariant(&m, &mut rng);
                let c = fubini_check(&m, f, 256).unwrap();
                assert!(c.relative_error <= 1e-9, "{c:?}");
            }
        }
    }

    #[test]
    fn transport_is_a_ring_isomorphism() {
        for d in DiagramId::ALL {
            let a = transport_audit(d, 200, 3).unwrap();
            assert!(a.additive <= 1e-12 && a.multiplicative <= 1e-12 && a.unit == 0.0, "{a:?}");
            assert!(a.involution <= 1e-12, "{a:?}");
        }
    }

    #[test]
    fn gm_actions_verify() {
        let r = verify_diagram(DiagramId::Gm, 200, 7);
        assert!(r.commute_residual <= 1e-12);
        assert!(r.membership_bullet <= 1e-12 && r.membership_star <= 1e-12);
        assert!(r.bullet_free);
    }

    #[test]
    fn interpolation_hits_nodes() {
        let t = [0.5, 1.5, 2.5];
        let u = [1.0, 3.0, -1.0];
        assert_eq!(interpolate(&t, &u, 1.5), 3.0);
        assert_eq!(interpolate(&t, &u, 1.0), 2.0);
        assert_eq!(interpolate(&t, &u, 0.0), 1.0);
    }
}
