//! Generalized tridiagonal eigenproblem `A u = λ B u`.
//!
//! The problem is symmetrized to `C = B^{-½} A B^{-½}`. Eigenvalues come from
//! Sturm-sequence bisection, eigenvectors from inverse iteration with a
//! pivoted tridiagonal LU. Eigenvectors are returned in the original
//! variables, `B`-normalized, with the first significant entry positive.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagrams::DiagramId;
use crate::error::{Error, Result};
use crate::geometry::{orbit_profile, MetricSpec, Side};
use crate::sturm::{assemble, zero_mean_project, DiscreteOperator};

/// Relative bisection tolerance.
pub const BISECTION_TOL: f64 = 1e-12;
/// Largest supported number of modes.
pub const MAX_MODES: usize = 64;

const MAX_BISECTION_STEPS: usize = 2000;
const MAX_INVERSE_STEPS: usize = 12;

/// Eigenvalues closer than this are reported as one value with multiplicity.
pub fn multiplicity_gap(lambda: f64) -> f64 {
    f64::max(1e-8, 1e-6 * lambda.abs())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Eigenvalue {
    pub lambda: f64,
    pub mult: usize,
    pub err: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BasicSpectrum {
    pub diagram: Option<DiagramId>,
    pub side: Side,
    pub fingerprint: String,
    pub n: usize,
    /// Finer grid of an extrapolated pair.
    pub n_fine: Option<usize>,
    pub values: Vec<Eigenvalue>,
    /// Ungrouped eigenvalues `λ₁ ≤ … ≤ λ_k` and their error estimates.
    #[serde(skip)]
    pub raw: Vec<(f64, f64)>,
    /// `B`-normalized eigenvectors matching `raw`, on the solve grid.
    #[serde(skip)]
    pub eigenvectors: Vec<Vec<f64>>,
    /// Residual `‖Au − λBu‖/‖Bu‖` of each raw pair on the solve grid.
    #[serde(skip)]
    pub residuals: Vec<f64>,
}

impl BasicSpectrum {
    pub fn lambdas(&self) -> Vec<f64> {
        self.raw.iter().map(|r| r.0).collect()
    }

    pub fn errors(&self) -> Vec<f64> {
        self.raw.iter().map(|r| r.1).collect()
    }

    pub fn first(&self) -> f64 {
        self.raw[0].0
    }

    fn from_raw(
        op_like: (&Option<DiagramId>, Side, &str, usize),
        raw: Vec<(f64, f64)>,
        eigenvectors: Vec<Vec<f64>>,
        residuals: Vec<f64>,
    ) -> BasicSpectrum {
        BasicSpectrum {
            diagram: *op_like.0,
            side: op_like.1,
            fingerprint: op_like.2.to_string(),
            n: op_like.3,
            n_fine: None,
            values: group(&raw),
            raw,
            eigenvectors,
            residuals,
        }
    }
}

fn group(raw: &[(f64, f64)]) -> Vec<Eigenvalue> {
    let mut out: Vec<Eigenvalue> = Vec::new();
    let mut sum = 0.0;
    for &(l, e) in raw {
        match out.last_mut() {
            Some(last) if (l - last.lambda).abs() <= multiplicity_gap(last.lambda) => {
                sum += l;
                last.mult += 1;
                last.err = last.err.max(e);
                last.lambda = sum / last.mult as f64;
            }
            _ => {
                sum = l;
                out.push(Eigenvalue { lambda: l, mult: 1, err: e });
            }
        }
    }
    out
}

/// Symmetric tridiagonal `C = B^{-½} A B^{-½}`.
struct SymTri {
    d: Vec<f64>,
    e: Vec<f64>,
    norm: f64,
}

impl SymTri {
    fn from_operator(op: &DiscreteOperator) -> SymTri {
        let s: Vec<f64> = op.mass.iter().map(|b| 1.0 / b.sqrt()).collect();
        let d: Vec<f64> = (0..op.n).map(|i| op.diag[i] * s[i] * s[i]).collect();
        let e: Vec<f64> = (0..op.n - 1).map(|i| op.off[i] * s[i] * s[i + 1]).collect();
        let norm = (0..op.n)
            .map(|i| {
                let l = if i > 0 { e[i - 1].abs() } else { 0.0 };
                let r = if i + 1 < op.n { e[i].abs() } else { 0.0 };
                d[i].abs() + l + r
            })
            .fold(0.0, f64::max);
        SymTri { d, e, norm }
    }

    /// Number of eigenvalues strictly below `x`.
    fn count_below(&self, x: f64) -> usize {
        let pivmin = f64::MIN_POSITIVE.max(f64::EPSILON * self.norm * 1e-3);
        let mut count = 0;
        let mut q = self.d[0] - x;
        for i in 0..self.d.len() {
            if i > 0 {
                q = self.d[i] - x - self.e[i - 1] * self.e[i - 1] / q;
            }
            if q.abs() < pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// The `j`-th smallest eigenvalue (0-based).
    fn bisect(&self, j: usize) -> Result<f64> {
        let mut lo = -self.norm - 1.0;
        let mut hi = self.norm + 1.0;
        for _ in 0..MAX_BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                return Ok(mid);
            }
            if self.count_below(mid) > j {
                hi = mid;
            } else {
                lo = mid;
            }
            let scale = lo.abs().max(hi.abs());
            if hi - lo <= BISECTION_TOL * scale || hi - lo <= f64::EPSILON * self.norm * 1e-4 {
                return Ok(0.5 * (lo + hi));
            }
        }
        Err(Error::ConvergenceFailure(format!("bisection for eigenvalue {j}")))
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        (0..n)
            .map(|i| {
                let mut s = self.d[i] * x[i];
                if i > 0 {
                    s += self.e[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += self.e[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    fn shifted_lu(&self, sigma: f64) -> TriLu {
        TriLu::factor(
            self.d.iter().map(|d| d - sigma).collect(),
            self.e.clone(),
            self.e.clone(),
            f64::EPSILON * self.norm,
        )
    }
}

/// LU factorization of a general tridiagonal matrix with partial pivoting.
struct TriLu {
    d: Vec<f64>,
    dl: Vec<f64>,
    du: Vec<f64>,
    du2: Vec<f64>,
    swapped: Vec<bool>,
}

impl TriLu {
    fn factor(mut d: Vec<f64>, mut dl: Vec<f64>, mut du: Vec<f64>, tiny: f64) -> TriLu {
        let n = d.len();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n.saturating_sub(1)];
        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swapped[i] = true;
            }
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = tiny;
        }
        TriLu { d, dl, du, du2, swapped }
    }

    fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = b.len();
        let mut x = b.to_vec();
        for i in 0..n - 1 {
            if self.swapped[i] {
                let temp = x[i];
                x[i] = x[i + 1];
                x[i + 1] = temp - self.dl[i] * x[i];
            } else {
                x[i + 1] -= self.dl[i] * x[i];
            }
        }
        x[n - 1] /= self.d[n - 1];
        if n > 1 {
            x[n - 2] = (x[n - 2] - self.du[n - 2] * x[n - 1]) / self.d[n - 2];
        }
        for i in (0..n.saturating_sub(2)).rev() {
            x[i] = (x[i] - self.du[i] * x[i + 1] - self.du2[i] * x[i + 2]) / self.d[i];
        }
        x
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> f64 {
    let n = dot(v, v).sqrt();
    v.iter_mut().for_each(|x| *x /= n);
    n
}

fn orthogonalize(v: &mut [f64], basis: &[Vec<f64>]) {
    for b in basis {
        let c = dot(v, b);
        v.iter_mut().zip(b).for_each(|(x, y)| *x -= c * y);
    }
}

/// First `k` positive eigenvalues and `B`-normalized eigenvectors.
pub fn solve(op: &DiscreteOperator, k: usize) -> Result<BasicSpectrum> {
    if k == 0 || k >= op.n {
        return Err(Error::InvalidParameter(format!("need 1 ≤ k < n (k = {k}, n = {})", op.n)));
    }
    if k > MAX_MODES {
        return Err(Error::InvalidParameter(format!("k ≤ {MAX_MODES} supported")));
    }
    let c = SymTri::from_operator(op);
    let lambdas: Vec<f64> = (0..=k).into_par_iter().map(|j| c.bisect(j)).collect::<Result<_>>()?;
    if lambdas[0].abs() > 1e-8 * c.norm.max(1.0) {
        return Err(Error::ConvergenceFailure(format!("missing zero mode (λ₀ = {:e})", lambdas[0])));
    }

    // the zero mode of C is B^{½}·1
    let mut zero: Vec<f64> = op.mass.iter().map(|b| b.sqrt()).collect();
    normalize(&mut zero);
    let mut basis = vec![zero];
    let mut vectors = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    for (j, &lambda) in lambdas.iter().enumerate().skip(1) {
        let lu = c.shifted_lu(lambda);
        // deterministic start with components along every mode
        let mut y: Vec<f64> = (0..op.n).map(|i| 1.0 + ((i * 7 + j * 13) % 17) as f64 / 17.0).collect();
        orthogonalize(&mut y, &basis);
        normalize(&mut y);
        // iterate until the residual stops improving
        let mut best = f64::INFINITY;
        for step in 0..MAX_INVERSE_STEPS {
            let mut next = lu.solve(&y);
            orthogonalize(&mut next, &basis);
            orthogonalize(&mut next, &basis);
            normalize(&mut next);
            y = next;
            let cy = c.apply(&y);
            let r: f64 = cy.iter().zip(&y).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt();
            if step >= 2 && r > 0.5 * best {
                break;
            }
            best = best.min(r);
        }
        if best > 1e-10 * c.norm {
            return Err(Error::ConvergenceFailure(format!("inverse iteration for eigenvalue {j}")));
        }
        let mut u: Vec<f64> = y.iter().zip(&op.mass).map(|(y, b)| y / b.sqrt()).collect();
        orient(&mut u);
        residuals.push(op.residual(&u, lambda));
        basis.push(y);
        vectors.push(u);
    }
    let raw = lambdas[1..].iter().map(|&l| (l, 0.0)).collect();
    Ok(BasicSpectrum::from_raw(
        (&op.diagram, op.side, &op.fingerprint, op.n),
        raw,
        vectors,
        residuals,
    ))
}

/// Flips `u` so that its first significant entry is positive.
pub fn orient(u: &mut [f64]) {
    let max = u.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if let Some(first) = u.iter().find(|x| x.abs() > 1e-6 * max) {
        if *first < 0.0 {
            u.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Rayleigh quotient of the zero-mean part of `u`.
pub fn rayleigh(op: &DiscreteOperator, u: &[f64]) -> Result<f64> {
    let v = zero_mean_project(op, u)?;
    let bb = op.b_inner(&v, &v);
    let scale = op.b_inner(u, u);
    if !(bb > 1e-28 * scale) || bb == 0.0 {
        return Err(Error::ZeroVector);
    }
    Ok(op.energy(&v, &v) / bb)
}

/// Richardson extrapolation of a pair of second-order spectra.
pub fn extrapolate(coarse: &BasicSpectrum, fine: &BasicSpectrum) -> Result<BasicSpectrum> {
    if coarse.fingerprint != fine.fingerprint || coarse.side != fine.side {
        return Err(Error::FingerprintMismatch(
            format!("{}/{}", coarse.fingerprint, coarse.side.as_str()),
            format!("{}/{}", fine.fingerprint, fine.side.as_str()),
        ));
    }
    let k = coarse.raw.len().min(fine.raw.len());
    let raw: Vec<(f64, f64)> = (0..k)
        .map(|i| {
            let (a, b) = (coarse.raw[i].0, fine.raw[i].0);
            (b + (b - a) / 3.0, (b - a).abs() / 3.0)
        })
        .collect();
    let mut out = BasicSpectrum::from_raw(
        (&fine.diagram, fine.side, &fine.fingerprint, coarse.n),
        raw,
        fine.eigenvectors[..k.min(fine.eigenvectors.len())].to_vec(),
        fine.residuals[..k.min(fine.residuals.len())].to_vec(),
    );
    out.n_fine = Some(fine.n);
    Ok(out)
}

/// Extrapolated basic spectrum of one side, from grids `n` and `2n`.
pub fn basic_spectrum(m: &MetricSpec, side: Side, n: usize, k: usize) -> Result<BasicSpectrum> {
    let run = |n: usize| -> Result<BasicSpectrum> { solve(&assemble(&orbit_profile(m, side, n)?)?, k) };
    let (coarse, fine) = rayon::join(|| run(n), || run(2 * n));
    extrapolate(&coarse?, &fine?)
}
