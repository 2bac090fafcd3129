//! Finite-volume discretization of the reduced problem `−(w u′)′ = λ w u`.
//!
//! Unknowns live at cell centers. The stiffness form is
//! `uᵀAv = Σ w_{i+½} (u_{i+1} − u_i)(v_{i+1} − v_i) / Δt` over interior faces
//! and the mass matrix is `B = diag(w_i Δt)`. Boundary faces carry no flux,
//! which is the natural condition at both collapsing and reflecting ends.

use serde::{Deserialize, Serialize};

use crate::diagrams::DiagramId;
use crate::error::{Error, Result};
use crate::geometry::{Endpoint, OrbitProfile, Side};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DiscreteOperator {
    pub n: usize,
    pub dt: f64,
    /// Diagonal of `A`.
    pub diag: Vec<f64>,
    /// Off-diagonal `A_{i,i+1} = A_{i+1,i}`, length `n − 1`.
    pub off: Vec<f64>,
    /// Diagonal of `B`.
    pub mass: Vec<f64>,
    pub endpoints: [Endpoint; 2],
    pub side: Side,
    pub diagram: Option<DiagramId>,
    pub fingerprint: String,
    /// Cell centers, kept for reporting and transport.
    pub t: Vec<f64>,
}

pub fn assemble(p: &OrbitProfile) -> Result<DiscreteOperator> {
    let n = p.n;
    if p.w.len() != n || p.w_face.len() != n + 1 {
        return Err(Error::GridMismatch { expected: n, got: p.w.len() });
    }
    if n < 3 {
        return Err(Error::InvalidParameter("need at least 3 cells".into()));
    }
    for (i, &w) in p.w.iter().enumerate() {
        if !(w > 0.0) {
            return Err(Error::NonpositiveWeight { index: i, value: w });
        }
    }
    for i in 1..n {
        let w = p.w_face[i];
        if !(w > 0.0) {
            return Err(Error::NonpositiveWeight { index: i, value: w });
        }
    }
    let dt = p.dt();
    let off: Vec<f64> = (1..n).map(|i| -p.w_face[i] / dt).collect();
    let mut diag = vec![0.0; n];
    for (i, &o) in off.iter().enumerate() {
        diag[i] -= o;
        diag[i + 1] -= o;
    }
    Ok(DiscreteOperator {
        n,
        dt,
        diag,
        off,
        mass: p.w.iter().map(|w| w * dt).collect(),
        endpoints: p.endpoints,
        side: p.side,
        diagram: p.diagram,
        fingerprint: p.fingerprint.clone(),
        t: p.t.clone(),
    })
}

impl DiscreteOperator {
    /// `Au` in flux form, so constants map to exact zeros.
    pub fn apply_a(&self, u: &[f64]) -> Vec<f64> {
        let n = self.n;
        let flux: Vec<f64> = (0..n - 1).map(|i| -self.off[i] * (u[i + 1] - u[i])).collect();
        (0..n)
            .map(|i| {
                let left = if i > 0 { flux[i - 1] } else { 0.0 };
                let right = if i + 1 < n { flux[i] } else { 0.0 };
                left - right
            })
            .collect()
    }

    pub fn apply_b(&self, u: &[f64]) -> Vec<f64> {
        u.iter().zip(&self.mass).map(|(u, b)| u * b).collect()
    }

    /// `uᵀAv` evaluated face by face.
    pub fn energy(&self, u: &[f64], v: &[f64]) -> f64 {
        (0..self.n - 1)
            .map(|i| -self.off[i] * (u[i + 1] - u[i]) * (v[i + 1] - v[i]))
            .sum()
    }

    pub fn b_inner(&self, u: &[f64], v: &[f64]) -> f64 {
        u.iter().zip(v).zip(&self.mass).map(|((u, v), b)| u * v * b).sum()
    }

    pub fn b_norm(&self, u: &[f64]) -> f64 {
        self.b_inner(u, u).sqrt()
    }

    /// Max-row-sum norm of `A`.
    pub fn a_norm(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                let mut s = self.diag[i].abs();
                if i > 0 {
                    s += self.off[i - 1].abs();
                }
                if i + 1 < self.n {
                    s += self.off[i].abs();
                }
                s
            })
            .fold(0.0, f64::max)
    }

    /// `‖Au − λBu‖ / ‖Bu‖` in the Euclidean norm.
    pub fn residual(&self, u: &[f64], lambda: f64) -> f64 {
        let au = self.apply_a(u);
        let bu = self.apply_b(u);
        let r: f64 = au.iter().zip(&bu).map(|(a, b)| (a - lambda * b).powi(2)).sum();
        let d: f64 = bu.iter().map(|b| b * b).sum();
        (r / d).sqrt()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut a = vec![vec![0.0; self.n]; self.n];
        for i in 0..self.n {
            a[i][i] = self.diag[i];
            if i + 1 < self.n {
                a[i][i + 1] = self.off[i];
                a[i + 1][i] = self.off[i];
            }
        }
        a
    }
}

/// Removes the `B`-weighted mean.
pub fn zero_mean_project(op: &DiscreteOperator, u: &[f64]) -> Result<Vec<f64>> {
    if u.len() != op.n {
        return Err(Error::GridMismatch { expected: op.n, got: u.len() });
    }
    let total: f64 = op.mass.iter().sum();
    let mean = op.b_inner(u, &vec![1.0; op.n]) / total;
    Ok(u.iter().map(|x| x - mean).collect())
}
