//! Quadrature rules for the Haar measure of the circle and of S³.
//!
//! Volumes follow the round metrics: the circle has length 2π and the unit
//! quaternions have volume 2π². The S³ rule is a product rule in Hopf
//! coordinates `q = cos η e^{iξ₁} + sin η e^{iξ₂} j`, where the volume form is
//! `½ ds dξ₁ dξ₂` with `s = sin² η`. Gauss–Legendre nodes in `s` and uniform
//! nodes in both angles make the rule exact for polynomial integrands on R⁴ of
//! total degree below `order`.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use super::group::{GroupElement, GroupId};
use super::quaternion::Quaternion;
use crate::error::{Error, Result};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HaarRule {
    pub group: GroupId,
    pub order: usize,
    pub nodes: Vec<(GroupElement, f64)>,
}

impl HaarRule {
    pub fn total_weight(&self) -> f64 {
        self.nodes.iter().map(|(_, w)| w).sum()
    }

    pub fn integrate<F: Fn(&GroupElement) -> f64>(&self, f: F) -> f64 {
        self.nodes.iter().map(|(g, w)| w * f(g)).sum()
    }

    /// Polynomial degree (on the ambient embedding) integrated exactly.
    pub fn exactness_degree(&self) -> usize {
        self.order.saturating_sub(1)
    }
}

pub fn haar_rule(group: GroupId, order: usize) -> Result<HaarRule> {
    if order == 0 {
        return Err(Error::InvalidParameter("Haar rule order must be at least 1".into()));
    }
    let nodes = match group {
        GroupId::Circle => {
            let w = TAU / order as f64;
            (0..order)
                .map(|j| (GroupElement::circle(TAU * j as f64 / order as f64), w))
                .collect()
        }
        GroupId::S3 => {
            let m = order.div_ceil(2);
            let (s_nodes, s_weights) = gauss_legendre(m, 0.0, 1.0);
            let dxi = TAU / order as f64;
            let mut nodes = Vec::with_capacity(m * order * order);
            for (s, ws) in s_nodes.iter().zip(&s_weights) {
                let (r1, r2) = ((1.0 - s).sqrt(), s.sqrt());
                for j1 in 0..order {
                    let xi1 = dxi * j1 as f64;
                    for j2 in 0..order {
                        let xi2 = dxi * j2 as f64;
                        // z1 + z2 j with z1 = r1 e^{iξ₁}, z2 = r2 e^{iξ₂}
                        let q = Quaternion::new(
                            r1 * xi1.cos(),
                            r1 * xi1.sin(),
                            r2 * xi2.cos(),
                            r2 * xi2.sin(),
                        );
                        nodes.push((GroupElement::S3 { q }, 0.5 * ws * dxi * dxi));
                    }
                }
            }
            nodes
        }
        GroupId::Sp2 => return Err(Error::UnsupportedGroup(group)),
    };
    Ok(HaarRule { group, order, nodes })
}

/// Gauss–Legendre nodes and weights on `[a, b]`.
pub fn gauss_legendre(m: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; m];
    let mut w = vec![0.0; m];
    let half = 0.5 * (b - a);
    let mid = 0.5 * (b + a);
    for i in 0..m.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(m, z);
        if d != 0.0 {
            dp = d;
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = mid - half * z;
        x[m - 1 - i] = mid + half * z;
        w[i] = half * wi;
        w[m - 1 - i] = half * wi;
    }
    (x, w)
}

fn legendre_with_derivative(m: usize, z: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, z);
    if m == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}
