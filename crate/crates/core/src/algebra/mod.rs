//! Quaternion and compact-group arithmetic, and Haar quadrature.

mod group;
mod haar;
mod quaternion;

pub use group::{group_mul, GroupElement, GroupId, QMat2};
pub use haar::{gauss_legendre, haar_rule, HaarRule};
pub use quaternion::{quat_conj, quat_mul, Quaternion};
