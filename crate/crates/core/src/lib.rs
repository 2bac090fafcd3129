//! Basic (group-invariant) Laplace spectra of the two quotients of a star
//! diagram `M ← P → M'`, where `P` carries two commuting free actions of a
//! compact group.
//!
//! * [`algebra`]: quaternions, the structure groups and Haar quadrature.
//! * [`diagrams`]: the catalogued diagrams, their actions, projections and
//!   transport of invariant functions.
//! * [`geometry`]: invariant metrics, orbit-volume profiles, mean curvature.
//! * [`sturm`] and [`eigen`]: the reduced weighted eigenproblem.
//! * [`lab`]: comparisons, warping runs and consistency checks.
//! * [`cli`]: the `bsl` command-line tool.

pub mod algebra;
pub mod cli;
pub mod diagrams;
pub mod eigen;
pub mod error;
pub mod geometry;
pub mod lab;
pub mod sturm;

pub use error::{Error, Result};
