//! Inverse curvature flows `X_t = (σ_{k-1}/σ_k)(κ)·ν` on starshaped
//! hypersurfaces, quermassintegrals, and numerical checks of the identities
//! and inequalities that connect them.
//!
//! * [`symfunc`]: elementary symmetric functions, Gårding cones, Newton and
//!   MacLaurin inequalities.
//! * [`geometry`]: radial graphs over `S^1` and axisymmetric `S^2`, pointwise
//!   curvature data, quermassintegrals and isoperimetric ratios.
//! * [`flow`]: adaptive Runge–Kutta integration of the raw and normalized flows.
//! * [`verify`]: checks of the evolution equations, integral identities and
//!   Alexandrov–Fenchel inequalities, reported as [`verify::IdentityReport`]s.

// `!(x > 0.0)` is used on purpose so that NaN fails positivity checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod csv;
pub mod error;
pub mod flow;
pub mod geometry;
pub mod symfunc;
pub mod verify;

pub use error::{Error, Result};
pub use flow::{run, FlowConfig, FlowError, FlowMode, FlowState, TrajectoryRecord};
pub use geometry::{
    compute_geometry, iso_ratio, iso_ratio_ball, make_shape, quermass, quermass_minkowski, quermass_sigma,
    roundness, PointwiseGeometry, QuermassVector, RadialGraph, ShapeSpec,
};
pub use symfunc::{cnk, elem_sym, CurvatureVector};
pub use verify::{IdentityReport, LagrangianCurve};
