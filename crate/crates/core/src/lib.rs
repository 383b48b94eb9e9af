//! Numerical verification toolkit for sharp weighted Hardy-type inequalities
//! in the Haar-measure (dx/x) convexity frame: functionals for both sides of
//! each inequality, a declarative catalog with per-regime direction dispatch,
//! equality checks for the extremal families, sharpness probing by ratio
//! maximization, and Lorentz quasi-norm comparisons with sharp two-sided
//! bounds.
//!
//! Everything here is pure: expressions, domains and step functions are
//! immutable after construction and safe to share across threads; parameter
//! grids may be evaluated concurrently.
//!
//! Comparisons are written in the NaN-rejecting form `!(x > 0.0)` on purpose:
//! parameters and integrand values may be NaN and must fail validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::excessive_precision)]

pub mod catalog;
pub mod error;
pub mod funcspace;
pub mod hardyops;
pub mod lorentz;
pub mod params;
pub mod quad;
pub mod report;
pub mod rng;
pub mod special;

pub use error::{Error, Result};
pub use params::Exponents;
