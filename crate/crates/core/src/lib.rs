//! Stochastic orders, lattice suprema and maxitive functionals on finitely
//! supported distributions.
//!
//! Every law is represented by its left-continuous quantile function
//! ([`StepQuantile`]). Order checks, suprema and functional evaluations are
//! exact on the merged breakpoint grid; the [`oracles`] module holds slow
//! grid and enumeration references used by the test harness and the
//! `verify` suites.

pub mod error;
pub mod exec;
pub mod json;
pub mod lattice;
pub mod maxitive;
pub mod oracles;
pub mod orders;
pub mod pwl;
pub mod quantile;
pub mod random;
pub mod report;
pub mod verify;

pub use error::{Error, Result};
pub use exec::Execution;
pub use lattice::{concave_envelope, sup_order, total_variation, QuantileFamily};
pub use maxitive::{
    alpha_min_from_set, check_maxitivity, es, es_bar, eval_penalty, g_transform_eval, var,
    FunctionalSpec, PenaltyCurve, PenaltyFamily,
};
pub use orders::{check_order, OrderRelation, OrderVerdict, Witness};
pub use pwl::PiecewiseLinearFn;
pub use quantile::{
    build_distribution, integrated_quantile, negate, quantile_from_integrated,
    reflected_integrated, StepQuantile,
};
pub use report::Report;

/// Default absolute tolerance for order predicates and shape checks.
pub const DEFAULT_TOL: f64 = 1e-9;
