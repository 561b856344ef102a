//! Interior permanent-magnet machine toolkit for EV traction studies.
//!
//! The crate covers five layers that feed each other:
//!
//! * [`motor`]: analytical dq-frame machine model, losses, and the closed-form
//!   geometry-to-parameter map used in place of field solutions.
//! * [`trajectory`]: MTPA / field-weakening / MTPV operating-point solvers,
//!   torque-speed maps, the torque-per-commutation-angle (TPCA) metric and
//!   premium-efficiency statistics.
//! * [`sampling`]: Latin hypercube designs with the φ_p space-filling
//!   criterion, Gaussian-process and SVR surrogates, density clustering and
//!   the multi-criteria local LHS refinement (MLHR) loop.
//! * [`optimizer`]: constrained NSGA-II with plain-LHS or MLHR sampling.
//! * [`vehicle`]: backward-facing drive-cycle model and drivability metrics.
//!
//! The [`cli`] module holds the batch front-end behind the `mlhr-opt` binary.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod motor;
pub mod numfmt;
pub mod optimizer;
pub mod sampling;
pub mod trajectory;
pub mod vehicle;

pub use error::{Error, Result};
