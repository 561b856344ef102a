//! Space-filling designs, surrogate models and the local refinement loop.
//!
//! All sampling happens in the unit hypercube; samples are mapped to physical
//! units only when handed to an evaluator.

mod cluster;
mod dataset;
mod gp;
mod kernel;
mod lhs;
mod mlhr;
mod sensitivity;
mod svr;

pub use cluster::{cluster_points, dbscan, ClusterOptions, Clustering, LocalBox};
pub use dataset::{denormalize, Dataset};
pub use gp::{gp_fit, gp_fit_with, gp_log_likelihood, gp_predict, gp_with_params, GpOptions, GpSurrogate, MeanMode};
pub use kernel::SeKernel;
pub use lhs::{is_latin, lhs_init, lhs_optimize, lhs_with_rng, phi_p, Optimized, Samples, PHI_P, PHI_T};
pub use mlhr::{
    cluster_refine, evaluate_candidates, fit_surrogates, lhs_in_box, local_candidates, mlhr_iterate, Evaluator,
    IterationReport, MlhrOptions, RefinementState, SurrogateSet,
};
pub use sensitivity::sensitivity_sweep;
pub use svr::{svr_fit, svr_fit_with, svr_primal_objective, SvrSurrogate, SMO_MAX_ITER, SMO_TOL};
