//! Constrained NSGA-II with plain-LHS or MLHR-assisted sampling.

mod constraints;
mod dominance;
mod nsga2;
mod problems;

pub use constraints::{constraint_eval, Baseline, CandidateResponses, VOLUME_MARGIN};
pub use dominance::{
    constrained_dominates, constrained_non_dominated_sort, crowding_distance, dominates, hypervolume,
    non_dominated_sort,
};
pub use nsga2::{
    archive_front, front_json, nsga2_run, write_history_csv, Evaluation, FrontMember, HistoryRow, Individual,
    MlhrSamplerConfig, Nsga2Config, ParetoFront, Problem, RunFailure, RunOutput, Sampler,
};
pub use problems::{Bowl, DesignResponses, MagnetProblem, Zdt1, PREMIUM_THRESHOLD};
