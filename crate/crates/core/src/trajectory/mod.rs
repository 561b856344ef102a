//! Operating-point trajectories, torque-speed maps and map statistics.

mod map;
mod solver;
mod tpca;

pub use map::{axis, build_map, TorqueSpeedMap};
pub use solver::{
    constant_torque_trajectories, current_ladder, is_feasible, max_torque_at_speed,
    max_torque_current_limited, mtpa_solve, mtpv_solve, trajectory_plan, CurrentCurve, Infeasible,
    Limit, Solve,
};
pub use tpca::{premium_region_stats, tpca, PremiumStats, SpeedTorque, TpcaReport, REGION_EDGES, REGION_NAMES};
