//! Backward-facing longitudinal vehicle model and drivability limits.

mod cycle;
mod drivability;
mod params;

pub use cycle::{cycle_operating_points, wheel_torque_demand, write_points_csv, CyclePoint, DriveCycle};
pub use drivability::{
    axle_loads_accelerating, axle_loads_on_slope, drivability, max_acceleration, max_gradient, Drivability,
};
pub use params::VehicleParams;
