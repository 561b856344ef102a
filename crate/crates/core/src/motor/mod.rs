//! Analytical IPMSM evaluator.
//!
//! Steady-state dq model, torque and its commutation-angle gradient, magnet
//! volume, a simplified loss model, and the closed-form geometry map that
//! turns a magnet-sizing [`DesignVector`] into [`MachineParams`].

mod design;
mod losses;
mod machine;

pub use design::{
    evaluate_design, magnet_volume, Bound, DesignEvaluation, DesignModel, DesignVariable,
    DesignVector, PerVariable,
};
pub use losses::{demag_ratio, efficiency, loss_model, radial_force_density, Losses, MU_0};
pub use machine::{
    dq_currents, dq_voltages, torque, torque_gamma_gradient, CoreLossCoeffs, LossCoeffs,
    MachineParams, OperatingPoint,
};
