use serde::{Deserialize, Serialize};

use super::params::VehicleParams;
use crate::Result;

/// Grid points of the coarse scan that brackets the largest feasible value.
const SCAN_POINTS: usize = 2000;

/// Per-motor torque limit from the motor cap and the axle's friction limit.
fn axle_torque(vp: &VehicleParams, f_z: f64) -> f64 {
    let grip = vp.mu_max * f_z.max(0.0) * vp.r_w / (vp.g_r * vp.eta_trans);
    vp.t_m_max.min(grip)
}

/// `(F_z,F, F_z,R)` while accelerating at `a` on flat ground.
pub fn axle_loads_accelerating(vp: &VehicleParams, a: f64) -> (f64, f64) {
    let (m, l) = (vp.laden_mass(), vp.wheelbase);
    let transfer = m * a * vp.h_cg / l;
    (m * vp.g * (l - vp.a_front) / l - transfer, m * vp.g * vp.a_front / l + transfer)
}

/// `(F_z,F, F_z,R)` standing on an uphill slope `theta` (rad).
pub fn axle_loads_on_slope(vp: &VehicleParams, theta: f64) -> (f64, f64) {
    let (mg, l) = (vp.laden_mass() * vp.g, vp.wheelbase);
    let (s, c) = theta.sin_cos();
    (mg * (c * (l - vp.a_front) - vp.h_cg * s) / l, mg * (c * vp.a_front + vp.h_cg * s) / l)
}

/// Acceleration the drivetrain delivers when the axle loads are those of `a`.
fn delivered_acceleration(vp: &VehicleParams, a: f64) -> f64 {
    let (fz_f, fz_r) = axle_loads_accelerating(vp, a);
    let torque = axle_torque(vp, fz_f) + axle_torque(vp, fz_r);
    (torque * vp.g_r * vp.eta_trans - vp.rolling_force(0.0) * vp.r_w) / (vp.inertial_mass() * vp.r_w)
}

/// Largest `x ∈ [0, hi]` with `h(x) ≥ 0`, or `None` if `h(0) < 0`.
///
/// A uniform scan brackets the last sign change, which bisection then
/// refines to `tol`.
fn largest_feasible(h: impl Fn(f64) -> f64, hi: f64, tol: f64) -> Option<f64> {
    if h(0.0) < 0.0 {
        return None;
    }
    if hi <= 0.0 {
        return Some(0.0);
    }
    let step = hi / SCAN_POINTS as f64;
    let last = (0..=SCAN_POINTS).rev().find(|&k| h(k as f64 * step) >= 0.0).unwrap_or(0);
    if last == SCAN_POINTS {
        return Some(hi);
    }
    let (mut lo, mut up) = (last as f64 * step, (last + 1) as f64 * step);
    while up - lo > tol {
        let mid = 0.5 * (lo + up);
        if h(mid) >= 0.0 {
            lo = mid;
        } else {
            up = mid;
        }
    }
    Some(lo)
}

/// Maximum longitudinal acceleration (m/s²) on flat ground.
///
/// Front and rear motor torques are capped by `T_m_max` and by the friction
/// limit of their axle under load transfer. The result is the largest `a`
/// the drivetrain can sustain given the axle loads that `a` itself induces,
/// clipped at 0 when no positive acceleration is possible.
pub fn max_acceleration(vp: &VehicleParams) -> Result<f64> {
    vp.validate()?;
    let cap_only = (2.0 * vp.t_m_max * vp.g_r * vp.eta_trans - vp.rolling_force(0.0) * vp.r_w)
        / (vp.inertial_mass() * vp.r_w);
    let a = largest_feasible(|a| delivered_acceleration(vp, a) - a, cap_only, 1e-10);
    Ok(a.unwrap_or(0.0))
}

/// Maximum climbable gradient (degrees) at crawling speed and zero
/// acceleration, with static axle loads on the slope.
pub fn max_gradient(vp: &VehicleParams) -> Result<f64> {
    vp.validate()?;
    let mg = vp.laden_mass() * vp.g;
    let h = |theta: f64| {
        let (fz_f, fz_r) = axle_loads_on_slope(vp, theta);
        let force = (axle_torque(vp, fz_f) + axle_torque(vp, fz_r)) * vp.g_r * vp.eta_trans / vp.r_w;
        force - mg * (theta.sin() + vp.c_r * theta.cos())
    };
    let theta = largest_feasible(h, std::f64::consts::FRAC_PI_2, 1e-10);
    Ok(theta.unwrap_or(0.0).to_degrees())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Drivability {
    /// m/s²
    pub a_x_max: f64,
    /// degrees
    pub theta_max: f64,
}

pub fn drivability(vp: &VehicleParams) -> Result<Drivability> {
    Ok(Drivability { a_x_max: max_acceleration(vp)?, theta_max: max_gradient(vp)? })
}
