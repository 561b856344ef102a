use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::machine::{MachineParams, OperatingPoint};
use crate::{Error, Result};

/// Vacuum permeability (H/m).
pub const MU_0: f64 = 4.0 * PI * 1e-7;

/// Loss breakdown of one operating point (W).
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Losses {
    pub stator_core: f64,
    pub rotor_core: f64,
    pub copper: f64,
    pub mechanical: f64,
}

impl Losses {
    pub fn total(&self) -> f64 {
        self.stator_core + self.rotor_core + self.copper + self.mechanical
    }
}

/// Simplified loss model.
///
/// Copper loss is `1.5·R_s·i_s²` (three phases at rms current `i_s/√2`).
/// Core loss uses a Steinmetz-style hysteresis plus eddy term on the d-axis
/// flux `λ_m + L_d·i_d`, so field weakening lowers it. Mechanical loss is
/// quadratic in speed.
pub fn loss_model(m: &MachineParams, op: &OperatingPoint) -> Losses {
    let omega_e = m.electrical_speed(op.omega_mech).abs();
    let f_e = omega_e / (2.0 * PI);
    let (ld, _) = m.inductances(op.i_d, op.i_q);
    let flux = m.lambda_m0 + ld * op.i_d;
    let flux2 = flux * flux;
    let c = &m.loss_coeffs;
    Losses {
        stator_core: (c.k_h.stator * f_e + c.k_e.stator * f_e * f_e) * flux2,
        rotor_core: (c.k_h.rotor * f_e + c.k_e.rotor * f_e * f_e) * flux2,
        copper: 1.5 * m.r_s * op.i_s * op.i_s,
        mechanical: c.k_mech * op.omega_mech * op.omega_mech,
    }
}

/// `P_out / (P_out + Σ losses)`, or 0 when there is no output power.
pub fn efficiency(losses: &Losses, p_out: f64) -> f64 {
    if p_out <= 0.0 {
        return 0.0;
    }
    p_out / (p_out + losses.total())
}

/// Radial Maxwell stress `B_r² / 2μ₀` (N/m²).
pub fn radial_force_density(b_r: f64) -> f64 {
    b_r * b_r / (2.0 * MU_0)
}

/// Linearised partial-demagnetisation ratio `1 − B_r2/B_r1`.
pub fn demag_ratio(b_r1: f64, b_r2: f64) -> Result<f64> {
    if !(b_r1 > 0.0) {
        return Err(Error::Domain(format!("B_r1 must be > 0, got {b_r1}")));
    }
    if !(0.0..=b_r1).contains(&b_r2) {
        return Err(Error::Domain(format!("B_r2 must lie in [0, B_r1], got {b_r2}")));
    }
    Ok(1.0 - b_r2 / b_r1)
}
