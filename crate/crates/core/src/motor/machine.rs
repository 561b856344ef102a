use serde::{Deserialize, Serialize};

use super::losses::{efficiency, loss_model};
use crate::{Error, Result};

/// Stator and rotor shares of one core-loss coefficient.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoreLossCoeffs {
    pub stator: f64,
    pub rotor: f64,
}

impl CoreLossCoeffs {
    pub fn total(&self) -> f64 {
        self.stator + self.rotor
    }
}

/// Coefficients of the simplified loss model.
///
/// Core loss per part is `k_h·f_e·Φ² + k_e·f_e²·Φ²`; mechanical loss is
/// `k_mech·ω_mech²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossCoeffs {
    pub k_h: CoreLossCoeffs,
    pub k_e: CoreLossCoeffs,
    pub k_mech: f64,
}

/// Electrical model of one interior permanent-magnet machine.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MachineParams {
    /// Phase resistance (Ω).
    #[serde(rename = "R_s")]
    pub r_s: f64,
    /// Pole-pair count.
    #[serde(rename = "p")]
    pub pole_pairs: u32,
    /// PM flux linkage (Wb).
    pub lambda_m0: f64,
    /// Unsaturated d-axis inductance (H).
    #[serde(rename = "Ld0")]
    pub ld0: f64,
    /// Unsaturated q-axis inductance (H).
    #[serde(rename = "Lq0")]
    pub lq0: f64,
    /// q-axis saturation reference current (A). `None` keeps inductances constant.
    #[serde(default)]
    pub sat_iq: Option<f64>,
    /// Inverter current limit, peak phase amplitude (A).
    #[serde(rename = "I_m")]
    pub i_max: f64,
    /// Inverter voltage limit, peak phase amplitude (V).
    #[serde(rename = "V_m")]
    pub v_max: f64,
    pub loss_coeffs: LossCoeffs,
}

impl MachineParams {
    /// Reference machine modelled on the 3rd-generation Prius traction motor
    /// (8 poles, 600 V DC link, 200 A current limit).
    pub fn t_prius() -> Self {
        MachineParams {
            r_s: 0.114,
            pole_pairs: 4,
            lambda_m0: 0.114,
            ld0: 0.6e-3,
            lq0: 1.5e-3,
            sat_iq: None,
            i_max: 200.0,
            v_max: 600.0 / 3f64.sqrt(),
            loss_coeffs: LossCoeffs {
                k_h: CoreLossCoeffs { stator: 20.0, rotor: 4.0 },
                k_e: CoreLossCoeffs { stator: 0.05, rotor: 0.01 },
                k_mech: 6.0e-4,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.r_s, self.lambda_m0, self.ld0, self.lq0, self.i_max, self.v_max]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidInput("machine parameters must be finite".into()));
        }
        if self.r_s <= 0.0 {
            return Err(Error::InvalidInput(format!("R_s must be > 0, got {}", self.r_s)));
        }
        if self.pole_pairs < 1 {
            return Err(Error::InvalidInput("pole-pair count must be >= 1".into()));
        }
        if self.lambda_m0 < 0.0 {
            return Err(Error::InvalidInput("lambda_m0 must be >= 0".into()));
        }
        if !(self.ld0 > 0.0 && self.lq0 >= self.ld0) {
            return Err(Error::InvalidInput(format!(
                "need Lq0 >= Ld0 > 0, got Ld0={} Lq0={}",
                self.ld0, self.lq0
            )));
        }
        if self.i_max <= 0.0 || self.v_max <= 0.0 {
            return Err(Error::InvalidInput("I_m and V_m must be > 0".into()));
        }
        if let Some(s) = self.sat_iq {
            if !(s > 0.0) {
                return Err(Error::InvalidInput("sat_iq must be > 0".into()));
            }
        }
        let c = &self.loss_coeffs;
        let coeffs = [c.k_h.stator, c.k_h.rotor, c.k_e.stator, c.k_e.rotor, c.k_mech];
        if coeffs.iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::InvalidInput("loss coefficients must be >= 0".into()));
        }
        Ok(())
    }

    pub fn pole_pairs_f64(&self) -> f64 {
        f64::from(self.pole_pairs)
    }

    /// Electrical speed for a mechanical speed.
    pub fn electrical_speed(&self, omega_mech: f64) -> f64 {
        self.pole_pairs_f64() * omega_mech
    }

    /// `(L_d, L_q)` at the given currents.
    pub fn inductances(&self, _i_d: f64, i_q: f64) -> (f64, f64) {
        let lq = match self.sat_iq {
            Some(s) => self.lq0 / (1.0 + i_q.abs() / s),
            None => self.lq0,
        };
        (self.ld0, lq)
    }

    /// `(∂L_d/∂γ, ∂L_q/∂γ)` along the constant-current circle, per radian.
    fn inductance_gamma_partials(&self, i_s: f64, gamma: f64) -> (f64, f64) {
        match self.sat_iq {
            Some(s) => {
                let i_q = i_s * gamma.cos();
                let denom = 1.0 + i_q.abs() / s;
                let dlq_diq = -self.lq0 * i_q.signum() / (s * denom * denom);
                let diq_dgamma = -i_s * gamma.sin();
                (0.0, dlq_diq * diq_dgamma)
            }
            None => (0.0, 0.0),
        }
    }
}

fn check_gamma(gamma_deg: f64) -> Result<()> {
    if !(0.0..=90.0).contains(&gamma_deg) {
        return Err(Error::Domain(format!("commutation angle {gamma_deg}° outside [0°, 90°]")));
    }
    Ok(())
}

/// Splits a current amplitude into dq components for a commutation angle in degrees.
pub fn dq_currents(i_s: f64, gamma_deg: f64) -> Result<(f64, f64)> {
    check_gamma(gamma_deg)?;
    if !(i_s >= 0.0) {
        return Err(Error::Domain(format!("current amplitude must be >= 0, got {i_s}")));
    }
    let (sin, cos) = gamma_deg.to_radians().sin_cos();
    Ok((-i_s * sin, i_s * cos))
}

/// Steady-state dq voltages at electrical speed `omega_e`.
pub fn dq_voltages(m: &MachineParams, i_d: f64, i_q: f64, omega_e: f64) -> (f64, f64) {
    let (ld, lq) = m.inductances(i_d, i_q);
    let v_d = m.r_s * i_d - omega_e * lq * i_q;
    let v_q = m.r_s * i_q + omega_e * ld * i_d + omega_e * m.lambda_m0;
    (v_d, v_q)
}

/// Electromagnetic torque (N·m).
pub fn torque(m: &MachineParams, i_d: f64, i_q: f64) -> f64 {
    let (ld, lq) = m.inductances(i_d, i_q);
    1.5 * m.pole_pairs_f64() * (m.lambda_m0 + (ld - lq) * i_d) * i_q
}

/// `∂T_e/∂γ` in N·m per radian, including the inductance partials of the
/// saturation law when it is enabled.
pub fn torque_gamma_gradient(m: &MachineParams, i_s: f64, gamma_deg: f64) -> Result<f64> {
    let (i_d, i_q) = dq_currents(i_s, gamma_deg)?;
    let gamma = gamma_deg.to_radians();
    let (ld, lq) = m.inductances(i_d, i_q);
    let (dld, dlq) = m.inductance_gamma_partials(i_s, gamma);
    // PM flux does not depend on the current angle in this model.
    let dlambda = 0.0;
    let (sin, cos) = gamma.sin_cos();
    let (sin2, cos2) = (2.0 * gamma).sin_cos();
    let i2 = i_s * i_s;
    let bracket = -m.lambda_m0 * i_s * sin + dlambda * i_s * cos - ld * i2 * cos2 + lq * i2 * cos2
        - dld * i2 / 2.0 * sin2
        + dlq * i2 / 2.0 * sin2;
    Ok(1.5 * m.pole_pairs_f64() * bracket)
}

/// Fully resolved machine operating point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    /// Mechanical speed (rad/s).
    pub omega_mech: f64,
    /// Electromagnetic torque (N·m).
    #[serde(rename = "T_e")]
    pub torque: f64,
    pub i_s: f64,
    /// Commutation angle (degrees).
    pub gamma: f64,
    pub i_d: f64,
    pub i_q: f64,
    pub v_d: f64,
    pub v_q: f64,
    /// Efficiency (fraction).
    pub eta: f64,
}

impl OperatingPoint {
    /// Evaluates the machine at `(i_s, γ)` and speed, including losses and efficiency.
    pub fn evaluate(m: &MachineParams, omega_mech: f64, i_s: f64, gamma_deg: f64) -> Result<Self> {
        let (i_d, i_q) = dq_currents(i_s, gamma_deg)?;
        let omega_e = m.electrical_speed(omega_mech);
        let (v_d, v_q) = dq_voltages(m, i_d, i_q, omega_e);
        let mut op = OperatingPoint {
            omega_mech,
            torque: torque(m, i_d, i_q),
            i_s,
            gamma: gamma_deg,
            i_d,
            i_q,
            v_d,
            v_q,
            eta: 0.0,
        };
        let p_out = op.torque * omega_mech;
        if p_out > 0.0 {
            op.eta = efficiency(&loss_model(m, &op), p_out);
        }
        Ok(op)
    }

    /// Phase voltage amplitude `√(v_d² + v_q²)`.
    pub fn voltage(&self) -> f64 {
        self.v_d.hypot(self.v_q)
    }

    pub fn output_power(&self) -> f64 {
        self.torque * self.omega_mech
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn test_machine(ld: f64, lq: f64) -> MachineParams {
        MachineParams {
            r_s: 0.1,
            pole_pairs: 4,
            lambda_m0: 0.1,
            ld0: ld,
            lq0: lq,
            sat_iq: None,
            i_max: 200.0,
            v_max: 150.0,
            loss_coeffs: MachineParams::t_prius().loss_coeffs,
        }
    }

    #[test]
    fn dq_current_examples() {
        let (d, q) = dq_currents(100.0, 0.0).unwrap();
        assert_eq!((d, q), (-0.0, 100.0));
        let (d, q) = dq_currents(100.0, 90.0).unwrap();
        assert_relative_eq!(d, -100.0);
        assert!(q.abs() < 1e-12);
        let (d, q) = dq_currents(100.0, 30.0).unwrap();
        assert_relative_eq!(d, -50.0, epsilon = 1e-12);
        assert_relative_eq!(q, 86.602_540_378_443_86, epsilon = 1e-12);
    }

    #[test]
    fn dq_currents_rejects_out_of_range_angle() {
        assert!(matches!(dq_currents(10.0, 90.5), Err(Error::Domain(_))));
        assert!(matches!(dq_currents(10.0, -1.0), Err(Error::Domain(_))));
        assert!(matches!(dq_currents(-1.0, 10.0), Err(Error::Domain(_))));
    }

    #[test]
    fn voltage_examples() {
        let m = test_machine(1e-3, 1e-3);
        assert_eq!(dq_voltages(&m, 0.0, 0.0, 0.0), (0.0, 0.0));
        let (vd, vq) = dq_voltages(&m, 0.0, 10.0, 100.0);
        assert_relative_eq!(vd, -1.0, epsilon = 1e-12);
        assert_relative_eq!(vq, 11.0, epsilon = 1e-12);

        let m = MachineParams { r_s: 0.0, ..test_machine(1e-3, 3e-3) };
        let (vd, vq) = dq_voltages(&m, -50.0, 86.6, 500.0);
        assert_relative_eq!(vd, -129.9, epsilon = 1e-9);
        assert_relative_eq!(vq, 25.0, epsilon = 1e-9);
    }

    #[test]
    fn torque_examples() {
        let m = test_machine(1e-3, 3e-3);
        assert_eq!(torque(&m, -30.0, 0.0), 0.0);
        let round = test_machine(1e-3, 1e-3);
        assert_relative_eq!(torque(&round, 0.0, 100.0), 60.0, epsilon = 1e-12);
        assert_relative_eq!(torque(&m, -50.0, 86.6025), 103.923, epsilon = 1e-9);
    }

    #[test]
    fn gradient_trivial_cases() {
        let m = test_machine(1e-3, 3e-3);
        assert_eq!(torque_gamma_gradient(&m, 0.0, 40.0).unwrap(), 0.0);
        let round = test_machine(1e-3, 1e-3);
        assert!(torque_gamma_gradient(&round, 120.0, 0.0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn gradient_matches_central_difference() {
        let m = test_machine(1e-3, 3e-3);
        let t_of = |g: f64| {
            let (d, q) = (-100.0 * g.sin(), 100.0 * g.cos());
            torque(&m, d, q)
        };
        let g = 30f64.to_radians();
        let h = 1e-5;
        let fd = (t_of(g + h) - t_of(g - h)) / (2.0 * h);
        let analytic = torque_gamma_gradient(&m, 100.0, 30.0).unwrap();
        assert_relative_eq!(analytic, fd, max_relative = 1e-6);
    }

    #[test]
    fn gradient_with_saturation_includes_inductance_partials() {
        let m = MachineParams { sat_iq: Some(150.0), ..test_machine(1e-3, 3e-3) };
        let t_of = |g: f64| torque(&m, -120.0 * g.sin(), 120.0 * g.cos());
        for deg in [5.0, 25.0, 47.0, 80.0] {
            let g = f64::to_radians(deg);
            let h = 1e-5;
            let fd = (t_of(g + h) - t_of(g - h)) / (2.0 * h);
            let analytic = torque_gamma_gradient(&m, 120.0, deg).unwrap();
            assert_relative_eq!(analytic, fd, max_relative = 1e-6);
        }
    }

    #[test]
    fn reference_machine_is_valid_and_salient() {
        let m = MachineParams::t_prius();
        m.validate().unwrap();
        assert!(m.lq0 / m.ld0 > 1.0);
    }

    #[test]
    fn validate_rejects_inverse_saliency() {
        let m = test_machine(3e-3, 1e-3);
        assert!(m.validate().is_err());
        let m = MachineParams { r_s: 0.0, ..test_machine(1e-3, 3e-3) };
        assert!(m.validate().is_err());
    }

    #[test]
    fn json_uses_documented_field_names() {
        let json = serde_json::to_value(MachineParams::t_prius()).unwrap();
        for key in ["R_s", "p", "lambda_m0", "Ld0", "Lq0", "sat_iq", "I_m", "V_m", "loss_coeffs"] {
            assert!(json.get(key).is_some(), "missing {key}");
        }
        let back: MachineParams = serde_json::from_value(json).unwrap();
        assert_eq!(back, MachineParams::t_prius());
    }

    #[test]
    fn operating_point_is_consistent() {
        let m = MachineParams::t_prius();
        let op = OperatingPoint::evaluate(&m, 300.0, 150.0, 35.0).unwrap();
        assert_relative_eq!(op.i_d.hypot(op.i_q), 150.0, max_relative = 1e-12);
        assert!(op.eta > 0.0 && op.eta < 1.0);
    }
}
