use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Longitudinal vehicle data for a two-motor (one per axle) drivetrain.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VehicleParams {
    /// Gross mass (kg).
    pub m0: f64,
    /// Payload (kg).
    pub m1: f64,
    /// Apparent mass of the rotating parts (kg).
    pub m_app: f64,
    #[serde(rename = "R_w")]
    pub r_w: f64,
    #[serde(rename = "C_d")]
    pub c_d: f64,
    /// Frontal area (m²).
    #[serde(rename = "A")]
    pub area: f64,
    #[serde(rename = "C_r")]
    pub c_r: f64,
    /// Wheelbase (m).
    #[serde(rename = "L")]
    pub wheelbase: f64,
    /// Distance from the centre of gravity to the front axle (m).
    pub a_front: f64,
    #[serde(rename = "H_CG")]
    pub h_cg: f64,
    #[serde(rename = "G_r")]
    pub g_r: f64,
    pub eta_trans: f64,
    pub mu_max: f64,
    /// Torque cap of each motor (N·m).
    #[serde(rename = "T_m_max")]
    pub t_m_max: f64,
    pub rho_air: f64,
    pub g: f64,
    /// Speed coefficient of rolling resistance (s²/m²). When set the rolling
    /// force becomes `C_r·(1 + K·v²)·m·g`.
    #[serde(rename = "K", skip_serializing_if = "Option::is_none")]
    pub k_rolling: Option<f64>,
}

impl Default for VehicleParams {
    fn default() -> Self {
        VehicleParams {
            m0: 1805.0,
            m1: 500.0,
            m_app: 90.0,
            r_w: 0.381,
            c_d: 0.25,
            area: 2.0,
            c_r: 0.015,
            wheelbase: 2.7,
            a_front: 1.3,
            h_cg: 0.5,
            g_r: 8.0,
            eta_trans: 0.97,
            mu_max: 10.0,
            t_m_max: 210.0,
            rho_air: 1.225,
            g: 9.81,
            k_rolling: None,
        }
    }
}

impl VehicleParams {
    /// Gross plus payload (kg).
    pub fn laden_mass(&self) -> f64 {
        self.m0 + self.m1
    }

    /// Laden mass plus apparent rotating mass (kg).
    pub fn inertial_mass(&self) -> f64 {
        self.m0 + self.m_app + self.m1
    }

    /// Motor speed (rad/s) for a road speed (m/s).
    pub fn motor_speed(&self, v: f64) -> f64 {
        v * self.g_r / self.r_w
    }

    /// Rolling-resistance force (N) at road speed `v` on flat ground.
    pub fn rolling_force(&self, v: f64) -> f64 {
        let k = self.k_rolling.map_or(1.0, |k| 1.0 + k * v * v);
        self.c_r * k * self.laden_mass() * self.g
    }

    pub fn aero_force(&self, v: f64) -> f64 {
        0.5 * self.rho_air * self.c_d * self.area * v * v
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("m0", self.m0),
            ("R_w", self.r_w),
            ("L", self.wheelbase),
            ("a_front", self.a_front),
            ("G_r", self.g_r),
            ("g", self.g),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidInput(format!("{name} must be > 0, got {v}")));
            }
        }
        let non_negative = [
            ("m1", self.m1),
            ("m_app", self.m_app),
            ("C_d", self.c_d),
            ("A", self.area),
            ("C_r", self.c_r),
            ("H_CG", self.h_cg),
            ("mu_max", self.mu_max),
            ("T_m_max", self.t_m_max),
            ("rho_air", self.rho_air),
            ("K", self.k_rolling.unwrap_or(0.0)),
        ];
        for (name, v) in non_negative {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidInput(format!("{name} must be >= 0, got {v}")));
            }
        }
        if !(self.eta_trans > 0.0 && self.eta_trans <= 1.0) {
            return Err(Error::InvalidInput(format!("eta_trans must lie in (0, 1], got {}", self.eta_trans)));
        }
        if self.a_front >= self.wheelbase {
            return Err(Error::InvalidInput("a_front must be shorter than the wheelbase".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        VehicleParams::default().validate().unwrap();
        let bad = VehicleParams { a_front: 3.0, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = VehicleParams { eta_trans: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn json_names() {
        let v: VehicleParams = serde_json::from_str(r#"{"G_r": 9.5, "K": 6.5e-6}"#).unwrap();
        assert_eq!(v.g_r, 9.5);
        assert_eq!(v.k_rolling, Some(6.5e-6));
        assert_eq!(v.m0, 1805.0);
    }
}
