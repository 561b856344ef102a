use serde::{Deserialize, Serialize};

/// Default relative margin that turns `V_pm,new < V_pm,old` into a
/// non-strict test.
pub const VOLUME_MARGIN: f64 = 1e-6;

/// Reference machine quantities the constraints compare against.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Baseline {
    /// Magnet volume per pole (cm³).
    pub v_pm: f64,
    /// Premium-efficiency area of the reference map.
    pub premium_area: f64,
    /// Torque per magnet volume (N·m/cm³).
    pub tpv: f64,
}

/// Responses of a candidate that enter the constraints.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CandidateResponses {
    pub v_pm: f64,
    pub premium_area: f64,
    /// Peak torque (N·m).
    pub torque: f64,
}

/// Violation of `[V_pm < V_pm,0, A_η ≥ A_η0, T/V_pm ≥ TPV_0]`; all zero
/// means feasible. The volume bound is tightened by the relative `margin`.
pub fn constraint_eval(c: &CandidateResponses, baseline: &Baseline, margin: f64) -> [f64; 3] {
    let tpv = if c.v_pm > 0.0 { c.torque / c.v_pm } else { 0.0 };
    [
        (c.v_pm - baseline.v_pm * (1.0 - margin)).max(0.0),
        (baseline.premium_area - c.premium_area).max(0.0),
        (baseline.tpv - tpv).max(0.0),
    ]
}
