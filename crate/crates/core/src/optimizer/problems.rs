use serde::{Deserialize, Serialize};

use super::constraints::{constraint_eval, Baseline, CandidateResponses, VOLUME_MARGIN};
use super::nsga2::{Evaluation, Problem};
use crate::motor::{magnet_volume, Bound, DesignEvaluation, DesignModel, DesignVector, PerVariable};
use crate::trajectory::{axis, build_map, tpca, TorqueSpeedMap};
use crate::{Error, Result};

/// ZDT1 on `[0, 1]^n`: `f1 = x1`, `f2 = g·(1 − sqrt(f1/g))` with
/// `g = 1 + 9·mean(x2..xn)`. The true front is `f2 = 1 − sqrt(f1)` at `g = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Zdt1 {
    pub n_var: usize,
}

impl Default for Zdt1 {
    fn default() -> Self {
        Zdt1 { n_var: 8 }
    }
}

impl Zdt1 {
    pub fn objectives(&self, x: &[f64]) -> [f64; 2] {
        let f1 = x[0];
        let g = if x.len() > 1 {
            1.0 + 9.0 * x[1..].iter().sum::<f64>() / (x.len() - 1) as f64
        } else {
            1.0
        };
        [f1, g * (1.0 - (f1 / g).sqrt())]
    }
}

impl Problem for Zdt1 {
    fn bounds(&self) -> Vec<Bound> {
        vec![Bound::new(0.0, 1.0); self.n_var]
    }

    fn n_obj(&self) -> usize {
        2
    }

    fn evaluate(&self, x: &[f64]) -> Result<Evaluation> {
        Ok(Evaluation { objectives: self.objectives(x).to_vec(), violations: vec![] })
    }

    fn reference_point(&self) -> Option<Vec<f64>> {
        Some(vec![1.1, 1.1])
    }
}

/// Single-objective `Σ (x_i − c_i)²` on a box; minimum 0 at `center`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bowl {
    pub center: Vec<f64>,
    pub lower: f64,
    pub upper: f64,
}

impl Problem for Bowl {
    fn bounds(&self) -> Vec<Bound> {
        vec![Bound::new(self.lower, self.upper); self.center.len()]
    }

    fn n_obj(&self) -> usize {
        1
    }

    fn evaluate(&self, x: &[f64]) -> Result<Evaluation> {
        let f = x.iter().zip(&self.center).map(|(a, c)| (a - c) * (a - c)).sum();
        Ok(Evaluation { objectives: vec![f], violations: vec![] })
    }
}

/// Efficiency treated as premium.
pub const PREMIUM_THRESHOLD: f64 = 0.94;

/// Map-derived responses of one rotor design.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignResponses {
    /// Magnet volume per pole (cm³).
    pub v_pm: f64,
    /// Peak feasible torque on the grid (N·m).
    pub t_max: f64,
    /// Peak feasible mechanical power on the grid (W).
    pub p_max: f64,
    pub tpca_total: f64,
    /// Premium-efficiency area (rad/s · N·m).
    pub premium_area: f64,
}

impl DesignResponses {
    pub fn to_vec(&self) -> Vec<f64> {
        vec![self.t_max, self.p_max, self.v_pm, self.tpca_total, self.premium_area]
    }
}

fn step(axis: &[f64]) -> f64 {
    if axis.len() > 1 {
        axis[1] - axis[0]
    } else {
        1.0
    }
}

fn premium_area(map: &TorqueSpeedMap, threshold: f64) -> f64 {
    let n = map.cells.iter().flatten().filter(|op| op.eta >= threshold).count();
    n as f64 * step(&map.speed_axis) * step(&map.torque_axis)
}

/// Magnet-sizing problem: minimize `[V_pm, −TPCA]` subject to a smaller
/// magnet, no loss of premium area and no loss of torque per magnet volume
/// relative to a baseline design.
///
/// Variables are the eight design dimensions in physical units.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MagnetProblem {
    pub model: DesignModel,
    /// Supplies bounds; its values are the baseline design.
    pub template: DesignVector,
    pub blocks_per_pole: u32,
    pub speed_axis: Vec<f64>,
    pub torque_axis: Vec<f64>,
    pub threshold: f64,
    pub margin: f64,
    pub baseline: Baseline,
}

impl MagnetProblem {
    /// Coarse grid used when none is configured.
    pub fn default_axes() -> (Vec<f64>, Vec<f64>) {
        (axis(0.0, 1000.0, 50.0), axis(0.0, 212.0, 10.0))
    }

    /// Builds the problem and computes the baseline from `template.values`.
    pub fn new(model: DesignModel, template: DesignVector, speed_axis: Vec<f64>, torque_axis: Vec<f64>) -> Result<Self> {
        let mut p = MagnetProblem {
            model,
            template,
            blocks_per_pole: 2,
            speed_axis,
            torque_axis,
            threshold: PREMIUM_THRESHOLD,
            margin: VOLUME_MARGIN,
            baseline: Baseline { v_pm: 0.0, premium_area: 0.0, tpv: 0.0 },
        };
        let r = p
            .responses(&template.values)?
            .ok_or_else(|| Error::InvalidInput("baseline design is infeasible".into()))?;
        p.baseline = Baseline { v_pm: r.v_pm, premium_area: r.premium_area, tpv: r.t_max / r.v_pm };
        Ok(p)
    }

    pub fn reference() -> Result<Self> {
        let (s, t) = Self::default_axes();
        Self::new(DesignModel::default(), DesignVector::t_prius(), s, t)
    }

    /// Responses of a design, or `None` when it maps to no valid machine.
    pub fn responses(&self, values: &PerVariable<f64>) -> Result<Option<DesignResponses>> {
        let d = self.template.with_values(*values);
        let v_pm = magnet_volume(&d, self.blocks_per_pole)?;
        let m = match self.model.evaluate(&d, &PerVariable::splat(0.0)) {
            DesignEvaluation::Feasible(m) => m,
            DesignEvaluation::Infeasible(why) => {
                log::debug!("design infeasible: {why}");
                return Ok(None);
            }
        };
        let map = build_map(&m, &self.speed_axis, &self.torque_axis)?;
        if map.feasible_count() == 0 {
            return Ok(None);
        }
        let mut t_max = 0.0f64;
        let mut p_max = 0.0f64;
        for op in map.cells.iter().flatten() {
            t_max = t_max.max(op.torque);
            p_max = p_max.max(op.torque * op.omega_mech);
        }
        Ok(Some(DesignResponses {
            v_pm,
            t_max,
            p_max,
            tpca_total: tpca(&map)?.total,
            premium_area: premium_area(&map, self.threshold),
        }))
    }
}

/// Violation assigned to designs that map to no valid machine.
const INVALID_DESIGN_VIOLATION: f64 = 1e6;

impl Problem for MagnetProblem {
    fn bounds(&self) -> Vec<Bound> {
        self.template.bounds.to_array().to_vec()
    }

    fn n_obj(&self) -> usize {
        2
    }

    fn evaluate(&self, x: &[f64]) -> Result<Evaluation> {
        let arr: [f64; 8] = x
            .try_into()
            .map_err(|_| Error::InvalidInput(format!("expected 8 design variables, got {}", x.len())))?;
        let values = PerVariable::from_array(arr);
        match self.responses(&values)? {
            Some(r) => {
                let c = CandidateResponses { v_pm: r.v_pm, premium_area: r.premium_area, torque: r.t_max };
                Ok(Evaluation {
                    objectives: vec![r.v_pm, -r.tpca_total],
                    violations: constraint_eval(&c, &self.baseline, self.margin).to_vec(),
                })
            }
            None => {
                let v_pm = magnet_volume(&self.template.with_values(values), self.blocks_per_pole)?;
                Ok(Evaluation {
                    objectives: vec![v_pm, 0.0],
                    violations: vec![INVALID_DESIGN_VIOLATION, 0.0, 0.0],
                })
            }
        }
    }

    fn reference_point(&self) -> Option<Vec<f64>> {
        Some(vec![self.baseline.v_pm, 0.0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zdt1_on_true_front() {
        let z = Zdt1::default();
        let mut x = vec![0.0; 8];
        x[0] = 0.25;
        let f = z.objectives(&x);
        assert_eq!(f, [0.25, 0.5]);
    }

    #[test]
    fn bowl_minimum() {
        let b = Bowl { center: vec![0.3, -0.2], lower: -1.0, upper: 1.0 };
        assert_eq!(b.evaluate(&[0.3, -0.2]).unwrap().objectives, vec![0.0]);
    }

    #[test]
    fn baseline_design_fails_only_the_volume_constraint() {
        let p = MagnetProblem::reference().unwrap();
        assert!((p.baseline.v_pm - 12.802).abs() < 1e-3);
        assert!(p.baseline.premium_area > 0.0);
        let e = p.evaluate(&p.template.values.to_array()).unwrap();
        assert!(e.violations[0] > 0.0);
        assert_eq!(e.violations[1], 0.0);
        assert_eq!(e.violations[2], 0.0);
        assert!(e.objectives[1] < 0.0);
    }

    #[test]
    fn wrong_dimension_is_an_error() {
        let p = MagnetProblem::reference().unwrap();
        assert!(p.evaluate(&[1.0; 3]).is_err());
    }
}
