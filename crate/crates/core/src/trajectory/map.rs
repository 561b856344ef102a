use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::solver::{max_torque_at_speed, mtpa_current_angle, trajectory_plan_fast};
use crate::motor::{MachineParams, OperatingPoint};
use crate::numfmt::sig9;
use crate::{Error, Result};

/// Speed × torque grid of solved operating points.
///
/// Cells are stored speed-major: cell `(s, t)` lives at `s * n_torque + t`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorqueSpeedMap {
    /// Mechanical speeds (rad/s), strictly increasing.
    pub speed_axis: Vec<f64>,
    /// Torques (N·m), strictly increasing.
    pub torque_axis: Vec<f64>,
    /// `None` marks an infeasible cell.
    pub cells: Vec<Option<OperatingPoint>>,
}

fn check_axis(name: &str, axis: &[f64]) -> Result<()> {
    if axis.is_empty() {
        return Err(Error::InvalidInput(format!("{name} axis is empty")));
    }
    if axis.iter().any(|v| !v.is_finite()) || axis.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidInput(format!("{name} axis must be finite and strictly increasing")));
    }
    Ok(())
}

/// `start, start+step, …` up to `stop` inclusive (with a small tolerance).
pub fn axis(start: f64, stop: f64, step: f64) -> Vec<f64> {
    if !(step > 0.0) || stop < start {
        return vec![start];
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    (0..=n).map(|k| start + step * k as f64).collect()
}

impl TorqueSpeedMap {
    /// Assembles a map from precomputed cells (speed-major).
    pub fn from_cells(
        speed_axis: Vec<f64>,
        torque_axis: Vec<f64>,
        cells: Vec<Option<OperatingPoint>>,
    ) -> Result<Self> {
        check_axis("speed", &speed_axis)?;
        check_axis("torque", &torque_axis)?;
        if cells.len() != speed_axis.len() * torque_axis.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} cells, got {}",
                speed_axis.len() * torque_axis.len(),
                cells.len()
            )));
        }
        Ok(TorqueSpeedMap { speed_axis, torque_axis, cells })
    }

    pub fn n_speed(&self) -> usize {
        self.speed_axis.len()
    }

    pub fn n_torque(&self) -> usize {
        self.torque_axis.len()
    }

    pub fn cell(&self, speed_idx: usize, torque_idx: usize) -> Option<&OperatingPoint> {
        self.cells[speed_idx * self.n_torque() + torque_idx].as_ref()
    }

    /// Feasible cells of one speed column, in torque order.
    pub fn column(&self, speed_idx: usize) -> impl Iterator<Item = &OperatingPoint> {
        let nt = self.n_torque();
        self.cells[speed_idx * nt..(speed_idx + 1) * nt].iter().flatten()
    }

    pub fn feasible_count(&self) -> usize {
        self.cells.iter().flatten().count()
    }

    /// Index of the axis value closest to `v` (ties toward the lower index).
    pub(crate) fn nearest(axis: &[f64], v: f64) -> usize {
        let pos = axis.partition_point(|a| *a < v);
        if pos == 0 {
            return 0;
        }
        if pos == axis.len() {
            return axis.len() - 1;
        }
        if v - axis[pos - 1] <= axis[pos] - v {
            pos - 1
        } else {
            pos
        }
    }

    /// Writes `speed_rad_s,torque_Nm,gamma_deg,i_s_A,eta,feasible`, one row per cell.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "speed_rad_s,torque_Nm,gamma_deg,i_s_A,eta,feasible")?;
        for (s, speed) in self.speed_axis.iter().enumerate() {
            for (t, torque) in self.torque_axis.iter().enumerate() {
                match self.cell(s, t) {
                    Some(op) => writeln!(
                        w,
                        "{},{},{},{},{},1",
                        sig9(*speed),
                        sig9(*torque),
                        sig9(op.gamma),
                        sig9(op.i_s),
                        sig9(op.eta)
                    )?,
                    None => writeln!(w, "{},{},,,,0", sig9(*speed), sig9(*torque))?,
                }
            }
        }
        Ok(())
    }
}

/// Solves every cell of the grid with the trajectory planner.
///
/// The torque envelope is computed once per speed and the MTPA point once
/// per torque; cells above the envelope are marked infeasible without running
/// the planner. Cells are solved in parallel on
/// the current rayon pool and stored by index.
pub fn build_map(m: &MachineParams, speed_axis: &[f64], torque_axis: &[f64]) -> Result<TorqueSpeedMap> {
    m.validate()?;
    check_axis("speed", speed_axis)?;
    check_axis("torque", torque_axis)?;
    let envelope: Vec<f64> = speed_axis.par_iter().map(|w| max_torque_at_speed(m, *w)).collect();
    let mtpa: Vec<_> = torque_axis.par_iter().map(|t| mtpa_current_angle(m, *t).map_err(|e| e.limit)).collect();
    let nt = torque_axis.len();
    let cells = (0..speed_axis.len() * nt)
        .into_par_iter()
        .map(|idx| {
            let (s, t) = (idx / nt, idx % nt);
            let t_ref = torque_axis[t];
            if t_ref < 0.0 || t_ref > envelope[s] {
                return None;
            }
            trajectory_plan_fast(m, t_ref, speed_axis[s], mtpa[t])
        })
        .collect();
    Ok(TorqueSpeedMap { speed_axis: speed_axis.to_vec(), torque_axis: torque_axis.to_vec(), cells })
}
