use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::params::VehicleParams;
use crate::motor::MachineParams;
use crate::numfmt::sig9;
use crate::trajectory::max_torque_at_speed;
use crate::{Error, Result};

/// Speed trace sampled at strictly increasing times.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriveCycle {
    /// `(t [s], v [m/s])` pairs.
    pub samples: Vec<(f64, f64)>,
}

const TRIANGLE: &str = include_str!("../../data/triangle.csv");
const TRAPEZOID: &str = include_str!("../../data/trapezoid.csv");

impl DriveCycle {
    pub fn new(samples: Vec<(f64, f64)>) -> Result<Self> {
        for (k, &(t, v)) in samples.iter().enumerate() {
            if !t.is_finite() || !(v >= 0.0 && v.is_finite()) {
                return Err(Error::InvalidInput(format!("sample {k}: need finite t and v >= 0, got ({t}, {v})")));
            }
            if k > 0 && t <= samples[k - 1].0 {
                return Err(Error::InvalidInput(format!("sample {k}: time must increase strictly")));
            }
        }
        Ok(DriveCycle { samples })
    }

    /// Parses `t_s,v_mps` CSV. Errors carry the 1-based line number.
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut samples: Vec<(f64, f64)> = Vec::new();
        let mut saw_header = false;
        for (idx, line) in r.lines().enumerate() {
            let line = line?;
            let lineno = idx + 1;
            let text = line.trim();
            if !saw_header {
                if text != "t_s,v_mps" {
                    return Err(Error::Parse { line: lineno, message: format!("expected header 't_s,v_mps', got '{text}'") });
                }
                saw_header = true;
                continue;
            }
            if text.is_empty() {
                continue;
            }
            let fields: Vec<&str> = text.split(',').map(str::trim).collect();
            if fields.len() != 2 {
                return Err(Error::Parse { line: lineno, message: format!("expected 2 fields, got {}", fields.len()) });
            }
            let parse = |s: &str| s.parse::<f64>().map_err(|e| Error::Parse { line: lineno, message: format!("'{s}': {e}") });
            let (t, v) = (parse(fields[0])?, parse(fields[1])?);
            if !t.is_finite() || !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Parse { line: lineno, message: format!("need finite t and v >= 0, got ({t}, {v})") });
            }
            if samples.last().is_some_and(|p| t <= p.0) {
                return Err(Error::Parse { line: lineno, message: "time must increase strictly".into() });
            }
            samples.push((t, v));
        }
        if !saw_header {
            return Err(Error::Parse { line: 1, message: "empty file".into() });
        }
        Ok(DriveCycle { samples })
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let f = std::fs::File::open(path)?;
        Self::read_csv(std::io::BufReader::new(f))
    }

    /// 0 → 20 m/s → 0 over 20 s at 1 s steps.
    pub fn triangle() -> Self {
        Self::read_csv(TRIANGLE.as_bytes()).expect("bundled cycle parses")
    }

    /// 0 → 15 m/s in 5 s, hold 20 s, back to 0 in 5 s.
    pub fn trapezoid() -> Self {
        Self::read_csv(TRAPEZOID.as_bytes()).expect("bundled cycle parses")
    }

    pub fn bundled(name: &str) -> Option<Self> {
        match name {
            "triangle" => Some(Self::triangle()),
            "trapezoid" => Some(Self::trapezoid()),
            _ => None,
        }
    }
}

/// Per-motor torque (N·m) for road speed `v` (m/s) and acceleration `a`.
///
/// The tractive force `F_t = m_eff·a + F_roll + ½ρC_dAv²` is shared by two
/// identical motors; braking demands (`F_t < 0`) map to zero.
pub fn wheel_torque_demand(vp: &VehicleParams, v: f64, a: f64) -> f64 {
    let f_t = vp.inertial_mass() * a + vp.rolling_force(v) + vp.aero_force(v);
    if f_t < 0.0 {
        return 0.0;
    }
    0.5 * f_t * vp.r_w / (vp.eta_trans * vp.g_r)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CyclePoint {
    pub t: f64,
    pub omega_mech: f64,
    pub torque: f64,
    /// Within the machine's torque envelope at that speed.
    pub feasible: bool,
}

/// Machine operating points of a cycle, one per consecutive sample pair.
///
/// Each point sits at the later sample of the pair and uses its speed with
/// the backward-difference acceleration over the pair.
pub fn cycle_operating_points(vp: &VehicleParams, m: &MachineParams, cycle: &DriveCycle) -> Result<Vec<CyclePoint>> {
    vp.validate()?;
    if cycle.samples.len() < 2 {
        return Err(Error::InvalidInput(format!("cycle needs at least 2 samples, got {}", cycle.samples.len())));
    }
    Ok(cycle
        .samples
        .windows(2)
        .map(|w| {
            let ((t0, v0), (t1, v1)) = (w[0], w[1]);
            let a = (v1 - v0) / (t1 - t0);
            let omega_mech = vp.motor_speed(v1);
            let torque = wheel_torque_demand(vp, v1, a);
            let feasible = torque <= max_torque_at_speed(m, omega_mech);
            CyclePoint { t: t1, omega_mech, torque, feasible }
        })
        .collect())
}

/// Writes `t_s,omega_mech_rad_s,torque_Nm,feasible`.
pub fn write_points_csv<W: Write>(points: &[CyclePoint], mut w: W) -> Result<()> {
    writeln!(w, "t_s,omega_mech_rad_s,torque_Nm,feasible")?;
    for p in points {
        writeln!(w, "{},{},{},{}", sig9(p.t), sig9(p.omega_mech), sig9(p.torque), u8::from(p.feasible))?;
    }
    Ok(())
}
