use serde::{Deserialize, Serialize};

use super::map::TorqueSpeedMap;
use crate::motor::OperatingPoint;
use crate::{Error, Result};

/// Speed regions (mechanical rad/s): low `[0, 380)`, accelerating
/// `[380, 650)`, high `[650, 1000]`.
pub const REGION_EDGES: [f64; 4] = [0.0, 380.0, 650.0, 1000.0];
pub const REGION_NAMES: [&str; 3] = ["low", "accelerating", "high"];

/// Torque per commutation angle by speed region (N·m/deg).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TpcaReport {
    pub low: f64,
    pub accelerating: f64,
    pub high: f64,
    pub total: f64,
    /// Regions without a usable cell (reported as 0).
    #[serde(default)]
    pub empty_regions: Vec<String>,
}

impl TpcaReport {
    pub fn regions(&self) -> [f64; 3] {
        [self.low, self.accelerating, self.high]
    }
}

fn region_of(speed: f64) -> Option<usize> {
    if !(REGION_EDGES[0]..=REGION_EDGES[3]).contains(&speed) {
        None
    } else if speed < REGION_EDGES[1] {
        Some(0)
    } else if speed < REGION_EDGES[2] {
        Some(1)
    } else {
        Some(2)
    }
}

/// Max-torque cell of a speed column; ties go to the smaller angle.
fn peak_cell<'a>(cells: impl Iterator<Item = &'a OperatingPoint>) -> Option<&'a OperatingPoint> {
    cells.fold(None, |best: Option<&OperatingPoint>, op| match best {
        Some(b) if op.torque < b.torque || (op.torque == b.torque && op.gamma >= b.gamma) => Some(b),
        _ => Some(op),
    })
}

/// TPCA per region: the largest, over speeds in the region, of the maximum
/// feasible torque at that speed divided by the commutation angle (degrees)
/// of the cell producing it.
///
/// Speeds whose peak cell sits at γ = 0 have no finite ratio and are skipped.
pub fn tpca(map: &TorqueSpeedMap) -> Result<TpcaReport> {
    if map.cells.is_empty() {
        return Err(Error::InvalidInput("map has no cells".into()));
    }
    let mut best: [Option<f64>; 3] = [None; 3];
    for (s, &speed) in map.speed_axis.iter().enumerate() {
        let Some(r) = region_of(speed) else { continue };
        let Some(op) = peak_cell(map.column(s)) else { continue };
        if op.gamma <= 0.0 {
            log::warn!("speed {speed} rad/s: peak torque at zero commutation angle, skipped");
            continue;
        }
        let ratio = op.torque / op.gamma;
        best[r] = Some(best[r].map_or(ratio, |b: f64| b.max(ratio)));
    }
    let mut empty_regions = Vec::new();
    let mut vals = [0.0; 3];
    for r in 0..3 {
        match best[r] {
            Some(v) => vals[r] = v,
            None => {
                log::warn!("TPCA region '{}' has no feasible cell", REGION_NAMES[r]);
                empty_regions.push(REGION_NAMES[r].to_string());
            }
        }
    }
    Ok(TpcaReport {
        low: vals[0],
        accelerating: vals[1],
        high: vals[2],
        total: vals[0] + vals[1] + vals[2],
        empty_regions,
    })
}

/// A query point located on the torque-speed plane.
pub trait SpeedTorque {
    fn speed_torque(&self) -> (f64, f64);
}

impl SpeedTorque for OperatingPoint {
    fn speed_torque(&self) -> (f64, f64) {
        (self.omega_mech, self.torque)
    }
}

impl SpeedTorque for (f64, f64) {
    fn speed_torque(&self) -> (f64, f64) {
        *self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PremiumStats {
    pub threshold: f64,
    /// Share of feasible cells with efficiency at or above the threshold.
    pub area_fraction: f64,
    /// Query points whose nearest cell is feasible and premium.
    pub count_in_premium: usize,
    pub total_points: usize,
}

/// Premium-efficiency area of a map and how many query points land in it.
pub fn premium_region_stats<P: SpeedTorque>(
    map: &TorqueSpeedMap,
    points: &[P],
    threshold: f64,
) -> Result<PremiumStats> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::InvalidInput(format!("threshold must lie in [0, 1], got {threshold}")));
    }
    if map.cells.is_empty() {
        return Err(Error::InvalidInput("map has no cells".into()));
    }
    let feasible = map.feasible_count();
    if feasible == 0 {
        return Err(Error::InvalidInput("map has no feasible cells".into()));
    }
    let premium = map.cells.iter().flatten().filter(|op| op.eta >= threshold).count();
    let count_in_premium = points
        .iter()
        .filter(|p| {
            let (w, t) = p.speed_torque();
            let s = TorqueSpeedMap::nearest(&map.speed_axis, w);
            let k = TorqueSpeedMap::nearest(&map.torque_axis, t);
            map.cell(s, k).is_some_and(|op| op.eta >= threshold)
        })
        .count();
    Ok(PremiumStats {
        threshold,
        area_fraction: premium as f64 / feasible as f64,
        count_in_premium,
        total_points: points.len(),
    })
}
