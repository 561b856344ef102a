use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::motor::{DesignEvaluation, DesignModel, DesignVector, MachineParams, PerVariable};
use crate::optimizer::{Nsga2Config, Sampler, PREMIUM_THRESHOLD};
use crate::trajectory::axis;
use crate::vehicle::VehicleParams;
use crate::{Error, Result};

/// `start..=stop` in steps of `step`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl AxisSpec {
    pub fn values(&self) -> Result<Vec<f64>> {
        if !(self.step > 0.0) || !(self.stop >= self.start) || !self.start.is_finite() || !self.stop.is_finite() {
            return Err(Error::InvalidInput(format!(
                "axis needs step > 0 and stop >= start, got {}..{} step {}",
                self.start, self.stop, self.step
            )));
        }
        Ok(axis(self.start, self.stop, self.step))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MapSection {
    pub speed: AxisSpec,
    pub torque: AxisSpec,
    pub threshold: f64,
}

impl Default for MapSection {
    fn default() -> Self {
        MapSection {
            speed: AxisSpec { start: 0.0, stop: 1000.0, step: 10.0 },
            torque: AxisSpec { start: 0.0, stop: 212.0, step: 5.0 },
            threshold: PREMIUM_THRESHOLD,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleSection {
    pub n: usize,
    pub dims: usize,
    /// Swap iterations of the φ_p optimisation.
    pub iterations: usize,
}

impl Default for SampleSection {
    fn default() -> Self {
        SampleSection { n: 100, dims: 8, iterations: 1000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemKind {
    /// Eight-variable ZDT1 benchmark.
    Zdt1,
    /// Magnet sizing of the configured rotor design.
    Magnet,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimizeSection {
    pub problem: ProblemKind,
    pub sampler: Sampler,
    pub nsga2: Nsga2Config,
    /// Grid of the magnet problem's maps (coarse by default).
    pub map: Option<MapSection>,
    /// Target hypervolume as a fraction of the reference run's final value.
    pub target_fraction: f64,
    /// Seeds of a paired plain-vs-MLHR comparison; empty skips it.
    pub compare_seeds: Vec<u64>,
    /// Fail the evaluator on this call (1-based); for exercising error paths.
    pub fail_on_evaluation: Option<usize>,
}

impl Default for OptimizeSection {
    fn default() -> Self {
        OptimizeSection {
            problem: ProblemKind::Zdt1,
            sampler: Sampler::PlainLhs,
            nsga2: Nsga2Config::default(),
            map: None,
            target_fraction: 0.95,
            compare_seeds: Vec::new(),
            fail_on_evaluation: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DriveSection {
    /// Bundled cycle names (`triangle`, `trapezoid`) or CSV paths.
    pub cycles: Vec<String>,
}

impl Default for DriveSection {
    fn default() -> Self {
        DriveSection { cycles: vec!["triangle".into()] }
    }
}

/// Single JSON document driving every command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    /// Explicit machine; takes precedence over `design`.
    pub machine: Option<MachineParams>,
    /// Rotor design (values, bounds, noise) mapped through `design_model`.
    pub design: Option<DesignVector>,
    pub design_model: Option<DesignModel>,
    pub sample: SampleSection,
    pub optimize: OptimizeSection,
    pub map: MapSection,
    pub vehicle: VehicleParams,
    pub drive: DriveSection,
    /// Relative to the config file.
    pub output_dir: PathBuf,
    /// Directory of the config file; set at load.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: None,
            machine: None,
            design: None,
            design_model: None,
            sample: SampleSection::default(),
            optimize: OptimizeSection::default(),
            map: MapSection::default(),
            vehicle: VehicleParams::default(),
            drive: DriveSection::default(),
            output_dir: PathBuf::from("out"),
            base_dir: PathBuf::new(),
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidInput(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| Error::InvalidInput(format!("config {}: {e}", path.display())))?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    /// Resolves a path relative to the config file.
    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn design_vector(&self) -> DesignVector {
        self.design.unwrap_or_else(DesignVector::t_prius)
    }

    pub fn model(&self) -> DesignModel {
        self.design_model.unwrap_or_default()
    }

    /// The machine to analyse: explicit, else the mapped design, else the
    /// reference machine.
    pub fn resolve_machine(&self) -> Result<MachineParams> {
        if let Some(m) = self.machine {
            m.validate()?;
            return Ok(m);
        }
        match self.design {
            Some(d) => match self.model().evaluate(&d, &PerVariable::splat(0.0)) {
                DesignEvaluation::Feasible(m) => Ok(m),
                DesignEvaluation::Infeasible(why) => Err(Error::InvalidInput(format!("design is infeasible: {why}"))),
            },
            None => Ok(MachineParams::t_prius()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_takes_defaults() {
        let cfg: RunConfig = serde_json::from_str("{}").unwrap();
        assert_eq!(cfg.map.torque.values().unwrap().len(), 43);
        assert_eq!(cfg.resolve_machine().unwrap(), MachineParams::t_prius());
        assert!(cfg.seed.is_none());
    }

    #[test]
    fn unknown_fields_are_rejected() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"seeed": 1}"#).is_err());
    }

    #[test]
    fn sampler_tag() {
        let cfg: RunConfig =
            serde_json::from_str(r#"{"optimize": {"sampler": {"kind": "mlhr", "batch": 10}}}"#).unwrap();
        match cfg.optimize.sampler {
            Sampler::Mlhr(c) => assert_eq!(c.batch, 10),
            Sampler::PlainLhs => panic!("expected mlhr"),
        }
    }
}
