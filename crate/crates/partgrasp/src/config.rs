//! TOML configuration with optional `[energy]`, `[gripper]`, `[sampler]`
//! and `[dual]` sections. Every key is optional.

use std::path::Path;

use partgrasp_core::energy::{DEFAULT_CLEARANCE, DEFAULT_CONTACT_TEMPERATURE};
use partgrasp_core::energy::{DEFAULT_LEVELS, DEFAULT_SIGMA_MAX, DEFAULT_SIGMA_MIN, DEFAULT_STEP_SCALE};
use partgrasp_core::{make_schedule, DualConfig, EnergyWeights, GripperModel, SamplerConfig, SurrogateEnergy};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnergySection {
    pub w_d: f64,
    pub w_p: f64,
    pub w_a: f64,
    pub levels: usize,
    pub sigma_max: f64,
    pub sigma_min: f64,
    pub step_scale: f64,
    pub contact_temperature: f64,
    pub clearance: f64,
}

impl Default for EnergySection {
    fn default() -> Self {
        let w = EnergyWeights::default();
        EnergySection {
            w_d: w.distance,
            w_p: w.penetration,
            w_a: w.antipodal,
            levels: DEFAULT_LEVELS,
            sigma_max: DEFAULT_SIGMA_MAX,
            sigma_min: DEFAULT_SIGMA_MIN,
            step_scale: DEFAULT_STEP_SCALE,
            contact_temperature: DEFAULT_CONTACT_TEMPERATURE,
            clearance: DEFAULT_CLEARANCE,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GripperSection {
    pub max_jaw_width: f64,
    pub finger_length: f64,
    pub finger_thickness: f64,
    pub finger_width: f64,
    pub palm_depth: f64,
}

impl Default for GripperSection {
    fn default() -> Self {
        let g = GripperModel::default();
        GripperSection {
            max_jaw_width: g.max_jaw_width,
            finger_length: g.finger_length,
            finger_thickness: g.finger_thickness,
            finger_width: g.finger_width,
            palm_depth: g.palm_depth,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SamplerSection {
    pub num_candidates: usize,
    pub steps_per_level: usize,
    pub seed: u64,
    pub init_radius: Option<f64>,
    pub rotation_length: f64,
    pub max_step: f64,
}

impl Default for SamplerSection {
    fn default() -> Self {
        let s = SamplerConfig::default();
        SamplerSection {
            num_candidates: s.num_candidates,
            steps_per_level: s.steps_per_level,
            seed: s.seed,
            init_radius: s.init_radius,
            rotation_length: s.rotation_length,
            max_step: s.max_step,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DualSection {
    pub delta: Option<f64>,
    pub delta_percentile: f64,
    pub fc_threshold: f64,
    pub mu: f64,
    pub cone_edges: usize,
    pub project_centers: bool,
}

impl Default for DualSection {
    fn default() -> Self {
        let d = DualConfig::default();
        DualSection {
            delta: d.delta,
            delta_percentile: d.delta_percentile,
            fc_threshold: d.fc_threshold,
            mu: d.mu,
            cone_edges: d.cone_edges,
            project_centers: d.project_centers,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub energy: EnergySection,
    pub gripper: GripperSection,
    pub sampler: SamplerSection,
    pub dual: DualSection,
}

impl Config {
    pub fn parse(text: &str) -> Result<Config> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Config::parse(&text)
    }

    pub fn gripper(&self) -> Result<GripperModel> {
        let s = &self.gripper;
        let g = GripperModel {
            max_jaw_width: s.max_jaw_width,
            finger_length: s.finger_length,
            finger_thickness: s.finger_thickness,
            finger_width: s.finger_width,
            palm_depth: s.palm_depth,
        };
        g.validate()?;
        Ok(g)
    }

    pub fn energy(&self) -> Result<SurrogateEnergy> {
        let s = &self.energy;
        let schedule = make_schedule(s.levels, s.sigma_max, s.sigma_min, s.step_scale)?;
        let weights = EnergyWeights { distance: s.w_d, penetration: s.w_p, antipodal: s.w_a };
        let mut field = SurrogateEnergy::new(self.gripper()?, weights, schedule)?;
        field.contact_temperature = s.contact_temperature;
        field.clearance = s.clearance;
        field.validate()?;
        Ok(field)
    }

    pub fn sampler(&self) -> Result<SamplerConfig> {
        let s = &self.sampler;
        let cfg = SamplerConfig {
            num_candidates: s.num_candidates,
            steps_per_level: s.steps_per_level,
            seed: s.seed,
            init_radius: s.init_radius,
            rotation_length: s.rotation_length,
            max_step: s.max_step,
            ..SamplerConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn dual(&self) -> Result<DualConfig> {
        let s = &self.dual;
        let cfg = DualConfig {
            delta: s.delta,
            delta_percentile: s.delta_percentile,
            fc_threshold: s.fc_threshold,
            mu: s.mu,
            cone_edges: s.cone_edges,
            project_centers: s.project_centers,
            ..DualConfig::default()
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_gives_defaults() {
        let c = Config::parse("").unwrap();
        assert_eq!(c, Config::default());
        assert_eq!(c.gripper().unwrap(), GripperModel::default());
        assert_eq!(c.sampler().unwrap(), SamplerConfig::default());
        assert_eq!(c.dual().unwrap(), DualConfig::default());
        assert_eq!(c.energy().unwrap().schedule.levels(), DEFAULT_LEVELS);
    }

    #[test]
    fn partial_sections() {
        let c = Config::parse("[sampler]\nnum_candidates = 7\n[dual]\ndelta = 0.2\n[energy]\nw_a = 1.5\n").unwrap();
        assert_eq!(c.sampler().unwrap().num_candidates, 7);
        assert_eq!(c.dual().unwrap().delta, Some(0.2));
        assert_eq!(c.energy().unwrap().weights.antipodal, 1.5);
        assert_eq!(c.sampler().unwrap().steps_per_level, SamplerConfig::default().steps_per_level);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(Config::parse("[sampler]\ncandidates = 3\n").is_err());
        assert!(Config::parse("[energy]\nsigma_min = 0.5\n").unwrap().energy().is_err());
        assert!(Config::parse("[gripper]\nmax_jaw_width = 0.01\n").unwrap().gripper().is_err());
        assert!(Config::parse("[sampler]\nnum_candidates = 0\n").unwrap().sampler().is_err());
    }
}
