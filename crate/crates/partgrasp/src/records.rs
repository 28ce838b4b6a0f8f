//! JSON-lines output records.

use partgrasp_core::{Arm, GraspCandidate, Pose, Quat, SurvivorCounts, Vec3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraspRecord {
    pub arm: String,
    pub translation: [f64; 3],
    /// `[w, x, y, z]`.
    pub quaternion: [f64; 4],
    pub e_global: f64,
    pub e_part: f64,
}

impl GraspRecord {
    pub fn from_candidate(c: &GraspCandidate) -> GraspRecord {
        GraspRecord {
            arm: c.arm.as_str().to_string(),
            translation: c.pose.translation.0,
            quaternion: c.pose.rotation.to_array(),
            e_global: c.e_global,
            e_part: c.e_part,
        }
    }

    pub fn arm(&self) -> Result<Arm> {
        match self.arm.as_str() {
            "single" => Ok(Arm::Single),
            "arm1" => Ok(Arm::Arm1),
            "arm2" => Ok(Arm::Arm2),
            other => Err(Error::Report(format!("unknown arm `{other}`"))),
        }
    }

    pub fn pose(&self) -> Result<Pose> {
        let [w, x, y, z] = self.quaternion;
        let q = Quat::new(w, x, y, z).ok_or_else(|| Error::Report("zero quaternion".into()))?;
        let [tx, ty, tz] = self.translation;
        Ok(Pose::new(q, Vec3::new(tx, ty, tz)))
    }
}

/// Outcome of a single-arm plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    /// True when the selected gripper is free of the object.
    pub cfr_flag: bool,
    pub e_global: f64,
    pub e_part: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    #[serde(rename = "D_ij")]
    pub d_ij: f64,
    pub fc_epsilon: f64,
    /// `[n_filter1, n_filter2, n_nocollide, n_stable]`.
    pub survivors: [usize; 4],
}

impl PairRecord {
    pub fn new(d_ij: f64, fc_epsilon: f64, s: &SurvivorCounts) -> PairRecord {
        PairRecord { d_ij, fc_epsilon, survivors: [s.n_filter1, s.n_filter2, s.n_nocollide, s.n_stable] }
    }
}

/// One JSON document per line.
pub fn to_json_line<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string(value)?;
    s.push('\n');
    Ok(s)
}
