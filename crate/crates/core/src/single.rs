//! Single-arm planning: sample, then keep the lowest global energy.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::cloud::PointCloud;
use crate::collision::gripper_object_collision;
use crate::diffusion::{sample_grasps, GraspCandidate, SamplerConfig};
use crate::energy::EnergyField;
use crate::error::{Error, Result};
use crate::gripper::{Arm, GripperModel};

/// Order used to pick the best candidate: global energy, then part energy,
/// then generation index.
pub fn selection_order(a: &GraspCandidate, b: &GraspCandidate) -> Ordering {
    a.e_global.total_cmp(&b.e_global).then(a.e_part.total_cmp(&b.e_part)).then(a.index.cmp(&b.index))
}

/// Position of the minimum-energy candidate in `cands`.
pub fn select_min_energy(cands: &[GraspCandidate]) -> Option<usize> {
    (0..cands.len()).min_by(|&i, &j| selection_order(&cands[i], &cands[j]))
}

#[derive(Debug, Clone, PartialEq)]
pub struct SinglePlan {
    pub grasp: GraspCandidate,
    /// Whether the selected gripper intersects the object. Reported only;
    /// selection is by energy alone.
    pub collides: bool,
    pub collision_count: usize,
    /// All sampled candidates, sorted by ascending global energy.
    pub candidates: Vec<GraspCandidate>,
}

pub fn plan_single<F: EnergyField + ?Sized>(
    global: &PointCloud,
    part: &PointCloud,
    field: &F,
    cfg: &SamplerConfig,
    gripper: &GripperModel,
) -> Result<SinglePlan> {
    let candidates = sample_grasps(global, part, field, cfg, Arm::Single)?;
    let best = select_min_energy(&candidates).ok_or(Error::EmptyTarget)?;
    let grasp = candidates[best];
    let (collides, collision_count) = gripper_object_collision(&grasp.pose, global, gripper);
    Ok(SinglePlan { grasp, collides, collision_count, candidates })
}
