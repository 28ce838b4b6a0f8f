//! Planning entry points shared by the command line and the benchmark.

use partgrasp_core::metrics::ArmGrasp;
use partgrasp_core::scene::baseline_fps_knn_regions;
use partgrasp_core::{
    ground_target, plan_dual, plan_dual_regions, plan_single, Arm, DualConfig, DualPlan, EnergyField, GripperModel,
    SamplerConfig, SceneDescription, SinglePlan, TrialResult,
};

use crate::error::Result;
use crate::records::{to_json_line, GraspRecord, MetricsRecord, PairRecord};

/// A single-arm plan together with the target region it was asked for.
#[derive(Debug, Clone)]
pub struct SingleOutcome {
    pub plan: SinglePlan,
    pub target_indices: Vec<usize>,
}

impl SingleOutcome {
    pub fn trial(&self) -> TrialResult {
        TrialResult {
            grasps: vec![ArmGrasp {
                pose: self.plan.grasp.pose,
                arm: Arm::Single,
                region: self.target_indices.clone(),
            }],
            fc_epsilon: None,
            center_distance: None,
        }
    }

    /// The grasp record followed by the metrics record.
    pub fn to_json_lines(&self) -> Result<String> {
        let g = &self.plan.grasp;
        let mut out = to_json_line(&GraspRecord::from_candidate(g))?;
        out += &to_json_line(&MetricsRecord { cfr_flag: !self.plan.collides, e_global: g.e_global, e_part: g.e_part })?;
        Ok(out)
    }
}

/// Part-guided single-arm planning on `part_label`. With `guided = false`
/// the whole cloud conditions both branches and the part only scores
/// containment.
pub fn run_single<F: EnergyField + ?Sized>(
    scene: &SceneDescription,
    part_label: &str,
    guided: bool,
    field: &F,
    sampler: &SamplerConfig,
    gripper: &GripperModel,
) -> Result<SingleOutcome> {
    let g = ground_target(scene, part_label)?;
    let part = if guided { &g.target } else { &g.global };
    let plan = plan_single(&g.global, part, field, sampler, gripper)?;
    Ok(SingleOutcome { plan, target_indices: g.target_indices })
}

pub fn dual_trial(plan: &DualPlan) -> TrialResult {
    let p = &plan.pair;
    TrialResult {
        grasps: vec![
            ArmGrasp { pose: p.h1.pose, arm: Arm::Arm1, region: plan.regions.first.clone() },
            ArmGrasp { pose: p.h2.pose, arm: Arm::Arm2, region: plan.regions.second.clone() },
        ],
        fc_epsilon: Some(p.fc_epsilon),
        center_distance: Some(p.center_distance),
    }
}

/// Both grasp records followed by the pair record.
pub fn dual_json_lines(plan: &DualPlan) -> Result<String> {
    let p = &plan.pair;
    let mut out = to_json_line(&GraspRecord::from_candidate(&p.h1))?;
    out += &to_json_line(&GraspRecord::from_candidate(&p.h2))?;
    out += &to_json_line(&PairRecord::new(p.center_distance, p.fc_epsilon, &plan.survivors))?;
    Ok(out)
}

/// Every sampled candidate of both arms, one grasp record per line.
pub fn candidate_json_lines(plan: &DualPlan) -> Result<String> {
    let mut out = String::new();
    for c in plan.candidates1.iter().chain(&plan.candidates2) {
        out += &to_json_line(&GraspRecord::from_candidate(c))?;
    }
    Ok(out)
}

pub fn run_dual<F: EnergyField + ?Sized>(
    scene: &SceneDescription,
    part_label: &str,
    field: &F,
    sampler: &SamplerConfig,
    dual: &DualConfig,
    gripper: &GripperModel,
) -> Result<DualPlan> {
    Ok(plan_dual(scene, part_label, field, sampler, dual, gripper)?)
}

/// Dual-arm planning on regions grown from two farthest-point seeds by `k`
/// nearest neighbours each, seeded by the sampler seed.
pub fn run_baseline_dual<F: EnergyField + ?Sized>(
    scene: &SceneDescription,
    k: usize,
    field: &F,
    sampler: &SamplerConfig,
    dual: &DualConfig,
    gripper: &GripperModel,
) -> Result<DualPlan> {
    let regions = baseline_fps_knn_regions(&scene.cloud, k, sampler.seed)?;
    Ok(plan_dual_regions(&scene.cloud, regions, field, sampler, dual, gripper)?)
}
