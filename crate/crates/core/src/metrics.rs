//! Per-trial grasp quality flags and their aggregation.

use alloc::vec::Vec;

use crate::cloud::{nearest_distance, PointCloud};
use crate::collision::{extract_contacts, gripper_object_collision};
use crate::gripper::{Arm, GripperModel};
use crate::math::{cos, Vec3};
use crate::se3::Pose;

/// One executed grasp and the region it was meant to land on.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmGrasp {
    pub pose: Pose,
    pub arm: Arm,
    /// Indices of the target region in the scene cloud.
    pub region: Vec<usize>,
}

/// The output of one successful planning trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialResult {
    pub grasps: Vec<ArmGrasp>,
    /// Pair quality for dual-arm trials.
    pub fc_epsilon: Option<f64>,
    pub center_distance: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsConfig {
    /// Contacts farther than this from the target region (m) do not count
    /// as on the part.
    pub containment_radius: f64,
    /// Largest angle (rad) between a contact normal and the closing axis,
    /// and between the two opposed normals, for the stability proxy.
    pub antipodal_angle: f64,
    pub fc_threshold: f64,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        MetricsConfig { containment_radius: 0.01, antipodal_angle: core::f64::consts::PI / 6.0, fc_threshold: 1e-3 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TrialFlags {
    pub collision_free: bool,
    pub contained: bool,
    pub stable: bool,
}

/// Grasp-level flags for one trial; a failed trial (`None`) scores false on
/// everything.
pub fn trial_flags(
    trial: Option<&TrialResult>,
    cloud: &PointCloud,
    gripper: &GripperModel,
    cfg: &MetricsConfig,
) -> TrialFlags {
    let Some(trial) = trial else {
        return TrialFlags::default();
    };
    if trial.grasps.is_empty() {
        return TrialFlags::default();
    }
    let cos_limit = cos(cfg.antipodal_angle);
    let mut flags = TrialFlags { collision_free: true, contained: true, stable: true };
    for g in &trial.grasps {
        if gripper_object_collision(&g.pose, cloud, gripper).0 {
            flags.collision_free = false;
        }
        let contacts = extract_contacts(&g.pose, cloud, gripper, g.arm);
        let region: Vec<Vec3> = g.region.iter().map(|&i| cloud.point(i)).collect();
        let on_part = !contacts.is_empty()
            && !region.is_empty()
            && contacts.iter().all(|c| nearest_distance(&region, c.point) <= cfg.containment_radius);
        flags.contained &= on_part;

        let closing = g.pose.axis(0);
        let antipodal = contacts.len() == 2
            && -contacts[0].normal.dot(contacts[1].normal) >= cos_limit
            && contacts.iter().all(|c| c.normal.dot(closing).abs() >= cos_limit);
        flags.stable &= antipodal;
    }
    if let Some(eps) = trial.fc_epsilon {
        flags.stable &= eps >= cfg.fc_threshold;
    }
    flags
}

/// Aggregate quality over a set of trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsRow {
    pub trials: usize,
    pub cfr: f64,
    pub part_containment: f64,
    pub stability_proxy: f64,
    /// Mean grasp-centre separation over successful dual-arm trials.
    pub mean_d: Option<f64>,
}

/// Fractions of trials that are collision-free, land on the part and pass
/// the stability proxy. Failed trials count in the denominator.
pub fn compute_metrics(
    trials: &[Option<TrialResult>],
    cloud: &PointCloud,
    gripper: &GripperModel,
    cfg: &MetricsConfig,
) -> MetricsRow {
    let n = trials.len();
    let (mut free, mut contained, mut stable) = (0usize, 0usize, 0usize);
    let (mut d_sum, mut d_count) = (0.0, 0usize);
    for t in trials {
        let f = trial_flags(t.as_ref(), cloud, gripper, cfg);
        free += f.collision_free as usize;
        contained += f.contained as usize;
        stable += f.stable as usize;
        if let Some(d) = t.as_ref().and_then(|t| t.center_distance) {
            d_sum += d;
            d_count += 1;
        }
    }
    let frac = |k: usize| if n == 0 { 0.0 } else { k as f64 / n as f64 };
    MetricsRow {
        trials: n,
        cfr: frac(free),
        part_containment: frac(contained),
        stability_proxy: frac(stable),
        mean_d: if d_count > 0 { Some(d_sum / d_count as f64) } else { None },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    /// Plate in the grasp-frame yz plane; the left half is the target.
    fn plate() -> PointCloud {
        let mut pts = vec![];
        let mut nrm = vec![];
        for i in -5..=5 {
            for j in -5..=5 {
                for s in [-1.0, 1.0] {
                    pts.push(Vec3::new(s * 0.005, i as f64 * 0.004, j as f64 * 0.004));
                    nrm.push(Vec3::X * s);
                }
            }
        }
        PointCloud::with_normals(pts, nrm).unwrap()
    }

    fn trial(pose: Pose, region: Vec<usize>) -> TrialResult {
        TrialResult {
            grasps: vec![ArmGrasp { pose, arm: Arm::Single, region }],
            fc_epsilon: None,
            center_distance: None,
        }
    }

    #[test]
    fn clean_grasp_scores_everywhere() {
        let cloud = plate();
        let g = GripperModel::default();
        let all: Vec<usize> = (0..cloud.len()).collect();
        let t = trial(Pose::IDENTITY, all);
        let m = compute_metrics(&[Some(t.clone()), Some(t)], &cloud, &g, &MetricsConfig::default());
        assert_eq!((m.cfr, m.part_containment, m.stability_proxy), (1.0, 1.0, 1.0));
        assert_eq!(m.mean_d, None);
    }

    #[test]
    fn wrong_region_and_failures() {
        let cloud = plate();
        let g = GripperModel::default();
        let far: Vec<usize> = (0..cloud.len()).filter(|&i| cloud.point(i).y() > 0.015).collect();
        let t = trial(Pose::IDENTITY, far);
        let m = compute_metrics(&[Some(t), None], &cloud, &g, &MetricsConfig::default());
        assert_eq!(m.part_containment, 0.0);
        assert_eq!(m.cfr, 0.5);
        assert_eq!(m.trials, 2);
    }
}
