//! Dual-arm coordination: per-arm constrained sampling, energy filtering,
//! inter-gripper collision, force closure and maximal-separation selection.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::cloud::{knn, PointCloud};
use crate::collision::{extract_contacts, gripper_gripper_collision, Contact};
use crate::diffusion::{map_indices, sample_grasps, GraspCandidate, SamplerConfig};
use crate::energy::EnergyField;
use crate::error::{Error, Result};
use crate::gripper::{Arm, GripperModel};
use crate::math::Vec3;
use crate::scene::{determine_target_regions, SceneDescription, TargetRegions};
use crate::wrench::{force_closure_epsilon, DEFAULT_CONE_EDGES, DEFAULT_MU};

/// Stage-by-stage survivor counts of one pair selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SurvivorCounts {
    pub n_filter1: usize,
    pub n_filter2: usize,
    pub n_pairs: usize,
    pub n_nocollide: usize,
    pub n_stable: usize,
}

impl fmt::Display for SurvivorCounts {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "filtered {}+{}, pairs {}, collision-free {}, stable {}",
            self.n_filter1, self.n_filter2, self.n_pairs, self.n_nocollide, self.n_stable
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraspPair {
    pub h1: GraspCandidate,
    pub h2: GraspCandidate,
    /// Distance between the two grasp centres (m).
    pub center_distance: f64,
    pub fc_epsilon: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualConfig {
    /// Absolute energy threshold. `None` uses `delta_percentile`.
    pub delta: Option<f64>,
    /// Percentile (0 to 100) of the pooled global energies of both arms'
    /// candidates used as the threshold when `delta` is unset.
    pub delta_percentile: f64,
    pub fc_threshold: f64,
    pub mu: f64,
    pub cone_edges: usize,
    /// Measure separation between the cloud points nearest each grasp centre
    /// instead of between the centres themselves.
    pub project_centers: bool,
    /// Evaluate pairs on the rayon pool when the `parallel` feature is on.
    pub parallel: bool,
}

impl Default for DualConfig {
    fn default() -> Self {
        DualConfig {
            delta: None,
            delta_percentile: 60.0,
            fc_threshold: 1e-3,
            mu: DEFAULT_MU,
            cone_edges: DEFAULT_CONE_EDGES,
            project_centers: false,
            parallel: true,
        }
    }
}

impl DualConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=100.0).contains(&self.delta_percentile) {
            return Err(Error::Parameter("delta_percentile must lie in [0, 100]".into()));
        }
        if let Some(d) = self.delta {
            if d.is_nan() {
                return Err(Error::Parameter("delta must be a number".into()));
            }
        }
        if !(self.fc_threshold >= 0.0 && self.fc_threshold.is_finite()) {
            return Err(Error::Parameter("fc_threshold must be non-negative".into()));
        }
        if !(self.mu > 0.0 && self.mu.is_finite()) || self.cone_edges < 3 {
            return Err(Error::Parameter("need mu > 0 and at least 3 cone edges".into()));
        }
        Ok(())
    }
}

/// Keeps candidates with both energies strictly below `delta`, in order.
pub fn filter_candidates(cands: &[GraspCandidate], delta: f64) -> Vec<GraspCandidate> {
    cands.iter().filter(|c| c.e_global < delta && c.e_part < delta).copied().collect()
}

/// Linearly interpolated percentile (`q` in 0 to 100) of `values`.
pub fn percentile(values: &[f64], q: f64) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 100.0) / 100.0 * (v.len() - 1) as f64;
    let lo = crate::math::floor(pos) as usize;
    let hi = (lo + 1).min(v.len() - 1);
    Some(v[lo] + (v[hi] - v[lo]) * (pos - lo as f64))
}

/// Outcome of evaluating one candidate pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PairStatus {
    Collides,
    Unstable(f64),
    Stable(f64),
}

/// Collision and force-closure status of a pair, pooling both grippers'
/// contacts.
pub fn evaluate_pair(
    h1: &GraspCandidate,
    h2: &GraspCandidate,
    contacts1: &[Contact],
    contacts2: &[Contact],
    gripper: &GripperModel,
    cfg: &DualConfig,
) -> Result<PairStatus> {
    if gripper_gripper_collision(&h1.pose, &h2.pose, gripper) {
        return Ok(PairStatus::Collides);
    }
    let mut pooled = Vec::with_capacity(contacts1.len() + contacts2.len());
    pooled.extend_from_slice(contacts1);
    pooled.extend_from_slice(contacts2);
    let eps = force_closure_epsilon(&pooled, cfg.mu, cfg.cone_edges)?;
    Ok(if eps >= cfg.fc_threshold { PairStatus::Stable(eps) } else { PairStatus::Unstable(eps) })
}

fn grasp_center(c: &GraspCandidate, cloud: &PointCloud, project: bool) -> Vec3 {
    let t = c.pose.translation;
    if project && !cloud.is_empty() {
        knn(cloud, t, 1).map(|i| cloud.point(i[0])).unwrap_or(t)
    } else {
        t
    }
}

/// Better pair first: larger separation, then larger epsilon, then smaller
/// candidate indices.
pub fn pair_order(a: &GraspPair, b: &GraspPair) -> Ordering {
    b.center_distance
        .total_cmp(&a.center_distance)
        .then(b.fc_epsilon.total_cmp(&a.fc_epsilon))
        .then((a.h1.index, a.h2.index).cmp(&(b.h1.index, b.h2.index)))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairSelection {
    pub pair: GraspPair,
    pub survivors: SurvivorCounts,
}

/// Enumerates all pairs of already-filtered candidates, drops those whose
/// grippers collide, then those below the force-closure threshold, and
/// returns the most widely separated survivor.
pub fn select_pair(
    filt1: &[GraspCandidate],
    filt2: &[GraspCandidate],
    cloud: &PointCloud,
    gripper: &GripperModel,
    cfg: &DualConfig,
) -> Result<PairSelection> {
    cfg.validate()?;
    let mut survivors = SurvivorCounts {
        n_filter1: filt1.len(),
        n_filter2: filt2.len(),
        n_pairs: filt1.len() * filt2.len(),
        ..Default::default()
    };
    if survivors.n_pairs == 0 {
        return Err(Error::NoFeasiblePair(survivors));
    }
    let contacts1: Vec<Vec<Contact>> =
        filt1.iter().map(|c| extract_contacts(&c.pose, cloud, gripper, Arm::Arm1)).collect();
    let contacts2: Vec<Vec<Contact>> =
        filt2.iter().map(|c| extract_contacts(&c.pose, cloud, gripper, Arm::Arm2)).collect();
    let n2 = filt2.len();
    let status = map_indices(survivors.n_pairs, cfg.parallel, |k| {
        let (i, j) = (k / n2, k % n2);
        evaluate_pair(&filt1[i], &filt2[j], &contacts1[i], &contacts2[j], gripper, cfg)
    })?;

    let centers1: Vec<Vec3> = filt1.iter().map(|c| grasp_center(c, cloud, cfg.project_centers)).collect();
    let centers2: Vec<Vec3> = filt2.iter().map(|c| grasp_center(c, cloud, cfg.project_centers)).collect();
    let mut best: Option<GraspPair> = None;
    for (k, s) in status.iter().enumerate() {
        let eps = match *s {
            PairStatus::Collides => continue,
            PairStatus::Unstable(_) => {
                survivors.n_nocollide += 1;
                continue;
            }
            PairStatus::Stable(eps) => eps,
        };
        survivors.n_nocollide += 1;
        survivors.n_stable += 1;
        let (i, j) = (k / n2, k % n2);
        let pair = GraspPair {
            h1: filt1[i],
            h2: filt2[j],
            center_distance: centers1[i].distance(centers2[j]),
            fc_epsilon: eps,
        };
        if best.as_ref().map_or(true, |b| pair_order(&pair, b) == Ordering::Less) {
            best = Some(pair);
        }
    }
    match best {
        Some(pair) => Ok(PairSelection { pair, survivors }),
        None => Err(Error::NoFeasiblePair(survivors)),
    }
}

/// Derives an independent seed for one arm.
pub fn arm_seed(seed: u64, arm: Arm) -> u64 {
    let mut z = seed ^ (arm as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualPlan {
    pub pair: GraspPair,
    pub survivors: SurvivorCounts,
    pub delta: f64,
    pub regions: TargetRegions,
    pub candidates1: Vec<GraspCandidate>,
    pub candidates2: Vec<GraspCandidate>,
}

/// Runs the dual-arm pipeline on explicit regions of `cloud`.
pub fn plan_dual_regions<F: EnergyField + ?Sized>(
    cloud: &PointCloud,
    regions: TargetRegions,
    field: &F,
    sampler: &SamplerConfig,
    cfg: &DualConfig,
    gripper: &GripperModel,
) -> Result<DualPlan> {
    cfg.validate()?;
    let (p1, p2) = regions.clouds(cloud);
    let arm_cfg = |arm| SamplerConfig { seed: arm_seed(sampler.seed, arm), ..sampler.clone() };
    let candidates1 = sample_grasps(cloud, &p1, field, &arm_cfg(Arm::Arm1), Arm::Arm1)?;
    let candidates2 = sample_grasps(cloud, &p2, field, &arm_cfg(Arm::Arm2), Arm::Arm2)?;
    let delta = match cfg.delta {
        Some(d) => d,
        None => {
            let pooled: Vec<f64> = candidates1.iter().chain(&candidates2).map(|c| c.e_global).collect();
            percentile(&pooled, cfg.delta_percentile).unwrap_or(f64::INFINITY)
        }
    };
    let f1 = filter_candidates(&candidates1, delta);
    let f2 = filter_candidates(&candidates2, delta);
    let sel = select_pair(&f1, &f2, cloud, gripper, cfg)?;
    Ok(DualPlan { pair: sel.pair, survivors: sel.survivors, delta, regions, candidates1, candidates2 })
}

/// Full dual-arm pipeline: regions from the scene, then
/// [`plan_dual_regions`].
pub fn plan_dual<F: EnergyField + ?Sized>(
    scene: &SceneDescription,
    part_label: &str,
    field: &F,
    sampler: &SamplerConfig,
    cfg: &DualConfig,
    gripper: &GripperModel,
) -> Result<DualPlan> {
    let regions = determine_target_regions(scene, part_label)?;
    plan_dual_regions(&scene.cloud, regions, field, sampler, cfg, gripper)
}
