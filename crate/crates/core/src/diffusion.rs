//! Part-guided annealed Langevin sampling on SE(3).
//!
//! Every candidate is scored against both the whole object `P` and the target
//! region `P_t`. Whichever energy is larger drives the update, so a candidate
//! is pulled toward the part while it is still far from it and toward a
//! globally valid grasp once it has arrived.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::cloud::PointCloud;
use crate::energy::EnergyField;
use crate::error::{Error, Result};
use crate::gripper::Arm;
use crate::math::{powf, sqrt, Vec3};
use crate::se3::{Pose, Quat, Twist};

/// Which branch attained the guided maximum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Global,
    Part,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuidedEnergy {
    pub value: f64,
    pub global: f64,
    pub part: f64,
    pub branch: Branch,
}

/// `max(E(H, k, P), E(H, k, P_t))`; ties resolve to the global branch.
pub fn guided_energy<F: EnergyField + ?Sized>(
    field: &F,
    pose: &Pose,
    level: usize,
    global: &PointCloud,
    part: &PointCloud,
) -> Result<GuidedEnergy> {
    if part.is_empty() || global.is_empty() {
        return Err(Error::EmptyTarget);
    }
    let e_global = field.energy(pose, level, global)?;
    let e_part = if core::ptr::eq(global, part) { e_global } else { field.energy(pose, level, part)? };
    let branch = if e_part > e_global { Branch::Part } else { Branch::Global };
    Ok(GuidedEnergy { value: e_global.max(e_part), global: e_global, part: e_part, branch })
}

/// Score of whichever branch [`guided_energy`] selects.
pub fn guided_score<F: EnergyField + ?Sized>(
    field: &F,
    pose: &Pose,
    level: usize,
    global: &PointCloud,
    part: &PointCloud,
) -> Result<Twist> {
    let g = guided_energy(field, pose, level, global, part)?;
    match g.branch {
        Branch::Global => field.score(pose, level, global),
        Branch::Part => field.score(pose, level, part),
    }
}

/// A sampled grasp with its level-0 energies against `P` and `P_t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraspCandidate {
    pub pose: Pose,
    pub e_global: f64,
    pub e_part: f64,
    pub arm: Arm,
    /// Position in the sampler's generation order.
    pub index: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SamplerConfig {
    pub num_candidates: usize,
    pub steps_per_level: usize,
    pub seed: u64,
    /// Radius (m) of the ball around the target centroid that initial
    /// translations are drawn from. `None` uses the target's bounding radius
    /// plus the field's reach.
    pub init_radius: Option<f64>,
    /// Length (m) converting rotation to translation in the Langevin metric:
    /// angular drift is scaled by `1/ℓ²` and angular noise by `1/ℓ`.
    pub rotation_length: f64,
    /// Largest drift (m) of one update. The angular part is measured as
    /// `rotation_length · |ω|`; longer drifts are scaled down uniformly.
    pub max_step: f64,
    /// Evaluate candidates on the rayon pool (needs the `parallel` feature;
    /// results are identical either way).
    pub parallel: bool,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            num_candidates: 100,
            steps_per_level: 10,
            seed: 0,
            init_radius: None,
            rotation_length: DEFAULT_ROTATION_LENGTH,
            max_step: DEFAULT_MAX_STEP,
            parallel: true,
        }
    }
}

pub const DEFAULT_ROTATION_LENGTH: f64 = 0.1;
pub const DEFAULT_MAX_STEP: f64 = 0.01;

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_candidates == 0 {
            return Err(Error::Parameter("sampler needs at least one candidate".into()));
        }
        if !(self.rotation_length > 0.0 && self.rotation_length.is_finite()) {
            return Err(Error::Parameter("rotation_length must be positive".into()));
        }
        if !(self.max_step > 0.0) {
            return Err(Error::Parameter("max_step must be positive".into()));
        }
        if let Some(r) = self.init_radius {
            if !(r >= 0.0 && r.is_finite()) {
                return Err(Error::Parameter("init_radius must be non-negative".into()));
            }
        }
        Ok(())
    }
}

/// Uniformly distributed rotation (normalized 4D Gaussian).
pub fn random_rotation(rng: &mut impl Rng) -> Quat {
    loop {
        let q: [f64; 4] = core::array::from_fn(|_| rng.sample(StandardNormal));
        if let Some(q) = Quat::new(q[0], q[1], q[2], q[3]) {
            return q;
        }
    }
}

/// Uniform point in the ball of radius `r` about the origin.
pub fn random_in_ball(rng: &mut impl Rng, r: f64) -> Vec3 {
    let dir = loop {
        let v = Vec3::new(rng.sample(StandardNormal), rng.sample(StandardNormal), rng.sample(StandardNormal));
        if let Some(u) = v.try_normalize() {
            break u;
        }
    };
    let u: f64 = rng.random();
    dir * (r * powf(u, 1.0 / 3.0))
}

fn standard_twist(rng: &mut impl Rng) -> Twist {
    Twist::from_array(core::array::from_fn(|_| rng.sample(StandardNormal)))
}

/// Scales `drift` so that neither `|v|` nor `length · |ω|` exceeds `max_step`.
fn clip_drift(drift: Twist, length: f64, max_step: f64) -> Twist {
    let size = drift.linear.norm().max(length * drift.angular.norm());
    if size > max_step {
        drift.scale(max_step / size)
    } else {
        drift
    }
}

/// Runs one candidate from its seeded initial pose through the whole ladder.
fn refine_candidate<F: EnergyField + ?Sized>(
    field: &F,
    global: &PointCloud,
    part: &PointCloud,
    cfg: &SamplerConfig,
    center: Vec3,
    radius: f64,
    index: usize,
    arm: Arm,
) -> Result<GraspCandidate> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(index as u64);
    let rotation = random_rotation(&mut rng);
    let mut pose = Pose::new(rotation, center + random_in_ball(&mut rng, radius));

    let schedule = field.schedule();
    let inv_len = 1.0 / cfg.rotation_length;
    for level in (0..schedule.levels()).rev() {
        let sigma = schedule.sigma(level)?;
        let alpha = schedule.step_size(level)?;
        let noise = sqrt(2.0 * alpha) * sigma;
        for _ in 0..cfg.steps_per_level {
            let s = guided_score(field, &pose, level, global, part)?;
            let eta = standard_twist(&mut rng);
            let drift = clip_drift(
                Twist { angular: s.angular * (alpha * inv_len * inv_len), linear: s.linear * alpha },
                cfg.rotation_length,
                cfg.max_step,
            );
            let xi = Twist {
                angular: drift.angular + eta.angular * (noise * inv_len),
                linear: drift.linear + eta.linear * noise,
            };
            pose = pose.retract(&xi);
        }
    }
    let e_global = field.energy(&pose, 0, global)?;
    let e_part = if core::ptr::eq(global, part) { e_global } else { field.energy(&pose, 0, part)? };
    Ok(GraspCandidate { pose, e_global, e_part, arm, index })
}

/// Draws `num_candidates` grasps and refines them by part-guided annealed
/// Langevin dynamics.
///
/// Initial translations are uniform in a ball around the target centroid and
/// rotations are uniform. At each level (coarse to fine) every candidate
/// takes `steps_per_level` body-frame updates
/// `H ← H ∘ exp(α s + sqrt(2α) σ η)`, with the drift `α s` clipped to
/// `max_step`. Each candidate uses its own random
/// stream derived from `(seed, index)`, so the result does not depend on how
/// candidates are scheduled. The output is sorted by ascending global energy
/// (ties keep generation order).
pub fn sample_grasps<F: EnergyField + ?Sized>(
    global: &PointCloud,
    part: &PointCloud,
    field: &F,
    cfg: &SamplerConfig,
    arm: Arm,
) -> Result<Vec<GraspCandidate>> {
    cfg.validate()?;
    if part.is_empty() || global.is_empty() {
        return Err(Error::EmptyTarget);
    }
    if !global.has_normals() || !part.has_normals() {
        return Err(Error::MissingNormals);
    }
    let center = part.centroid();
    let radius = cfg.init_radius.unwrap_or_else(|| part.bounding_radius() + field.reach());
    let run = |i: usize| refine_candidate(field, global, part, cfg, center, radius, i, arm);

    let mut out: Vec<GraspCandidate> = map_indices(cfg.num_candidates, cfg.parallel, run)?;
    out.sort_by(|a, b| a.e_global.total_cmp(&b.e_global));
    Ok(out)
}

#[cfg(feature = "parallel")]
pub(crate) fn map_indices<T: Send>(
    n: usize,
    parallel: bool,
    f: impl Fn(usize) -> Result<T> + Sync + Send,
) -> Result<Vec<T>> {
    use rayon::prelude::*;
    if parallel {
        (0..n).into_par_iter().map(f).collect()
    } else {
        (0..n).map(f).collect()
    }
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn map_indices<T>(n: usize, _parallel: bool, f: impl Fn(usize) -> Result<T>) -> Result<Vec<T>> {
    (0..n).map(f).collect()
}
