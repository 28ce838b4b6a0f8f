//! Grasp energy fields and the noise schedule that anneals them.
//!
//! An [`EnergyField`] maps a grasp pose, a noise level and a conditioning
//! point cloud to a non-negative scalar; lower is better. Its score is the
//! negative gradient in the body-frame tangent space of the pose.
//!
//! [`SurrogateEnergy`] is an analytic field built from three terms:
//!
//! * **distance**: a log-sum-exp soft minimum (temperature `σ_k`) of the
//!   distance from the closing segment between the two pads to the cloud,
//!   clamped at zero;
//! * **penetration**: summed depth of cloud points inside the finger and
//!   palm boxes grown by a small clearance margin, smoothed so that the field
//!   stays continuously differentiable;
//! * **antipodality**: for each pad, the misfit `1 - |n · x̂|` between the
//!   closing axis and the normal of the soft-nearest point in front of the
//!   pad, averaged over the two pads. Points beside or behind the pad are
//!   penalized so they rarely count, and a virtual candidate one jaw width
//!   away with misfit `1` stands for "no contact".

use alloc::format;
use alloc::vec::Vec;

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::gripper::GripperModel;
use crate::math::{ln, powf, sqrt, Vec3};
use crate::se3::{Pose, Twist};

/// Contributions smaller than `exp(-SOFTMIN_CUTOFF)` relative to the current
/// soft-min term vanish in f64 and are skipped.
const SOFTMIN_CUTOFF: f64 = 40.0;

/// Gap multiplier for points beside or behind a pad rather than in front of
/// it, so they lose to any point the jaws would actually close on.
const LATERAL_PENALTY: f64 = 4.0;

pub const DEFAULT_LEVELS: usize = 10;
pub const DEFAULT_SIGMA_MAX: f64 = 0.01;
pub const DEFAULT_SIGMA_MIN: f64 = 0.002;
pub const DEFAULT_STEP_SCALE: f64 = 0.001;

/// Decreasing noise scales and matching Langevin step sizes.
///
/// Stored coarse to fine. Level `0` is the clean end of the ladder (the
/// smallest sigma); level `levels() - 1` is the coarsest.
#[derive(Debug, Clone, PartialEq)]
pub struct NoiseSchedule {
    sigmas: Vec<f64>,
    step_sizes: Vec<f64>,
}

impl NoiseSchedule {
    pub fn new(sigmas: Vec<f64>, step_sizes: Vec<f64>) -> Result<NoiseSchedule> {
        if sigmas.is_empty() || sigmas.len() != step_sizes.len() {
            return Err(Error::Parameter(format!(
                "schedule needs equal non-empty sigma/step lists, got {} and {}",
                sigmas.len(),
                step_sizes.len()
            )));
        }
        if sigmas.iter().chain(step_sizes.iter()).any(|v| !(v.is_finite() && *v > 0.0)) {
            return Err(Error::Parameter("schedule values must be positive and finite".into()));
        }
        if sigmas.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Parameter("sigmas must be strictly decreasing".into()));
        }
        Ok(NoiseSchedule { sigmas, step_sizes })
    }

    pub fn levels(&self) -> usize {
        self.sigmas.len()
    }

    /// Coarse-to-fine sigmas.
    pub fn sigmas(&self) -> &[f64] {
        &self.sigmas
    }

    /// Coarse-to-fine step sizes.
    pub fn step_sizes(&self) -> &[f64] {
        &self.step_sizes
    }

    fn slot(&self, level: usize) -> Result<usize> {
        if level >= self.sigmas.len() {
            return Err(Error::Parameter(format!(
                "noise level {level} outside a {}-level schedule",
                self.sigmas.len()
            )));
        }
        Ok(self.sigmas.len() - 1 - level)
    }

    pub fn sigma(&self, level: usize) -> Result<f64> {
        Ok(self.sigmas[self.slot(level)?])
    }

    pub fn step_size(&self, level: usize) -> Result<f64> {
        Ok(self.step_sizes[self.slot(level)?])
    }
}

/// Geometric sigma ladder `σ_max (σ_min/σ_max)^(i/(levels-1))` with step sizes
/// `step_scale σ_i² / σ_min²`.
pub fn make_schedule(levels: usize, sigma_max: f64, sigma_min: f64, step_scale: f64) -> Result<NoiseSchedule> {
    if levels < 2 {
        return Err(Error::Parameter(format!("schedule needs at least 2 levels, got {levels}")));
    }
    if !(sigma_min > 0.0 && sigma_max > sigma_min && sigma_max.is_finite()) {
        return Err(Error::Parameter(format!("need sigma_max > sigma_min > 0, got {sigma_max} and {sigma_min}")));
    }
    if !(step_scale > 0.0 && step_scale.is_finite()) {
        return Err(Error::Parameter(format!("step_scale must be positive, got {step_scale}")));
    }
    let ratio = sigma_min / sigma_max;
    let sigmas: Vec<f64> = (0..levels).map(|i| sigma_max * powf(ratio, i as f64 / (levels - 1) as f64)).collect();
    let steps = sigmas.iter().map(|s| step_scale * s * s / (sigma_min * sigma_min)).collect();
    NoiseSchedule::new(sigmas, steps)
}

/// The schedule used when none is configured.
pub fn default_schedule() -> NoiseSchedule {
    make_schedule(DEFAULT_LEVELS, DEFAULT_SIGMA_MAX, DEFAULT_SIGMA_MIN, DEFAULT_STEP_SCALE)
        .expect("default schedule parameters are valid")
}

/// A grasp energy over SE(3), conditioned on a point cloud.
///
/// Implementations are immutable and may be evaluated concurrently.
pub trait EnergyField: Sync {
    fn energy(&self, pose: &Pose, level: usize, cloud: &PointCloud) -> Result<f64>;

    /// Finite-difference step used by the default [`EnergyField::score`].
    fn fd_step(&self, level: usize) -> Result<f64>;

    /// Characteristic size of the hand (m); the sampler seeds candidates
    /// within this distance of the target region.
    fn reach(&self) -> f64;

    fn schedule(&self) -> &NoiseSchedule;

    /// Negative body-frame gradient of the energy.
    fn score(&self, pose: &Pose, level: usize, cloud: &PointCloud) -> Result<Twist> {
        let h = self.fd_step(level)?;
        fd_score(|p| self.energy(p, level, cloud), pose, h)
    }
}

/// Central-difference negative gradient of `f` in the body-frame tangent
/// space at `pose`.
pub fn fd_score(mut f: impl FnMut(&Pose) -> Result<f64>, pose: &Pose, h: f64) -> Result<Twist> {
    let mut grad = [0.0; 6];
    for (i, g) in grad.iter_mut().enumerate() {
        let mut e = [0.0; 6];
        e[i] = h;
        let plus = f(&pose.retract(&Twist::from_array(e)))?;
        e[i] = -h;
        let minus = f(&pose.retract(&Twist::from_array(e)))?;
        *g = -(plus - minus) / (2.0 * h);
    }
    Ok(Twist::from_array(grad))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyWeights {
    pub distance: f64,
    pub penetration: f64,
    pub antipodal: f64,
}

impl Default for EnergyWeights {
    fn default() -> Self {
        EnergyWeights { distance: 1.0, penetration: 5.0, antipodal: 0.5 }
    }
}

/// The unweighted terms of the surrogate energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyTerms {
    pub distance: f64,
    pub penetration: f64,
    pub antipodal: f64,
}

impl EnergyTerms {
    pub fn weighted(&self, w: &EnergyWeights) -> f64 {
        w.distance * self.distance + w.penetration * self.penetration + w.antipodal * self.antipodal
    }
}

/// Analytic antipodal-contact grasp energy.
#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateEnergy {
    pub gripper: GripperModel,
    pub weights: EnergyWeights,
    pub schedule: NoiseSchedule,
    /// Soft-argmin temperature (m) used to pick each pad's contact candidate.
    pub contact_temperature: f64,
    /// Clearance (m) by which the finger and palm boxes are grown for the
    /// penetration term.
    pub clearance: f64,
}

pub const DEFAULT_CONTACT_TEMPERATURE: f64 = 0.002;
pub const DEFAULT_CLEARANCE: f64 = 0.004;
/// Smoothing length (m) for the kinks of the penetration and pad terms.
pub const SMOOTHING: f64 = 0.001;
const MISFIT_SMOOTHING: f64 = 0.01;

/// `|x|` rounded off within `tau` of zero; never exceeds `|x|`.
#[inline]
fn smooth_abs(x: f64, tau: f64) -> f64 {
    sqrt(x * x + tau * tau) - tau
}

/// `max(x, 0)` rounded off within `tau` of zero.
#[inline]
fn smooth_relu(x: f64, tau: f64) -> f64 {
    0.5 * (x + sqrt(x * x + tau * tau))
}

/// Online log-sum-exp soft minimum with an optional weighted average riding
/// on the same weights.
#[derive(Clone, Copy)]
struct SoftMin {
    temperature: f64,
    min: f64,
    sum: f64,
    weighted: f64,
}

impl SoftMin {
    fn new(temperature: f64) -> Self {
        SoftMin { temperature, min: f64::INFINITY, sum: 0.0, weighted: 0.0 }
    }

    /// Squared-distance bound beyond which a sample cannot change the sums.
    #[inline]
    fn reach2(&self) -> f64 {
        let r = self.min + SOFTMIN_CUTOFF * self.temperature;
        r * r
    }

    #[inline]
    fn reach(&self) -> f64 {
        self.min + SOFTMIN_CUTOFF * self.temperature
    }

    #[inline]
    fn push(&mut self, d: f64, value: f64) {
        if d < self.min {
            let rescale = if self.min.is_finite() { libm::exp((d - self.min) / self.temperature) } else { 0.0 };
            self.sum = self.sum * rescale + 1.0;
            self.weighted = self.weighted * rescale + value;
            self.min = d;
        } else {
            let w = libm::exp((self.min - d) / self.temperature);
            self.sum += w;
            self.weighted += w * value;
        }
    }
}

impl SurrogateEnergy {
    pub fn new(gripper: GripperModel, weights: EnergyWeights, schedule: NoiseSchedule) -> Result<SurrogateEnergy> {
        let e = SurrogateEnergy {
            gripper,
            weights,
            schedule,
            contact_temperature: DEFAULT_CONTACT_TEMPERATURE,
            clearance: DEFAULT_CLEARANCE,
        };
        e.validate()?;
        Ok(e)
    }

    pub fn validate(&self) -> Result<()> {
        self.gripper.validate()?;
        let w = &self.weights;
        if [w.distance, w.penetration, w.antipodal].iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::Parameter("energy weights must be non-negative".into()));
        }
        if !(self.contact_temperature > 0.0 && self.contact_temperature.is_finite()) {
            return Err(Error::Parameter("contact temperature must be positive".into()));
        }
        if !(self.clearance >= 0.0 && self.clearance.is_finite()) {
            return Err(Error::Parameter("clearance must be non-negative".into()));
        }
        Ok(())
    }

    /// Evaluates the three terms separately.
    pub fn terms(&self, pose: &Pose, level: usize, cloud: &PointCloud) -> Result<EnergyTerms> {
        let sigma = self.schedule.sigma(level)?;
        let normals = cloud.normals().ok_or(Error::MissingNormals)?;
        if cloud.is_empty() {
            return Err(Error::EmptyTarget);
        }
        let g = &self.gripper;
        let h = g.half_opening();
        let half_w = 0.5 * g.finger_width;
        let half_l = 0.5 * g.finger_length;
        let m = self.clearance;
        let boxes = g.boxes();
        let tau = SMOOTHING;
        let palm_lo = -half_l - g.palm_depth - m - tau;

        let r = pose.rotation_matrix();
        let rows = [r.col(0), r.col(1), r.col(2)];
        let closing = rows[0];
        let t = pose.translation;

        let mut seg = SoftMin::new(sigma);
        let mut pads = [SoftMin::new(self.contact_temperature); 2];
        let mut penetration = 0.0;

        for (p, n) in cloud.points().iter().zip(normals) {
            let d = *p - t;
            let l = Vec3::new(d.dot(rows[0]), d.dot(rows[1]), d.dot(rows[2]));
            let (lx, ly, lz) = (l[0], l[1], l[2]);

            let ex = (lx.abs() - h).max(0.0);
            let seg2 = ex * ex + ly * ly + lz * lz;
            if seg2 < seg.reach2() {
                seg.push(sqrt(seg2), 0.0);
            }

            let ey = smooth_relu(smooth_abs(ly, tau) - half_w, tau);
            let ez = smooth_relu(smooth_abs(lz, tau) - half_l, tau);
            let lateral = LATERAL_PENALTY * sqrt(ey * ey + ez * ez);
            let mut misfit = f64::NAN;
            for (pad, sign) in pads.iter_mut().zip([-1.0, 1.0]) {
                let gap = h - sign * lx;
                let d = gap + (LATERAL_PENALTY + 1.0) * smooth_relu(-gap, tau) + lateral;
                if d < pad.reach() {
                    if misfit.is_nan() {
                        misfit = 1.0 - smooth_abs(n.dot(closing), MISFIT_SMOOTHING);
                    }
                    pad.push(d, misfit);
                }
            }

            if ly.abs() < half_w + m + tau && lz < half_l + m + tau && lz > palm_lo {
                for b in &boxes {
                    penetration += b.smooth_penetration(l, m, tau);
                }
            }
        }

        // A pad with nothing in front of it scores as a full misfit.
        for pad in pads.iter_mut() {
            pad.push(g.max_jaw_width, 1.0);
        }
        let distance = seg.min - sigma * ln(seg.sum);
        let antipodal = pads.iter().map(|p| p.weighted / p.sum).sum::<f64>() * 0.5;
        Ok(EnergyTerms { distance: distance.max(0.0), penetration, antipodal })
    }
}

impl EnergyField for SurrogateEnergy {
    fn energy(&self, pose: &Pose, level: usize, cloud: &PointCloud) -> Result<f64> {
        Ok(self.terms(pose, level, cloud)?.weighted(&self.weights))
    }

    fn fd_step(&self, level: usize) -> Result<f64> {
        Ok((self.schedule.sigma(level)? * 1e-3).max(1e-5))
    }

    fn reach(&self) -> f64 {
        self.gripper.max_jaw_width
    }

    fn schedule(&self) -> &NoiseSchedule {
        &self.schedule
    }
}

/// Free-function form of [`SurrogateEnergy`] evaluation with default weights.
pub fn surrogate_energy(
    pose: &Pose,
    level: usize,
    cloud: &PointCloud,
    gripper: &GripperModel,
    schedule: &NoiseSchedule,
) -> Result<f64> {
    SurrogateEnergy::new(*gripper, EnergyWeights::default(), schedule.clone())?.energy(pose, level, cloud)
}

/// Free-function form of the surrogate score with default weights.
pub fn surrogate_score(
    pose: &Pose,
    level: usize,
    cloud: &PointCloud,
    gripper: &GripperModel,
    schedule: &NoiseSchedule,
) -> Result<Twist> {
    SurrogateEnergy::new(*gripper, EnergyWeights::default(), schedule.clone())?.score(pose, level, cloud)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn schedule_endpoints_and_ratio() {
        let s = make_schedule(2, 0.1, 0.01, 1.0).unwrap();
        assert_eq!(s.sigmas(), &[0.1, 0.01]);
        assert_eq!(s.sigma(0).unwrap(), 0.01);
        assert_eq!(s.sigma(1).unwrap(), 0.1);
        let s = make_schedule(10, 0.1, 0.01, 2.0).unwrap();
        let r0 = s.sigmas()[1] / s.sigmas()[0];
        for w in s.sigmas().windows(2) {
            assert!((w[1] / w[0] - r0).abs() < 1e-12);
        }
        // 0.1 * 0.1^(4/9), evaluated independently
        assert!((s.sigmas()[4] - 0.035_938_136_638_046_28).abs() < 1e-15);
        assert!((s.step_sizes()[9] - 2.0).abs() < 1e-12);
        assert!(s.sigma(10).is_err());
    }

    #[test]
    fn schedule_rejects_bad_parameters() {
        assert!(make_schedule(1, 0.1, 0.01, 1.0).is_err());
        assert!(make_schedule(3, 0.01, 0.1, 1.0).is_err());
        assert!(make_schedule(3, 0.1, 0.0, 1.0).is_err());
        assert!(make_schedule(3, 0.1, 0.01, 0.0).is_err());
        assert!(NoiseSchedule::new(vec![0.1, 0.1], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn missing_normals_is_an_error() {
        let e = SurrogateEnergy::new(
            GripperModel::default(),
            EnergyWeights::default(),
            make_schedule(2, 0.1, 0.01, 1.0).unwrap(),
        )
        .unwrap();
        let c = PointCloud::new(vec![Vec3::ZERO]).unwrap();
        assert_eq!(e.energy(&Pose::IDENTITY, 0, &c), Err(Error::MissingNormals));
    }
}
