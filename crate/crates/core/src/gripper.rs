//! Parallel-jaw gripper geometry.
//!
//! Grasp frame convention: `+z` is the approach direction, `x` is the jaw
//! closing axis and the origin sits midway between the two finger pads. The
//! fingers span `z ∈ [-L/2, L/2]`; the palm sits behind them.

use alloc::format;

use crate::error::{Error, Result};
use crate::math::{exp, ln, sqrt};
use crate::math::{Mat3, Vec3};
use crate::se3::Pose;

/// Which arm a grasp belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub enum Arm {
    #[default]
    Single,
    Arm1,
    Arm2,
}

impl Arm {
    pub fn as_str(self) -> &'static str {
        match self {
            Arm::Single => "single",
            Arm::Arm1 => "arm1",
            Arm::Arm2 => "arm2",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GripperModel {
    /// Distance between the two finger pads when fully open (m).
    pub max_jaw_width: f64,
    /// Finger extent along the approach axis (m).
    pub finger_length: f64,
    /// Finger extent along the closing axis (m).
    pub finger_thickness: f64,
    /// Finger extent along the grasp-frame y axis (m).
    pub finger_width: f64,
    /// Palm extent along the approach axis (m).
    pub palm_depth: f64,
}

impl Default for GripperModel {
    fn default() -> Self {
        GripperModel {
            max_jaw_width: 0.085,
            finger_length: 0.06,
            finger_thickness: 0.01,
            finger_width: 0.02,
            palm_depth: 0.02,
        }
    }
}

/// Axis-aligned box in the grasp frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalBox {
    pub center: Vec3,
    pub half: Vec3,
}

impl LocalBox {
    /// Strict interior test.
    #[inline]
    pub fn contains(&self, p: Vec3) -> bool {
        (0..3).all(|a| (p[a] - self.center[a]).abs() < self.half[a])
    }

    /// Distance from `p` to the nearest face of the box grown by `margin`,
    /// or zero if `p` is outside the grown box.
    #[inline]
    pub fn penetration(&self, p: Vec3, margin: f64) -> f64 {
        let mut depth = f64::INFINITY;
        for a in 0..3 {
            let d = self.half[a] + margin - (p[a] - self.center[a]).abs();
            if d <= 0.0 {
                return 0.0;
            }
            depth = depth.min(d);
        }
        depth
    }

    /// Continuously differentiable penetration penalty. The depth below the
    /// faces of the box grown by `margin` is a log-sum-exp soft minimum
    /// (temperature `tau`) over the three axes, with `|x|` replaced by
    /// `sqrt(x² + tau²) - tau`. The penalty blends in over the first `tau`
    /// of depth (twice differentiable) and is linear with unit slope beyond.
    #[inline]
    pub fn smooth_penetration(&self, p: Vec3, margin: f64, tau: f64) -> f64 {
        let u: [f64; 3] = core::array::from_fn(|a| {
            let x = p[a] - self.center[a];
            self.half[a] + margin - (sqrt(x * x + tau * tau) - tau)
        });
        let lo = u[0].min(u[1]).min(u[2]);
        if lo <= 0.0 {
            return 0.0;
        }
        let sum: f64 = u.iter().map(|&v| exp((lo - v) / tau)).sum();
        let depth = lo - tau * ln(sum);
        if depth <= 0.0 {
            0.0
        } else if depth < tau {
            let r = depth / tau;
            depth * r * r * (1.0 - 0.5 * r)
        } else {
            depth - 0.5 * tau
        }
    }
}

/// Oriented box in world coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrientedBox {
    pub center: Vec3,
    /// Columns are the box axes.
    pub axes: Mat3,
    pub half: Vec3,
}

impl OrientedBox {
    pub fn from_local(pose: &Pose, b: &LocalBox) -> OrientedBox {
        OrientedBox { center: pose.transform_point(b.center), axes: pose.rotation_matrix(), half: b.half }
    }

    pub fn corners(&self) -> [Vec3; 8] {
        let mut out = [Vec3::ZERO; 8];
        for (i, c) in out.iter_mut().enumerate() {
            let s = [(i & 1) as f64 * 2.0 - 1.0, ((i >> 1) & 1) as f64 * 2.0 - 1.0, ((i >> 2) & 1) as f64 * 2.0 - 1.0];
            *c = self.center
                + self.axes.col(0) * (s[0] * self.half[0])
                + self.axes.col(1) * (s[1] * self.half[1])
                + self.axes.col(2) * (s[2] * self.half[2]);
        }
        out
    }

    /// Closed-set containment of a world point.
    pub fn contains_closed(&self, p: Vec3) -> bool {
        let d = p - self.center;
        (0..3).all(|a| d.dot(self.axes.col(a)).abs() <= self.half[a])
    }
}

impl GripperModel {
    pub fn validate(&self) -> Result<()> {
        let dims = [
            ("max_jaw_width", self.max_jaw_width),
            ("finger_length", self.finger_length),
            ("finger_thickness", self.finger_thickness),
            ("finger_width", self.finger_width),
            ("palm_depth", self.palm_depth),
        ];
        for (name, v) in dims {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Parameter(format!("gripper {name} must be positive, got {v}")));
            }
        }
        if self.max_jaw_width <= 2.0 * self.finger_thickness {
            return Err(Error::Parameter(format!(
                "max_jaw_width {} must exceed twice finger_thickness {}",
                self.max_jaw_width, self.finger_thickness
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn half_opening(&self) -> f64 {
        0.5 * self.max_jaw_width
    }

    /// Finger box on side `sign` (`-1.0` or `+1.0` along the closing axis).
    pub fn finger_box(&self, sign: f64) -> LocalBox {
        let t = self.finger_thickness;
        LocalBox {
            center: Vec3::new(sign * (self.half_opening() + 0.5 * t), 0.0, 0.0),
            half: Vec3::new(0.5 * t, 0.5 * self.finger_width, 0.5 * self.finger_length),
        }
    }

    pub fn palm_box(&self) -> LocalBox {
        LocalBox {
            center: Vec3::new(0.0, 0.0, -0.5 * self.finger_length - 0.5 * self.palm_depth),
            half: Vec3::new(
                self.half_opening() + self.finger_thickness,
                0.5 * self.finger_width,
                0.5 * self.palm_depth,
            ),
        }
    }

    /// The three boxes: negative finger, positive finger, palm.
    pub fn boxes(&self) -> [LocalBox; 3] {
        [self.finger_box(-1.0), self.finger_box(1.0), self.palm_box()]
    }

    pub fn world_boxes(&self, pose: &Pose) -> [OrientedBox; 3] {
        self.boxes().map(|b| OrientedBox::from_local(pose, &b))
    }

    /// True when a grasp-frame point lies in the volume swept by the pads as
    /// the jaws close.
    #[inline]
    pub fn in_closing_volume(&self, local: Vec3) -> bool {
        local[0].abs() <= self.half_opening()
            && local[1].abs() <= 0.5 * self.finger_width
            && local[2].abs() <= 0.5 * self.finger_length
    }

    /// Radius of a sphere about the grasp origin enclosing every box.
    pub fn bounding_radius(&self) -> f64 {
        let x = self.half_opening() + self.finger_thickness;
        let y = 0.5 * self.finger_width;
        let z = 0.5 * self.finger_length + self.palm_depth;
        crate::math::sqrt(x * x + y * y + z * z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        GripperModel::default().validate().unwrap();
        let bad = GripperModel { max_jaw_width: 0.015, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = GripperModel { palm_depth: 0.0, ..Default::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn boxes_leave_the_jaw_open() {
        let g = GripperModel::default();
        let [f0, f1, palm] = g.boxes();
        for b in [f0, f1, palm] {
            assert!(!b.contains(Vec3::ZERO));
        }
        assert!(f1.contains(Vec3::new(0.045, 0.0, 0.0)));
        assert!(palm.contains(Vec3::new(0.0, 0.0, -0.035)));
        assert!(g.in_closing_volume(Vec3::new(0.04, 0.0, 0.02)));
        assert!(!g.in_closing_volume(Vec3::new(0.05, 0.0, 0.0)));
    }

    #[test]
    fn penetration_depth() {
        let b = LocalBox { center: Vec3::ZERO, half: Vec3::new(1.0, 2.0, 3.0) };
        assert_eq!(b.penetration(Vec3::new(0.5, 0.0, 0.0), 0.0), 0.5);
        assert_eq!(b.penetration(Vec3::new(1.5, 0.0, 0.0), 0.0), 0.0);
        assert_eq!(b.penetration(Vec3::new(1.5, 0.0, 0.0), 1.0), 0.5);
    }

    #[test]
    fn smooth_penetration_shape() {
        let b = LocalBox { center: Vec3::ZERO, half: Vec3::new(1.0, 2.0, 3.0) };
        let tau = 0.1;
        // Outside the grown box there is no penalty.
        assert_eq!(b.smooth_penetration(Vec3::new(1.6, 0.0, 0.0), 0.5, tau), 0.0);
        // Deep inside it is the depth below the grown face minus half of tau.
        let deep = b.smooth_penetration(Vec3::new(0.0, 0.0, 0.0), 0.5, 1e-4);
        assert!((deep - 1.5).abs() < 1e-3, "{deep}");
        // Within tau of the grown face it is the quartic blend.
        let x = sqrt((1.45 + tau) * (1.45 + tau) - tau * tau);
        let band = b.smooth_penetration(Vec3::new(x, 0.0, 0.0), 0.5, tau);
        let expect = 0.05f64.powi(3) / (tau * tau) - 0.05f64.powi(4) / (2.0 * tau.powi(3));
        assert!((band - expect).abs() < 1e-6, "{band}");
        // Slopes match where the two pieces meet.
        let f = |x: f64| b.smooth_penetration(Vec3::new(x, 0.0, 0.0), 0.5, 1e-3);
        let slope = (f(1.499 - 1e-6) - f(1.499 + 1e-6)) / 2e-6;
        assert!((slope - 1.0).abs() < 1e-2, "{slope}");
    }
}
