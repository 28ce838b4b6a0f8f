//! Rigid transforms: unit quaternions, poses and the SE(3) exponential map.

use core::ops::Mul;

use crate::math::{atan2, cos, sin, sqrt, Mat3, Vec3};

/// Below this rotation angle the series expansions of exp/log are used.
pub const SMALL_ANGLE: f64 = 1e-8;

/// Rotation angles this close to pi make the logarithm ill-conditioned.
pub const NEAR_PI: f64 = 1e-6;

/// Unit quaternion `w + xi + yj + zk`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quat {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quat {
    pub const IDENTITY: Quat = Quat { w: 1.0, x: 0.0, y: 0.0, z: 0.0 };

    /// Builds a quaternion and normalizes it. Returns `None` for zero or
    /// non-finite input.
    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Option<Quat> {
        let n = sqrt(w * w + x * x + y * y + z * z);
        if !(n.is_finite() && n > 1e-300) {
            return None;
        }
        Some(Quat { w: w / n, x: x / n, y: y / n, z: z / n })
    }

    /// Rotation by `|rotvec|` radians about `rotvec`.
    pub fn from_rotation_vector(rotvec: Vec3) -> Quat {
        let theta = rotvec.norm();
        if theta < SMALL_ANGLE {
            let h = rotvec * 0.5;
            return Quat::new(1.0, h[0], h[1], h[2]).unwrap_or(Quat::IDENTITY);
        }
        let s = sin(0.5 * theta) / theta;
        Quat::new(cos(0.5 * theta), rotvec[0] * s, rotvec[1] * s, rotvec[2] * s).unwrap_or(Quat::IDENTITY)
    }

    pub fn norm(&self) -> f64 {
        sqrt(self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z)
    }

    pub fn normalized(&self) -> Quat {
        Quat::new(self.w, self.x, self.y, self.z).unwrap_or(Quat::IDENTITY)
    }

    pub fn conjugate(&self) -> Quat {
        Quat { w: self.w, x: -self.x, y: -self.y, z: -self.z }
    }

    pub fn vector(&self) -> Vec3 {
        Vec3::new(self.x, self.y, self.z)
    }

    pub fn to_array(&self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    /// Hamilton product without renormalization.
    fn raw_mul(&self, o: &Quat) -> Quat {
        Quat {
            w: self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            x: self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            y: self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            z: self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        }
    }

    pub fn to_matrix(&self) -> Mat3 {
        let Quat { w, x, y, z } = *self;
        Mat3([
            [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
            [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
            [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
        ])
    }

    #[inline]
    pub fn rotate(&self, v: Vec3) -> Vec3 {
        // v + 2 q_v x (q_v x v + w v)
        let qv = self.vector();
        let t = qv.cross(v) * 2.0;
        v + t * self.w + qv.cross(t)
    }

    /// Rotation angle in `[0, pi]`.
    pub fn angle(&self) -> f64 {
        2.0 * atan2(self.vector().norm(), self.w.abs())
    }
}

impl Mul for Quat {
    type Output = Quat;
    fn mul(self, o: Quat) -> Quat {
        self.raw_mul(&o).normalized()
    }
}

/// Tangent vector of SE(3): angular part (radians) and linear part (meters).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Twist {
    pub angular: Vec3,
    pub linear: Vec3,
}

impl Twist {
    pub const ZERO: Twist = Twist { angular: Vec3::ZERO, linear: Vec3::ZERO };

    pub fn new(angular: Vec3, linear: Vec3) -> Twist {
        Twist { angular, linear }
    }

    /// Layout `[wx, wy, wz, vx, vy, vz]`.
    pub fn from_array(a: [f64; 6]) -> Twist {
        Twist { angular: Vec3::new(a[0], a[1], a[2]), linear: Vec3::new(a[3], a[4], a[5]) }
    }

    pub fn to_array(&self) -> [f64; 6] {
        let (w, v) = (self.angular, self.linear);
        [w[0], w[1], w[2], v[0], v[1], v[2]]
    }

    pub fn is_finite(&self) -> bool {
        self.angular.is_finite() && self.linear.is_finite()
    }

    pub fn norm(&self) -> f64 {
        sqrt(self.angular.norm_squared() + self.linear.norm_squared())
    }

    pub fn scale(&self, s: f64) -> Twist {
        Twist { angular: self.angular * s, linear: self.linear * s }
    }
}

impl core::ops::Add for Twist {
    type Output = Twist;
    fn add(self, o: Twist) -> Twist {
        Twist { angular: self.angular + o.angular, linear: self.linear + o.linear }
    }
}

/// Rigid transform `x -> R x + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub rotation: Quat,
    pub translation: Vec3,
}

impl Default for Pose {
    fn default() -> Self {
        Pose::IDENTITY
    }
}

impl Pose {
    pub const IDENTITY: Pose = Pose { rotation: Quat::IDENTITY, translation: Vec3::ZERO };

    pub fn new(rotation: Quat, translation: Vec3) -> Pose {
        Pose { rotation: rotation.normalized(), translation }
    }

    pub fn from_translation(t: Vec3) -> Pose {
        Pose { rotation: Quat::IDENTITY, translation: t }
    }

    /// Pose whose rotation columns are the given orthonormal axes.
    pub fn from_axes(x: Vec3, y: Vec3, z: Vec3, translation: Vec3) -> Pose {
        Pose::new(quat_from_matrix(&Mat3::from_cols(x, y, z)), translation)
    }

    #[inline]
    pub fn transform_point(&self, p: Vec3) -> Vec3 {
        self.rotation.rotate(p) + self.translation
    }

    #[inline]
    pub fn transform_vector(&self, v: Vec3) -> Vec3 {
        self.rotation.rotate(v)
    }

    /// Maps a world point into this pose's local frame.
    #[inline]
    pub fn inverse_transform_point(&self, p: Vec3) -> Vec3 {
        self.rotation.conjugate().rotate(p - self.translation)
    }

    pub fn inverse(&self) -> Pose {
        let rinv = self.rotation.conjugate();
        Pose { rotation: rinv, translation: -rinv.rotate(self.translation) }
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Pose) -> Pose {
        Pose {
            rotation: self.rotation * other.rotation,
            translation: self.rotation.rotate(other.translation) + self.translation,
        }
    }

    /// Right (body-frame) perturbation `self ∘ exp(xi)`.
    pub fn retract(&self, xi: &Twist) -> Pose {
        self.compose(&se3_exp(xi))
    }

    pub fn rotation_matrix(&self) -> Mat3 {
        self.rotation.to_matrix()
    }

    /// Local frame axis `i` expressed in world coordinates.
    pub fn axis(&self, i: usize) -> Vec3 {
        let mut e = Vec3::ZERO;
        e.0[i] = 1.0;
        self.rotation.rotate(e)
    }
}

impl Mul for Pose {
    type Output = Pose;
    fn mul(self, o: Pose) -> Pose {
        self.compose(&o)
    }
}

/// Quaternion from an orthonormal rotation matrix (Shepperd's method).
pub fn quat_from_matrix(m: &Mat3) -> Quat {
    let r = &m.0;
    let trace = r[0][0] + r[1][1] + r[2][2];
    let q = if trace > 0.0 {
        let s = sqrt(trace + 1.0) * 2.0;
        (0.25 * s, (r[2][1] - r[1][2]) / s, (r[0][2] - r[2][0]) / s, (r[1][0] - r[0][1]) / s)
    } else if r[0][0] > r[1][1] && r[0][0] > r[2][2] {
        let s = sqrt(1.0 + r[0][0] - r[1][1] - r[2][2]) * 2.0;
        ((r[2][1] - r[1][2]) / s, 0.25 * s, (r[0][1] + r[1][0]) / s, (r[0][2] + r[2][0]) / s)
    } else if r[1][1] > r[2][2] {
        let s = sqrt(1.0 + r[1][1] - r[0][0] - r[2][2]) * 2.0;
        ((r[0][2] - r[2][0]) / s, (r[0][1] + r[1][0]) / s, 0.25 * s, (r[1][2] + r[2][1]) / s)
    } else {
        let s = sqrt(1.0 + r[2][2] - r[0][0] - r[1][1]) * 2.0;
        ((r[1][0] - r[0][1]) / s, (r[0][2] + r[2][0]) / s, (r[1][2] + r[2][1]) / s, 0.25 * s)
    };
    Quat::new(q.0, q.1, q.2, q.3).unwrap_or(Quat::IDENTITY)
}

/// Left Jacobian of SO(3) applied to `v`.
fn so3_left_jacobian(omega: Vec3, v: Vec3) -> Vec3 {
    let theta2 = omega.norm_squared();
    let theta = sqrt(theta2);
    let wv = omega.cross(v);
    let wwv = omega.cross(wv);
    if theta < SMALL_ANGLE {
        return v + wv * 0.5 + wwv * (1.0 / 6.0);
    }
    let a = (1.0 - cos(theta)) / theta2;
    let b = (theta - sin(theta)) / (theta2 * theta);
    v + wv * a + wwv * b
}

/// Inverse left Jacobian of SO(3) applied to `v`.
fn so3_left_jacobian_inv(omega: Vec3, v: Vec3) -> Vec3 {
    let theta2 = omega.norm_squared();
    let theta = sqrt(theta2);
    let wv = omega.cross(v);
    let wwv = omega.cross(wv);
    let c = if theta < 1e-4 {
        // 1/12 + theta^2/720 + ...
        1.0 / 12.0 + theta2 / 720.0
    } else {
        (1.0 - theta * sin(theta) / (2.0 * (1.0 - cos(theta)))) / theta2
    };
    v - wv * 0.5 + wwv * c
}

/// Exponential map of SE(3).
pub fn se3_exp(xi: &Twist) -> Pose {
    Pose { rotation: Quat::from_rotation_vector(xi.angular), translation: so3_left_jacobian(xi.angular, xi.linear) }
}

/// Result of [`se3_log`]. `degenerate` is set when the rotation angle is
/// within [`NEAR_PI`] of pi, where the axis (and hence the twist) is not
/// uniquely determined.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SE3Log {
    pub twist: Twist,
    pub degenerate: bool,
}

/// Principal-branch logarithm of SE(3).
pub fn se3_log(p: &Pose) -> SE3Log {
    let mut q = p.rotation.normalized();
    if q.w < 0.0 {
        q = Quat { w: -q.w, x: -q.x, y: -q.y, z: -q.z };
    }
    let qv = q.vector();
    let s = qv.norm();
    let theta = 2.0 * atan2(s, q.w);
    let omega = if s < 0.5 * SMALL_ANGLE {
        // theta ~ 2 s, so omega ~ 2 q_v
        qv * (2.0 / q.w)
    } else {
        qv * (theta / s)
    };
    let linear = so3_left_jacobian_inv(omega, p.translation);
    SE3Log { twist: Twist { angular: omega, linear }, degenerate: (core::f64::consts::PI - theta).abs() < NEAR_PI }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_PI_2;

    #[test]
    fn zero_twist_is_identity() {
        let p = se3_exp(&Twist::ZERO);
        assert_eq!(p, Pose::IDENTITY);
    }

    #[test]
    fn quarter_turn_about_z() {
        let p = se3_exp(&Twist::new(Vec3::new(0.0, 0.0, FRAC_PI_2), Vec3::ZERO));
        let x = p.transform_point(Vec3::X);
        assert!((x - Vec3::Y).norm() < 1e-12);
        assert!(p.translation.norm() < 1e-15);
    }

    #[test]
    fn log_of_identity_and_translation() {
        let l = se3_log(&Pose::IDENTITY);
        assert_eq!(l.twist, Twist::ZERO);
        assert!(!l.degenerate);
        let l = se3_log(&Pose::from_translation(Vec3::new(1.0, 2.0, 3.0)));
        assert_eq!(l.twist.angular, Vec3::ZERO);
        assert!((l.twist.linear - Vec3::new(1.0, 2.0, 3.0)).norm() < 1e-15);
    }

    #[test]
    fn log_flags_half_turn() {
        let p = se3_exp(&Twist::new(Vec3::new(core::f64::consts::PI, 0.0, 0.0), Vec3::X));
        assert!(se3_log(&p).degenerate);
    }

    #[test]
    fn compose_inverse_is_identity() {
        let a = se3_exp(&Twist::from_array([0.3, -0.2, 0.9, 0.1, 0.5, -0.4]));
        let r = a.compose(&a.inverse());
        assert!(r.translation.norm() < 1e-12);
        assert!(r.rotation.angle() < 1e-7);
    }

    #[test]
    fn matrix_round_trip() {
        let q = Quat::new(0.3, -0.5, 0.2, 0.7).unwrap();
        let back = quat_from_matrix(&q.to_matrix());
        let d = (back.w * q.w + back.x * q.x + back.y * q.y + back.z * q.z).abs();
        assert!((d - 1.0).abs() < 1e-12);
    }
}
