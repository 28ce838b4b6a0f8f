//! Gripper–object and gripper–gripper collision queries and contact extraction.

use alloc::vec::Vec;

use crate::cloud::PointCloud;
use crate::gripper::{Arm, GripperModel, OrientedBox};
use crate::math::Vec3;
use crate::se3::Pose;

/// A frictional point contact on the object surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contact {
    pub point: Vec3,
    /// Outward surface normal.
    pub normal: Vec3,
    pub arm: Arm,
}

/// Counts cloud points strictly inside either finger or the palm. Points in
/// the jaw opening are not collisions.
pub fn gripper_object_collision(pose: &Pose, cloud: &PointCloud, gripper: &GripperModel) -> (bool, usize) {
    let boxes = gripper.boxes();
    let count = cloud
        .points()
        .iter()
        .filter(|&&p| {
            let local = pose.inverse_transform_point(p);
            boxes.iter().any(|b| b.contains(local))
        })
        .count();
    (count > 0, count)
}

/// Separating-axis test between two oriented boxes. Touching boxes count as
/// intersecting.
pub fn boxes_intersect(a: &OrientedBox, b: &OrientedBox) -> bool {
    let a_axes = [a.axes.col(0), a.axes.col(1), a.axes.col(2)];
    let b_axes = [b.axes.col(0), b.axes.col(1), b.axes.col(2)];
    let t = b.center - a.center;
    let separated_on = |axis: Vec3| -> bool {
        let len2 = axis.norm_squared();
        if len2 < 1e-18 {
            return false;
        }
        let ra: f64 = (0..3).map(|i| a.half[i] * a_axes[i].dot(axis).abs()).sum();
        let rb: f64 = (0..3).map(|i| b.half[i] * b_axes[i].dot(axis).abs()).sum();
        t.dot(axis).abs() > ra + rb
    };
    for ax in a_axes.iter().chain(b_axes.iter()) {
        if separated_on(*ax) {
            return false;
        }
    }
    for ea in &a_axes {
        for eb in &b_axes {
            if separated_on(ea.cross(*eb)) {
                return false;
            }
        }
    }
    true
}

/// True iff any box of the first gripper intersects any box of the second.
pub fn gripper_gripper_collision(pose1: &Pose, pose2: &Pose, gripper: &GripperModel) -> bool {
    let b1 = gripper.world_boxes(pose1);
    let b2 = gripper.world_boxes(pose2);
    b1.iter().any(|a| b2.iter().any(|b| boxes_intersect(a, b)))
}

/// For each finger pad, the cloud point inside the closing volume nearest to
/// that pad's plane. Yields zero, one or two contacts; a single point seen by
/// both pads is reported once.
pub fn extract_contacts(pose: &Pose, cloud: &PointCloud, gripper: &GripperModel, arm: Arm) -> Vec<Contact> {
    let Some(normals) = cloud.normals() else {
        return Vec::new();
    };
    let h = gripper.half_opening();
    // (gap to pad, index) for the negative and positive pads
    let mut best: [Option<(f64, usize)>; 2] = [None, None];
    for (i, &p) in cloud.points().iter().enumerate() {
        let local = pose.inverse_transform_point(p);
        if !gripper.in_closing_volume(local) {
            continue;
        }
        for (slot, sign) in [(0usize, -1.0f64), (1, 1.0)] {
            let gap = h - sign * local[0];
            match best[slot] {
                Some((g, _)) if g <= gap => {}
                _ => best[slot] = Some((gap, i)),
            }
        }
    }
    let mut out = Vec::with_capacity(2);
    let mut seen = None;
    for (_, i) in best.into_iter().flatten() {
        if seen == Some(i) {
            continue;
        }
        seen = Some(i);
        out.push(Contact { point: cloud.point(i), normal: normals[i], arm });
    }
    out
}
