//! Parametric household-object stand-ins sampled to labelled point clouds.
//!
//! Every surface patch is sampled uniformly by area with analytic outward
//! normals. Thin-walled containers have separate inner and outer skins so
//! a gripper can straddle the wall.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::math::{acos, cos, sin, sqrt, Vec3};
use crate::scene::{ModeHint, SceneDescription};

/// Minimum cloud size accepted by [`gen_object`].
pub const MIN_POINTS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ObjectKind {
    Mug,
    Pot,
    Pan,
    Knife,
    Bottle,
    Keyboard,
    Basin,
    Laptop,
}

impl ObjectKind {
    pub const ALL: [ObjectKind; 8] = [
        ObjectKind::Mug,
        ObjectKind::Pot,
        ObjectKind::Pan,
        ObjectKind::Knife,
        ObjectKind::Bottle,
        ObjectKind::Keyboard,
        ObjectKind::Basin,
        ObjectKind::Laptop,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ObjectKind::Mug => "mug",
            ObjectKind::Pot => "pot",
            ObjectKind::Pan => "pan",
            ObjectKind::Knife => "knife",
            ObjectKind::Bottle => "bottle",
            ObjectKind::Keyboard => "keyboard",
            ObjectKind::Basin => "basin",
            ObjectKind::Laptop => "laptop",
        }
    }

    pub fn parse(s: &str) -> Option<ObjectKind> {
        ObjectKind::ALL.iter().copied().find(|k| k.as_str() == s)
    }

    /// Part grasped by default.
    pub fn default_part(self) -> &'static str {
        match self {
            ObjectKind::Mug | ObjectKind::Pot | ObjectKind::Pan | ObjectKind::Knife | ObjectKind::Basin => "handle",
            ObjectKind::Bottle => "neck",
            ObjectKind::Keyboard | ObjectKind::Laptop => "*",
        }
    }

    pub fn mode_hint(self) -> ModeHint {
        match self {
            ObjectKind::Mug | ObjectKind::Pan | ObjectKind::Knife | ObjectKind::Bottle => ModeHint::Single,
            ObjectKind::Pot | ObjectKind::Keyboard | ObjectKind::Basin | ObjectKind::Laptop => ModeHint::Dual,
        }
    }

    /// Sampling density (points per m²) giving a cloud of roughly 1,000 to
    /// 3,000 points at unit scale.
    pub fn default_density(self) -> f64 {
        match self {
            ObjectKind::Mug => 20_000.0,
            ObjectKind::Knife => 60_000.0,
            ObjectKind::Bottle => 30_000.0,
            ObjectKind::Pan => 12_000.0,
            ObjectKind::Pot | ObjectKind::Keyboard | ObjectKind::Laptop => 8_000.0,
            ObjectKind::Basin => 6_000.0,
        }
    }
}

impl core::fmt::Display for ObjectKind {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Orthonormal frame for placing patches.
#[derive(Clone, Copy)]
struct Frame {
    origin: Vec3,
    u: Vec3,
    v: Vec3,
    w: Vec3,
}

impl Frame {
    fn at(origin: Vec3) -> Frame {
        Frame { origin, u: Vec3::X, v: Vec3::Y, w: Vec3::Z }
    }

    fn local(&self, a: f64, b: f64, c: f64) -> Vec3 {
        self.origin + self.u * a + self.v * b + self.w * c
    }

    fn dir(&self, a: f64, b: f64, c: f64) -> Vec3 {
        self.u * a + self.v * b + self.w * c
    }
}

struct Builder {
    rng: ChaCha8Rng,
    density: f64,
    scale: f64,
    area: f64,
    points: Vec<Vec3>,
    normals: Vec<Vec3>,
    parts: BTreeMap<String, Vec<usize>>,
}

impl Builder {
    fn new(seed: u64, density: f64, scale: f64) -> Builder {
        Builder {
            rng: ChaCha8Rng::seed_from_u64(seed),
            density,
            scale,
            area: 0.0,
            points: Vec::new(),
            normals: Vec::new(),
            parts: BTreeMap::new(),
        }
    }

    /// Adds `round(area · density)` samples of a patch of unscaled `area`.
    fn patch(&mut self, part: &str, area: f64, mut sample: impl FnMut(&mut ChaCha8Rng) -> (Vec3, Vec3)) {
        let scaled = area * self.scale * self.scale;
        self.area += scaled;
        let n = libm::round(scaled * self.density) as usize;
        let ids = self.parts.entry(part.to_string()).or_default();
        for _ in 0..n {
            let (p, nrm) = sample(&mut self.rng);
            ids.push(self.points.len());
            self.points.push(p * self.scale);
            self.normals.push(nrm.try_normalize().unwrap_or(Vec3::Z));
        }
    }

    /// Cylinder side of radius `r` along the frame's `w` axis for `c ∈ [c0, c1]`
    /// and angle in `[a0, a1]`. `outward` selects the normal sign.
    fn cylinder(&mut self, part: &str, f: Frame, r: f64, c0: f64, c1: f64, a0: f64, a1: f64, outward: bool) {
        let s = if outward { 1.0 } else { -1.0 };
        self.patch(part, r * (a1 - a0) * (c1 - c0), |rng| {
            let t = rng.random_range(a0..a1);
            let c = rng.random_range(c0..c1);
            (f.local(r * cos(t), r * sin(t), c), f.dir(s * cos(t), s * sin(t), 0.0))
        });
    }

    /// Annulus `r ∈ [r0, r1]` in the frame's `uv` plane at height `c`, normal
    /// `±w`.
    fn annulus(&mut self, part: &str, f: Frame, c: f64, r0: f64, r1: f64, a0: f64, a1: f64, up: bool) {
        let s = if up { 1.0 } else { -1.0 };
        self.patch(part, 0.5 * (a1 - a0) * (r1 * r1 - r0 * r0), |rng| {
            let t = rng.random_range(a0..a1);
            let r = sqrt(rng.random_range(r0 * r0..=r1 * r1));
            (f.local(r * cos(t), r * sin(t), c), f.dir(0.0, 0.0, s))
        });
    }

    /// Torus section with core radius `a` in the `uv` plane, tube radius `r`,
    /// core angle in `[p0, p1]` measured from `u`.
    fn torus(&mut self, part: &str, f: Frame, a: f64, r: f64, p0: f64, p1: f64) {
        self.patch(part, 2.0 * PI * r * a * (p1 - p0), |rng| {
            let phi = rng.random_range(p0..p1);
            let psi = loop {
                let psi = rng.random_range(0.0..2.0 * PI);
                if rng.random::<f64>() * (a + r) <= a + r * cos(psi) {
                    break psi;
                }
            };
            let radial = f.dir(cos(phi), sin(phi), 0.0);
            let n = radial * cos(psi) + f.w * sin(psi);
            (f.origin + radial * a + n * r, n)
        });
    }

    /// Faces of the axis-aligned box `[lo, hi]`; `skip` lists faces to omit
    /// as `(axis, +1 | -1)`.
    fn cuboid(&mut self, part: &str, lo: Vec3, hi: Vec3, skip: &[(usize, f64)]) {
        for axis in 0..3 {
            let (a, b) = ((axis + 1) % 3, (axis + 2) % 3);
            for side in [-1.0, 1.0] {
                if skip.contains(&(axis, side)) {
                    continue;
                }
                let area = (hi[a] - lo[a]) * (hi[b] - lo[b]);
                self.patch(part, area, |rng| {
                    let mut p = Vec3::ZERO;
                    p.0[axis] = if side > 0.0 { hi[axis] } else { lo[axis] };
                    p.0[a] = rng.random_range(lo[a]..=hi[a]);
                    p.0[b] = rng.random_range(lo[b]..=hi[b]);
                    let mut n = Vec3::ZERO;
                    n.0[axis] = side;
                    (p, n)
                });
            }
        }
    }

    /// Open-top thin-walled cylinder standing on `z = 0`.
    fn vessel(&mut self, part: &str, r_out: f64, wall: f64, height: f64) {
        let f = Frame::at(Vec3::ZERO);
        let r_in = r_out - wall;
        self.cylinder(part, f, r_out, 0.0, height, 0.0, 2.0 * PI, true);
        self.cylinder(part, f, r_in, wall, height, 0.0, 2.0 * PI, false);
        self.annulus(part, f, 0.0, 0.0, r_out, 0.0, 2.0 * PI, false);
        self.annulus(part, f, wall, 0.0, r_in, 0.0, 2.0 * PI, true);
        self.annulus(part, f, height, r_in, r_out, 0.0, 2.0 * PI, true);
    }
}

pub const MUG_RADIUS: f64 = 0.045;
pub const MUG_HEIGHT: f64 = 0.10;
pub const MUG_HANDLE_MAJOR: f64 = 0.03;
pub const MUG_HANDLE_MINOR: f64 = 0.007;

/// Samples a synthetic object with labelled parts.
///
/// | kind | shape | parts |
/// |---|---|---|
/// | mug | open cup with a half-torus handle | body, handle |
/// | pot | wide open pot with two horizontal loop handles | body, handle_left, handle_right |
/// | pan | shallow pan with a straight tube handle | body, handle |
/// | knife | thin blade and box handle | blade, handle |
/// | bottle | cylinder with a narrow neck | body, neck |
/// | keyboard | flat slab | body |
/// | basin | wide open basin with a flat lip; lip arcs are handles | body, handle_left, handle_right |
/// | laptop | open L of two slabs | body |
///
/// `scale` multiplies every length and `density` is in points per m².
pub fn gen_object(kind: ObjectKind, scale: f64, density: f64, seed: u64) -> Result<SceneDescription> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::Parameter(alloc::format!("scale must be positive, got {scale}")));
    }
    if !(density > 0.0 && density.is_finite()) {
        return Err(Error::Parameter(alloc::format!("density must be positive, got {density}")));
    }
    let mut b = Builder::new(seed, density, scale);
    build(kind, &mut b);
    if b.points.len() < MIN_POINTS {
        return Err(Error::Parameter(alloc::format!(
            "density {density} gives {} points for a {kind}; need at least {MIN_POINTS}",
            b.points.len()
        )));
    }
    let cloud = PointCloud::with_normals(b.points, b.normals)?;
    SceneDescription::new(kind.as_str(), cloud, b.parts, kind.mode_hint())
}

/// Analytic surface area (m²) of an object at the given scale.
pub fn surface_area(kind: ObjectKind, scale: f64) -> f64 {
    let mut b = Builder::new(0, 0.0, scale);
    build(kind, &mut b);
    b.area
}

fn build(kind: ObjectKind, b: &mut Builder) {
    let full = 2.0 * PI;
    match kind {
        ObjectKind::Mug => {
            b.vessel("body", MUG_RADIUS, 0.005, MUG_HEIGHT);
            let (a, r) = (MUG_HANDLE_MAJOR, MUG_HANDLE_MINOR);
            let f = Frame { origin: Vec3::new(MUG_RADIUS, 0.0, 0.5 * MUG_HEIGHT), u: Vec3::X, v: Vec3::Z, w: -Vec3::Y };
            let pm = acos(r / a);
            b.torus("handle", f, a, r, -pm, pm);
        }
        ObjectKind::Pot => {
            let (r_out, h) = (0.12, 0.14);
            b.vessel("body", r_out, 0.006, h);
            let (a, r) = (0.035, 0.008);
            let pm = acos(r / a);
            for (name, sign) in [("handle_left", -1.0), ("handle_right", 1.0)] {
                let f = Frame {
                    origin: Vec3::new(sign * r_out, 0.0, h - 0.025),
                    u: Vec3::X * sign,
                    v: Vec3::Y * sign,
                    w: Vec3::Z,
                };
                b.torus(name, f, a, r, -pm, pm);
            }
        }
        ObjectKind::Pan => {
            let (r_out, h) = (0.12, 0.045);
            b.vessel("body", r_out, 0.005, h);
            let (rt, len) = (0.011, 0.18);
            let f = Frame { origin: Vec3::new(r_out, 0.0, h - 0.012), u: Vec3::Y, v: Vec3::Z, w: Vec3::X };
            b.cylinder("handle", f, rt, 0.0, len, 0.0, full, true);
            b.annulus("handle", f, len, 0.0, rt, 0.0, full, true);
        }
        ObjectKind::Knife => {
            b.cuboid("blade", Vec3::new(0.0, -0.001, 0.0), Vec3::new(0.16, 0.001, 0.03), &[(0, -1.0)]);
            b.cuboid("handle", Vec3::new(-0.11, -0.009, -0.002), Vec3::new(0.0, 0.009, 0.022), &[]);
        }
        ObjectKind::Bottle => {
            let f = Frame::at(Vec3::ZERO);
            let (rb, hb, rn, hn) = (0.035, 0.16, 0.013, 0.06);
            b.cylinder("body", f, rb, 0.0, hb, 0.0, full, true);
            b.annulus("body", f, 0.0, 0.0, rb, 0.0, full, false);
            b.annulus("body", f, hb, rn, rb, 0.0, full, true);
            b.cylinder("neck", f, rn, hb, hb + hn, 0.0, full, true);
            b.annulus("neck", f, hb + hn, 0.0, rn, 0.0, full, true);
        }
        ObjectKind::Keyboard => {
            b.cuboid("body", Vec3::new(-0.23, -0.07, 0.0), Vec3::new(0.23, 0.07, 0.03), &[]);
        }
        ObjectKind::Basin => {
            let (r_out, wall, h) = (0.18, 0.006, 0.12);
            let (lip, lip_t) = (0.04, 0.008);
            let r_in = r_out - wall;
            let f = Frame::at(Vec3::ZERO);
            b.cylinder("body", f, r_out, 0.0, h - lip_t, 0.0, full, true);
            b.cylinder("body", f, r_in, wall, h, 0.0, full, false);
            b.annulus("body", f, 0.0, 0.0, r_out, 0.0, full, false);
            b.annulus("body", f, wall, 0.0, r_in, 0.0, full, true);
            b.annulus("body", f, h, r_in, r_out, 0.0, full, true);
            // The lip is split into two handle arcs around ±x and body elsewhere.
            let arc = PI / 6.0;
            let spans = [
                ("handle_right", -arc, arc),
                ("body", arc, PI - arc),
                ("handle_left", PI - arc, PI + arc),
                ("body", PI + arc, 2.0 * PI - arc),
            ];
            for (name, a0, a1) in spans {
                b.annulus(name, f, h, r_out, r_out + lip, a0, a1, true);
                b.annulus(name, f, h - lip_t, r_out, r_out + lip, a0, a1, false);
                b.cylinder(name, f, r_out + lip, h - lip_t, h, a0, a1, true);
            }
        }
        ObjectKind::Laptop => {
            b.cuboid("body", Vec3::new(-0.16, -0.11, 0.0), Vec3::new(0.16, 0.11, 0.015), &[]);
            b.cuboid("body", Vec3::new(-0.16, 0.11, 0.015), Vec3::new(0.16, 0.118, 0.235), &[]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_kind_builds() {
        for kind in ObjectKind::ALL {
            let s = gen_object(kind, 1.0, kind.default_density(), 1).unwrap();
            assert!(s.cloud.len() >= MIN_POINTS, "{kind}: {}", s.cloud.len());
            assert!(s.cloud.len() <= 4_000, "{kind}: {}", s.cloud.len());
            assert_eq!(ObjectKind::parse(kind.as_str()), Some(kind));
        }
    }

    #[test]
    fn low_density_is_rejected() {
        assert!(gen_object(ObjectKind::Mug, 1.0, 100.0, 0).is_err());
        assert!(gen_object(ObjectKind::Mug, 0.0, 1e4, 0).is_err());
    }
}
