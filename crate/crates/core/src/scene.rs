//! Scene annotations standing in for language-driven grounding, plus the
//! dual-arm target-region definitions.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::cloud::{farthest_point_sample, knn, pca_major_axis, PointCloud};
use crate::error::{Error, Result};
use crate::math::Vec3;

/// Bounding-box edge length (m) above which `auto` resolves to two arms.
pub const DUAL_SPAN_THRESHOLD: f64 = 0.45;

/// A single matched part is split on its own, rather than splitting the
/// whole object, once it has more points than this.
pub const PART_SPLIT_MIN_POINTS: usize = 50;

/// Label that selects the whole object.
pub const WHOLE_OBJECT: &str = "*";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ModeHint {
    Single,
    Dual,
    #[default]
    Auto,
}

impl ModeHint {
    pub fn as_str(self) -> &'static str {
        match self {
            ModeHint::Single => "single",
            ModeHint::Dual => "dual",
            ModeHint::Auto => "auto",
        }
    }

    pub fn parse(s: &str) -> Option<ModeHint> {
        match s {
            "single" => Some(ModeHint::Single),
            "dual" => Some(ModeHint::Dual),
            "auto" => Some(ModeHint::Auto),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Single,
    Dual,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Single => "single",
            Mode::Dual => "dual",
        }
    }
}

/// An object cloud with named part index sets.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneDescription {
    pub object_label: String,
    pub cloud: PointCloud,
    pub parts: BTreeMap<String, Vec<usize>>,
    pub mode_hint: ModeHint,
}

impl SceneDescription {
    /// Builds a scene whose part sets must be non-empty, in range and
    /// pairwise disjoint.
    pub fn new(
        object_label: impl Into<String>,
        cloud: PointCloud,
        parts: BTreeMap<String, Vec<usize>>,
        mode_hint: ModeHint,
    ) -> Result<SceneDescription> {
        Self::with_overlap(object_label, cloud, parts, mode_hint, false)
    }

    /// As [`SceneDescription::new`], optionally allowing parts to share points.
    pub fn with_overlap(
        object_label: impl Into<String>,
        cloud: PointCloud,
        parts: BTreeMap<String, Vec<usize>>,
        mode_hint: ModeHint,
        allow_overlap: bool,
    ) -> Result<SceneDescription> {
        let n = cloud.len();
        let mut owner: Vec<Option<&str>> = alloc::vec![None; n];
        for (label, idx) in &parts {
            if idx.is_empty() {
                return Err(Error::EmptyPart(label.clone()));
            }
            for &i in idx {
                if i >= n {
                    return Err(Error::PartIndexOutOfRange { part: label.clone(), index: i, len: n });
                }
                match owner[i] {
                    Some(other) if !allow_overlap && other != label => {
                        return Err(Error::OverlappingParts(other.to_string(), label.clone()));
                    }
                    _ => owner[i] = Some(label),
                }
            }
        }
        Ok(SceneDescription { object_label: object_label.into(), cloud, parts, mode_hint })
    }

    /// Part labels starting with `prefix`, in sorted order.
    pub fn matching_parts<'a>(&'a self, prefix: &'a str) -> impl Iterator<Item = (&'a String, &'a Vec<usize>)> + 'a {
        self.parts.iter().filter(move |(k, _)| k.starts_with(prefix))
    }

    /// Longest edge of the axis-aligned bounding box.
    pub fn span(&self) -> f64 {
        match self.cloud.bounds() {
            Some((lo, hi)) => {
                let e = hi - lo;
                e.x().max(e.y()).max(e.z())
            }
            None => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundingResult {
    pub global: PointCloud,
    pub target: PointCloud,
    /// Indices of `target` within `global`.
    pub target_indices: Vec<usize>,
    pub mode: Mode,
}

fn sorted_union<'a>(sets: impl Iterator<Item = &'a Vec<usize>>) -> Vec<usize> {
    let mut all: Vec<usize> = sets.flat_map(|s| s.iter().copied()).collect();
    all.sort_unstable();
    all.dedup();
    all
}

/// Resolves a part label to the target region and the arm mode.
///
/// `"*"` selects the whole object. An exact label selects that part; any
/// other label selects the union of all parts it prefixes. `auto` resolves to
/// dual when two or more parts match or the object's longest bounding-box
/// edge exceeds [`DUAL_SPAN_THRESHOLD`].
pub fn ground_target(scene: &SceneDescription, part_label: &str) -> Result<GroundingResult> {
    let (indices, n_matching) = if part_label == WHOLE_OBJECT {
        ((0..scene.cloud.len()).collect::<Vec<_>>(), 0)
    } else if let Some(idx) = scene.parts.get(part_label) {
        let mut idx = idx.clone();
        idx.sort_unstable();
        idx.dedup();
        (idx, scene.matching_parts(part_label).count())
    } else {
        let n = scene.matching_parts(part_label).count();
        if n == 0 {
            return Err(Error::UnknownPart(part_label.to_string()));
        }
        (sorted_union(scene.matching_parts(part_label).map(|(_, v)| v)), n)
    };
    let mode = match scene.mode_hint {
        ModeHint::Single => Mode::Single,
        ModeHint::Dual => Mode::Dual,
        ModeHint::Auto if n_matching >= 2 || scene.span() > DUAL_SPAN_THRESHOLD => Mode::Dual,
        ModeHint::Auto => Mode::Single,
    };
    Ok(GroundingResult {
        global: scene.cloud.clone(),
        target: scene.cloud.select(&indices),
        target_indices: indices,
        mode,
    })
}

/// Two target regions, as index lists into the scene cloud, ordered by the
/// centroid coordinate along `axis`.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetRegions {
    pub first: Vec<usize>,
    pub second: Vec<usize>,
    pub axis: Vec3,
}

impl TargetRegions {
    pub fn clouds(&self, cloud: &PointCloud) -> (PointCloud, PointCloud) {
        (cloud.select(&self.first), cloud.select(&self.second))
    }
}

fn split_axis(cloud: &PointCloud) -> Vec3 {
    pca_major_axis(cloud).unwrap_or(Vec3::X)
}

fn centroid_of(cloud: &PointCloud, idx: &[usize]) -> Vec3 {
    let mut c = Vec3::ZERO;
    for &i in idx {
        c = c + cloud.point(i);
    }
    c * (1.0 / idx.len() as f64)
}

fn ordered(cloud: &PointCloud, a: Vec<usize>, b: Vec<usize>, axis: Vec3) -> Result<TargetRegions> {
    if a.len() < 2 || b.len() < 2 {
        return Err(Error::RegionTooSmall { first: a.len(), second: b.len() });
    }
    let (ca, cb) = (centroid_of(cloud, &a).dot(axis), centroid_of(cloud, &b).dot(axis));
    let swap = cb < ca || (cb == ca && b.first() < a.first());
    let (first, second) = if swap { (b, a) } else { (a, b) };
    Ok(TargetRegions { first, second, axis })
}

/// Index form of [`geometric_split`] over a subset of `cloud`.
fn split_indices(cloud: &PointCloud, subset: &[usize]) -> Result<TargetRegions> {
    if subset.len() < 4 {
        return Err(Error::Size { requested: 4, available: subset.len() });
    }
    let sub = cloud.select(subset);
    let axis = split_axis(&sub);
    let c = sub.centroid().dot(axis);
    let (mut lo, mut hi) = (Vec::new(), Vec::new());
    for &i in subset {
        if cloud.point(i).dot(axis) - c <= 0.0 {
            lo.push(i);
        } else {
            hi.push(i);
        }
    }
    ordered(cloud, lo, hi, axis)
}

/// Splits a cloud by the plane through its centroid normal to its major axis
/// (the x axis if the axis is undefined). Points on the plane go to the first
/// region.
pub fn geometric_split(cloud: &PointCloud) -> Result<(PointCloud, PointCloud)> {
    let all: Vec<usize> = (0..cloud.len()).collect();
    Ok(split_indices(cloud, &all)?.clouds(cloud))
}

/// Two regions for the two arms.
///
/// Exactly two disjoint parts matching `part_label` are used as they are.
/// Otherwise a single matching part with more than
/// [`PART_SPLIT_MIN_POINTS`] points is split geometrically, and failing that
/// the whole object is. Semantic regions are ordered along the object's
/// major axis.
pub fn determine_target_regions(scene: &SceneDescription, part_label: &str) -> Result<TargetRegions> {
    let cloud = &scene.cloud;
    let matched: Vec<&Vec<usize>> = if part_label == WHOLE_OBJECT {
        Vec::new()
    } else {
        scene.matching_parts(part_label).map(|(_, v)| v).collect()
    };
    if matched.len() == 2 {
        let a = sorted_union(core::iter::once(matched[0]));
        let b = sorted_union(core::iter::once(matched[1]));
        let disjoint = a.iter().all(|i| b.binary_search(i).is_err());
        if disjoint {
            return ordered(cloud, a, b, split_axis(cloud));
        }
    }
    if matched.len() == 1 && matched[0].len() > PART_SPLIT_MIN_POINTS {
        return split_indices(cloud, &sorted_union(core::iter::once(matched[0])));
    }
    let all: Vec<usize> = (0..cloud.len()).collect();
    split_indices(cloud, &all)
}

/// Comparison regions: two farthest-point seeds grown to their `k` nearest
/// neighbours. The regions may overlap.
pub fn baseline_fps_knn_regions(cloud: &PointCloud, k: usize, seed: u64) -> Result<TargetRegions> {
    if k == 0 || 2 * k > cloud.len() {
        return Err(Error::Size { requested: 2 * k.max(1), available: cloud.len() });
    }
    let seeds = farthest_point_sample(cloud, 2, seed)?;
    let first = knn(cloud, cloud.point(seeds[0]), k)?;
    let second = knn(cloud, cloud.point(seeds[1]), k)?;
    let axis = (cloud.point(seeds[1]) - cloud.point(seeds[0])).try_normalize().unwrap_or(Vec3::X);
    Ok(TargetRegions { first, second, axis })
}
