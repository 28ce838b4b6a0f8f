//! Point clouds and the neighborhood primitives built on them.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::math::{floor, sqrt, symmetric_eigen, Mat3, Vec3};

/// Clouds at least this large are queried through a uniform grid instead of
/// exhaustive search.
pub const GRID_THRESHOLD: usize = 5_000;

const NORMAL_TOLERANCE: f64 = 1e-6;

/// Ordered 3D points with optional unit normals.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointCloud {
    points: Vec<Vec3>,
    normals: Option<Vec<Vec3>>,
}

impl PointCloud {
    pub fn new(points: Vec<Vec3>) -> Result<PointCloud> {
        if let Some(i) = points.iter().position(|p| !p.is_finite()) {
            return Err(Error::InvalidCloud(format!("point {i} is not finite")));
        }
        Ok(PointCloud { points, normals: None })
    }

    pub fn with_normals(points: Vec<Vec3>, normals: Vec<Vec3>) -> Result<PointCloud> {
        if normals.len() != points.len() {
            return Err(Error::InvalidCloud(format!("{} normals for {} points", normals.len(), points.len())));
        }
        let mut cloud = PointCloud::new(points)?;
        for (i, n) in normals.iter().enumerate() {
            if !n.is_finite() || (n.norm() - 1.0).abs() > NORMAL_TOLERANCE {
                return Err(Error::InvalidCloud(format!("normal {i} is not unit length")));
            }
        }
        cloud.normals = Some(normals);
        Ok(cloud)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec3] {
        &self.points
    }

    pub fn normals(&self) -> Option<&[Vec3]> {
        self.normals.as_deref()
    }

    pub fn has_normals(&self) -> bool {
        self.normals.is_some()
    }

    pub fn point(&self, i: usize) -> Vec3 {
        self.points[i]
    }

    /// Sub-cloud of the given indices, in the given order.
    pub fn select(&self, indices: &[usize]) -> PointCloud {
        PointCloud {
            points: indices.iter().map(|&i| self.points[i]).collect(),
            normals: self.normals.as_ref().map(|n| indices.iter().map(|&i| n[i]).collect()),
        }
    }

    pub fn centroid(&self) -> Vec3 {
        if self.points.is_empty() {
            return Vec3::ZERO;
        }
        let sum = self.points.iter().fold(Vec3::ZERO, |acc, &p| acc + p);
        sum / self.points.len() as f64
    }

    /// Axis-aligned bounds `(min, max)`; `None` for an empty cloud.
    pub fn bounds(&self) -> Option<(Vec3, Vec3)> {
        let first = *self.points.first()?;
        Some(self.points.iter().fold((first, first), |(lo, hi), p| {
            (
                Vec3::new(lo[0].min(p[0]), lo[1].min(p[1]), lo[2].min(p[2])),
                Vec3::new(hi[0].max(p[0]), hi[1].max(p[1]), hi[2].max(p[2])),
            )
        }))
    }

    /// Largest distance from the centroid to any point.
    pub fn bounding_radius(&self) -> f64 {
        let c = self.centroid();
        self.points.iter().map(|p| p.distance(c)).fold(0.0, f64::max)
    }

    /// Rigidly transformed copy (points and normals).
    pub fn transformed(&self, pose: &crate::se3::Pose) -> PointCloud {
        PointCloud {
            points: self.points.iter().map(|&p| pose.transform_point(p)).collect(),
            normals: self
                .normals
                .as_ref()
                .map(|n| n.iter().map(|&v| pose.transform_vector(v).try_normalize().unwrap_or(v)).collect()),
        }
    }

    /// Covariance matrix about the centroid.
    pub fn covariance(&self) -> Mat3 {
        covariance_of(self.points.iter().copied())
    }
}

fn covariance_of(points: impl Iterator<Item = Vec3> + Clone) -> Mat3 {
    let mut n = 0usize;
    let mut sum = Vec3::ZERO;
    for p in points.clone() {
        sum += p;
        n += 1;
    }
    if n == 0 {
        return Mat3::default();
    }
    let c = sum / n as f64;
    let mut m = [[0.0; 3]; 3];
    for p in points {
        let d = p - c;
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += d[i] * d[j];
            }
        }
    }
    Mat3(m).scale(1.0 / n as f64)
}

/// Farthest point sampling.
///
/// The first index is drawn uniformly using `seed`; every following index
/// maximizes the distance to the nearest already-chosen point (lowest index
/// wins ties).
pub fn farthest_point_sample(cloud: &PointCloud, m: usize, seed: u64) -> Result<Vec<usize>> {
    let n = cloud.len();
    if m == 0 || m > n {
        return Err(Error::Size { requested: m, available: n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first = rng.random_range(0..n);
    let pts = cloud.points();
    let mut chosen = Vec::with_capacity(m);
    chosen.push(first);
    let mut min_d2: Vec<f64> = pts.iter().map(|p| p.distance_squared(pts[first])).collect();
    min_d2[first] = -1.0;
    while chosen.len() < m {
        let mut best = usize::MAX;
        let mut best_d = f64::NEG_INFINITY;
        for (i, &d) in min_d2.iter().enumerate() {
            if d > best_d {
                best_d = d;
                best = i;
            }
        }
        chosen.push(best);
        let q = pts[best];
        for (i, d) in min_d2.iter_mut().enumerate() {
            if *d >= 0.0 {
                *d = d.min(pts[i].distance_squared(q));
            }
        }
        min_d2[best] = -1.0;
    }
    Ok(chosen)
}

fn sort_by_distance(cands: &mut [(f64, usize)]) {
    cands.sort_unstable_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
}

/// The `k` nearest cloud points to `query`, ascending by distance, ties by
/// lower index.
pub fn knn(cloud: &PointCloud, query: Vec3, k: usize) -> Result<Vec<usize>> {
    let n = cloud.len();
    if k == 0 || k > n {
        return Err(Error::Size { requested: k, available: n });
    }
    if n >= GRID_THRESHOLD {
        let grid = GridIndex::build(cloud.points());
        if let Some(found) = grid.knn(cloud.points(), query, k) {
            return Ok(found);
        }
    }
    Ok(knn_exhaustive(cloud.points(), query, k))
}

fn knn_exhaustive(points: &[Vec3], query: Vec3, k: usize) -> Vec<usize> {
    let mut cands: Vec<(f64, usize)> = points.iter().enumerate().map(|(i, p)| (p.distance_squared(query), i)).collect();
    let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if k < cands.len() {
        cands.select_nth_unstable_by(k - 1, cmp);
        cands.truncate(k);
    }
    sort_by_distance(&mut cands);
    cands.into_iter().map(|(_, i)| i).collect()
}

/// Uniform grid over a point set, stored as a counting sort of point indices
/// by cell.
#[derive(Debug, Clone)]
pub struct GridIndex {
    origin: Vec3,
    cell: f64,
    dims: [usize; 3],
    starts: Vec<u32>,
    order: Vec<u32>,
}

impl GridIndex {
    pub fn build(points: &[Vec3]) -> GridIndex {
        let (lo, hi) = points.iter().fold(
            (Vec3::new(f64::MAX, f64::MAX, f64::MAX), Vec3::new(f64::MIN, f64::MIN, f64::MIN)),
            |(lo, hi), p| {
                (
                    Vec3::new(lo[0].min(p[0]), lo[1].min(p[1]), lo[2].min(p[2])),
                    Vec3::new(hi[0].max(p[0]), hi[1].max(p[1]), hi[2].max(p[2])),
                )
            },
        );
        let ext = hi - lo;
        // About eight points per occupied cell for surface-like clouds.
        let vol = (ext[0].max(1e-9)) * (ext[1].max(1e-9)) * (ext[2].max(1e-9));
        let target = (points.len() as f64 / 8.0).max(1.0);
        let mut cell = libm::cbrt(vol / target);
        let max_ext = ext[0].max(ext[1]).max(ext[2]).max(1e-9);
        cell = cell.max(max_ext / 256.0).max(1e-9);
        let dims = [0, 1, 2].map(|a| (floor(ext[a] / cell) as usize + 1).min(1024));
        let mut grid = GridIndex { origin: lo, cell, dims, starts: Vec::new(), order: Vec::new() };
        let ncells = dims[0] * dims[1] * dims[2];
        let mut counts = vec![0u32; ncells + 1];
        let keys: Vec<usize> = points.iter().map(|&p| grid.cell_key(grid.cell_of(p))).collect();
        for &k in &keys {
            counts[k + 1] += 1;
        }
        for i in 0..ncells {
            counts[i + 1] += counts[i];
        }
        let mut fill = counts.clone();
        let mut order = vec![0u32; points.len()];
        for (i, &k) in keys.iter().enumerate() {
            order[fill[k] as usize] = i as u32;
            fill[k] += 1;
        }
        grid.starts = counts;
        grid.order = order;
        grid
    }

    pub fn cell_size(&self) -> f64 {
        self.cell
    }

    fn cell_of(&self, p: Vec3) -> [usize; 3] {
        [0, 1, 2].map(|a| {
            let c = floor((p[a] - self.origin[a]) / self.cell);
            if c <= 0.0 {
                0
            } else {
                (c as usize).min(self.dims[a] - 1)
            }
        })
    }

    fn cell_key(&self, c: [usize; 3]) -> usize {
        (c[2] * self.dims[1] + c[1]) * self.dims[0] + c[0]
    }

    fn contains(&self, p: Vec3) -> bool {
        (0..3).all(|a| {
            let lo = self.origin[a];
            let hi = lo + self.dims[a] as f64 * self.cell;
            p[a] >= lo && p[a] <= hi
        })
    }

    /// Calls `f` with every point index in cells intersecting the ball of
    /// radius `r` about `center`.
    pub fn for_each_near(&self, center: Vec3, r: f64, mut f: impl FnMut(usize)) {
        let lo = self.cell_of(center - Vec3::new(r, r, r));
        let hi = self.cell_of(center + Vec3::new(r, r, r));
        for z in lo[2]..=hi[2] {
            for y in lo[1]..=hi[1] {
                let row = self.cell_key([0, y, z]);
                let s = self.starts[row + lo[0]] as usize;
                let e = self.starts[row + hi[0] + 1] as usize;
                for &i in &self.order[s..e] {
                    f(i as usize);
                }
            }
        }
    }

    /// Grid k-NN; `None` when the query lies outside the indexed box.
    fn knn(&self, points: &[Vec3], query: Vec3, k: usize) -> Option<Vec<usize>> {
        if !self.contains(query) {
            return None;
        }
        let qc = self.cell_of(query);
        let max_ring = self.dims.iter().copied().max().unwrap_or(1);
        let mut cands: Vec<(f64, usize)> = Vec::new();
        for ring in 0..=max_ring {
            let r = ring as isize;
            for dz in -r..=r {
                for dy in -r..=r {
                    for dx in -r..=r {
                        if dx.abs().max(dy.abs()).max(dz.abs()) != r {
                            continue;
                        }
                        let c = [qc[0] as isize + dx, qc[1] as isize + dy, qc[2] as isize + dz];
                        if (0..3).any(|a| c[a] < 0 || c[a] >= self.dims[a] as isize) {
                            continue;
                        }
                        let key = self.cell_key(c.map(|v| v as usize));
                        let (s, e) = (self.starts[key] as usize, self.starts[key + 1] as usize);
                        for &i in &self.order[s..e] {
                            let i = i as usize;
                            cands.push((points[i].distance_squared(query), i));
                        }
                    }
                }
            }
            if cands.len() >= k {
                sort_by_distance(&mut cands);
                // Anything in a farther ring is at least `ring * cell` away.
                let reach = ring as f64 * self.cell;
                if cands[k - 1].0 <= reach * reach {
                    cands.truncate(k);
                    return Some(cands.into_iter().map(|(_, i)| i).collect());
                }
            }
        }
        sort_by_distance(&mut cands);
        cands.truncate(k);
        Some(cands.into_iter().map(|(_, i)| i).collect())
    }
}

/// Unit eigenvector of the covariance with the largest eigenvalue, signed so
/// that its largest-magnitude component is positive.
pub fn pca_major_axis(cloud: &PointCloud) -> Result<Vec3> {
    if cloud.len() < 2 {
        return Err(Error::Size { requested: 2, available: cloud.len() });
    }
    let (vals, vecs) = symmetric_eigen(&cloud.covariance());
    if !(vals[2] > 1e-24) {
        return Err(Error::Degenerate("point cloud has zero covariance"));
    }
    let mut axis = vecs[2];
    if axis[axis.argmax_abs()] < 0.0 {
        axis = -axis;
    }
    Ok(axis)
}

/// Per-point normals from the smallest principal direction of the local
/// `k`-neighborhood, oriented away from the cloud centroid.
pub fn estimate_normals(cloud: &PointCloud, k: usize) -> Result<PointCloud> {
    if k < 3 {
        return Err(Error::Parameter(format!("normal estimation needs k >= 3, got {k}")));
    }
    if cloud.is_empty() {
        return Err(Error::InvalidCloud("empty cloud".into()));
    }
    let k = k.min(cloud.len());
    let centroid = cloud.centroid();
    let pts = cloud.points();
    let grid = (pts.len() >= GRID_THRESHOLD).then(|| GridIndex::build(pts));
    let mut normals = Vec::with_capacity(pts.len());
    for &p in pts {
        let nbrs = match grid.as_ref().and_then(|g| g.knn(pts, p, k)) {
            Some(n) => n,
            None => knn_exhaustive(pts, p, k),
        };
        let cov = covariance_of(nbrs.iter().map(|&i| pts[i]));
        let (vals, vecs) = symmetric_eigen(&cov);
        let radial = (p - centroid).try_normalize().unwrap_or(Vec3::Z);
        let degenerate = nbrs.len() < 3 || !(vals[1] > 1e-12 * vals[2].max(1e-300)) || vals[2] <= 0.0;
        let n = if degenerate {
            radial
        } else {
            let n = vecs[0] / vecs[0].norm();
            if n.dot(p - centroid) < 0.0 {
                -n
            } else {
                n
            }
        };
        normals.push(n);
    }
    PointCloud::with_normals(pts.to_vec(), normals)
}

/// Exhaustive nearest distance from `q` to any of `points` (infinite when empty).
pub fn nearest_distance(points: &[Vec3], q: Vec3) -> f64 {
    sqrt(points.iter().map(|p| p.distance_squared(q)).fold(f64::INFINITY, f64::min))
}
