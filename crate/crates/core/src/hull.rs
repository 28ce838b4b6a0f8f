//! Incremental convex hull in six dimensions.
//!
//! Beneath-beyond construction: start from a full-dimensional simplex, then
//! insert each remaining point by deleting the facets it can see and coning
//! the horizon ridges to it. Only facet planes are kept; the caller uses
//! their offsets.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::math::sqrt;

pub const DIM: usize = 6;
pub type Point6 = [f64; DIM];

fn dot(a: &Point6, b: &Point6) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn sub(a: &Point6, b: &Point6) -> Point6 {
    core::array::from_fn(|i| a[i] - b[i])
}

fn norm(a: &Point6) -> f64 {
    sqrt(dot(a, a))
}

/// Orthonormalizes `v` against `basis` (two passes) and returns the residual.
fn residual(basis: &[Point6], v: &Point6) -> Point6 {
    let mut r = *v;
    for _ in 0..2 {
        for b in basis {
            let c = dot(&r, b);
            for i in 0..DIM {
                r[i] -= c * b[i];
            }
        }
    }
    r
}

/// A supporting hyperplane `normal · x = offset` with unit outward normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Facet {
    pub vertices: [usize; DIM],
    pub normal: Point6,
    pub offset: f64,
    /// `neighbors[i]` shares every vertex except `vertices[i]`.
    neighbors: [usize; DIM],
    alive: bool,
}

impl Facet {
    #[inline]
    pub fn distance(&self, p: &Point6) -> f64 {
        dot(&self.normal, p) - self.offset
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Hull {
    /// The points span fewer than six affine dimensions.
    Degenerate,
    Full(Vec<Facet>),
}

/// Unit normal to the hyperplane through six points, oriented away from
/// `inside`. `None` if the points are affinely dependent.
fn plane(points: &[Point6], vertices: &[usize; DIM], inside: &Point6) -> Option<(Point6, f64)> {
    let origin = points[vertices[0]];
    let mut basis: Vec<Point6> = Vec::with_capacity(DIM - 1);
    for &v in &vertices[1..] {
        let r = residual(&basis, &sub(&points[v], &origin));
        let n = norm(&r);
        if n < 1e-14 {
            return None;
        }
        basis.push(r.map(|x| x / n));
    }
    let mut best: Option<(Point6, f64)> = None;
    for axis in 0..DIM {
        let mut e = [0.0; DIM];
        e[axis] = 1.0;
        let r = residual(&basis, &e);
        let n = norm(&r);
        if best.map_or(true, |(_, m)| n > m) {
            best = Some((r, n));
        }
    }
    let (r, n) = best?;
    let mut normal = r.map(|x| x / n);
    let mut offset = dot(&normal, &origin);
    if dot(&normal, inside) > offset {
        normal = normal.map(|x| -x);
        offset = -offset;
    }
    Some((normal, offset))
}

/// Picks seven affinely independent points greedily; `None` if the set is
/// flat to within `tol`.
fn initial_simplex(points: &[Point6], tol: f64) -> Option<[usize; DIM + 1]> {
    let n = points.len();
    if n < DIM + 1 {
        return None;
    }
    let first = (0..n).max_by(|&a, &b| norm(&points[a]).total_cmp(&norm(&points[b])).then(b.cmp(&a)))?;
    let mut chosen = [first; DIM + 1];
    let mut basis: Vec<Point6> = Vec::with_capacity(DIM);
    for slot in 1..=DIM {
        let mut best = (0.0, usize::MAX, [0.0; DIM]);
        for i in 0..n {
            let r = residual(&basis, &sub(&points[i], &points[first]));
            let d = norm(&r);
            if d > best.0 {
                best = (d, i, r);
            }
        }
        if best.0 <= tol {
            return None;
        }
        chosen[slot] = best.1;
        basis.push(best.2.map(|x| x / best.0));
    }
    Some(chosen)
}

/// Convex hull facets of `points`. Points within `tol` of the current hull
/// are treated as inside.
pub fn convex_hull(points: &[Point6], tol: f64) -> Hull {
    let Some(simplex) = initial_simplex(points, tol) else {
        return Hull::Degenerate;
    };
    let mut inside = [0.0; DIM];
    for &v in &simplex {
        for i in 0..DIM {
            inside[i] += points[v][i] / (DIM + 1) as f64;
        }
    }

    let mut facets: Vec<Facet> = Vec::new();
    for skip in 0..=DIM {
        let mut vertices = [0usize; DIM];
        let mut k = 0;
        for (j, &v) in simplex.iter().enumerate() {
            if j != skip {
                vertices[k] = v;
                k += 1;
            }
        }
        let Some((normal, offset)) = plane(points, &vertices, &inside) else {
            return Hull::Degenerate;
        };
        facets.push(Facet { vertices, normal, offset, neighbors: [usize::MAX; DIM], alive: true });
    }
    // In a simplex every pair of facets is adjacent.
    for f in 0..=DIM {
        for i in 0..DIM {
            let missing = facets[f].vertices[i];
            let g = simplex.iter().position(|&v| v == missing).unwrap();
            facets[f].neighbors[i] = g;
        }
    }

    let mut in_simplex = alloc::vec![false; points.len()];
    for &v in &simplex {
        in_simplex[v] = true;
    }

    let mut visible: Vec<bool> = Vec::new();
    let mut stack: Vec<usize> = Vec::new();
    let mut seen: Vec<usize> = Vec::new();
    for (pi, p) in points.iter().enumerate() {
        if in_simplex[pi] {
            continue;
        }
        let Some(start) = facets.iter().position(|f| f.alive && f.distance(p) > tol) else {
            continue;
        };
        visible.clear();
        visible.resize(facets.len(), false);
        seen.clear();
        stack.clear();
        stack.push(start);
        visible[start] = true;
        while let Some(f) = stack.pop() {
            seen.push(f);
            for &g in &facets[f].neighbors {
                if !visible[g] && facets[g].distance(p) > tol {
                    visible[g] = true;
                    stack.push(g);
                }
            }
        }

        // Cone each horizon ridge to the new point. If any cone is flat the
        // point is numerically on the hull and is skipped.
        let mut cones: Vec<(usize, usize, [usize; DIM], Point6, f64)> = Vec::new();
        let mut flat = false;
        for &f in &seen {
            for i in 0..DIM {
                let g = facets[f].neighbors[i];
                if visible[g] {
                    continue;
                }
                let mut vertices = facets[f].vertices;
                vertices[i] = pi;
                match plane(points, &vertices, &inside) {
                    Some((normal, offset)) => cones.push((f, i, vertices, normal, offset)),
                    None => flat = true,
                }
            }
        }
        if flat {
            continue;
        }
        let mut ridges: BTreeMap<[usize; DIM - 1], usize> = BTreeMap::new();
        let first_new = facets.len();
        for (f, i, vertices, normal, offset) in cones {
            let g = facets[f].neighbors[i];
            let new = facets.len();
            let mut neighbors = [usize::MAX; DIM];
            neighbors[i] = g;
            if let Some(slot) = facets[g].neighbors.iter().position(|&x| x == f) {
                facets[g].neighbors[slot] = new;
            }
            facets.push(Facet { vertices, normal, offset, neighbors, alive: true });
            for j in 0..DIM {
                if j == i {
                    continue;
                }
                let mut key = [0usize; DIM - 1];
                let mut k = 0;
                for (m, &v) in vertices.iter().enumerate() {
                    if m != j {
                        key[k] = v;
                        k += 1;
                    }
                }
                key.sort_unstable();
                if let Some(other) = ridges.remove(&key) {
                    facets[new].neighbors[j] = other;
                    let slot = facets[other]
                        .vertices
                        .iter()
                        .position(|v| !key.contains(v))
                        .expect("ridge partner has one extra vertex");
                    facets[other].neighbors[slot] = new;
                } else {
                    ridges.insert(key, new);
                }
            }
        }
        for &f in &seen {
            facets[f].alive = false;
        }
        debug_assert!(facets[first_new..].iter().all(|f| f.neighbors.iter().all(|&n| n != usize::MAX)));
    }
    Hull::Full(facets.into_iter().filter(|f| f.alive).collect())
}
