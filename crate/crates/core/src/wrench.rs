//! Ferrari-Canny force-closure quality.

use alloc::vec::Vec;

use crate::collision::Contact;
use crate::error::{Error, Result};
use crate::hull::{convex_hull, Hull, Point6};
use crate::math::{cos, sin, Vec3};

pub const DEFAULT_MU: f64 = 0.5;
pub const DEFAULT_CONE_EDGES: usize = 8;
const HULL_TOLERANCE: f64 = 1e-10;
const TANGENT_MIN: f64 = 1e-9;

fn total_order(a: &Contact, b: &Contact) -> core::cmp::Ordering {
    let key = |c: &Contact| [c.point[0], c.point[1], c.point[2], c.normal[0], c.normal[1], c.normal[2]];
    let (ka, kb) = (key(a), key(b));
    ka.iter().zip(kb.iter()).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(core::cmp::Ordering::Equal)
}

/// First tangent direction at contact `i`: the in-plane component of the
/// direction to the centroid, else to another contact, else a fixed axis.
fn tangent(contacts: &[Contact], i: usize, centroid: Vec3) -> Vec3 {
    let n = contacts[i].normal;
    let project = |d: Vec3| (d - n * n.dot(d)).try_normalize().filter(|_| (d - n * n.dot(d)).norm() > TANGENT_MIN);
    if let Some(t) = project(centroid - contacts[i].point) {
        return t;
    }
    for (j, c) in contacts.iter().enumerate() {
        if j != i {
            if let Some(t) = project(c.point - contacts[i].point) {
                return t;
            }
        }
    }
    n.any_orthonormal()
}

/// Primitive contact wrenches: `edges` friction-cone rays per contact, each
/// with unit normal component, paired with torques about the contact
/// centroid divided by the largest contact-to-centroid distance.
pub fn primitive_wrenches(contacts: &[Contact], mu: f64, edges: usize) -> Vec<Point6> {
    if contacts.is_empty() {
        return Vec::new();
    }
    let mut sorted: Vec<Contact> = contacts.to_vec();
    sorted.sort_by(total_order);
    let mut centroid = Vec3::ZERO;
    for c in &sorted {
        centroid = centroid + c.point;
    }
    centroid = centroid * (1.0 / sorted.len() as f64);
    let rho = sorted.iter().map(|c| c.point.distance(centroid)).fold(0.0, f64::max);
    let inv_rho = if rho > 0.0 { 1.0 / rho } else { 1.0 };

    let mut out = Vec::with_capacity(sorted.len() * edges);
    for i in 0..sorted.len() {
        let c = &sorted[i];
        let inward = -c.normal;
        let t1 = tangent(&sorted, i, centroid);
        let t2 = inward.cross(t1);
        let arm = (c.point - centroid) * inv_rho;
        for e in 0..edges {
            let theta = 2.0 * core::f64::consts::PI * e as f64 / edges as f64;
            let f = inward + (t1 * cos(theta) + t2 * sin(theta)) * mu;
            let tau = arm.cross(f);
            out.push([f[0], f[1], f[2], tau[0], tau[1], tau[2]]);
        }
    }
    out
}

/// Radius of the largest origin-centred ball inside the convex hull of the
/// primitive wrenches; zero when the origin is not strictly inside or the
/// wrenches span fewer than six dimensions.
///
/// Contacts are put in a canonical order first, so permuting them gives a
/// bit-identical result.
pub fn force_closure_epsilon(contacts: &[Contact], mu: f64, edges: usize) -> Result<f64> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(Error::Parameter(alloc::format!("friction coefficient must be positive, got {mu}")));
    }
    if edges < 3 {
        return Err(Error::Parameter(alloc::format!("friction cone needs at least 3 edges, got {edges}")));
    }
    if contacts.len() < 2 {
        return Ok(0.0);
    }
    let w = primitive_wrenches(contacts, mu, edges);
    match convex_hull(&w, HULL_TOLERANCE) {
        Hull::Degenerate => Ok(0.0),
        Hull::Full(facets) => {
            let eps = facets.iter().map(|f| f.offset).fold(f64::INFINITY, f64::min);
            Ok(if eps > HULL_TOLERANCE { eps } else { 0.0 })
        }
    }
}
