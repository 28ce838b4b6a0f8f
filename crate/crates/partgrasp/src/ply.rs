//! ASCII PLY point clouds: a `vertex` element with `x y z` and optional
//! `nx ny nz` float properties.

use std::fmt::Write as _;
use std::path::Path;

use partgrasp_core::{PointCloud, Vec3};

use crate::error::{Error, Result};

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Ply { line, message: message.into() }
}

/// Parses an ASCII PLY document. Properties other than position and normal
/// are ignored; elements after `vertex` are skipped.
pub fn parse_ply(text: &str) -> Result<PointCloud> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    match lines.next() {
        Some((_, "ply")) => {}
        _ => return Err(err(1, "missing `ply` magic")),
    }

    let mut vertex_count = None;
    let mut in_vertex = false;
    let mut props: Vec<String> = Vec::new();
    let mut rows_before = 0usize;
    loop {
        let Some((no, line)) = lines.next() else {
            return Err(err(0, "header has no `end_header`"));
        };
        let mut words = line.split_whitespace();
        match words.next() {
            Some("format") => {
                if words.next() != Some("ascii") {
                    return Err(err(no, "only the ascii format is supported"));
                }
            }
            Some("comment") | Some("obj_info") | None => {}
            Some("element") => {
                let name = words.next().ok_or_else(|| err(no, "element without a name"))?;
                let count: usize =
                    words.next().and_then(|c| c.parse().ok()).ok_or_else(|| err(no, "element without a count"))?;
                in_vertex = name == "vertex";
                if in_vertex {
                    vertex_count = Some(count);
                } else if vertex_count.is_none() {
                    rows_before += count;
                }
            }
            Some("property") => {
                if in_vertex {
                    let kind = words.next().ok_or_else(|| err(no, "property without a type"))?;
                    if kind == "list" {
                        return Err(err(no, "list properties on vertices are not supported"));
                    }
                    props.push(words.next().ok_or_else(|| err(no, "property without a name"))?.to_string());
                }
            }
            Some("end_header") => break,
            Some(other) => return Err(err(no, format!("unexpected header keyword `{other}`"))),
        }
    }

    let count = vertex_count.ok_or_else(|| err(0, "no vertex element"))?;
    let column = |name: &str| props.iter().position(|p| p == name);
    let (Some(ix), Some(iy), Some(iz)) = (column("x"), column("y"), column("z")) else {
        return Err(err(0, "vertex element needs x, y and z"));
    };
    let normal_cols = match (column("nx"), column("ny"), column("nz")) {
        (Some(a), Some(b), Some(c)) => Some([a, b, c]),
        (None, None, None) => None,
        _ => return Err(err(0, "normals need all of nx, ny and nz")),
    };

    for _ in 0..rows_before {
        lines.next();
    }
    let mut points = Vec::with_capacity(count);
    let mut normals = Vec::with_capacity(if normal_cols.is_some() { count } else { 0 });
    let mut values = Vec::with_capacity(props.len());
    for _ in 0..count {
        let (no, line) = lines.next().ok_or_else(|| err(0, format!("expected {count} vertices")))?;
        values.clear();
        for w in line.split_whitespace() {
            values.push(w.parse::<f64>().map_err(|_| err(no, format!("bad number `{w}`")))?);
        }
        if values.len() != props.len() {
            return Err(err(no, format!("expected {} values, found {}", props.len(), values.len())));
        }
        points.push(Vec3::new(values[ix], values[iy], values[iz]));
        if let Some([a, b, c]) = normal_cols {
            normals.push(Vec3::new(values[a], values[b], values[c]));
        }
    }
    let cloud =
        if normal_cols.is_some() { PointCloud::with_normals(points, normals)? } else { PointCloud::new(points)? };
    Ok(cloud)
}

/// Serializes a cloud as ASCII PLY. Numbers use the shortest decimal form
/// that reads back to the same `f64`.
pub fn format_ply(cloud: &PointCloud) -> String {
    let mut out = String::new();
    out.push_str("ply\nformat ascii 1.0\n");
    let _ = writeln!(out, "element vertex {}", cloud.len());
    out.push_str("property float x\nproperty float y\nproperty float z\n");
    if cloud.has_normals() {
        out.push_str("property float nx\nproperty float ny\nproperty float nz\n");
    }
    out.push_str("end_header\n");
    for (i, p) in cloud.points().iter().enumerate() {
        let _ = write!(out, "{} {} {}", p.x(), p.y(), p.z());
        if let Some(n) = cloud.normals() {
            let n = n[i];
            let _ = write!(out, " {} {} {}", n.x(), n.y(), n.z());
        }
        out.push('\n');
    }
    out
}

pub fn read_ply(path: &Path) -> Result<PointCloud> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_ply(&text)
}

pub fn write_ply(path: &Path, cloud: &PointCloud) -> Result<()> {
    std::fs::write(path, format_ply(cloud)).map_err(|e| Error::io(path, e))
}
