//! Scene files: a JSON document naming the object, its PLY cloud (relative
//! to the JSON file) and labelled part index sets.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use partgrasp_core::scene::ModeHint;
use partgrasp_core::{estimate_normals, SceneDescription};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ply::{read_ply, write_ply};

/// Neighbourhood size used when a loaded cloud has no normals.
pub const NORMAL_NEIGHBORS: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneFile {
    pub object_label: String,
    pub cloud_ply: String,
    pub parts: BTreeMap<String, Vec<usize>>,
    pub mode_hint: String,
}

/// Loads a scene and its cloud. Clouds without normals get PCA normals.
pub fn load_scene(path: &Path) -> Result<SceneDescription> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: SceneFile = serde_json::from_str(&text).map_err(|e| Error::Scene(format!("{}: {e}", path.display())))?;
    let mode_hint = ModeHint::parse(&file.mode_hint)
        .ok_or_else(|| Error::Scene(format!("mode_hint must be single, dual or auto, got `{}`", file.mode_hint)))?;
    let base = path.parent().unwrap_or(Path::new(""));
    let mut cloud = read_ply(&base.join(&file.cloud_ply))?;
    if !cloud.has_normals() {
        cloud = estimate_normals(&cloud, NORMAL_NEIGHBORS.min(cloud.len()))?;
    }
    Ok(SceneDescription::new(file.object_label, cloud, file.parts, mode_hint)?)
}

/// Writes `<dir>/<stem>.ply` and `<dir>/<stem>.json`; returns the JSON path.
pub fn save_scene(dir: &Path, stem: &str, scene: &SceneDescription) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let ply_name = format!("{stem}.ply");
    write_ply(&dir.join(&ply_name), &scene.cloud)?;
    let file = SceneFile {
        object_label: scene.object_label.clone(),
        cloud_ply: ply_name,
        parts: scene.parts.clone(),
        mode_hint: scene.mode_hint.as_str().to_string(),
    };
    let json_path = dir.join(format!("{stem}.json"));
    let mut text = serde_json::to_string_pretty(&file)?;
    text.push('\n');
    std::fs::write(&json_path, text).map_err(|e| Error::io(&json_path, e))?;
    Ok(json_path)
}
