//! Directory layouts read and written by the commands.
//!
//! A scene directory holds `grasps.txt` (annotation lines) plus `mask.png`,
//! or a `scene.json` document with its own image size. Tensors are
//! `<scene_id>.gmap`, predictions `<scene_id>.txt`.

use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};

use gaussgrasp::geometry::GraspRectangle;
use gaussgrasp::ground_truth::GraspScene;
use gaussgrasp::io::{
    decode_mask_png, degrees_to_theta, parse_annotations, parse_records, parse_scene_json, read_tensor,
};
use gaussgrasp::stack::GraspMapStack;

use crate::error::{CliError, CliResult};

pub const ANNOTATIONS: &str = "grasps.txt";
pub const MASK: &str = "mask.png";
pub const SCENE_JSON: &str = "scene.json";

pub fn read(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::io(path, e))
}

pub fn read_text(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

pub fn write(path: &Path, bytes: impl AsRef<[u8]>) -> CliResult<()> {
    fs::write(path, bytes).map_err(|e| CliError::io(path, e))
}

pub fn create_dir(path: &Path) -> CliResult<()> {
    fs::create_dir_all(path).map_err(|e| CliError::io(path, e))
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Invalid(e.to_string()))?;
    text.push('\n');
    write(path, text)
}

fn sorted_entries(dir: &Path) -> CliResult<Vec<PathBuf>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| CliError::io(dir, e))? {
        out.push(entry.map_err(|e| CliError::io(dir, e))?.path());
    }
    out.sort();
    Ok(out)
}

/// Scene directories under `root`, sorted by name.
pub fn scene_dirs(root: &Path) -> CliResult<Vec<PathBuf>> {
    Ok(sorted_entries(root)?.into_iter().filter(|p| p.is_dir()).collect())
}

/// Files in `dir` with extension `ext`, keyed by file stem and sorted.
pub fn files_with_ext(dir: &Path, ext: &str) -> CliResult<Vec<(String, PathBuf)>> {
    Ok(sorted_entries(dir)?
        .into_iter()
        .filter(|p| p.is_file() && p.extension().is_some_and(|e| e == ext))
        .filter_map(|p| Some((p.file_stem()?.to_str()?.to_string(), p)))
        .collect())
}

fn with_file(path: &Path, e: gaussgrasp::Error) -> CliError {
    if e.is_validation() {
        CliError::Invalid(format!("{}: {e}", path.display()))
    } else {
        CliError::Core(e)
    }
}

/// Loads one scene directory. The scene id is the directory name unless a
/// `scene.json` names one.
pub fn load_scene(dir: &Path) -> CliResult<GraspScene> {
    let id = dir
        .file_name()
        .and_then(|n| n.to_str())
        .ok_or_else(|| CliError::Invalid(format!("{}: scene directory name is not UTF-8", dir.display())))?;
    let json = dir.join(SCENE_JSON);
    let mask_path = dir.join(MASK);
    let mask = if mask_path.is_file() {
        Some(decode_mask_png(&read(&mask_path)?).map_err(|e| with_file(&mask_path, e))?)
    } else {
        None
    };

    let scene = if json.is_file() {
        parse_scene_json(&read_text(&json)?, id).map_err(|e| with_file(&json, e))?
    } else {
        let txt = dir.join(ANNOTATIONS);
        if !txt.is_file() {
            return Err(CliError::Invalid(format!(
                "{}: no {ANNOTATIONS} or {SCENE_JSON}",
                dir.display()
            )));
        }
        let Some(mask) = &mask else {
            return Err(CliError::Invalid(format!(
                "{}: neither {SCENE_JSON} nor {MASK} gives the image size",
                dir.display()
            )));
        };
        parse_annotations(&read_text(&txt)?, id, mask.height, mask.width).map_err(|e| with_file(&txt, e))?
    };
    match mask {
        Some(m) => scene.with_mask(m).map_err(|e| with_file(&mask_path, e)),
        None => Ok(scene),
    }
}

/// Loads every scene under `root`. I/O failures abort immediately; parse
/// and validation failures are collected so all offending files are reported.
pub fn load_scenes(root: &Path, pool: &rayon::ThreadPool) -> CliResult<Vec<GraspScene>> {
    use rayon::prelude::*;
    let dirs = scene_dirs(root)?;
    let loaded: Vec<CliResult<GraspScene>> = pool.install(|| dirs.par_iter().map(|d| load_scene(d)).collect());
    collect_all(loaded)
}

/// First I/O error wins; otherwise all validation messages are joined.
pub fn collect_all<T>(results: Vec<CliResult<T>>) -> CliResult<Vec<T>> {
    let mut ok = Vec::with_capacity(results.len());
    let mut invalid = Vec::new();
    for r in results {
        match r {
            Ok(v) => ok.push(v),
            Err(e) if e.exit_code() == 2 => invalid.push(e.to_string()),
            Err(e) => return Err(e),
        }
    }
    if invalid.is_empty() {
        Ok(ok)
    } else {
        Err(CliError::Invalid(invalid.join("\n")))
    }
}

pub fn load_tensor(path: &Path) -> CliResult<GraspMapStack<f32>> {
    read_tensor(&read(path)?).map_err(|e| with_file(path, e))
}

/// Parses a prediction file: the first annotation line is the scene's grasp.
/// Unlike ground truth, zero openings and jaw sizes are accepted since a
/// network can predict them.
pub fn parse_prediction(text: &str) -> gaussgrasp::Result<Option<GraspRectangle>> {
    let Some((line, rec)) = parse_records(text)?.into_iter().next() else {
        return Ok(None);
    };
    let finite = [rec.x, rec.y, rec.theta, rec.opening, rec.jaw_size]
        .iter()
        .all(|v| v.is_finite());
    if !finite || rec.opening < 0.0 || rec.jaw_size < 0.0 {
        return Err(gaussgrasp::Error::Parse {
            line,
            message: "prediction needs finite values and non-negative sizes".into(),
        });
    }
    Ok(Some(GraspRectangle {
        cx: rec.x,
        cy: rec.y,
        theta: degrees_to_theta(rec.theta),
        width: rec.opening,
        height: rec.jaw_size,
    }))
}

/// Reads `<scene_id>.txt` predictions from `dir`. An empty directory is an error.
pub fn load_predictions(dir: &Path) -> CliResult<HashMap<String, GraspRectangle>> {
    let files = files_with_ext(dir, "txt")?;
    if files.is_empty() {
        return Err(CliError::Invalid(format!("{}: no prediction files", dir.display())));
    }
    let mut preds = HashMap::new();
    let mut results = Vec::new();
    for (id, path) in files {
        let parsed = read_text(&path).and_then(|t| parse_prediction(&t).map_err(|e| with_file(&path, e)));
        results.push(match parsed {
            Ok(Some(g)) => {
                preds.insert(id, g);
                Ok(())
            }
            Ok(None) => Err(CliError::Invalid(format!("{}: no grasp line", path.display()))),
            Err(e) => Err(e),
        });
    }
    collect_all(results)?;
    Ok(preds)
}

pub fn require_masks(scenes: &[GraspScene]) -> CliResult<()> {
    let missing: Vec<&str> = scenes
        .iter()
        .filter(|s| s.mask.is_none())
        .map(|s| s.scene_id.as_str())
        .collect();
    if missing.is_empty() {
        Ok(())
    } else {
        Err(CliError::Invalid(format!(
            "missing {MASK} for scenes: {}",
            missing.join(", ")
        )))
    }
}
