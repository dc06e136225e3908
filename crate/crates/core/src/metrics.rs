//! Rectangle-metric evaluation.
//!
//! A predicted grasp counts as correct when some annotated rectangle overlaps
//! it by more than the IoU threshold and their axes differ by at most 30
//! degrees.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{angle_offset, rect_iou, GraspRectangle};
use crate::ground_truth::GraspScene;

pub const ANGLE_GATE_DEG: f64 = 30.0;
pub const DEFAULT_THRESHOLDS: [f64; 4] = [0.25, 0.30, 0.50, 0.75];
pub const REPORT_VERSION: u32 = 1;

/// The rectangle criterion on precomputed values: IoU strictly above the
/// threshold and angle offset within the gate (inclusive).
pub fn passes_gate(iou: f64, offset_deg: f64, iou_threshold: f64) -> bool {
    iou > iou_threshold && offset_deg <= ANGLE_GATE_DEG
}

fn require_gts(gts: &[GraspRectangle]) -> Result<()> {
    if gts.is_empty() {
        Err(Error::EmptyGroundTruth)
    } else {
        Ok(())
    }
}

pub fn grasp_success(pred: &GraspRectangle, gts: &[GraspRectangle], iou_threshold: f64) -> Result<bool> {
    require_gts(gts)?;
    Ok(gts
        .iter()
        .any(|gt| passes_gate(rect_iou(pred, gt), angle_offset(pred.theta, gt.theta), iou_threshold)))
}

/// Best IoU among annotations within the angle gate; 0 if none qualifies.
pub fn scene_best_iou(pred: &GraspRectangle, gts: &[GraspRectangle]) -> Result<f64> {
    require_gts(gts)?;
    Ok(gts
        .iter()
        .filter(|gt| angle_offset(pred.theta, gt.theta) <= ANGLE_GATE_DEG)
        .map(|gt| rect_iou(pred, gt))
        .fold(0.0, f64::max))
}

/// Best IoU ignoring the angle gate.
pub fn scene_best_iou_raw(pred: &GraspRectangle, gts: &[GraspRectangle]) -> Result<f64> {
    require_gts(gts)?;
    Ok(gts.iter().map(|gt| rect_iou(pred, gt)).fold(0.0, f64::max))
}

/// Report key for a threshold: at least two decimals (`0.5` -> `"0.50"`).
pub fn threshold_key(t: f64) -> String {
    let s = format!("{t}");
    match s.find('.') {
        Some(dot) if s.len() - dot > 2 => s,
        Some(dot) => format!("{s}{}", "0".repeat(2 - (s.len() - dot - 1))),
        None => format!("{s}.00"),
    }
}

/// Validates, sorts and de-duplicates IoU thresholds.
pub fn normalize_thresholds(thresholds: &[f64]) -> Result<Vec<f64>> {
    let mut out = thresholds.to_vec();
    if let Some(bad) = out.iter().find(|t| !(**t > 0.0 && **t < 1.0)) {
        return Err(Error::InvalidConfig(format!("threshold {bad} is not in (0, 1)")));
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneEval {
    pub scene_id: String,
    pub best_iou: f64,
    pub best_iou_raw: f64,
    /// Success per threshold key.
    pub success_at: BTreeMap<String, bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub report_version: u32,
    pub scene_count: usize,
    pub thresholds: Vec<f64>,
    /// Fraction of scenes (0..=1) succeeding per threshold key.
    pub success_rate: BTreeMap<String, f64>,
    pub iou_avg: f64,
    pub iou_avg_raw: f64,
    pub per_scene: Vec<SceneEval>,
}

impl EvalReport {
    pub fn success_rate_at(&self, threshold: f64) -> Option<f64> {
        self.success_rate.get(&threshold_key(threshold)).copied()
    }

    /// Aligned plain-text summary table.
    pub fn to_table(&self) -> String {
        let mut headers = vec!["scenes".to_string()];
        let mut values = vec![self.scene_count.to_string()];
        for &t in &self.thresholds {
            let key = threshold_key(t);
            headers.push(format!("success@{key}"));
            values.push(format!("{:.2}%", 100.0 * self.success_rate[&key]));
        }
        headers.push("iou_avg".into());
        values.push(format!("{:.4}", self.iou_avg));
        headers.push("iou_avg_raw".into());
        values.push(format!("{:.4}", self.iou_avg_raw));

        let widths: Vec<usize> = headers.iter().zip(&values).map(|(h, v)| h.len().max(v.len())).collect();
        let mut out = String::new();
        let line = |cells: &[String], out: &mut String| {
            let row: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
            let _ = writeln!(out, "{}", row.join("  "));
        };
        line(&headers, &mut out);
        line(&values, &mut out);
        out
    }
}

/// Scores one predicted grasp per scene against the scene annotations.
///
/// Scenes are reported in `scene_id` order regardless of input order.
pub fn evaluate_dataset(
    preds: &HashMap<String, GraspRectangle>,
    scenes: &[GraspScene],
    thresholds: &[f64],
) -> Result<EvalReport> {
    let thresholds = normalize_thresholds(thresholds)?;
    let mut ordered: Vec<&GraspScene> = scenes.iter().collect();
    ordered.sort_by(|a, b| a.scene_id.cmp(&b.scene_id));
    if let Some(w) = ordered.windows(2).find(|w| w[0].scene_id == w[1].scene_id) {
        return Err(Error::DuplicateScene(w[0].scene_id.clone()));
    }

    let mut per_scene = Vec::with_capacity(ordered.len());
    for scene in ordered {
        let pred = preds
            .get(&scene.scene_id)
            .ok_or_else(|| Error::MissingPrediction(scene.scene_id.clone()))?;
        let best_iou = scene_best_iou(pred, &scene.grasps)?;
        let best_iou_raw = scene_best_iou_raw(pred, &scene.grasps)?;
        let mut success_at = BTreeMap::new();
        for &t in &thresholds {
            success_at.insert(threshold_key(t), grasp_success(pred, &scene.grasps, t)?);
        }
        per_scene.push(SceneEval {
            scene_id: scene.scene_id.clone(),
            best_iou,
            best_iou_raw,
            success_at,
        });
    }
    Ok(aggregate(per_scene, thresholds))
}

/// Builds the aggregate report from per-scene results.
pub fn aggregate(per_scene: Vec<SceneEval>, thresholds: Vec<f64>) -> EvalReport {
    let n = per_scene.len();
    let mean = |f: &dyn Fn(&SceneEval) -> f64| {
        if n == 0 {
            0.0
        } else {
            per_scene.iter().map(f).sum::<f64>() / n as f64
        }
    };
    let iou_avg = mean(&|s| s.best_iou);
    let iou_avg_raw = mean(&|s| s.best_iou_raw);
    let success_rate = thresholds
        .iter()
        .map(|&t| {
            let key = threshold_key(t);
            let hits = per_scene
                .iter()
                .filter(|s| s.success_at.get(&key) == Some(&true))
                .count();
            let rate = if n == 0 { 0.0 } else { hits as f64 / n as f64 };
            (key, rate)
        })
        .collect();
    EvalReport {
        report_version: REPORT_VERSION,
        scene_count: n,
        thresholds,
        success_rate,
        iou_avg,
        iou_avg_raw,
        per_scene,
    }
}
