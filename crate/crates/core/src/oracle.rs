//! Planar parallel-jaw grasp check against an occupancy mask.
//!
//! Two rectangular jaws sit just outside the two ends of the grasp axis. A
//! grasp fails if a jaw leaves the image or lands on the object, and misses if
//! nothing occupies the region the jaws close over. No forces or friction are
//! modelled; outcomes are a proxy for physical grasp trials.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{pixel_bounds, GraspRectangle, PixelMask};
use crate::ground_truth::GraspScene;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraspOutcome {
    Success,
    JawCollision,
    Miss,
    OutOfBounds,
}

impl fmt::Display for GraspOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GraspOutcome::Success => "success",
            GraspOutcome::JawCollision => "jaw_collision",
            GraspOutcome::Miss => "miss",
            GraspOutcome::OutOfBounds => "out_of_bounds",
        })
    }
}

/// Parallel-plate gripper, all lengths in pixels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GripperParams {
    /// Jaw extent along the grasp axis.
    pub jaw_thickness: f64,
    /// Jaw extent across the grasp axis.
    pub jaw_length: f64,
    pub w_min: f64,
    pub w_max: f64,
}

impl Default for GripperParams {
    fn default() -> Self {
        Self {
            jaw_thickness: 2.0,
            jaw_length: 6.0,
            w_min: 2.0,
            w_max: 40.0,
        }
    }
}

impl GripperParams {
    pub fn validate(&self) -> Result<()> {
        let ok = self.jaw_thickness > 0.0
            && self.jaw_length > 0.0
            && self.w_min >= 0.0
            && self.w_min < self.w_max
            && self.w_max.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("invalid gripper parameters {self:?}")))
        }
    }
}

/// The two jaw footprints for grasp `g`.
pub fn jaw_rects(g: &GraspRectangle, gp: &GripperParams) -> [GraspRectangle; 2] {
    let (c, s) = g.axis();
    let off = 0.5 * g.width + 0.5 * gp.jaw_thickness;
    [1.0, -1.0].map(|sign| GraspRectangle {
        cx: g.cx + sign * off * c,
        cy: g.cy + sign * off * s,
        theta: g.theta,
        width: gp.jaw_thickness,
        height: gp.jaw_length,
    })
}

/// Region swept by the closing jaws.
pub fn closing_region(g: &GraspRectangle, gp: &GripperParams) -> GraspRectangle {
    GraspRectangle {
        height: gp.jaw_length,
        ..*g
    }
}

enum Footprint {
    OutOfImage,
    Hits(bool),
}

/// Scans every pixel whose centre lies in `r`, including pixels past the
/// image border.
fn footprint(mask: &PixelMask, r: &GraspRectangle) -> Footprint {
    let (row0, row1, col0, col1) = pixel_bounds(r);
    let mut hit = false;
    for i in row0..=row1 {
        for j in col0..=col1 {
            if !r.contains(j as f64 + 0.5, i as f64 + 0.5) {
                continue;
            }
            if i < 0 || j < 0 || i >= mask.height as i64 || j >= mask.width as i64 {
                return Footprint::OutOfImage;
            }
            hit |= mask.get(i as usize, j as usize);
        }
    }
    Footprint::Hits(hit)
}

pub fn check_grasp(mask: &PixelMask, g: &GraspRectangle, gp: &GripperParams) -> GraspOutcome {
    let jaws = jaw_rects(g, gp);
    let mut collision = false;
    for jaw in &jaws {
        match footprint(mask, jaw) {
            Footprint::OutOfImage => return GraspOutcome::OutOfBounds,
            Footprint::Hits(h) => collision |= h,
        }
    }
    if collision {
        return GraspOutcome::JawCollision;
    }
    if !(g.width >= gp.w_min && g.width <= gp.w_max) {
        return GraspOutcome::Miss;
    }
    match footprint(mask, &closing_region(g, gp)) {
        Footprint::Hits(true) => GraspOutcome::Success,
        _ => GraspOutcome::Miss,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SceneOutcome {
    pub scene_id: String,
    pub outcome: GraspOutcome,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct OutcomeCounts {
    pub success: usize,
    pub jaw_collision: usize,
    pub miss: usize,
    pub out_of_bounds: usize,
}

impl OutcomeCounts {
    pub fn add(&mut self, o: GraspOutcome) {
        match o {
            GraspOutcome::Success => self.success += 1,
            GraspOutcome::JawCollision => self.jaw_collision += 1,
            GraspOutcome::Miss => self.miss += 1,
            GraspOutcome::OutOfBounds => self.out_of_bounds += 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub report_version: u32,
    pub gripper: GripperParams,
    pub scene_count: usize,
    pub success_rate: f64,
    pub counts: OutcomeCounts,
    pub per_scene: Vec<SceneOutcome>,
}

impl OracleReport {
    pub fn from_outcomes(mut per_scene: Vec<SceneOutcome>, gripper: GripperParams) -> Self {
        per_scene.sort_by(|a, b| a.scene_id.cmp(&b.scene_id));
        let mut counts = OutcomeCounts::default();
        per_scene.iter().for_each(|s| counts.add(s.outcome));
        let n = per_scene.len();
        Self {
            report_version: crate::metrics::REPORT_VERSION,
            gripper,
            scene_count: n,
            success_rate: if n == 0 { 0.0 } else { counts.success as f64 / n as f64 },
            counts,
            per_scene,
        }
    }
}

/// Checks one predicted grasp per scene against the scene's mask.
pub fn evaluate_oracle(
    scenes: &[GraspScene],
    preds: &HashMap<String, GraspRectangle>,
    gp: &GripperParams,
) -> Result<OracleReport> {
    gp.validate()?;
    let mut out = Vec::with_capacity(scenes.len());
    for scene in scenes {
        let mask = scene
            .mask
            .as_ref()
            .ok_or_else(|| Error::MissingMask(scene.scene_id.clone()))?;
        let pred = preds
            .get(&scene.scene_id)
            .ok_or_else(|| Error::MissingPrediction(scene.scene_id.clone()))?;
        out.push(SceneOutcome {
            scene_id: scene.scene_id.clone(),
            outcome: check_grasp(mask, pred, gp),
        });
    }
    if let Some(w) = {
        out.sort_by(|a, b| a.scene_id.cmp(&b.scene_id));
        out.windows(2).find(|w| w[0].scene_id == w[1].scene_id)
    } {
        return Err(Error::DuplicateScene(w[0].scene_id.clone()));
    }
    Ok(OracleReport::from_outcomes(out, *gp))
}

/// Fraction of scenes whose predicted grasp succeeds.
pub fn sgt_proxy_rate(
    scenes: &[GraspScene],
    preds: &HashMap<String, GraspRectangle>,
    gp: &GripperParams,
) -> Result<f64> {
    Ok(evaluate_oracle(scenes, preds, gp)?.success_rate)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// 20x20 mask with the 6x6 block of pixels 7..=12 occupied.
    pub(crate) fn square_mask() -> PixelMask {
        let mut m = PixelMask::new(20, 20);
        for i in 7..13 {
            for j in 7..13 {
                m.set(i, j, true);
            }
        }
        m
    }

    fn grasp(width: f64) -> GraspRectangle {
        GraspRectangle::new(10.0, 10.0, 0.0, width, 5.0).unwrap()
    }

    #[test]
    fn square_examples() {
        let gp = GripperParams::default();
        let m = square_mask();
        assert_eq!(check_grasp(&m, &grasp(10.0), &gp), GraspOutcome::Success);
        assert_eq!(check_grasp(&m, &grasp(4.0), &gp), GraspOutcome::JawCollision);
        assert_eq!(
            check_grasp(&PixelMask::new(20, 20), &grasp(10.0), &gp),
            GraspOutcome::Miss
        );
    }

    #[test]
    fn width_limits_miss() {
        let m = square_mask();
        let gp = GripperParams {
            w_max: 8.0,
            ..GripperParams::default()
        };
        assert_eq!(check_grasp(&m, &grasp(10.0), &gp), GraspOutcome::Miss);
        let gp = GripperParams {
            w_min: 12.0,
            ..GripperParams::default()
        };
        assert_eq!(check_grasp(&m, &grasp(10.0), &gp), GraspOutcome::Miss);
    }

    #[test]
    fn jaw_leaving_image() {
        let m = square_mask();
        let g = GraspRectangle::new(10.0, 10.0, 0.0, 18.0, 5.0).unwrap();
        assert_eq!(
            check_grasp(&m, &g, &GripperParams::default()),
            GraspOutcome::OutOfBounds
        );
    }

    #[test]
    fn rate_and_missing_inputs() {
        let gp = GripperParams::default();
        let ok = GraspScene::new("ok", 20, 20, vec![grasp(10.0)])
            .unwrap()
            .with_mask(square_mask())
            .unwrap();
        let bad = GraspScene::new("bad", 20, 20, vec![grasp(4.0)])
            .unwrap()
            .with_mask(square_mask())
            .unwrap();
        let preds: HashMap<_, _> = [("ok".to_string(), grasp(10.0)), ("bad".to_string(), grasp(4.0))].into();
        let rate = sgt_proxy_rate(&[ok.clone(), bad], &preds, &gp).unwrap();
        assert_eq!(rate, 0.5);
        assert_eq!(sgt_proxy_rate(std::slice::from_ref(&ok), &preds, &gp).unwrap(), 1.0);

        let no_mask = GraspScene::new("ok", 20, 20, vec![grasp(10.0)]).unwrap();
        assert!(matches!(
            sgt_proxy_rate(&[no_mask], &preds, &gp),
            Err(Error::MissingMask(_))
        ));
        assert!(matches!(
            sgt_proxy_rate(&[ok], &HashMap::new(), &gp),
            Err(Error::MissingPrediction(_))
        ));
    }
}
