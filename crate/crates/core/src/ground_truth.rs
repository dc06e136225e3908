//! Ground-truth grasp maps from annotated grasp rectangles.
//!
//! Every annotated grasp marks the pixels of its centre third as valid grasp
//! centres. Inside that region the quality target is either a flat 1
//! ([`MapMode::Binary`]), a Gaussian of the distance to the grasp centre held
//! above a floor ([`MapMode::Soft`]), or the bare Gaussian ([`MapMode::Strong`]).
//! Grasps are split into `bins` angle ranges so that one pixel can carry a
//! different grasp per range.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{center_third, for_each_pixel_in, GraspRectangle, PixelMask, Point};
use crate::raster::Raster;
use crate::stack::GraspMapStack;

/// Annotations and optional rasters for one image.
#[derive(Debug, Clone, PartialEq)]
pub struct GraspScene {
    pub scene_id: String,
    pub rows: usize,
    pub cols: usize,
    pub grasps: Vec<GraspRectangle>,
    pub mask: Option<PixelMask>,
    pub depth: Option<Raster<f32>>,
    pub rgb: Option<Raster<[u8; 3]>>,
}

impl GraspScene {
    /// Validates dimensions and that every grasp centre lies inside the image.
    pub fn new(scene_id: impl Into<String>, rows: usize, cols: usize, grasps: Vec<GraspRectangle>) -> Result<Self> {
        let scene_id = scene_id.into();
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidConfig(format!(
                "scene `{scene_id}` has empty image dimensions {cols}x{rows}"
            )));
        }
        for (index, g) in grasps.iter().enumerate() {
            let inside = g.cx >= 0.0 && g.cx < cols as f64 && g.cy >= 0.0 && g.cy < rows as f64;
            if !inside {
                return Err(Error::GraspOutsideImage {
                    scene: scene_id,
                    index,
                    cx: g.cx,
                    cy: g.cy,
                    rows,
                    cols,
                });
            }
        }
        Ok(Self {
            scene_id,
            rows,
            cols,
            grasps,
            mask: None,
            depth: None,
            rgb: None,
        })
    }

    pub fn with_mask(mut self, mask: PixelMask) -> Result<Self> {
        if mask.width != self.cols || mask.height != self.rows {
            return Err(Error::ShapeMismatch(format!(
                "mask is {}x{}, scene `{}` is {}x{}",
                mask.width, mask.height, self.scene_id, self.cols, self.rows
            )));
        }
        self.mask = Some(mask);
        Ok(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapMode {
    Binary,
    Soft,
    Strong,
}

impl FromStr for MapMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binary" => Ok(MapMode::Binary),
            "soft" => Ok(MapMode::Soft),
            "strong" => Ok(MapMode::Strong),
            other => Err(Error::InvalidConfig(format!("unknown map mode `{other}`"))),
        }
    }
}

impl fmt::Display for MapMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MapMode::Binary => "binary",
            MapMode::Soft => "soft",
            MapMode::Strong => "strong",
        })
    }
}

/// How the soft map combines the Gaussian ratio with `soft_floor`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SoftRule {
    /// `max(ratio, floor)`: 1 at the centre, never below the floor.
    #[default]
    Floor,
    /// `min(ratio, floor)`: the formula as literally typeset, capped at the floor.
    LiteralMin,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MapGenConfig {
    pub mode: MapMode,
    /// Gaussian standard deviation in pixels.
    pub sigma: f64,
    pub bins: usize,
    /// Maximum gripper opening in pixels; the width channel stores `width / w_max`.
    pub w_max: f64,
    pub soft_floor: f64,
    pub soft_rule: SoftRule,
}

impl Default for MapGenConfig {
    fn default() -> Self {
        Self {
            mode: MapMode::Strong,
            sigma: 1.0,
            bins: 3,
            w_max: 150.0,
            soft_floor: 0.9,
            soft_rule: SoftRule::Floor,
        }
    }
}

impl MapGenConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma.is_finite() && self.sigma > 0.0) {
            return Err(Error::InvalidConfig(format!("sigma must be > 0, got {}", self.sigma)));
        }
        if self.bins == 0 {
            return Err(Error::InvalidConfig("bins must be >= 1".into()));
        }
        if !(self.w_max.is_finite() && self.w_max > 0.0) {
            return Err(Error::InvalidConfig(format!("w_max must be > 0, got {}", self.w_max)));
        }
        if !(self.soft_floor > 0.0 && self.soft_floor < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "soft_floor must lie in (0, 1), got {}",
                self.soft_floor
            )));
        }
        Ok(())
    }
}

/// Double-angle components `(cos 2theta, sin 2theta)`.
pub fn encode_angle(theta: f64) -> (f64, f64) {
    let (s, c) = (2.0 * theta).sin_cos();
    (c, s)
}

/// Angle bin of `theta` among `bins` equal, left-closed ranges over `[-pi/2, pi/2)`.
pub fn assign_bin(theta: f64, bins: usize) -> usize {
    debug_assert!(bins >= 1);
    let idx = ((theta + FRAC_PI_2) / (PI / bins as f64)).floor();
    if idx <= 0.0 {
        0
    } else {
        (idx as usize).min(bins - 1)
    }
}

/// `N(d, sigma^2) / N(0, sigma^2)`.
pub fn gaussian_ratio(d: f64, sigma: f64) -> f64 {
    (-(d * d) / (2.0 * sigma * sigma)).exp()
}

/// Quality target contributed by one grasp at distance `d` from its centre.
pub fn pixel_quality(d: f64, in_center_third: bool, cfg: &MapGenConfig) -> f64 {
    if !in_center_third {
        return 0.0;
    }
    match cfg.mode {
        MapMode::Binary => 1.0,
        MapMode::Strong => gaussian_ratio(d, cfg.sigma),
        MapMode::Soft => {
            let ratio = gaussian_ratio(d, cfg.sigma);
            match cfg.soft_rule {
                SoftRule::Floor => ratio.max(cfg.soft_floor),
                SoftRule::LiteralMin => ratio.min(cfg.soft_floor),
            }
        }
    }
}

#[derive(Clone, Copy)]
struct Winner {
    quality: f64,
    width: f64,
    grasp: usize,
}

/// Rasterises every grasp of `scene` into a `cfg.bins`-bin map stack.
///
/// At each pixel and bin the quality is the maximum contribution over the
/// grasps in that bin. The angle and width channels copy the grasp that wins
/// that maximum; equal contributions go to the narrower grasp, then to the
/// earlier annotation.
///
/// Pixels inside some centre third always carry a strictly positive quality:
/// Gaussian tails that underflow single precision are stored as the smallest
/// normal `f32`, so all three modes share the same support.
pub fn generate_maps(scene: &GraspScene, cfg: &MapGenConfig) -> Result<GraspMapStack<f32>> {
    cfg.validate()?;
    if scene.grasps.is_empty() {
        return Err(Error::EmptyAnnotations(scene.scene_id.clone()));
    }
    let (rows, cols) = (scene.rows, scene.cols);
    let plane = rows * cols;
    let mut best: Vec<Option<Winner>> = vec![None; cfg.bins * plane];

    for (gi, g) in scene.grasps.iter().enumerate() {
        let bin = assign_bin(g.theta, cfg.bins);
        let third = center_third(g);
        let centre = g.center();
        let slots = &mut best[bin * plane..(bin + 1) * plane];
        for_each_pixel_in(&third, rows, cols, |i, j| {
            let d = centre.distance(Point::new(j as f64 + 0.5, i as f64 + 0.5));
            let quality = pixel_quality(d, true, cfg);
            let slot = &mut slots[i * cols + j];
            let replace = match slot {
                None => true,
                Some(w) => quality > w.quality || (quality == w.quality && g.width < w.width),
            };
            if replace {
                *slot = Some(Winner {
                    quality,
                    width: g.width,
                    grasp: gi,
                });
            }
        });
    }

    let mut stack = GraspMapStack::<f32>::zeros(cfg.bins, rows, cols);
    for (k, slot) in best.iter().enumerate() {
        if let Some(w) = slot {
            let g = &scene.grasps[w.grasp];
            let (c, s) = encode_angle(g.theta);
            stack.q[k] = (w.quality as f32).max(f32::MIN_POSITIVE);
            stack.cos[k] = c as f32;
            stack.sin[k] = s as f32;
            stack.width[k] = (g.width.min(cfg.w_max) / cfg.w_max) as f32;
        }
    }
    Ok(stack)
}

/// Per-bin masks of pixels with positive quality.
pub fn support<T: num_traits::Float>(stack: &GraspMapStack<T>) -> Vec<PixelMask> {
    (0..stack.bins)
        .map(|b| {
            let data = stack
                .plane(crate::stack::Channel::Quality, b)
                .iter()
                .map(|&v| v > T::zero())
                .collect();
            PixelMask {
                width: stack.cols,
                height: stack.rows,
                data,
            }
        })
        .collect()
}

/// Pixels with positive quality in any bin.
pub fn union_support<T: num_traits::Float>(stack: &GraspMapStack<T>) -> PixelMask {
    let mut out = PixelMask::new(stack.cols, stack.rows);
    for m in support(stack) {
        for (o, v) in out.data.iter_mut().zip(m.data) {
            *o |= v;
        }
    }
    out
}
