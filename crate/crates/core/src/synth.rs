//! Seeded synthetic scenes: bars, L-shapes and rings with antipodal grasp
//! annotations.
//!
//! Bar grasps run across the bar at stations along its length, including
//! stations right at the ends. Their jaw size is large enough that the centre
//! third of an end grasp hangs past the end of the object, so part of the
//! binary ground-truth support lies off the object. Every kept annotation is
//! itself a successful grasp under the configured gripper.

use std::f64::consts::{FRAC_PI_2, PI};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::geometry::{GraspRectangle, PixelMask};
use crate::ground_truth::GraspScene;
use crate::oracle::{check_grasp, GraspOutcome, GripperParams};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthConfig {
    /// Square image side in pixels.
    pub size: usize,
    pub gripper: GripperParams,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            size: 96,
            gripper: GripperParams::default(),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Shape {
    Bar(Bar),
    L(Bar, Bar),
    Ring { cx: f64, cy: f64, r_in: f64, r_out: f64 },
}

#[derive(Debug, Clone, Copy)]
struct Bar {
    cx: f64,
    cy: f64,
    phi: f64,
    length: f64,
    thickness: f64,
}

impl Bar {
    fn rect(&self) -> GraspRectangle {
        GraspRectangle {
            cx: self.cx,
            cy: self.cy,
            theta: self.phi,
            width: self.length,
            height: self.thickness,
        }
    }

    fn point_at(&self, s: f64) -> (f64, f64) {
        (self.cx + s * self.phi.cos(), self.cy + s * self.phi.sin())
    }
}

fn snap(v: f64) -> f64 {
    v.floor() + 0.5
}

fn rasterize(shape: &Shape, size: usize) -> PixelMask {
    let mut mask = PixelMask::new(size, size);
    for i in 0..size {
        for j in 0..size {
            let (x, y) = (j as f64 + 0.5, i as f64 + 0.5);
            let inside = match shape {
                Shape::Bar(b) => b.rect().contains(x, y),
                Shape::L(a, b) => a.rect().contains(x, y) || b.rect().contains(x, y),
                Shape::Ring { cx, cy, r_in, r_out } => {
                    let d = (x - cx).hypot(y - cy);
                    d >= *r_in && d < *r_out
                }
            };
            mask.set(i, j, inside);
        }
    }
    mask
}

/// Grasp across a bar at station `s`, with the centre snapped to a pixel centre.
fn bar_grasp<R: Rng>(rng: &mut R, bar: &Bar, s: f64) -> GraspRectangle {
    let clearance = rng.random_range(2.0..4.0);
    let width = bar.thickness + 2.0 * clearance;
    let height = width * rng.random_range(0.6..0.9);
    let (x, y) = bar.point_at(s);
    GraspRectangle::new(snap(x), snap(y), bar.phi + FRAC_PI_2, width, height).expect("finite grasp")
}

fn bar_stations<R: Rng>(rng: &mut R, bar: &Bar) -> Vec<f64> {
    let half = 0.5 * bar.length;
    let count = rng.random_range(4..=7);
    let end_inset = rng.random_range(0.5..2.0);
    let span = half - end_inset;
    (0..count)
        .map(|k| -span + 2.0 * span * k as f64 / (count - 1) as f64)
        .collect()
}

fn random_bar<R: Rng>(rng: &mut R, size: f64) -> Bar {
    let length = rng.random_range(0.3 * size..0.6 * size);
    Bar {
        cx: size / 2.0 + rng.random_range(-0.08 * size..0.08 * size),
        cy: size / 2.0 + rng.random_range(-0.08 * size..0.08 * size),
        phi: rng.random_range(-FRAC_PI_2..FRAC_PI_2),
        length,
        thickness: rng.random_range(8.0..14.0),
    }
}

fn random_shape<R: Rng>(rng: &mut R, size: f64) -> (Shape, Vec<GraspRectangle>) {
    match rng.random_range(0..3) {
        0 => {
            let bar = random_bar(rng, size);
            let grasps = bar_stations(rng, &bar)
                .into_iter()
                .map(|s| bar_grasp(rng, &bar, s))
                .collect();
            (Shape::Bar(bar), grasps)
        }
        1 => {
            let thickness = rng.random_range(8.0..12.0);
            let phi = rng.random_range(-PI..PI);
            let (l1, l2) = (
                rng.random_range(0.3 * size..0.45 * size),
                rng.random_range(0.25 * size..0.4 * size),
            );
            let corner = (
                size / 2.0 - 0.15 * size * phi.cos() + rng.random_range(-3.0..3.0),
                size / 2.0 - 0.15 * size * phi.sin() + rng.random_range(-3.0..3.0),
            );
            let arm = |dir: f64, len: f64| {
                let s = 0.5 * (len - thickness);
                Bar {
                    cx: corner.0 + s * dir.cos(),
                    cy: corner.1 + s * dir.sin(),
                    phi: dir,
                    length: len + thickness,
                    thickness,
                }
            };
            let a = arm(phi, l1);
            let b = arm(phi + FRAC_PI_2, l2);
            let mut grasps = Vec::new();
            for bar in [a, b] {
                for s in bar_stations(rng, &bar) {
                    grasps.push(bar_grasp(rng, &bar, s));
                }
            }
            (Shape::L(a, b), grasps)
        }
        _ => {
            let r_out = rng.random_range(0.15 * size..0.23 * size);
            let wall = rng.random_range(5.0..8.0);
            let (cx, cy) = (
                size / 2.0 + rng.random_range(-4.0..4.0),
                size / 2.0 + rng.random_range(-4.0..4.0),
            );
            let r_mid = r_out - 0.5 * wall;
            let count = rng.random_range(5..=9);
            let offset = rng.random_range(0.0..2.0 * PI);
            let grasps = (0..count)
                .map(|k| {
                    let psi = offset + 2.0 * PI * k as f64 / count as f64;
                    let width = wall + 2.0 * rng.random_range(2.0..3.5);
                    let height = width * rng.random_range(0.6..0.9);
                    GraspRectangle::new(
                        snap(cx + r_mid * psi.cos()),
                        snap(cy + r_mid * psi.sin()),
                        psi,
                        width,
                        height,
                    )
                    .expect("finite grasp")
                })
                .collect();
            (
                Shape::Ring {
                    cx,
                    cy,
                    r_in: r_out - wall,
                    r_out,
                },
                grasps,
            )
        }
    }
}

/// Scene `index` of the corpus for `seed`. Each scene draws from its own
/// random stream, so scenes can be generated independently and in any order.
pub fn synth_scene(seed: u64, index: u64, cfg: &SynthConfig) -> GraspScene {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    let size = cfg.size as f64;
    let scene_id = format!("scene_{index:04}");
    loop {
        let (shape, candidates) = random_shape(&mut rng, size);
        let mask = rasterize(&shape, cfg.size);
        let mut grasps: Vec<GraspRectangle> = Vec::new();
        for g in candidates {
            let inside = g.cx >= 0.0 && g.cy >= 0.0 && g.cx < size && g.cy < size;
            if inside && check_grasp(&mask, &g, &cfg.gripper) == GraspOutcome::Success && !grasps.contains(&g) {
                grasps.push(g);
            }
        }
        if !grasps.is_empty() {
            return GraspScene::new(scene_id, cfg.size, cfg.size, grasps)
                .and_then(|s| s.with_mask(mask))
                .expect("synthetic scene is valid by construction");
        }
    }
}

pub fn synth_corpus(seed: u64, n: usize, cfg: &SynthConfig) -> Vec<GraspScene> {
    (0..n as u64).map(|i| synth_scene(seed, i, cfg)).collect()
}
