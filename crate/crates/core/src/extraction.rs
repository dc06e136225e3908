//! Turning predicted grasp-map stacks back into grasp rectangles.

use num_traits::Float;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{normalize_angle, GraspRectangle};
use crate::stack::GraspMapStack;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecodedGrasp {
    pub rect: GraspRectangle,
    pub quality: f64,
    pub bin: usize,
    pub row: usize,
    pub col: usize,
}

/// Inverts the double-angle encoding: `atan2(sin, cos) / 2`, in `[-pi/2, pi/2)`.
pub fn decode_angle(cos_comp: f64, sin_comp: f64) -> Result<f64> {
    if cos_comp == 0.0 && sin_comp == 0.0 {
        return Err(Error::UndefinedAngle);
    }
    if !(cos_comp.is_finite() && sin_comp.is_finite()) {
        return Err(Error::UndefinedAngle);
    }
    Ok(normalize_angle(sin_comp.atan2(cos_comp) / 2.0))
}

fn to_f64<T: Float>(v: T) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// Reads the grasp stored at flat index `k` of the stack.
///
/// The jaw size of the decoded rectangle is half its opening.
pub fn decode_at<T: Float>(stack: &GraspMapStack<T>, k: usize, w_max: f64) -> Result<DecodedGrasp> {
    let plane = stack.rows * stack.cols;
    let bin = k / plane;
    let row = (k % plane) / stack.cols;
    let col = k % stack.cols;
    let theta = decode_angle(to_f64(stack.cos[k]), to_f64(stack.sin[k]))?;
    let width = to_f64(stack.width[k]).max(0.0) * w_max;
    Ok(DecodedGrasp {
        rect: GraspRectangle {
            cx: col as f64 + 0.5,
            cy: row as f64 + 0.5,
            theta,
            width,
            height: width / 2.0,
        },
        quality: to_f64(stack.q[k]),
        bin,
        row,
        col,
    })
}

/// Decodes the grasp at the global quality maximum over all bins.
///
/// Ties resolve to the lowest bin, then the first pixel in row-major order.
pub fn extract_grasp<T: Float>(stack: &GraspMapStack<T>, w_max: f64) -> Result<DecodedGrasp> {
    let mut best: Option<(usize, T)> = None;
    for (k, &q) in stack.q.iter().enumerate() {
        let beats = match best {
            Some((_, bq)) => q > bq,
            None => q > T::zero(),
        };
        if beats {
            best = Some((k, q));
        }
    }
    let (k, _) = best.ok_or(Error::NoGrasp)?;
    decode_at(stack, k, w_max)
}

/// Greedy non-maximum suppression: up to `k` grasps in descending quality
/// whose centres are pairwise at least `min_separation` pixels apart.
pub fn extract_top_k<T: Float>(
    stack: &GraspMapStack<T>,
    w_max: f64,
    k: usize,
    min_separation: f64,
) -> Result<Vec<DecodedGrasp>> {
    if k == 0 {
        return Err(Error::InvalidConfig("k must be >= 1".into()));
    }
    if min_separation.is_nan() || min_separation < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "min_separation must be >= 0, got {min_separation}"
        )));
    }
    let mut order: Vec<usize> = (0..stack.q.len()).filter(|&i| stack.q[i] > T::zero()).collect();
    // stable: equal qualities keep bin/row-major order
    order.sort_by(|&a, &b| stack.q[b].partial_cmp(&stack.q[a]).unwrap_or(std::cmp::Ordering::Equal));

    let plane = stack.rows * stack.cols;
    let mut picked: Vec<DecodedGrasp> = Vec::with_capacity(k);
    for idx in order {
        let row = (idx % plane) / stack.cols;
        let col = idx % stack.cols;
        let (x, y) = (col as f64 + 0.5, row as f64 + 0.5);
        let clear = picked
            .iter()
            .all(|p| (p.rect.cx - x).hypot(p.rect.cy - y) >= min_separation);
        if clear {
            picked.push(decode_at(stack, idx, w_max)?);
            if picked.len() == k {
                break;
            }
        }
    }
    Ok(picked)
}

/// Decodes a grasp at a (bin, pixel) drawn uniformly from the positive-quality support.
pub fn sample_support_grasp<T: Float, R: Rng + ?Sized>(
    stack: &GraspMapStack<T>,
    w_max: f64,
    rng: &mut R,
) -> Result<DecodedGrasp> {
    let support: Vec<usize> = (0..stack.q.len()).filter(|&i| stack.q[i] > T::zero()).collect();
    if support.is_empty() {
        return Err(Error::NoGrasp);
    }
    let k = support[rng.random_range(0..support.len())];
    decode_at(stack, k, w_max)
}

/// Gaussian blur of each quality plane (separable, clamped borders).
/// Angle and width channels are left untouched.
pub fn smooth_quality<T: Float>(stack: &GraspMapStack<T>, sigma: f64) -> GraspMapStack<T> {
    let mut out = stack.clone();
    if sigma.is_nan() || sigma <= 0.0 {
        return out;
    }
    let radius = (3.0 * sigma).ceil() as isize;
    let mut kernel: Vec<f64> = (-radius..=radius)
        .map(|t| (-((t * t) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let norm: f64 = kernel.iter().sum();
    kernel.iter_mut().for_each(|v| *v /= norm);

    let (rows, cols) = (stack.rows, stack.cols);
    let plane = rows * cols;
    let clamp = |v: isize, n: usize| v.clamp(0, n as isize - 1) as usize;
    for b in 0..stack.bins {
        let src: Vec<f64> = stack.q[b * plane..(b + 1) * plane].iter().map(|&v| to_f64(v)).collect();
        let mut tmp = vec![0.0; plane];
        for i in 0..rows {
            for j in 0..cols {
                tmp[i * cols + j] = kernel
                    .iter()
                    .enumerate()
                    .map(|(t, w)| w * src[i * cols + clamp(j as isize + t as isize - radius, cols)])
                    .sum();
            }
        }
        for i in 0..rows {
            for j in 0..cols {
                let v: f64 = kernel
                    .iter()
                    .enumerate()
                    .map(|(t, w)| w * tmp[clamp(i as isize + t as isize - radius, rows) * cols + j])
                    .sum();
                out.q[b * plane + i * cols + j] = T::from(v).unwrap_or_else(T::zero);
            }
        }
    }
    out
}
