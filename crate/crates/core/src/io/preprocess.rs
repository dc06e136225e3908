//! Network input normalisation for colour and depth images.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::raster::Raster;

/// Scales 8-bit colour to `[0, 1]` and subtracts the per-channel image mean.
pub fn preprocess_rgb(img: &Raster<[u8; 3]>) -> Raster<[f32; 3]> {
    let n = img.data.len().max(1) as f64;
    let mut mean = [0.0f64; 3];
    for px in &img.data {
        for c in 0..3 {
            mean[c] += px[c] as f64 / 255.0;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let data = img
        .data
        .iter()
        .map(|px| std::array::from_fn(|c| (px[c] as f64 / 255.0 - mean[c]) as f32))
        .collect();
    Raster {
        rows: img.rows,
        cols: img.cols,
        data,
    }
}

fn is_valid_depth(v: f32) -> bool {
    v.is_finite() && v != 0.0
}

/// Fills invalid depth (zero or non-finite) with the value of the nearest valid
/// pixel in 4-connected steps. Among equally near sources the one seeded first
/// in row-major order wins, so the fill is deterministic.
pub fn inpaint_depth(depth: &Raster<f32>) -> Result<Raster<f32>> {
    let mut out = depth.clone();
    let mut filled: Vec<bool> = depth.data.iter().map(|&v| is_valid_depth(v)).collect();
    if !filled.iter().any(|&f| f) {
        return Err(Error::DepthAllInvalid);
    }
    let mut queue: VecDeque<usize> = (0..filled.len()).filter(|&k| filled[k]).collect();
    let (rows, cols) = (depth.rows, depth.cols);
    while let Some(k) = queue.pop_front() {
        let (i, j) = (k / cols, k % cols);
        let neighbours = [
            (i > 0).then(|| k - cols),
            (j > 0).then(|| k - 1),
            (j + 1 < cols).then(|| k + 1),
            (i + 1 < rows).then(|| k + cols),
        ];
        for nk in neighbours.into_iter().flatten() {
            if !filled[nk] {
                filled[nk] = true;
                out.data[nk] = out.data[k];
                queue.push_back(nk);
            }
        }
    }
    Ok(out)
}

/// Inpaints, min-max scales to `[-1, 1]`, subtracts the mean and clamps to `[-1, 1]`.
pub fn preprocess_depth(depth: &Raster<f32>) -> Result<Raster<f32>> {
    let filled = inpaint_depth(depth)?;
    let (lo, hi) = filled.data.iter().fold((f64::MAX, f64::MIN), |(lo, hi), &v| {
        (lo.min(v as f64), hi.max(v as f64))
    });
    let span = hi - lo;
    let scaled: Vec<f64> = filled
        .data
        .iter()
        .map(|&v| {
            if span > 0.0 {
                2.0 * (v as f64 - lo) / span - 1.0
            } else {
                0.0
            }
        })
        .collect();
    let mean = scaled.iter().sum::<f64>() / scaled.len() as f64;
    let data = scaled.iter().map(|v| (v - mean).clamp(-1.0, 1.0) as f32).collect();
    Ok(Raster {
        rows: filled.rows,
        cols: filled.cols,
        data,
    })
}
