//! Reference training losses over grasp-map stacks and their gradients.
//!
//! The network loss sums one term per channel and multiplies by the number of
//! angle bins. The positional variant weights every angle and width element by
//! the ground-truth quality at the same bin and pixel, so errors away from
//! valid grasp centres cost nothing.

use std::fmt;
use std::str::FromStr;

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stack::{Channel, GraspMapStack};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LossKind {
    Mse,
    SmoothL1,
}

impl FromStr for LossKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mse" => Ok(LossKind::Mse),
            "smooth-l1" | "smooth_l1" | "sl1" => Ok(LossKind::SmoothL1),
            other => Err(Error::InvalidConfig(format!("unknown loss kind `{other}`"))),
        }
    }
}

impl fmt::Display for LossKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LossKind::Mse => "mse",
            LossKind::SmoothL1 => "smooth-l1",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reduction {
    #[default]
    Mean,
    Sum,
}

impl FromStr for Reduction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mean" => Ok(Reduction::Mean),
            "sum" => Ok(Reduction::Sum),
            other => Err(Error::InvalidConfig(format!("unknown reduction `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LossConfig {
    pub kind: LossKind,
    pub positional: bool,
    pub reduction: Reduction,
}

impl LossConfig {
    pub fn new(kind: LossKind, positional: bool) -> Self {
        Self {
            kind,
            positional,
            reduction: Reduction::Mean,
        }
    }
}

/// Per-channel terms (before scaling) and the scaled total.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossBreakdown {
    pub total: f64,
    pub q: f64,
    pub cos: f64,
    pub sin: f64,
    pub width: f64,
    /// Multiplier applied to the channel sum: the number of angle bins.
    pub scale: usize,
}

/// Smooth-L1 switches from quadratic to linear at this residual.
const SMOOTH_L1_BETA: f64 = 1.0;

#[inline]
fn elementwise(kind: LossKind, d: f64) -> f64 {
    match kind {
        LossKind::Mse => d * d,
        LossKind::SmoothL1 => {
            let a = d.abs();
            if a < SMOOTH_L1_BETA {
                0.5 * d * d / SMOOTH_L1_BETA
            } else {
                a - 0.5 * SMOOTH_L1_BETA
            }
        }
    }
}

#[inline]
fn elementwise_grad(kind: LossKind, d: f64) -> f64 {
    match kind {
        LossKind::Mse => 2.0 * d,
        LossKind::SmoothL1 => {
            if d.abs() < SMOOTH_L1_BETA {
                d / SMOOTH_L1_BETA
            } else {
                d.signum()
            }
        }
    }
}

#[inline]
fn f<T: Float>(v: T) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

fn reduce(sum: f64, n: usize, reduction: Reduction) -> f64 {
    match reduction {
        Reduction::Mean if n > 0 => sum / n as f64,
        Reduction::Mean => 0.0,
        Reduction::Sum => sum,
    }
}

fn weighted_term<T: Float>(
    pred: &[T],
    target: &[T],
    weight: Option<&[T]>,
    kind: LossKind,
    reduction: Reduction,
) -> f64 {
    let sum: f64 = match weight {
        None => pred
            .iter()
            .zip(target)
            .map(|(&p, &t)| elementwise(kind, f(p) - f(t)))
            .sum(),
        Some(w) => pred
            .iter()
            .zip(target)
            .zip(w)
            .map(|((&p, &t), &w)| f(w) * elementwise(kind, f(p) - f(t)))
            .sum(),
    };
    reduce(sum, pred.len(), reduction)
}

/// Mean element-wise loss between two equally sized rasters.
pub fn channel_loss<T: Float>(pred: &[T], target: &[T], kind: LossKind) -> Result<f64> {
    channel_loss_with(pred, target, kind, Reduction::Mean)
}

pub fn channel_loss_with<T: Float>(pred: &[T], target: &[T], kind: LossKind, reduction: Reduction) -> Result<f64> {
    if pred.len() != target.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} predicted values vs {} targets",
            pred.len(),
            target.len()
        )));
    }
    Ok(weighted_term(pred, target, None, kind, reduction))
}

/// Loss of `pred` against ground truth `gt` under `cfg`.
pub fn loss<T: Float>(pred: &GraspMapStack<T>, gt: &GraspMapStack<T>, cfg: &LossConfig) -> Result<LossBreakdown> {
    pred.check_same_shape(gt)?;
    let weight = cfg.positional.then_some(gt.q.as_slice());
    let term = |c: Channel, w: Option<&[T]>| weighted_term(pred.channel(c), gt.channel(c), w, cfg.kind, cfg.reduction);
    let q = term(Channel::Quality, None);
    let cos = term(Channel::Cos, weight);
    let sin = term(Channel::Sin, weight);
    let width = term(Channel::Width, weight);
    let scale = pred.bins;
    Ok(LossBreakdown {
        total: scale as f64 * (q + cos + sin + width),
        q,
        cos,
        sin,
        width,
        scale,
    })
}

/// Bin-scaled sum of the four unweighted channel losses.
pub fn total_loss<T: Float>(pred: &GraspMapStack<T>, gt: &GraspMapStack<T>, kind: LossKind) -> Result<LossBreakdown> {
    loss(pred, gt, &LossConfig::new(kind, false))
}

/// Like [`total_loss`], with angle and width elements weighted by the
/// ground-truth quality.
pub fn positional_loss<T: Float>(
    pred: &GraspMapStack<T>,
    gt: &GraspMapStack<T>,
    kind: LossKind,
) -> Result<LossBreakdown> {
    loss(pred, gt, &LossConfig::new(kind, true))
}

/// Analytic derivative of [`loss`] with respect to every predicted element.
pub fn loss_gradient_with<T: Float>(
    pred: &GraspMapStack<T>,
    gt: &GraspMapStack<T>,
    cfg: &LossConfig,
) -> Result<GraspMapStack<T>> {
    pred.check_same_shape(gt)?;
    let n = pred.channel_len();
    let per_element = match cfg.reduction {
        Reduction::Mean if n > 0 => pred.bins as f64 / n as f64,
        Reduction::Mean => 0.0,
        Reduction::Sum => pred.bins as f64,
    };
    let mut grad = GraspMapStack::zeros(pred.bins, pred.rows, pred.cols);
    for c in Channel::ALL {
        let weighted = cfg.positional && c != Channel::Quality;
        let (p, t) = (pred.channel(c), gt.channel(c));
        for (k, g) in grad.channel_mut(c).iter_mut().enumerate() {
            let w = if weighted { f(gt.q[k]) } else { 1.0 };
            let v = per_element * w * elementwise_grad(cfg.kind, f(p[k]) - f(t[k]));
            *g = T::from(v).unwrap_or_else(T::nan);
        }
    }
    Ok(grad)
}

pub fn loss_gradient<T: Float>(
    pred: &GraspMapStack<T>,
    gt: &GraspMapStack<T>,
    kind: LossKind,
    positional: bool,
) -> Result<GraspMapStack<T>> {
    loss_gradient_with(pred, gt, &LossConfig::new(kind, positional))
}
