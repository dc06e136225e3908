use std::collections::HashMap;
use std::f64::consts::{FRAC_PI_2, PI};

use gaussgrasp::metrics::{evaluate_dataset, grasp_success};
use gaussgrasp::oracle::{check_grasp, GraspOutcome, GripperParams};
use gaussgrasp::{GraspRectangle, GraspScene, PixelMask};
use proptest::prelude::*;

fn rect(lo: f64, hi: f64) -> impl Strategy<Value = GraspRectangle> {
    (lo..hi, lo..hi, -FRAC_PI_2..FRAC_PI_2, 2.0..12.0f64, 1.0..8.0f64)
        .prop_map(|(x, y, t, w, h)| GraspRectangle::new(x, y, t, w, h).unwrap())
}

fn jitter(base: GraspRectangle) -> impl Strategy<Value = GraspRectangle> {
    (-2.0..2.0f64, -2.0..2.0f64, -0.7..0.7f64, 0.7..1.4f64).prop_map(move |(dx, dy, dt, s)| {
        GraspRectangle::new(base.cx + dx, base.cy + dy, base.theta + dt, base.width * s, base.height).unwrap()
    })
}

/// A predicted grasp close to one of a few ground-truth grasps.
fn case() -> impl Strategy<Value = (GraspRectangle, Vec<GraspRectangle>)> {
    prop::collection::vec(rect(5.0, 25.0), 1..4).prop_flat_map(|gts| {
        let base = gts[0];
        (jitter(base), Just(gts))
    })
}

fn rigid(r: &GraspRectangle, phi: f64, tx: f64, ty: f64) -> GraspRectangle {
    let (s, c) = phi.sin_cos();
    GraspRectangle::new(
        c * r.cx - s * r.cy + tx,
        s * r.cx + c * r.cy + ty,
        r.theta + phi,
        r.width,
        r.height,
    )
    .unwrap()
}

proptest! {
    #[test]
    fn success_rate_falls_with_threshold(cases in prop::collection::vec(case(), 1..12)) {
        let scenes: Vec<GraspScene> = cases
            .iter()
            .enumerate()
            .map(|(i, (_, gts))| GraspScene::new(format!("s{i:02}"), 40, 40, gts.clone()).unwrap())
            .collect();
        let preds: HashMap<String, GraspRectangle> =
            cases.iter().enumerate().map(|(i, (p, _))| (format!("s{i:02}"), *p)).collect();
        let thresholds = [0.1, 0.25, 0.3, 0.5, 0.75, 0.9];
        let report = evaluate_dataset(&preds, &scenes, &thresholds).unwrap();
        let rates: Vec<f64> = thresholds.iter().map(|&t| report.success_rate_at(t).unwrap()).collect();
        prop_assert!(rates.windows(2).all(|w| w[0] >= w[1]), "{:?}", rates);
        prop_assert!(report.iou_avg <= report.iou_avg_raw + 1e-12);

        let mut reversed = scenes.clone();
        reversed.reverse();
        prop_assert_eq!(evaluate_dataset(&preds, &reversed, &thresholds).unwrap(), report);
    }

    #[test]
    fn success_is_rigid_invariant(
        (pred, gts) in case(), phi in -PI..PI, tx in -30.0..30.0f64, ty in -30.0..30.0f64, t in 0.1..0.9f64
    ) {
        let moved: Vec<GraspRectangle> = gts.iter().map(|g| rigid(g, phi, tx, ty)).collect();
        let before = grasp_success(&pred, &gts, t).unwrap();
        let after = grasp_success(&rigid(&pred, phi, tx, ty), &moved, t).unwrap();
        // exact ties at the threshold or the 30 degree gate could flip under rounding
        let margin_ok = gts.iter().all(|g| {
            let iou = gaussgrasp::rect_iou(&pred, g);
            let off = gaussgrasp::angle_offset(pred.theta, g.theta);
            (iou - t).abs() > 1e-9 && (off - 30.0).abs() > 1e-6
        });
        if margin_ok {
            prop_assert_eq!(before, after);
        }
    }
}

fn blob_mask() -> impl Strategy<Value = PixelMask> {
    (
        8usize..24,
        8usize..24,
        prop::collection::vec((0usize..24, 0usize..24, 1usize..6, 1usize..6), 0..4),
    )
        .prop_map(|(w, h, boxes)| {
            let mut m = PixelMask::new(w, h);
            for (i0, j0, bh, bw) in boxes {
                for i in i0..(i0 + bh).min(h) {
                    for j in j0..(j0 + bw).min(w) {
                        m.set(i, j, true);
                    }
                }
            }
            m
        })
}

/// Image rotation matching `PixelMask::rotate90` for an image of height `h`:
/// pixel centre `(x, y)` moves to `(h - y, x)`.
fn rotate_grasp(g: &GraspRectangle, h: usize) -> GraspRectangle {
    GraspRectangle::new(h as f64 - g.cy, g.cx, g.theta + FRAC_PI_2, g.width, g.height).unwrap()
}

proptest! {
    #[test]
    fn oracle_commutes_with_quarter_turns(
        mask in blob_mask(),
        x in 0.0..1.0f64, y in 0.0..1.0f64, t in -FRAC_PI_2..FRAC_PI_2, w in 1.0..16.0f64
    ) {
        let g = GraspRectangle::new(
            0.37 + x * (mask.width as f64 - 1.0),
            0.29 + y * (mask.height as f64 - 1.0),
            t,
            w,
            w / 2.0,
        )
        .unwrap();
        let gp = GripperParams::default();
        let expected = check_grasp(&mask, &g, &gp);
        let (mut m, mut r) = (mask.clone(), g);
        for _ in 0..4 {
            r = rotate_grasp(&r, m.height);
            m = m.rotate90();
            prop_assert_eq!(check_grasp(&m, &r, &gp), expected);
        }
        prop_assert_eq!(m, mask);
    }

    #[test]
    fn collision_depends_only_on_jaws(mask in blob_mask(), t in -FRAC_PI_2..FRAC_PI_2, w in 2.0..10.0f64) {
        // Emptying the closing region can only turn Success into Miss.
        let g = GraspRectangle::new(mask.width as f64 / 2.0 + 0.13, mask.height as f64 / 2.0 + 0.21, t, w, 3.0).unwrap();
        let gp = GripperParams::default();
        let before = check_grasp(&mask, &g, &gp);
        let region = gaussgrasp::oracle::closing_region(&g, &gp);
        let mut cleared = mask.clone();
        for i in 0..mask.height {
            for j in 0..mask.width {
                if region.contains(j as f64 + 0.5, i as f64 + 0.5) {
                    cleared.set(i, j, false);
                }
            }
        }
        let jaws_touch_region = gaussgrasp::oracle::jaw_rects(&g, &gp).iter().any(|jaw| {
            (0..mask.height).any(|i| (0..mask.width).any(|j| {
                let (px, py) = (j as f64 + 0.5, i as f64 + 0.5);
                jaw.contains(px, py) && region.contains(px, py)
            }))
        });
        prop_assume!(!jaws_touch_region);
        let after = check_grasp(&cleared, &g, &gp);
        let expected = if before == GraspOutcome::Success { GraspOutcome::Miss } else { before };
        prop_assert_eq!(after, expected);
    }
}
