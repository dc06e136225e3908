use gaussgrasp::loss::{channel_loss, loss, loss_gradient_with, LossConfig, LossKind, Reduction};
use gaussgrasp::GraspMapStack;
use proptest::prelude::*;

fn stack(bins: usize, rows: usize, cols: usize) -> impl Strategy<Value = GraspMapStack<f64>> {
    let n = bins * rows * cols;
    (
        prop::collection::vec(0.0..1.0f64, n),
        prop::collection::vec(-1.0..1.0f64, n),
        prop::collection::vec(-1.0..1.0f64, n),
        prop::collection::vec(0.0..1.0f64, n),
    )
        .prop_map(move |(q, c, s, w)| GraspMapStack::from_channels(bins, rows, cols, q, c, s, w).unwrap())
}

fn pair() -> impl Strategy<Value = (GraspMapStack<f64>, GraspMapStack<f64>)> {
    (1usize..4, 1usize..5, 1usize..5).prop_flat_map(|(b, r, c)| (stack(b, r, c), stack(b, r, c)))
}

fn kinds() -> impl Strategy<Value = LossKind> {
    prop_oneof![Just(LossKind::Mse), Just(LossKind::SmoothL1)]
}

proptest! {
    #[test]
    fn losses_are_non_negative_and_positional_is_smaller((p, g) in pair(), kind in kinds()) {
        let plain = loss(&p, &g, &LossConfig::new(kind, false)).unwrap();
        let pos = loss(&p, &g, &LossConfig::new(kind, true)).unwrap();
        prop_assert!(plain.total >= 0.0 && pos.total >= 0.0);
        prop_assert!(pos.total <= plain.total + 1e-12);
        prop_assert_eq!(pos.q, plain.q);
    }

    #[test]
    fn identical_maps_have_zero_loss_and_gradient((p, _g) in pair(), kind in kinds(), positional: bool) {
        let cfg = LossConfig::new(kind, positional);
        prop_assert_eq!(loss(&p, &p, &cfg).unwrap().total, 0.0);
        let grad = loss_gradient_with(&p, &p, &cfg).unwrap();
        prop_assert!(grad.q.iter().chain(&grad.cos).chain(&grad.sin).chain(&grad.width).all(|&v| v == 0.0));
    }

    #[test]
    fn sum_is_mean_times_count((p, g) in pair(), kind in kinds()) {
        let mean = loss(&p, &g, &LossConfig { kind, positional: false, reduction: Reduction::Mean }).unwrap();
        let sum = loss(&p, &g, &LossConfig { kind, positional: false, reduction: Reduction::Sum }).unwrap();
        let m = p.channel_len() as f64;
        prop_assert!((sum.total - mean.total * m).abs() < 1e-9 * (1.0 + sum.total));
    }

    #[test]
    fn zero_quality_target_leaves_only_the_quality_term((p, mut g) in pair(), kind in kinds()) {
        g.q.iter_mut().for_each(|v| *v = 0.0);
        let pos = loss(&p, &g, &LossConfig::new(kind, true)).unwrap();
        prop_assert_eq!(pos.total, p.bins as f64 * channel_loss(&p.q, &g.q, kind).unwrap());
    }
}

#[test]
fn smooth_l1_matches_hand_values() {
    // 0.5 d^2 below 1, |d| - 0.5 above
    let l = channel_loss(&[0.5f64, 3.0], &[0.0, 0.0], LossKind::SmoothL1).unwrap();
    assert!((l - (0.125 + 2.5) / 2.0).abs() < 1e-15);
    let m = channel_loss(&[0.5f64, 3.0], &[0.0, 0.0], LossKind::Mse).unwrap();
    assert!((m - (0.25 + 9.0) / 2.0).abs() < 1e-15);
}
