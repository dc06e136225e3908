use std::f64::consts::FRAC_PI_2;

use gaussgrasp::io::{
    decode_mask_png, encode_mask_png, inpaint_depth, parse_annotations, preprocess_depth, read_tensor, render_heatmap,
    serialize_annotations, write_tensor, Colormap, HEADER_LEN,
};
use gaussgrasp::{Error, GraspMapStack, PixelMask, Raster};
use proptest::prelude::*;

fn stack() -> impl Strategy<Value = GraspMapStack<f32>> {
    (1usize..4, 1usize..6, 1usize..6).prop_flat_map(|(b, r, c)| {
        let n = b * r * c;
        prop::collection::vec(
            prop::num::f32::NORMAL | prop::num::f32::ZERO | prop::num::f32::SUBNORMAL,
            4 * n,
        )
        .prop_map(move |v| {
            GraspMapStack::from_channels(
                b,
                r,
                c,
                v[..n].to_vec(),
                v[n..2 * n].to_vec(),
                v[2 * n..3 * n].to_vec(),
                v[3 * n..].to_vec(),
            )
            .unwrap()
        })
    })
}

fn bits(s: &GraspMapStack<f32>) -> Vec<u32> {
    s.q.iter()
        .chain(&s.cos)
        .chain(&s.sin)
        .chain(&s.width)
        .map(|v| v.to_bits())
        .collect()
}

proptest! {
    #[test]
    fn tensor_round_trip_is_bit_exact(s in stack()) {
        let bytes = write_tensor(&s).unwrap();
        prop_assert_eq!(bytes.len(), HEADER_LEN + 4 * 4 * s.channel_len());
        let back = read_tensor(&bytes).unwrap();
        prop_assert_eq!((back.bins, back.rows, back.cols), (s.bins, s.rows, s.cols));
        prop_assert_eq!(bits(&back), bits(&s));
    }

    #[test]
    fn truncated_or_extended_tensors_are_rejected(s in stack(), cut in 1usize..8, extra in 1usize..8) {
        let bytes = write_tensor(&s).unwrap();
        let short = &bytes[..bytes.len() - cut.min(bytes.len())];
        prop_assert!(matches!(read_tensor(short), Err(Error::Tensor(_))));
        let mut long = bytes.clone();
        long.extend(std::iter::repeat_n(0u8, extra));
        prop_assert!(matches!(read_tensor(&long), Err(Error::Tensor(_))));
    }

    #[test]
    fn annotations_parse_serialize_fixed_point(
        lines in prop::collection::vec((0.0..64.0f64, 0.0..48.0f64, -400.0..400.0f64, 0.1..80.0f64, 0.1..40.0f64), 1..8)
    ) {
        let text: String = lines.iter().map(|(x, y, t, w, h)| format!("{x};{y};{t};{w};{h}\r\n")).collect();
        let first = parse_annotations(&text, "a", 48, 64).unwrap();
        for g in &first.grasps {
            prop_assert!((-FRAC_PI_2..FRAC_PI_2).contains(&g.theta));
        }
        let again = parse_annotations(&serialize_annotations(&first.grasps), "a", 48, 64).unwrap();
        prop_assert_eq!(&again, &first);
        prop_assert_eq!(serialize_annotations(&again.grasps), serialize_annotations(&first.grasps));
    }

    #[test]
    fn inpainting_is_idempotent(
        (rows, cols, vals) in (1usize..10, 1usize..10).prop_flat_map(|(r, c)| {
            (Just(r), Just(c), prop::collection::vec(prop_oneof![Just(0.0f32), 0.1f32..5.0], r * c))
        })
    ) {
        let depth = Raster::from_vec(rows, cols, vals).unwrap();
        match inpaint_depth(&depth) {
            Ok(once) => {
                prop_assert!(once.data.iter().all(|&v| v != 0.0));
                prop_assert_eq!(inpaint_depth(&once).unwrap(), once.clone());
                let pre = preprocess_depth(&depth).unwrap();
                prop_assert!(pre.data.iter().all(|v| (-1.0..=1.0).contains(v)));
            }
            Err(e) => prop_assert!(matches!(e, Error::DepthAllInvalid)),
        }
    }

    #[test]
    fn mask_png_round_trip(w in 1usize..20, h in 1usize..20, seed in any::<u64>()) {
        let data = (0..w * h).map(|k| (seed.rotate_left(k as u32 % 64) ^ k as u64) & 1 == 1).collect();
        let m = PixelMask::from_data(w, h, data).unwrap();
        prop_assert_eq!(decode_mask_png(&encode_mask_png(&m).unwrap()).unwrap(), m);
    }
}

#[test]
fn corrupt_headers_are_rejected() {
    let s = GraspMapStack::<f32>::zeros(2, 3, 4);
    let good = write_tensor(&s).unwrap();
    let mut magic = good.clone();
    magic[4] = b'2';
    let mut channels = good.clone();
    channels[5] = 3;
    let mut zero_dim = good.clone();
    zero_dim[13..17].copy_from_slice(&0u32.to_le_bytes());
    let mut nan = good.clone();
    nan[HEADER_LEN..HEADER_LEN + 4].copy_from_slice(&f32::NAN.to_le_bytes());
    let mut inf = good.clone();
    let last = inf.len() - 4;
    inf[last..].copy_from_slice(&f32::INFINITY.to_le_bytes());
    for bad in [&magic, &channels, &zero_dim, &nan, &inf, &good[..10].to_vec()] {
        assert!(matches!(read_tensor(bad), Err(Error::Tensor(_))));
    }
}

#[test]
fn heatmaps_are_deterministic_and_span_the_colormap() {
    let zeros = render_heatmap(&[0.0f32; 6], 2, 3, (0.0, 1.0), Colormap::Heat).unwrap();
    let ones = render_heatmap(&[1.0f32; 6], 2, 3, (0.0, 1.0), Colormap::Heat).unwrap();
    assert_eq!(
        zeros,
        render_heatmap(&[0.0f32; 6], 2, 3, (0.0, 1.0), Colormap::Heat).unwrap()
    );
    assert_ne!(zeros, ones);
    assert_eq!(Colormap::Heat.color(0), [0, 0, 0]);
    assert_eq!(Colormap::Heat.color(255), [255, 255, 255]);
}

#[test]
fn depth_ramp_becomes_zero_mean() {
    let depth = Raster::from_vec(1, 5, vec![1.0f32, 2.0, 3.0, 4.0, 5.0]).unwrap();
    let out = preprocess_depth(&depth).unwrap();
    let expect = [-1.0f32, -0.5, 0.0, 0.5, 1.0];
    for (a, b) in out.data.iter().zip(expect) {
        assert!((a - b).abs() < 1e-6);
    }
}
