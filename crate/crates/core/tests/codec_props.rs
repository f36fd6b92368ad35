use std::sync::Arc;

use proptest::prelude::*;
use proptest::strategy::ValueTree;
use rdh_core::codec::{
    bits_to_bytes, bytes_to_bits, classify, embed, extract, keystream_xor, needs_flag,
    recover_error, Slot,
};
use rdh_core::error::RdhError;
use rdh_core::image::GrayImage;
use rdh_core::model::{IcnnpConfig, IcnnpModel};
use rdh_core::predictor::PredictorKind;

fn tiny_model() -> Arc<IcnnpModel> {
    let cfg = IcnnpConfig {
        branch_kernels: vec![3],
        branch_channels: 2,
        head_channels: 3,
        ..IcnnpConfig::default()
    };
    Arc::new(IcnnpModel::new_random(cfg, 5).unwrap())
}

/// Images mixing smooth ramps, noise and saturated blocks.
fn image_strategy() -> impl Strategy<Value = GrayImage> {
    let shape = prop_oneof![
        (8usize..24, 112usize..120).prop_map(|(r, c)| (r & !1, c)),
        (8usize..24, 112usize..120).prop_map(|(r, c)| (r | 1, c & !1)),
    ];
    (shape, any::<u64>(), 0u8..4).prop_map(|((rows, cols), seed, style)| {
        let mut state = seed | 1;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        let pixels = (0..rows * cols)
            .map(|i| {
                let (r, c) = (i / cols, i % cols);
                let noise = (next() % 7) as i32 - 3;
                let base = match style {
                    0 => (r * 3 + c) as i32 % 256,
                    1 => (next() % 256) as i32,
                    2 => {
                        if (r / 4 + c / 8) % 2 == 0 {
                            255
                        } else {
                            0
                        }
                    }
                    _ => 128 + ((c as f64 / 9.0).sin() * 120.0) as i32,
                };
                (base + noise).clamp(0, 255) as u8
            })
            .collect();
        GrayImage::new(rows, cols, pixels).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn pipeline_is_invertible_or_reports_capacity(
        cover in image_strategy(),
        payload in proptest::collection::vec(any::<bool>(), 0..300),
        key in any::<u64>(),
        cnn in any::<bool>(),
    ) {
        let kind = if cnn { PredictorKind::Icnnp(tiny_model()) } else { PredictorKind::Rhombus };
        match embed(&cover, &payload, key, &kind) {
            Ok(out) => {
                prop_assert_eq!(out.dot.payload_bits + out.cross.payload_bits, payload.len());
                let back = extract(&out.marked, key, &kind).unwrap();
                prop_assert_eq!(back.payload, payload);
                prop_assert_eq!(back.image, cover);
            }
            Err(RdhError::CapacityExceeded { requested, max_bits }) => {
                prop_assert_eq!(requested, payload.len());
                prop_assert!(max_bits < requested);
            }
            Err(other) => prop_assert!(false, "unexpected error {other}"),
        }
    }

    #[test]
    fn marked_pixels_stay_within_the_threshold_margin(
        cover in image_strategy(),
        payload in proptest::collection::vec(any::<bool>(), 0..120),
        key in any::<u64>(),
    ) {
        if let Ok(out) = embed(&cover, &payload, key, &PredictorKind::Rhombus) {
            let margin = |p: &rdh_core::codec::PassReport| (p.plan.t_p + 1).max(-p.plan.t_n);
            let bound = margin(&out.dot).max(margin(&out.cross)).max(1);
            for (a, b) in cover.pixels().iter().zip(out.marked.pixels()) {
                prop_assert!((*a as i32 - *b as i32).abs() <= bound);
            }
        }
    }

    #[test]
    fn scalar_map_inverts_for_every_kept_pixel(
        predicted in 0i32..=255,
        value in 0i32..=255,
        t_p in 0i32..16,
        t_n in -16i32..=-1,
        bit in any::<bool>(),
    ) {
        let e = value - predicted;
        match classify(predicted, e, t_p, t_n) {
            Slot::Embed { base } => {
                let marked = base + bit as i32;
                prop_assert!((0..=255).contains(&marked));
                prop_assert_eq!(recover_error(marked - predicted, t_p, t_n), (e, Some(bit)));
            }
            Slot::Shift { value: marked } => {
                prop_assert!((0..=255).contains(&marked));
                prop_assert_eq!(recover_error(marked - predicted, t_p, t_n), (e, None));
            }
            Slot::Skip => prop_assert!(needs_flag(predicted, value, t_p, t_n)),
        }
    }

    #[test]
    fn keystream_is_an_involution(bytes in proptest::collection::vec(any::<u8>(), 0..64), key in any::<u64>()) {
        let bits = bytes_to_bits(&bytes);
        let twice = keystream_xor(&keystream_xor(&bits, key), key);
        prop_assert_eq!(bits_to_bytes(&twice), bytes);
    }
}

#[test]
fn small_strategy_images_do_carry_payloads() {
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    let mut carried = 0;
    for _ in 0..64 {
        let cover = image_strategy().new_tree(&mut runner).unwrap().current();
        if embed(&cover, &[true; 40], 9, &PredictorKind::Rhombus).is_ok() {
            carried += 1;
        }
    }
    assert!(carried >= 16, "only {carried} of 64 covers held 40 bits");
}
