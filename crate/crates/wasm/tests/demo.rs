use rdh_core::image::save_pgm;
use rdh_core::model::{IcnnpConfig, IcnnpModel};
use rdh_core::synth::natural_image;
use rdh_wasm::Demo;

#[test]
fn roundtrip_restores_everything() {
    let mut demo = Demo::synthetic(128, 128, 3).unwrap();
    assert!(demo.marked_pixels().is_empty());
    let report = demo.roundtrip(2000, 42).unwrap();
    assert!(report.payload_ok && report.image_ok);
    assert_eq!(report.payload_bits, 2000);
    assert!(report.psnr_db > 40.0 && report.changed_pixels > 0);
    assert_eq!(demo.marked_pixels().len(), 128 * 128);
}

#[test]
fn complexity_maps_cover_both_views() {
    let demo = Demo::synthetic(128, 120, 3).unwrap();
    let maps = demo.complexity_maps().unwrap();
    assert_eq!(maps.len(), 2 * 128 * 120);
    let (truth, estimate) = maps.split_at(128 * 120);
    assert!(truth.iter().any(|&v| v > 0) && estimate.iter().any(|&v| v > 0));
    // Cross positions and borders stay black in both maps.
    assert_eq!(truth[1], 0);
    assert_eq!(estimate[120 + 2], 0);
}

#[test]
fn psnr_curve_falls_and_marks_overflow() {
    let demo = Demo::synthetic(128, 128, 9).unwrap();
    let curve = demo.psnr_curve(vec![500, 2000, 6000, 1_000_000]);
    assert!(curve[0] > curve[1] && curve[1] > curve[2]);
    assert!(curve[3].is_nan());
}

#[test]
fn predictor_selection_requires_weights() {
    let mut demo = Demo::synthetic(128, 128, 1).unwrap();
    assert!(demo.set_predictor("icnnp").is_err());
    assert!(demo.set_predictor("median").is_err());
    let cfg = IcnnpConfig {
        branch_kernels: vec![3],
        branch_channels: 2,
        head_channels: 3,
        ..IcnnpConfig::default()
    };
    let slope = cfg.leaky_slope;
    let weights = IcnnpModel::new_random(cfg, 4).unwrap().to_bytes();
    demo.load_weights(&weights, slope).unwrap();
    assert!(demo.has_weights());
    for name in ["icnnp", "cnnp-lv"] {
        demo.set_predictor(name).unwrap();
        assert_eq!(demo.predictor(), name);
        let report = demo.roundtrip(300, 7).unwrap();
        assert!(report.payload_ok && report.image_ok);
    }
    assert!(demo.load_weights(b"not a weight file", slope).is_err());
}

#[test]
fn image_sources() {
    // Odd by odd RGBA drops a column so one side is even.
    let rgba: Vec<u8> = (0..9 * 121 * 4).map(|i| (i % 251) as u8).collect();
    let demo = Demo::from_rgba(&rgba, 121, 9).unwrap();
    assert_eq!((demo.rows(), demo.cols()), (9, 120));
    assert!(Demo::from_rgba(&rgba, 120, 9).is_err());

    let grey = Demo::from_rgba(&[10, 20, 30, 255].repeat(4), 2, 2).unwrap();
    assert_eq!(grey.cover_pixels(), vec![18; 4]);

    let img = natural_image(16, 112, 2);
    let demo = Demo::from_pgm(&save_pgm(&img)).unwrap();
    assert_eq!(demo.cover_pixels(), img.pixels());
    assert!(Demo::from_pgm(b"P2\n").is_err());
    assert!(Demo::synthetic(4, 128, 0).is_err());
}
