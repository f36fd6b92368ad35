//! Convolution throughput on a 512x512 plane for the layer shapes the network uses.

use rdh_core::tensor::{conv2d_forward, ConvLayer, Tensor};
use std::time::Instant;

fn main() {
    let (h, w) = (512, 512);
    for (cin, cout, k) in [(1, 8, 7), (8, 8, 3), (24, 24, 3), (32, 32, 3), (96, 96, 3)] {
        let data = (0..cin * h * w).map(|i| (i % 7) as f32 * 0.1).collect();
        let x = Tensor::new(vec![cin, h, w], data).unwrap();
        let layer = ConvLayer::zeros(cout, cin, k).unwrap();
        let start = Instant::now();
        conv2d_forward(&x, &layer).unwrap();
        let secs = start.elapsed().as_secs_f64();
        let macs = (cout * cin * k * k * h * w) as f64;
        println!(
            "{cin}->{cout} k{k}: {secs:.3}s  {:.2} GMAC/s",
            macs / secs / 1e9
        );
    }
}
