//! Golden regression fixtures: a fixed seed and a fixed input must keep
//! producing the committed outputs to 1e-10 in 64-bit.

use std::path::PathBuf;

use svan_core::model::{init_params, slkab_forward, EvalOps, SvanConfig};
use svan_core::tensor::read_tensor;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

#[test]
fn slkab_block_matches_golden_output() {
    let config = SvanConfig::new(2).unwrap().with_blocks(1).with_seed(2024);
    let params = init_params(&config).unwrap();
    let input = read_tensor(&fixture("slkab_in_32x9x9.bin")).unwrap();
    let expected = read_tensor(&fixture("slkab_out_seed2024.bin")).unwrap();

    let mut ops = EvalOps;
    let out = slkab_forward(
        &mut ops,
        &params.layers().blocks[0],
        &config.specs(),
        config.arrangement,
        &input,
    )
    .unwrap();
    assert_eq!(out.shape(), expected.shape());
    let max_diff = out
        .data()
        .iter()
        .zip(expected.data())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    assert!(max_diff <= 1e-10, "max abs diff {max_diff}");
}

#[test]
fn full_network_matches_golden_output() {
    let config = SvanConfig::new(4).unwrap().with_seed(31337);
    let params = init_params(&config).unwrap();
    let input = read_tensor(&fixture("svan_in_3x8x8.bin")).unwrap();
    let expected = read_tensor(&fixture("svan_out_seed31337.bin")).unwrap();

    let out = params.forward(&input).unwrap();
    assert_eq!(out.shape(), [1, 3, 32, 32]);
    let max_diff = out
        .data()
        .iter()
        .zip(expected.data())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max);
    assert!(max_diff <= 1e-10, "max abs diff {max_diff}");
}
