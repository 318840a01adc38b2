//! Regenerates the golden model-output fixtures under `tests/fixtures/`.
//! Run from the workspace root after an intentional numeric change:
//!
//! ```sh
//! cargo run -p svan-core --example gen_golden
//! ```

use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use svan_core::model::{init_params, slkab_forward, EvalOps, SvanConfig};
use svan_core::tensor::{write_tensor, Tensor4};

fn main() {
    let fx = Path::new("crates/core/tests/fixtures");
    assert!(fx.is_dir(), "run from the workspace root");
    let mut rng = ChaCha20Rng::seed_from_u64(77);

    // Block-level golden: default 32-channel block, 17-1-1-17 arrangement.
    let config = SvanConfig::new(2).unwrap().with_blocks(1).with_seed(2024);
    let params = init_params(&config).unwrap();
    let x = Tensor4::from_fn(1, 32, 9, 9, |_, _, _, _| rng.random_range(-1.0..1.0));
    let mut ops = EvalOps;
    let out = slkab_forward(
        &mut ops,
        &params.layers().blocks[0],
        &config.specs(),
        config.arrangement,
        &x,
    )
    .unwrap();
    write_tensor(&x, &fx.join("slkab_in_32x9x9.bin")).unwrap();
    write_tensor(&out, &fx.join("slkab_out_seed2024.bin")).unwrap();

    // Network-level golden: x4 model on an 8x8 noise input.
    let config = SvanConfig::new(4).unwrap().with_seed(31337);
    let params = init_params(&config).unwrap();
    let input = Tensor4::from_fn(1, 3, 8, 8, |_, _, _, _| rng.random_range(0.0..1.0));
    let output = params.forward(&input).unwrap();
    write_tensor(&input, &fx.join("svan_in_3x8x8.bin")).unwrap();
    write_tensor(&output, &fx.join("svan_out_seed31337.bin")).unwrap();

    println!("golden fixtures regenerated");
}
