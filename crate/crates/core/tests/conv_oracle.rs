//! Direct-convolution oracle: the production conv2d must agree with a
//! naive quadruple-loop correlation to 1e-12 for every layer shape the
//! network uses, plus property checks for the shuffle bijection.

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

use svan_core::tensor::{conv2d, pixel_shuffle, pixel_unshuffle, ConvSpec, PadMode, Tensor4};

/// Textbook correlation: loop over every output element and every tap,
/// reading zero outside the input. Kept deliberately free of the slicing
/// tricks the production kernel uses.
fn naive_conv2d(
    input: &Tensor4,
    weight: &Tensor4,
    bias: Option<&[f64]>,
    spec: &ConvSpec,
) -> Tensor4 {
    let k_eff = (spec.kernel - 1) * spec.dilation + 1;
    let (out_h, out_w, pad) = match spec.padding {
        PadMode::SameZero => (input.h(), input.w(), ((k_eff - 1) / 2) as isize),
        PadMode::Valid => (input.h() - k_eff + 1, input.w() - k_eff + 1, 0),
    };
    let icpg = spec.in_channels / spec.groups;
    let ocpg = spec.out_channels / spec.groups;
    let mut out = Tensor4::zeros(input.n(), spec.out_channels, out_h, out_w);
    for n in 0..input.n() {
        for oc in 0..spec.out_channels {
            let group = oc / ocpg;
            for y in 0..out_h {
                for x in 0..out_w {
                    let mut acc = bias.map(|b| b[oc]).unwrap_or(0.0);
                    for ic_local in 0..icpg {
                        let ic = group * icpg + ic_local;
                        for ky in 0..spec.kernel {
                            for kx in 0..spec.kernel {
                                let iy = y as isize + (ky * spec.dilation) as isize - pad;
                                let ix = x as isize + (kx * spec.dilation) as isize - pad;
                                if iy < 0
                                    || ix < 0
                                    || iy >= input.h() as isize
                                    || ix >= input.w() as isize
                                {
                                    continue;
                                }
                                acc += weight.at(oc, ic_local, ky, kx)
                                    * input.at(n, ic, iy as usize, ix as usize);
                            }
                        }
                    }
                    out.set(n, oc, y, x, acc);
                }
            }
        }
    }
    out
}

fn rand_tensor(rng: &mut ChaCha20Rng, n: usize, c: usize, h: usize, w: usize) -> Tensor4 {
    Tensor4::from_fn(n, c, h, w, |_, _, _, _| rng.random_range(-1.0..1.0))
}

/// The five (kernel, dilation, grouping) combinations the network uses.
fn network_layer_specs(channels: usize) -> Vec<ConvSpec> {
    vec![
        ConvSpec::new(channels, channels, 3, 1, 1, PadMode::SameZero).unwrap(),
        ConvSpec::new(channels, channels, 5, 1, channels, PadMode::SameZero).unwrap(),
        ConvSpec::new(channels, channels, 5, 3, channels, PadMode::SameZero).unwrap(),
        ConvSpec::new(channels, channels, 1, 1, 1, PadMode::SameZero).unwrap(),
        ConvSpec::new(channels, channels, 3, 3, channels, PadMode::SameZero).unwrap(),
    ]
}

#[test]
fn conv_matches_naive_oracle_for_network_shapes() {
    let mut rng = ChaCha20Rng::seed_from_u64(0xC0FFEE);
    let channels = 4;
    for base_spec in network_layer_specs(channels) {
        for padding in [PadMode::SameZero, PadMode::Valid] {
            let spec = base_spec.with_padding(padding);
            let k_eff = (spec.kernel - 1) * spec.dilation + 1;
            let h = k_eff + rng.random_range(1..6);
            let w = k_eff + rng.random_range(1..6);
            let input = rand_tensor(&mut rng, 2, channels, h, w);
            let weight = rand_tensor(
                &mut rng,
                spec.out_channels,
                spec.in_channels / spec.groups,
                spec.kernel,
                spec.kernel,
            );
            let bias: Vec<f64> = (0..spec.out_channels)
                .map(|_| rng.random_range(-0.5..0.5))
                .collect();
            let got = conv2d(&input, &weight, Some(&bias), &spec).unwrap();
            let expect = naive_conv2d(&input, &weight, Some(&bias), &spec);
            assert_eq!(got.shape(), expect.shape());
            for (a, b) in got.data().iter().zip(expect.data()) {
                assert!((a - b).abs() <= 1e-12, "{a} vs {b} for spec {spec:?}");
            }
        }
    }
}

#[test]
fn depthwise_conv_is_per_channel_correlation() {
    // groups == channels: each channel must match an independent 2-D
    // correlation computed on that channel alone.
    let mut rng = ChaCha20Rng::seed_from_u64(99);
    let c = 4;
    let input = rand_tensor(&mut rng, 1, c, 8, 8);
    let weight = rand_tensor(&mut rng, c, 1, 3, 3);
    let spec = ConvSpec::new(c, c, 3, 1, c, PadMode::Valid).unwrap();
    let got = conv2d(&input, &weight, None, &spec).unwrap();

    for ch in 0..c {
        let single_in = Tensor4::from_fn(1, 1, 8, 8, |_, _, y, x| input.at(0, ch, y, x));
        let single_w = Tensor4::from_fn(1, 1, 3, 3, |_, _, y, x| weight.at(ch, 0, y, x));
        let single_spec = ConvSpec::new(1, 1, 3, 1, 1, PadMode::Valid).unwrap();
        let expect = conv2d(&single_in, &single_w, None, &single_spec).unwrap();
        for y in 0..6 {
            for x in 0..6 {
                let d = (got.at(0, ch, y, x) - expect.at(0, 0, y, x)).abs();
                assert!(d <= 1e-12);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn conv_oracle_property(seed in 0u64..1_000_000, k_idx in 0usize..3, grouped in proptest::bool::ANY) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let (k, d) = [(1usize, 1usize), (3, 2), (5, 1)][k_idx];
        let channels = 4;
        let groups = if grouped { channels } else { 1 };
        let spec = ConvSpec::new(channels, channels, k, d, groups, PadMode::SameZero).unwrap();
        let h = (k - 1) * d + 1 + rng.random_range(0..5);
        let w = (k - 1) * d + 1 + rng.random_range(0..5);
        let input = rand_tensor(&mut rng, 1, channels, h, w);
        let weight = rand_tensor(&mut rng, channels, channels / groups, k, k);
        let got = conv2d(&input, &weight, None, &spec).unwrap();
        let expect = naive_conv2d(&input, &weight, None, &spec);
        for (a, b) in got.data().iter().zip(expect.data()) {
            prop_assert!((a - b).abs() <= 1e-12);
        }
    }

    #[test]
    fn pixel_shuffle_is_a_bijection(seed in 0u64..1_000_000, s in 2usize..=4) {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let c = s * s * rng.random_range(1..4);
        let x = rand_tensor(&mut rng, 2, c, 3, 4);
        let shuffled = pixel_shuffle(&x, s).unwrap();
        let back = pixel_unshuffle(&shuffled, s).unwrap();
        prop_assert_eq!(back, x.clone());
        // Rearrangement preserves the element sum.
        prop_assert!((shuffled.sum() - x.sum()).abs() < 1e-9);
    }
}
