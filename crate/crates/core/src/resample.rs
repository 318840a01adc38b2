//! Separable bicubic resampling with the conventions benchmark numbers
//! assume: cubic convolution kernel with `a = -0.5`, centers aligned via
//! `u = (x + 0.5) / scale - 0.5`, source indices clamped at the edges
//! (replication), per-position weight normalization, and kernel widening by
//! the shrink factor when downscaling (anti-aliasing).

use crate::error::Result;
use crate::tensor::Tensor4;

const A: f64 = -0.5;

/// Keys' cubic convolution kernel, support `[-2, 2]`.
#[inline]
fn cubic(x: f64) -> f64 {
    let x = x.abs();
    if x <= 1.0 {
        (A + 2.0) * x * x * x - (A + 3.0) * x * x + 1.0
    } else if x < 2.0 {
        A * (x * x * x - 5.0 * x * x + 8.0 * x - 4.0)
    } else {
        0.0
    }
}

/// Contribution of source samples to one output position.
#[derive(Debug, Clone)]
pub struct Taps {
    /// Clamped source indices.
    pub indices: Vec<usize>,
    /// Normalized weights; always sum to 1.
    pub weights: Vec<f64>,
}

/// Tap table for resampling a length-`src_len` axis to `dst_len`.
pub fn axis_taps(src_len: usize, dst_len: usize) -> Vec<Taps> {
    let scale = dst_len as f64 / src_len as f64;
    // Widen the kernel when shrinking so it low-passes before decimation.
    let (kernel_scale, support) = if scale < 1.0 {
        (scale, 4.0 / scale)
    } else {
        (1.0, 4.0)
    };
    let tap_count = support.ceil() as usize + 2;

    (0..dst_len)
        .map(|x| {
            let u = (x as f64 + 0.5) / scale - 0.5;
            let left = (u - support / 2.0).floor() as isize;
            let mut indices = Vec::with_capacity(tap_count);
            let mut weights = Vec::with_capacity(tap_count);
            let mut total = 0.0;
            for j in 0..tap_count {
                let idx = left + j as isize;
                let w = kernel_scale * cubic(kernel_scale * (u - idx as f64));
                total += w;
                indices.push(idx.clamp(0, src_len as isize - 1) as usize);
                weights.push(w);
            }
            for w in &mut weights {
                *w /= total;
            }
            Taps { indices, weights }
        })
        .collect()
}

/// Resamples a row-major `src_h x src_w` plane to `dst_h x dst_w`.
pub fn resize_plane(
    src: &[f64],
    src_h: usize,
    src_w: usize,
    dst_h: usize,
    dst_w: usize,
) -> Vec<f64> {
    assert_eq!(src.len(), src_h * src_w);
    let x_taps = axis_taps(src_w, dst_w);
    let y_taps = axis_taps(src_h, dst_h);

    // Horizontal pass.
    let mut tmp = vec![0.0; src_h * dst_w];
    for y in 0..src_h {
        let row = &src[y * src_w..(y + 1) * src_w];
        let out_row = &mut tmp[y * dst_w..(y + 1) * dst_w];
        for (x, taps) in x_taps.iter().enumerate() {
            let mut acc = 0.0;
            for (&i, &w) in taps.indices.iter().zip(&taps.weights) {
                acc += w * row[i];
            }
            out_row[x] = acc;
        }
    }

    // Vertical pass.
    let mut out = vec![0.0; dst_h * dst_w];
    for (y, taps) in y_taps.iter().enumerate() {
        let out_row = &mut out[y * dst_w..(y + 1) * dst_w];
        for (&i, &w) in taps.indices.iter().zip(&taps.weights) {
            let src_row = &tmp[i * dst_w..(i + 1) * dst_w];
            for (o, s) in out_row.iter_mut().zip(src_row) {
                *o += w * s;
            }
        }
    }
    out
}

/// Resamples every `(n, c)` plane of a tensor to `dst_h x dst_w`.
pub fn bicubic_resize(input: &Tensor4, dst_h: usize, dst_w: usize) -> Result<Tensor4> {
    let [n, c, h, w] = input.shape();
    let mut out = Tensor4::zeros(n, c, dst_h, dst_w);
    let plane_in = h * w;
    let plane_out = dst_h * dst_w;
    for ni in 0..n {
        for ci in 0..c {
            let start = (ni * c + ci) * plane_in;
            let resized = resize_plane(&input.data()[start..start + plane_in], h, w, dst_h, dst_w);
            let out_start = (ni * c + ci) * plane_out;
            out.data_mut()[out_start..out_start + plane_out].copy_from_slice(&resized);
        }
    }
    Ok(out)
}

/// Downscale by an integer factor (anti-aliased); dims must be divisible.
pub fn bicubic_downscale(input: &Tensor4, scale: usize) -> Result<Tensor4> {
    bicubic_resize(input, input.h() / scale, input.w() / scale)
}

/// Upscale by an integer factor.
pub fn bicubic_upscale(input: &Tensor4, scale: usize) -> Result<Tensor4> {
    bicubic_resize(input, input.h() * scale, input.w() * scale)
}
