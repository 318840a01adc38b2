//! Dense rank-4 tensors in `(batch, channel, height, width)` layout together
//! with the forward operations the network is built from: grouped/dilated
//! convolution, GELU, elementwise product and sum, pixel shuffle, per-position
//! channel normalization and the two training losses.
//!
//! Everything is computed in `f64`. Loops are written so the innermost
//! dimension walks contiguous rows; accumulation order is fixed, which keeps
//! results bitwise reproducible.

use std::io::Read;
use std::path::Path;

use crate::error::{Result, SvanError};

/// Padding behaviour of a convolution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PadMode {
    /// Zero padding chosen so the output keeps the input's spatial size.
    SameZero,
    /// No padding; the output shrinks by `k_eff - 1` per spatial dimension.
    Valid,
}

/// Static description of a convolution layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConvSpec {
    pub in_channels: usize,
    pub out_channels: usize,
    /// Square kernel side; must be odd.
    pub kernel: usize,
    pub dilation: usize,
    /// Channel groups; `groups == in_channels == out_channels` is depth-wise.
    pub groups: usize,
    pub padding: PadMode,
}

impl ConvSpec {
    pub fn new(
        in_channels: usize,
        out_channels: usize,
        kernel: usize,
        dilation: usize,
        groups: usize,
        padding: PadMode,
    ) -> Result<Self> {
        let spec = ConvSpec {
            in_channels,
            out_channels,
            kernel,
            dilation,
            groups,
            padding,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Dense (ungrouped) stride-1 convolution.
    pub fn dense(in_channels: usize, out_channels: usize, kernel: usize) -> Result<Self> {
        Self::new(in_channels, out_channels, kernel, 1, 1, PadMode::SameZero)
    }

    /// Depth-wise convolution, optionally dilated.
    pub fn depthwise(channels: usize, kernel: usize, dilation: usize) -> Result<Self> {
        Self::new(
            channels,
            channels,
            kernel,
            dilation,
            channels,
            PadMode::SameZero,
        )
    }

    pub fn with_padding(mut self, padding: PadMode) -> Self {
        self.padding = padding;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.kernel == 0 || self.kernel % 2 == 0 {
            return Err(SvanError::Dimension(format!(
                "kernel must be odd and positive, got {}",
                self.kernel
            )));
        }
        if self.dilation == 0 {
            return Err(SvanError::Dimension("dilation must be >= 1".into()));
        }
        if self.groups == 0
            || self.in_channels % self.groups != 0
            || self.out_channels % self.groups != 0
        {
            return Err(SvanError::Dimension(format!(
                "groups {} must divide in_channels {} and out_channels {}",
                self.groups, self.in_channels, self.out_channels
            )));
        }
        Ok(())
    }

    /// Effective kernel extent `(k - 1) * dilation + 1`.
    pub fn kernel_extent(&self) -> usize {
        (self.kernel - 1) * self.dilation + 1
    }

    /// Spatial output size for an `h x w` input.
    pub fn output_hw(&self, h: usize, w: usize) -> Result<(usize, usize)> {
        match self.padding {
            PadMode::SameZero => Ok((h, w)),
            PadMode::Valid => {
                let k_eff = self.kernel_extent();
                if h < k_eff || w < k_eff {
                    return Err(SvanError::Dimension(format!(
                        "valid convolution with extent {k_eff} needs input >= {k_eff}x{k_eff}, got {h}x{w}"
                    )));
                }
                Ok((h - k_eff + 1, w - k_eff + 1))
            }
        }
    }

    pub fn in_channels_per_group(&self) -> usize {
        self.in_channels / self.groups
    }

    /// Expected weight tensor shape `(out_channels, in_channels/groups, k, k)`.
    pub fn weight_shape(&self) -> [usize; 4] {
        [
            self.out_channels,
            self.in_channels_per_group(),
            self.kernel,
            self.kernel,
        ]
    }
}

/// Dense rank-4 tensor, row-major `(n, c, h, w)`, 64-bit values.
#[derive(Debug, Clone, PartialEq)]
pub struct Tensor4 {
    n: usize,
    c: usize,
    h: usize,
    w: usize,
    data: Vec<f64>,
}

impl Tensor4 {
    pub fn new(n: usize, c: usize, h: usize, w: usize, data: Vec<f64>) -> Result<Self> {
        if n == 0 || c == 0 || h == 0 || w == 0 {
            return Err(SvanError::Dimension(format!(
                "all dimensions must be >= 1, got ({n},{c},{h},{w})"
            )));
        }
        if data.len() != n * c * h * w {
            return Err(SvanError::Dimension(format!(
                "data length {} does not match shape ({n},{c},{h},{w})",
                data.len()
            )));
        }
        Ok(Tensor4 { n, c, h, w, data })
    }

    pub fn zeros(n: usize, c: usize, h: usize, w: usize) -> Self {
        Tensor4 {
            n,
            c,
            h,
            w,
            data: vec![0.0; n * c * h * w],
        }
    }

    pub fn full(n: usize, c: usize, h: usize, w: usize, value: f64) -> Self {
        Tensor4 {
            n,
            c,
            h,
            w,
            data: vec![value; n * c * h * w],
        }
    }

    /// Scalar tensor `(1,1,1,1)`.
    pub fn scalar(value: f64) -> Self {
        Tensor4::full(1, 1, 1, 1, value)
    }

    pub fn from_fn(
        n: usize,
        c: usize,
        h: usize,
        w: usize,
        mut f: impl FnMut(usize, usize, usize, usize) -> f64,
    ) -> Self {
        let mut data = Vec::with_capacity(n * c * h * w);
        for ni in 0..n {
            for ci in 0..c {
                for yi in 0..h {
                    for xi in 0..w {
                        data.push(f(ni, ci, yi, xi));
                    }
                }
            }
        }
        Tensor4 { n, c, h, w, data }
    }

    pub fn shape(&self) -> [usize; 4] {
        [self.n, self.c, self.h, self.w]
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn c(&self) -> usize {
        self.c
    }
    pub fn h(&self) -> usize {
        self.h
    }
    pub fn w(&self) -> usize {
        self.w
    }

    pub fn numel(&self) -> usize {
        self.data.len()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn index(&self, n: usize, c: usize, y: usize, x: usize) -> usize {
        ((n * self.c + c) * self.h + y) * self.w + x
    }

    #[inline]
    pub fn at(&self, n: usize, c: usize, y: usize, x: usize) -> f64 {
        self.data[self.index(n, c, y, x)]
    }

    #[inline]
    pub fn set(&mut self, n: usize, c: usize, y: usize, x: usize, v: f64) {
        let i = self.index(n, c, y, x);
        self.data[i] = v;
    }

    /// Contiguous row `(n, c, y, ..)`.
    #[inline]
    pub fn row(&self, n: usize, c: usize, y: usize) -> &[f64] {
        let start = self.index(n, c, y, 0);
        &self.data[start..start + self.w]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Tensor4 {
        Tensor4 {
            n: self.n,
            c: self.c,
            h: self.h,
            w: self.w,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn same_shape(&self, other: &Tensor4) -> bool {
        self.shape() == other.shape()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }

    /// Clamp every value into `[lo, hi]`.
    pub fn clamp(&self, lo: f64, hi: f64) -> Tensor4 {
        self.map(|v| v.clamp(lo, hi))
    }

    fn check_same_shape(&self, other: &Tensor4, context: &str) -> Result<()> {
        if !self.same_shape(other) {
            return Err(SvanError::ShapeMismatch {
                context: context.to_string(),
                left: self.shape().to_vec(),
                right: other.shape().to_vec(),
            });
        }
        Ok(())
    }
}

/// Grouped, dilated, stride-1 2-D convolution (cross-correlation tap order).
///
/// `weight` has shape `(out_channels, in_channels/groups, k, k)`; `bias` is one
/// value per output channel. Same-zero padding preserves the spatial size,
/// valid padding shrinks it by the kernel extent minus one.
pub fn conv2d(
    input: &Tensor4,
    weight: &Tensor4,
    bias: Option<&[f64]>,
    spec: &ConvSpec,
) -> Result<Tensor4> {
    spec.validate()?;
    if input.c() != spec.in_channels {
        return Err(SvanError::ShapeMismatch {
            context: "conv2d input channels".into(),
            left: vec![input.c()],
            right: vec![spec.in_channels],
        });
    }
    if weight.shape() != spec.weight_shape() {
        return Err(SvanError::ShapeMismatch {
            context: "conv2d weight".into(),
            left: weight.shape().to_vec(),
            right: spec.weight_shape().to_vec(),
        });
    }
    if let Some(b) = bias {
        if b.len() != spec.out_channels {
            return Err(SvanError::ShapeMismatch {
                context: "conv2d bias".into(),
                left: vec![b.len()],
                right: vec![spec.out_channels],
            });
        }
    }

    let (out_h, out_w) = spec.output_hw(input.h(), input.w())?;
    let mut out = Tensor4::zeros(input.n(), spec.out_channels, out_h, out_w);

    // Offset from output coordinates to input coordinates for tap (0, 0).
    // Same-zero padding is symmetric because k_eff is odd.
    let pad = match spec.padding {
        PadMode::SameZero => ((spec.kernel_extent() - 1) / 2) as isize,
        PadMode::Valid => 0,
    };

    let icpg = spec.in_channels_per_group();
    let ocpg = spec.out_channels / spec.groups;
    let (in_h, in_w) = (input.h() as isize, input.w() as isize);
    let dil = spec.dilation as isize;

    for n in 0..input.n() {
        for oc in 0..spec.out_channels {
            let group = oc / ocpg;
            if let Some(b) = bias {
                let start = out.index(n, oc, 0, 0);
                out.data[start..start + out_h * out_w].fill(b[oc]);
            }
            for ic_local in 0..icpg {
                let ic = group * icpg + ic_local;
                for ky in 0..spec.kernel {
                    let dy = ky as isize * dil - pad;
                    // Output rows whose source row lands inside the input.
                    let y0 = (-dy).max(0) as usize;
                    let y1 = (in_h - dy).min(out_h as isize).max(0) as usize;
                    if y0 >= y1 {
                        continue;
                    }
                    for kx in 0..spec.kernel {
                        let dx = kx as isize * dil - pad;
                        let x0 = (-dx).max(0) as usize;
                        let x1 = (in_w - dx).min(out_w as isize).max(0) as usize;
                        if x0 >= x1 {
                            continue;
                        }
                        let wv = weight.at(oc, ic_local, ky, kx);
                        if wv == 0.0 {
                            continue;
                        }
                        for y in y0..y1 {
                            let in_row = input.row(n, ic, (y as isize + dy) as usize);
                            let out_start = out.index(n, oc, y, x0);
                            let out_row = &mut out.data[out_start..out_start + (x1 - x0)];
                            let in_seg = &in_row[(x0 as isize + dx) as usize..][..x1 - x0];
                            for (o, i) in out_row.iter_mut().zip(in_seg) {
                                *o += wv * i;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Gradients of [`conv2d`] with respect to input, weight and bias.
pub(crate) fn conv2d_backward(
    input: &Tensor4,
    weight: &Tensor4,
    spec: &ConvSpec,
    grad_out: &Tensor4,
) -> (Tensor4, Tensor4, Vec<f64>) {
    let mut grad_in = Tensor4::zeros(input.n(), input.c(), input.h(), input.w());
    let mut grad_w = Tensor4::zeros(
        weight.shape()[0],
        weight.shape()[1],
        weight.shape()[2],
        weight.shape()[3],
    );
    let mut grad_b = vec![0.0; spec.out_channels];

    let pad = match spec.padding {
        PadMode::SameZero => ((spec.kernel_extent() - 1) / 2) as isize,
        PadMode::Valid => 0,
    };
    let icpg = spec.in_channels_per_group();
    let ocpg = spec.out_channels / spec.groups;
    let (out_h, out_w) = (grad_out.h(), grad_out.w());
    let (in_h, in_w) = (input.h() as isize, input.w() as isize);
    let dil = spec.dilation as isize;

    for n in 0..input.n() {
        for oc in 0..spec.out_channels {
            let group = oc / ocpg;
            for y in 0..out_h {
                let g_row = grad_out.row(n, oc, y);
                grad_b[oc] += g_row.iter().sum::<f64>();
            }
            for ic_local in 0..icpg {
                let ic = group * icpg + ic_local;
                for ky in 0..spec.kernel {
                    let dy = ky as isize * dil - pad;
                    let y0 = (-dy).max(0) as usize;
                    let y1 = (in_h - dy).min(out_h as isize).max(0) as usize;
                    if y0 >= y1 {
                        continue;
                    }
                    for kx in 0..spec.kernel {
                        let dx = kx as isize * dil - pad;
                        let x0 = (-dx).max(0) as usize;
                        let x1 = (in_w - dx).min(out_w as isize).max(0) as usize;
                        if x0 >= x1 {
                            continue;
                        }
                        let wv = weight.at(oc, ic_local, ky, kx);
                        let mut wsum = 0.0;
                        for y in y0..y1 {
                            let iy = (y as isize + dy) as usize;
                            let g_start = grad_out.index(n, oc, y, x0);
                            let g_seg = &grad_out.data[g_start..g_start + (x1 - x0)];
                            let in_start = input.index(n, ic, iy, (x0 as isize + dx) as usize);
                            let in_seg = &input.data[in_start..in_start + (x1 - x0)];
                            let gi_start = grad_in.index(n, ic, iy, (x0 as isize + dx) as usize);
                            let gi_seg = &mut grad_in.data[gi_start..gi_start + (x1 - x0)];
                            for ((gi, g), iv) in gi_seg.iter_mut().zip(g_seg).zip(in_seg) {
                                *gi += wv * g;
                                wsum += g * iv;
                            }
                        }
                        let wi = grad_w.index(oc, ic_local, ky, kx);
                        grad_w.data[wi] += wsum;
                    }
                }
            }
        }
    }
    (grad_in, grad_w, grad_b)
}

/// Exact GELU, `0.5 * x * (1 + erf(x / sqrt(2)))`.
pub fn gelu(x: &Tensor4) -> Tensor4 {
    x.map(gelu_scalar)
}

#[inline]
pub fn gelu_scalar(x: f64) -> f64 {
    0.5 * x * (1.0 + libm::erf(x / std::f64::consts::SQRT_2))
}

/// Derivative of the exact GELU: `Phi(x) + x * phi(x)`.
#[inline]
pub(crate) fn gelu_grad_scalar(x: f64) -> f64 {
    let cdf = 0.5 * (1.0 + libm::erf(x / std::f64::consts::SQRT_2));
    let pdf = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
    cdf + x * pdf
}

/// Elementwise product.
pub fn hadamard(a: &Tensor4, b: &Tensor4) -> Result<Tensor4> {
    a.check_same_shape(b, "hadamard")?;
    let data = a.data.iter().zip(&b.data).map(|(x, y)| x * y).collect();
    Tensor4::new(a.n, a.c, a.h, a.w, data)
}

/// Elementwise sum.
pub fn add(a: &Tensor4, b: &Tensor4) -> Result<Tensor4> {
    a.check_same_shape(b, "add")?;
    let data = a.data.iter().zip(&b.data).map(|(x, y)| x + y).collect();
    Tensor4::new(a.n, a.c, a.h, a.w, data)
}

/// Rearranges `(n, c*s^2, h, w)` into `(n, c, h*s, w*s)`:
/// `out[n, c, y*s+dy, x*s+dx] = in[n, c*s^2 + dy*s + dx, y, x]`.
pub fn pixel_shuffle(x: &Tensor4, s: usize) -> Result<Tensor4> {
    if s == 0 {
        return Err(SvanError::Dimension(
            "pixel_shuffle scale must be >= 1".into(),
        ));
    }
    let s2 = s * s;
    if x.c() % s2 != 0 {
        return Err(SvanError::Dimension(format!(
            "pixel_shuffle: {} channels not divisible by {}^2",
            x.c(),
            s
        )));
    }
    let out_c = x.c() / s2;
    let mut out = Tensor4::zeros(x.n(), out_c, x.h() * s, x.w() * s);
    for n in 0..x.n() {
        for c in 0..out_c {
            for dy in 0..s {
                for dx in 0..s {
                    let ic = c * s2 + dy * s + dx;
                    for y in 0..x.h() {
                        for xx in 0..x.w() {
                            let v = x.at(n, ic, y, xx);
                            out.set(n, c, y * s + dy, xx * s + dx, v);
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Inverse of [`pixel_shuffle`]: `(n, c, h*s, w*s)` back to `(n, c*s^2, h, w)`.
pub fn pixel_unshuffle(x: &Tensor4, s: usize) -> Result<Tensor4> {
    if s == 0 || x.h() % s != 0 || x.w() % s != 0 {
        return Err(SvanError::Dimension(format!(
            "pixel_unshuffle: spatial dims ({}, {}) not divisible by {}",
            x.h(),
            x.w(),
            s
        )));
    }
    let (oh, ow) = (x.h() / s, x.w() / s);
    let mut out = Tensor4::zeros(x.n(), x.c() * s * s, oh, ow);
    for n in 0..x.n() {
        for c in 0..x.c() {
            for dy in 0..s {
                for dx in 0..s {
                    let oc = c * s * s + dy * s + dx;
                    for y in 0..oh {
                        for xx in 0..ow {
                            let v = x.at(n, c, y * s + dy, xx * s + dx);
                            out.set(n, oc, y, xx, v);
                        }
                    }
                }
            }
        }
    }
    Ok(out)
}

pub const PIXEL_NORM_EPS: f64 = 1e-6;

/// Per-position channel standardization with learnable per-channel gain and
/// shift: at every `(n, y, x)` the channel vector is brought to zero mean and
/// unit variance (epsilon inside the square root), then scaled and offset.
pub fn pixel_norm(x: &Tensor4, gain: &[f64], shift: &[f64]) -> Result<Tensor4> {
    if gain.len() != x.c() || shift.len() != x.c() {
        return Err(SvanError::ShapeMismatch {
            context: "pixel_norm gain/shift".into(),
            left: vec![gain.len(), shift.len()],
            right: vec![x.c(), x.c()],
        });
    }
    let c = x.c();
    let plane = x.h() * x.w();
    let mut out = Tensor4::zeros(x.n(), c, x.h(), x.w());
    for n in 0..x.n() {
        let base = n * c * plane;
        for p in 0..plane {
            let mut mean = 0.0;
            for ci in 0..c {
                mean += x.data[base + ci * plane + p];
            }
            mean /= c as f64;
            let mut var = 0.0;
            for ci in 0..c {
                let d = x.data[base + ci * plane + p] - mean;
                var += d * d;
            }
            var /= c as f64;
            let inv = 1.0 / (var + PIXEL_NORM_EPS).sqrt();
            for ci in 0..c {
                let xhat = (x.data[base + ci * plane + p] - mean) * inv;
                out.data[base + ci * plane + p] = gain[ci] * xhat + shift[ci];
            }
        }
    }
    Ok(out)
}

pub(crate) struct PixelNormGrads {
    pub grad_input: Tensor4,
    pub grad_gain: Vec<f64>,
    pub grad_shift: Vec<f64>,
}

pub(crate) fn pixel_norm_backward(x: &Tensor4, gain: &[f64], grad_out: &Tensor4) -> PixelNormGrads {
    let c = x.c();
    let plane = x.h() * x.w();
    let mut grad_input = Tensor4::zeros(x.n(), c, x.h(), x.w());
    let mut grad_gain = vec![0.0; c];
    let mut grad_shift = vec![0.0; c];

    for n in 0..x.n() {
        let base = n * c * plane;
        for p in 0..plane {
            let mut mean = 0.0;
            for ci in 0..c {
                mean += x.data[base + ci * plane + p];
            }
            mean /= c as f64;
            let mut var = 0.0;
            for ci in 0..c {
                let d = x.data[base + ci * plane + p] - mean;
                var += d * d;
            }
            var /= c as f64;
            let inv = 1.0 / (var + PIXEL_NORM_EPS).sqrt();

            // dL/dxhat_i = g_i * dy_i; reduce the two channel means first.
            let mut sum_dxhat = 0.0;
            let mut sum_dxhat_xhat = 0.0;
            for ci in 0..c {
                let idx = base + ci * plane + p;
                let xhat = (x.data[idx] - mean) * inv;
                let dy = grad_out.data[idx];
                grad_gain[ci] += dy * xhat;
                grad_shift[ci] += dy;
                let dxhat = gain[ci] * dy;
                sum_dxhat += dxhat;
                sum_dxhat_xhat += dxhat * xhat;
            }
            let mean_dxhat = sum_dxhat / c as f64;
            let mean_dxhat_xhat = sum_dxhat_xhat / c as f64;
            for ci in 0..c {
                let idx = base + ci * plane + p;
                let xhat = (x.data[idx] - mean) * inv;
                let dxhat = gain[ci] * grad_out.data[idx];
                grad_input.data[idx] = inv * (dxhat - mean_dxhat - xhat * mean_dxhat_xhat);
            }
        }
    }
    PixelNormGrads {
        grad_input,
        grad_gain,
        grad_shift,
    }
}

/// Mean absolute error over all elements.
pub fn l1_loss(pred: &Tensor4, target: &Tensor4) -> Result<f64> {
    pred.check_same_shape(target, "l1_loss")?;
    let n = pred.numel() as f64;
    Ok(pred
        .data
        .iter()
        .zip(&target.data)
        .map(|(p, t)| (p - t).abs())
        .sum::<f64>()
        / n)
}

/// Mean squared error over all elements.
pub fn l2_loss(pred: &Tensor4, target: &Tensor4) -> Result<f64> {
    pred.check_same_shape(target, "l2_loss")?;
    let n = pred.numel() as f64;
    Ok(pred
        .data
        .iter()
        .zip(&target.data)
        .map(|(p, t)| {
            let d = p - t;
            d * d
        })
        .sum::<f64>()
        / n)
}

/// Writes the fixture dump format: four u32 little-endian dims `(n,c,h,w)`
/// followed by the row-major values as f64 little-endian.
pub fn write_tensor(tensor: &Tensor4, path: &Path) -> Result<()> {
    let mut buf = Vec::with_capacity(16 + tensor.numel() * 8);
    for d in tensor.shape() {
        buf.extend_from_slice(&(d as u32).to_le_bytes());
    }
    for v in tensor.data() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    std::fs::write(path, buf).map_err(|e| SvanError::io(path, e))
}

/// Reads the dump format written by [`write_tensor`].
pub fn read_tensor(path: &Path) -> Result<Tensor4> {
    let mut file = std::fs::File::open(path).map_err(|e| SvanError::io(path, e))?;
    let mut dims = [0u8; 16];
    file.read_exact(&mut dims)
        .map_err(|e| SvanError::io(path, e))?;
    let shape: Vec<usize> = dims
        .chunks_exact(4)
        .map(|b| u32::from_le_bytes(b.try_into().unwrap()) as usize)
        .collect();
    let numel: usize = shape.iter().product();
    let mut raw = Vec::new();
    file.read_to_end(&mut raw)
        .map_err(|e| SvanError::io(path, e))?;
    if raw.len() != numel * 8 {
        return Err(SvanError::Dimension(format!(
            "tensor dump {}: expected {} bytes of data, found {}",
            path.display(),
            numel * 8,
            raw.len()
        )));
    }
    let data = raw
        .chunks_exact(8)
        .map(|b| f64::from_le_bytes(b.try_into().unwrap()))
        .collect();
    Tensor4::new(shape[0], shape[1], shape[2], shape[3], data)
}

/// Round-half-up quantization of a `[0,1]` value to `0..=255`.
#[inline]
pub fn quantize_u8(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0 + 0.5).floor() as u8
}
