//! Y-channel quality metrics.
//!
//! Luma uses the BT.601 studio-swing transform
//! `Y = (65.481 R + 128.553 G + 24.966 B + 16) / 255`, the transform under
//! which the standard benchmark PSNR figures are computed. PSNR uses peak 1.0
//! in normalized space; SSIM uses an 11x11 Gaussian window with sigma 1.5,
//! `K1 = 0.01`, `K2 = 0.03`, dynamic range 1.0, averaged over windows that
//! fit entirely inside the image.

use crate::error::{Result, SvanError};
use crate::tensor::Tensor4;

/// Single-channel plane with row-major samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Plane {
    pub h: usize,
    pub w: usize,
    pub data: Vec<f64>,
}

impl Plane {
    pub fn new(h: usize, w: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != h * w {
            return Err(SvanError::Dimension(format!(
                "plane data length {} does not match {h}x{w}",
                data.len()
            )));
        }
        Ok(Plane { h, w, data })
    }

    /// Crops `shave` pixels from every border.
    pub fn shave(&self, shave: usize) -> Result<Plane> {
        if 2 * shave >= self.h || 2 * shave >= self.w {
            return Err(SvanError::Metric(format!(
                "shave {shave} leaves no pixels of a {}x{} plane",
                self.h, self.w
            )));
        }
        let (h, w) = (self.h - 2 * shave, self.w - 2 * shave);
        let mut data = Vec::with_capacity(h * w);
        for y in 0..h {
            let start = (y + shave) * self.w + shave;
            data.extend_from_slice(&self.data[start..start + w]);
        }
        Ok(Plane { h, w, data })
    }
}

/// BT.601 studio-swing luma of an RGB tensor in `[0,1]`; batch must be 1.
pub fn rgb_to_y(image: &Tensor4) -> Result<Plane> {
    if image.n() != 1 || image.c() != 3 {
        return Err(SvanError::Metric(format!(
            "rgb_to_y expects a (1,3,h,w) tensor, got {:?}",
            image.shape()
        )));
    }
    let plane = image.h() * image.w();
    let d = image.data();
    let data = (0..plane)
        .map(|i| {
            (65.481 * d[i] + 128.553 * d[plane + i] + 24.966 * d[2 * plane + i] + 16.0) / 255.0
        })
        .collect();
    Plane::new(image.h(), image.w(), data)
}

/// PSNR between two equally sized planes with peak 1.0; identical planes
/// report `f64::INFINITY`.
pub fn psnr_planes(a: &Plane, b: &Plane) -> Result<f64> {
    if a.h != b.h || a.w != b.w {
        return Err(SvanError::ShapeMismatch {
            context: "psnr".into(),
            left: vec![a.h, a.w],
            right: vec![b.h, b.w],
        });
    }
    let mse = a
        .data
        .iter()
        .zip(&b.data)
        .map(|(x, y)| {
            let d = x - y;
            d * d
        })
        .sum::<f64>()
        / a.data.len() as f64;
    if mse == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (1.0 / mse).log10())
}

/// Y-channel PSNR between two RGB images after shaving `shave` border pixels.
pub fn psnr_y(sr: &Tensor4, hr: &Tensor4, shave: usize) -> Result<f64> {
    let a = rgb_to_y(sr)?.shave(shave)?;
    let b = rgb_to_y(hr)?.shave(shave)?;
    psnr_planes(&a, &b)
}

const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;
const SSIM_K1: f64 = 0.01;
const SSIM_K2: f64 = 0.03;

fn gaussian_window() -> [f64; SSIM_WINDOW] {
    let mut w = [0.0; SSIM_WINDOW];
    let c = (SSIM_WINDOW / 2) as f64;
    let mut sum = 0.0;
    for (i, v) in w.iter_mut().enumerate() {
        let d = i as f64 - c;
        *v = (-d * d / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
        sum += *v;
    }
    for v in &mut w {
        *v /= sum;
    }
    w
}

/// Valid (no padding) separable filtering with a 1-D window along both axes.
fn filter_valid(plane: &Plane, window: &[f64; SSIM_WINDOW]) -> Plane {
    let out_h = plane.h - SSIM_WINDOW + 1;
    let out_w = plane.w - SSIM_WINDOW + 1;
    // Horizontal.
    let mut tmp = vec![0.0; plane.h * out_w];
    for y in 0..plane.h {
        let row = &plane.data[y * plane.w..(y + 1) * plane.w];
        for x in 0..out_w {
            let mut acc = 0.0;
            for (k, wv) in window.iter().enumerate() {
                acc += wv * row[x + k];
            }
            tmp[y * out_w + x] = acc;
        }
    }
    // Vertical.
    let mut out = vec![0.0; out_h * out_w];
    for y in 0..out_h {
        for (k, wv) in window.iter().enumerate() {
            let src = &tmp[(y + k) * out_w..(y + k + 1) * out_w];
            let dst = &mut out[y * out_w..(y + 1) * out_w];
            for (o, s) in dst.iter_mut().zip(src) {
                *o += wv * s;
            }
        }
    }
    Plane {
        h: out_h,
        w: out_w,
        data: out,
    }
}

/// Mean local SSIM between two planes.
pub fn ssim_planes(a: &Plane, b: &Plane) -> Result<f64> {
    if a.h != b.h || a.w != b.w {
        return Err(SvanError::ShapeMismatch {
            context: "ssim".into(),
            left: vec![a.h, a.w],
            right: vec![b.h, b.w],
        });
    }
    if a.h < SSIM_WINDOW || a.w < SSIM_WINDOW {
        return Err(SvanError::Metric(format!(
            "ssim needs at least {SSIM_WINDOW}x{SSIM_WINDOW} pixels, got {}x{}",
            a.h, a.w
        )));
    }
    let window = gaussian_window();
    let sq = |p: &Plane| Plane {
        h: p.h,
        w: p.w,
        data: p.data.iter().map(|v| v * v).collect(),
    };
    let prod = Plane {
        h: a.h,
        w: a.w,
        data: a.data.iter().zip(&b.data).map(|(x, y)| x * y).collect(),
    };

    let mu1 = filter_valid(a, &window);
    let mu2 = filter_valid(b, &window);
    let e_x2 = filter_valid(&sq(a), &window);
    let e_y2 = filter_valid(&sq(b), &window);
    let e_xy = filter_valid(&prod, &window);

    let c1 = SSIM_K1 * SSIM_K1;
    let c2 = SSIM_K2 * SSIM_K2;
    let mut total = 0.0;
    for i in 0..mu1.data.len() {
        let (m1, m2) = (mu1.data[i], mu2.data[i]);
        let s1 = e_x2.data[i] - m1 * m1;
        let s2 = e_y2.data[i] - m2 * m2;
        let s12 = e_xy.data[i] - m1 * m2;
        total +=
            ((2.0 * m1 * m2 + c1) * (2.0 * s12 + c2)) / ((m1 * m1 + m2 * m2 + c1) * (s1 + s2 + c2));
    }
    Ok(total / mu1.data.len() as f64)
}

/// Y-channel SSIM between two RGB images after shaving `shave` border pixels.
pub fn ssim_y(sr: &Tensor4, hr: &Tensor4, shave: usize) -> Result<f64> {
    let a = rgb_to_y(sr)?.shave(shave)?;
    let b = rgb_to_y(hr)?.shave(shave)?;
    ssim_planes(&a, &b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane_from_fn(h: usize, w: usize, f: impl Fn(usize, usize) -> f64) -> Plane {
        let mut data = Vec::with_capacity(h * w);
        for y in 0..h {
            for x in 0..w {
                data.push(f(y, x));
            }
        }
        Plane { h, w, data }
    }

    #[test]
    fn luma_reference_points() {
        let black = Tensor4::zeros(1, 3, 1, 1);
        let y = rgb_to_y(&black).unwrap();
        assert!((y.data[0] - 16.0 / 255.0).abs() < 1e-12);

        let white = Tensor4::full(1, 3, 1, 1, 1.0);
        let y = rgb_to_y(&white).unwrap();
        assert!((y.data[0] - 235.0 / 255.0).abs() < 1e-12);

        let red = Tensor4::new(1, 3, 1, 1, vec![1.0, 0.0, 0.0]).unwrap();
        let y = rgb_to_y(&red).unwrap();
        assert!((y.data[0] - (65.481 + 16.0) / 255.0).abs() < 1e-12);
    }

    #[test]
    fn psnr_reference_values() {
        let a = plane_from_fn(8, 8, |_, _| 0.5);
        assert_eq!(psnr_planes(&a, &a).unwrap(), f64::INFINITY);

        // Uniform difference of 16/255: PSNR = 10*log10(255^2 / 256).
        let b = plane_from_fn(8, 8, |_, _| 0.5 + 16.0 / 255.0);
        let expect = 10.0 * (255.0f64 * 255.0 / 256.0).log10();
        assert!((psnr_planes(&a, &b).unwrap() - expect).abs() < 1e-9);
        assert!((expect - 24.0483).abs() < 1e-3);
    }

    #[test]
    fn psnr_symmetry_and_shift_invariance() {
        let a = plane_from_fn(9, 7, |y, x| ((y * 13 + x * 7) % 11) as f64 / 11.0);
        let b = plane_from_fn(9, 7, |y, x| ((y * 5 + x * 3) % 13) as f64 / 13.0);
        let ab = psnr_planes(&a, &b).unwrap();
        let ba = psnr_planes(&b, &a).unwrap();
        assert_eq!(ab, ba);

        let shift = |p: &Plane| Plane {
            h: p.h,
            w: p.w,
            data: p.data.iter().map(|v| v + 0.07).collect(),
        };
        let shifted = psnr_planes(&shift(&a), &shift(&b)).unwrap();
        assert!((shifted - ab).abs() < 1e-9);
    }

    #[test]
    fn shave_errors_when_empty() {
        let img = Tensor4::full(1, 3, 8, 8, 0.5);
        assert!(psnr_y(&img, &img, 4).is_err());
        assert!(psnr_y(&img, &img, 3).is_ok());
    }

    #[test]
    fn ssim_identity_is_one() {
        let a = plane_from_fn(16, 16, |y, x| ((y * 31 + x * 17) % 23) as f64 / 23.0);
        let s = ssim_planes(&a, &a).unwrap();
        assert!((s - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ssim_bounded_and_negative_for_inverted_binary() {
        let a = plane_from_fn(16, 16, |y, x| ((y + x) % 2) as f64);
        let inv = Plane {
            h: a.h,
            w: a.w,
            data: a.data.iter().map(|v| 1.0 - v).collect(),
        };
        let s = ssim_planes(&a, &inv).unwrap();
        assert!((-1.0..=1.0).contains(&s));
        assert!(s < 0.0, "inverted binary image should anticorrelate: {s}");
    }

    #[test]
    fn ssim_rejects_small_images() {
        let a = plane_from_fn(10, 16, |_, _| 0.5);
        assert!(ssim_planes(&a, &a).is_err());
    }

    #[test]
    fn ssim_matches_naive_per_window_oracle() {
        // Straightforward quadruple-loop implementation as the oracle.
        let a = plane_from_fn(20, 18, |y, x| {
            0.5 + 0.4 * ((y as f64 * 0.7).sin() * (x as f64 * 0.45).cos())
        });
        let b = plane_from_fn(20, 18, |y, x| {
            0.5 + 0.38 * ((y as f64 * 0.71).sin() * (x as f64 * 0.46).cos())
                + 0.01 * ((x * 7 + y * 3) % 5) as f64
        });
        let window = gaussian_window();
        let c1 = SSIM_K1 * SSIM_K1;
        let c2 = SSIM_K2 * SSIM_K2;
        let mut total = 0.0;
        let mut count = 0;
        for y0 in 0..=(20 - SSIM_WINDOW) {
            for x0 in 0..=(18 - SSIM_WINDOW) {
                let (mut m1, mut m2) = (0.0, 0.0);
                let (mut e11, mut e22, mut e12) = (0.0, 0.0, 0.0);
                for dy in 0..SSIM_WINDOW {
                    for dx in 0..SSIM_WINDOW {
                        let wgt = window[dy] * window[dx];
                        let va = a.data[(y0 + dy) * 18 + x0 + dx];
                        let vb = b.data[(y0 + dy) * 18 + x0 + dx];
                        m1 += wgt * va;
                        m2 += wgt * vb;
                        e11 += wgt * va * va;
                        e22 += wgt * vb * vb;
                        e12 += wgt * va * vb;
                    }
                }
                let (s1, s2, s12) = (e11 - m1 * m1, e22 - m2 * m2, e12 - m1 * m2);
                total += ((2.0 * m1 * m2 + c1) * (2.0 * s12 + c2))
                    / ((m1 * m1 + m2 * m2 + c1) * (s1 + s2 + c2));
                count += 1;
            }
        }
        let oracle = total / count as f64;
        let got = ssim_planes(&a, &b).unwrap();
        assert!((got - oracle).abs() <= 1e-6, "{got} vs {oracle}");
    }
}
