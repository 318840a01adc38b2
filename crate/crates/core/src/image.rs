//! 8-bit RGB image I/O and the geometric pieces of the data pipeline:
//! tensor conversion, modulo cropping, aligned LR/HR patch sampling and the
//! eight dihedral augmentations.

use std::path::Path;

use rand::Rng;

use crate::error::{Result, SvanError};
use crate::tensor::{quantize_u8, Tensor4};

/// Interleaved 8-bit RGB image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ImageRgb8 {
    pub h: usize,
    pub w: usize,
    /// `h * w * 3` bytes, row-major, RGB interleaved.
    pub rgb: Vec<u8>,
}

impl ImageRgb8 {
    pub fn new(h: usize, w: usize, rgb: Vec<u8>) -> Result<Self> {
        if rgb.len() != h * w * 3 {
            return Err(SvanError::Dimension(format!(
                "rgb byte length {} does not match {h}x{w}x3",
                rgb.len()
            )));
        }
        Ok(ImageRgb8 { h, w, rgb })
    }

    /// Planar `(1, 3, h, w)` tensor with values in `[0, 1]`.
    pub fn to_tensor(&self) -> Tensor4 {
        let plane = self.h * self.w;
        let mut data = vec![0.0; 3 * plane];
        for i in 0..plane {
            for ch in 0..3 {
                data[ch * plane + i] = self.rgb[i * 3 + ch] as f64 / 255.0;
            }
        }
        Tensor4::new(1, 3, self.h, self.w, data).expect("shape is consistent")
    }

    /// Quantizes a `(1, 3, h, w)` tensor (clamped to `[0,1]`, round half up).
    pub fn from_tensor(t: &Tensor4) -> Result<Self> {
        if t.n() != 1 || t.c() != 3 {
            return Err(SvanError::Dimension(format!(
                "expected a (1,3,h,w) tensor, got {:?}",
                t.shape()
            )));
        }
        let plane = t.h() * t.w();
        let mut rgb = vec![0u8; plane * 3];
        for i in 0..plane {
            for ch in 0..3 {
                rgb[i * 3 + ch] = quantize_u8(t.data()[ch * plane + i]);
            }
        }
        ImageRgb8::new(t.h(), t.w(), rgb)
    }
}

/// Loads an 8-bit PNG as RGB. Grayscale (including sub-byte depths) is
/// promoted to three equal channels, palettes are expanded, an alpha channel
/// is dropped; 16-bit files are rejected by kind.
pub fn load_png(path: &Path) -> Result<ImageRgb8> {
    let file = std::fs::File::open(path).map_err(|e| SvanError::io(path, e))?;
    let mut decoder = png::Decoder::new(std::io::BufReader::new(file));
    // Expand palettes and sub-byte grayscale to 8-bit samples.
    decoder.set_transformations(png::Transformations::EXPAND);
    let mut reader = decoder.read_info().map_err(|e| SvanError::Png {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;

    let info = reader.info();
    if info.bit_depth == png::BitDepth::Sixteen {
        return Err(SvanError::UnsupportedImage {
            path: path.to_path_buf(),
            message: "16-bit depth is not supported".into(),
        });
    }

    let mut buf = vec![0u8; reader.output_buffer_size().unwrap_or(0)];
    let frame = reader.next_frame(&mut buf).map_err(|e| SvanError::Png {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    let (w, h) = (frame.width as usize, frame.height as usize);
    let data = &buf[..frame.buffer_size()];

    let mut rgb = vec![0u8; h * w * 3];
    match frame.color_type {
        png::ColorType::Rgb => rgb.copy_from_slice(data),
        png::ColorType::Rgba => {
            for i in 0..h * w {
                rgb[i * 3..i * 3 + 3].copy_from_slice(&data[i * 4..i * 4 + 3]);
            }
        }
        png::ColorType::Grayscale => {
            for i in 0..h * w {
                rgb[i * 3] = data[i];
                rgb[i * 3 + 1] = data[i];
                rgb[i * 3 + 2] = data[i];
            }
        }
        png::ColorType::GrayscaleAlpha => {
            for i in 0..h * w {
                rgb[i * 3] = data[i * 2];
                rgb[i * 3 + 1] = data[i * 2];
                rgb[i * 3 + 2] = data[i * 2];
            }
        }
        other => {
            return Err(SvanError::UnsupportedImage {
                path: path.to_path_buf(),
                message: format!("unsupported color type {other:?}"),
            });
        }
    }
    ImageRgb8::new(h, w, rgb)
}

/// Writes an 8-bit RGB PNG.
pub fn save_png(image: &ImageRgb8, path: &Path) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| SvanError::io(path, e))?;
    let mut encoder = png::Encoder::new(
        std::io::BufWriter::new(file),
        image.w as u32,
        image.h as u32,
    );
    encoder.set_color(png::ColorType::Rgb);
    encoder.set_depth(png::BitDepth::Eight);
    let mut writer = encoder.write_header().map_err(|e| SvanError::Png {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    writer
        .write_image_data(&image.rgb)
        .map_err(|e| SvanError::Png {
            path: path.to_path_buf(),
            message: e.to_string(),
        })
}

/// Crops a tensor to the largest size divisible by `multiple` (top-left
/// anchored), the usual preparation before integer-factor downscaling.
pub fn modcrop(t: &Tensor4, multiple: usize) -> Result<Tensor4> {
    let h = (t.h() / multiple) * multiple;
    let w = (t.w() / multiple) * multiple;
    if h == 0 || w == 0 {
        return Err(SvanError::Dimension(format!(
            "image {}x{} too small to crop to a multiple of {multiple}",
            t.h(),
            t.w()
        )));
    }
    crop(t, 0, 0, h, w)
}

/// Extracts `(h, w)` starting at `(y0, x0)` from every plane.
pub fn crop(t: &Tensor4, y0: usize, x0: usize, h: usize, w: usize) -> Result<Tensor4> {
    if y0 + h > t.h() || x0 + w > t.w() {
        return Err(SvanError::Dimension(format!(
            "crop {h}x{w} at ({y0},{x0}) exceeds {}x{}",
            t.h(),
            t.w()
        )));
    }
    let mut out = Tensor4::zeros(t.n(), t.c(), h, w);
    for n in 0..t.n() {
        for c in 0..t.c() {
            for y in 0..h {
                let src = t.index(n, c, y0 + y, x0);
                let dst = out.index(n, c, y, 0);
                out.data_mut()[dst..dst + w].copy_from_slice(&t.data()[src..src + w]);
            }
        }
    }
    Ok(out)
}

/// Draws an aligned random LR/HR patch pair: the HR crop starts at
/// `scale` times the LR origin and spans `scale * patch` pixels.
pub fn sample_patch(
    lr: &Tensor4,
    hr: &Tensor4,
    patch: usize,
    scale: usize,
    rng: &mut impl Rng,
) -> Result<(Tensor4, Tensor4)> {
    if hr.h() != lr.h() * scale || hr.w() != lr.w() * scale {
        return Err(SvanError::Dataset(format!(
            "HR {}x{} is not {scale}x the LR {}x{}",
            hr.h(),
            hr.w(),
            lr.h(),
            lr.w()
        )));
    }
    if lr.h() < patch || lr.w() < patch {
        return Err(SvanError::Dataset(format!(
            "LR image {}x{} smaller than patch {patch}",
            lr.h(),
            lr.w()
        )));
    }
    let y0 = rng.random_range(0..=lr.h() - patch);
    let x0 = rng.random_range(0..=lr.w() - patch);
    let lr_patch = crop(lr, y0, x0, patch, patch)?;
    let hr_patch = crop(hr, y0 * scale, x0 * scale, patch * scale, patch * scale)?;
    Ok((lr_patch, hr_patch))
}

/// Rotates every plane 90 degrees counter-clockwise; `(h, w)` becomes `(w, h)`.
fn rot90(t: &Tensor4) -> Tensor4 {
    let (h, w) = (t.h(), t.w());
    let mut out = Tensor4::zeros(t.n(), t.c(), w, h);
    for n in 0..t.n() {
        for c in 0..t.c() {
            for y in 0..h {
                for x in 0..w {
                    out.set(n, c, w - 1 - x, y, t.at(n, c, y, x));
                }
            }
        }
    }
    out
}

/// Mirrors every plane left-right.
fn hflip(t: &Tensor4) -> Tensor4 {
    let (h, w) = (t.h(), t.w());
    let mut out = Tensor4::zeros(t.n(), t.c(), h, w);
    for n in 0..t.n() {
        for c in 0..t.c() {
            for y in 0..h {
                for x in 0..w {
                    out.set(n, c, y, w - 1 - x, t.at(n, c, y, x));
                }
            }
        }
    }
    out
}

pub const AUGMENT_CODES: usize = 8;

/// Applies one of the eight dihedral transforms: the low two bits count
/// quarter turns, bit 2 adds a horizontal flip after rotating.
pub fn augment_tensor(t: &Tensor4, code: u8) -> Result<Tensor4> {
    if code as usize >= AUGMENT_CODES {
        return Err(SvanError::Usage(format!(
            "augmentation code {code} out of range 0..8"
        )));
    }
    let mut out = t.clone();
    for _ in 0..(code & 3) {
        out = rot90(&out);
    }
    if code & 4 != 0 {
        out = hflip(&out);
    }
    Ok(out)
}

/// Applies the same dihedral transform to an LR/HR pair.
pub fn augment_pair(lr: &Tensor4, hr: &Tensor4, code: u8) -> Result<(Tensor4, Tensor4)> {
    Ok((augment_tensor(lr, code)?, augment_tensor(hr, code)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn test_image(h: usize, w: usize) -> ImageRgb8 {
        let mut rgb = Vec::with_capacity(h * w * 3);
        for y in 0..h {
            for x in 0..w {
                rgb.push(((x * 7 + y * 13) % 256) as u8);
                rgb.push(((x * 3 + y * 29 + 64) % 256) as u8);
                rgb.push(((x * 11 + y * 5 + 128) % 256) as u8);
            }
        }
        ImageRgb8::new(h, w, rgb).unwrap()
    }

    #[test]
    fn png_round_trip_is_byte_identical() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("img.png");
        let img = test_image(13, 17);
        save_png(&img, &path).unwrap();
        let back = load_png(&path).unwrap();
        assert_eq!(back, img);
    }

    #[test]
    fn tensor_round_trip_preserves_bytes() {
        let img = test_image(9, 11);
        let t = img.to_tensor();
        assert!(t.data().iter().all(|&v| (0.0..=1.0).contains(&v)));
        let back = ImageRgb8::from_tensor(&t).unwrap();
        assert_eq!(back, img);
    }

    #[test]
    fn grayscale_png_promotes_to_rgb() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("gray.png");
        let file = std::fs::File::create(&path).unwrap();
        let mut encoder = png::Encoder::new(std::io::BufWriter::new(file), 5, 4);
        encoder.set_color(png::ColorType::Grayscale);
        encoder.set_depth(png::BitDepth::Eight);
        let mut writer = encoder.write_header().unwrap();
        let gray: Vec<u8> = (0..20).map(|i| (i * 12) as u8).collect();
        writer.write_image_data(&gray).unwrap();
        drop(writer);

        let img = load_png(&path).unwrap();
        for (i, &g) in gray.iter().enumerate() {
            assert_eq!(&img.rgb[i * 3..i * 3 + 3], &[g, g, g]);
        }
    }

    #[test]
    fn paletted_and_low_depth_pngs_are_expanded() {
        let dir = tempfile::tempdir().unwrap();

        // 2x2 indexed image over a 3-color palette.
        let path = dir.path().join("indexed.png");
        let file = std::fs::File::create(&path).unwrap();
        let mut encoder = png::Encoder::new(std::io::BufWriter::new(file), 2, 2);
        encoder.set_color(png::ColorType::Indexed);
        encoder.set_depth(png::BitDepth::Eight);
        encoder.set_palette(vec![255, 0, 0, 0, 255, 0, 0, 0, 255]);
        let mut writer = encoder.write_header().unwrap();
        writer.write_image_data(&[0, 1, 2, 0]).unwrap();
        drop(writer);
        let img = load_png(&path).unwrap();
        assert_eq!(&img.rgb[0..3], &[255, 0, 0]);
        assert_eq!(&img.rgb[3..6], &[0, 255, 0]);
        assert_eq!(&img.rgb[6..9], &[0, 0, 255]);
        assert_eq!(&img.rgb[9..12], &[255, 0, 0]);

        // 8-pixel-wide 1-bit grayscale row (packed into one byte per row).
        let path = dir.path().join("bilevel.png");
        let file = std::fs::File::create(&path).unwrap();
        let mut encoder = png::Encoder::new(std::io::BufWriter::new(file), 8, 1);
        encoder.set_color(png::ColorType::Grayscale);
        encoder.set_depth(png::BitDepth::One);
        let mut writer = encoder.write_header().unwrap();
        writer.write_image_data(&[0b1010_0110]).unwrap();
        drop(writer);
        let img = load_png(&path).unwrap();
        let grays: Vec<u8> = img.rgb.chunks(3).map(|c| c[0]).collect();
        assert_eq!(grays, vec![255, 0, 255, 0, 0, 255, 255, 0]);
    }

    #[test]
    fn sixteen_bit_png_is_rejected_by_kind() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("deep.png");
        let file = std::fs::File::create(&path).unwrap();
        let mut encoder = png::Encoder::new(std::io::BufWriter::new(file), 2, 2);
        encoder.set_color(png::ColorType::Grayscale);
        encoder.set_depth(png::BitDepth::Sixteen);
        let mut writer = encoder.write_header().unwrap();
        writer.write_image_data(&[0, 1, 2, 3, 4, 5, 6, 7]).unwrap();
        drop(writer);

        match load_png(&path) {
            Err(SvanError::UnsupportedImage { .. }) => {}
            other => panic!("expected UnsupportedImage, got {other:?}"),
        }
    }

    #[test]
    fn patch_sampling_is_aligned_and_reproducible() {
        let hr = test_image(40, 48).to_tensor();
        let lr = crate::resample::bicubic_downscale(&hr, 4).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let (lp, hp) = sample_patch(&lr, &hr, 8, 4, &mut rng).unwrap();
        assert_eq!(lp.shape(), [1, 3, 8, 8]);
        assert_eq!(hp.shape(), [1, 3, 32, 32]);

        let mut rng2 = ChaCha20Rng::seed_from_u64(5);
        let (lp2, hp2) = sample_patch(&lr, &hr, 8, 4, &mut rng2).unwrap();
        assert_eq!(lp, lp2);
        assert_eq!(hp, hp2);
    }

    #[test]
    fn patch_64_at_scale_4_yields_256_hr_patch() {
        let hr = Tensor4::from_fn(1, 3, 256, 288, |_, c, y, x| {
            ((c + y * 3 + x * 7) % 97) as f64 / 97.0
        });
        let lr = crate::resample::bicubic_downscale(&hr, 4).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let (lp, hp) = sample_patch(&lr, &hr, 64, 4, &mut rng).unwrap();
        assert_eq!(lp.shape(), [1, 3, 64, 64]);
        assert_eq!(hp.shape(), [1, 3, 256, 256]);
    }

    #[test]
    fn patch_sampling_rejects_small_images() {
        let hr = test_image(32, 40).to_tensor();
        let lr = crate::resample::bicubic_downscale(&hr, 4).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        assert!(sample_patch(&lr, &hr, 64, 4, &mut rng).is_err());
    }

    #[test]
    fn augmentation_group_properties() {
        let t = test_image(6, 9).to_tensor();
        // Code 0 is the identity.
        assert_eq!(augment_tensor(&t, 0).unwrap(), t);
        // Flipping twice restores the original.
        let f = augment_tensor(&t, 4).unwrap();
        assert_eq!(augment_tensor(&f, 4).unwrap(), t);
        // A quarter turn swaps h and w.
        let r = augment_tensor(&t, 1).unwrap();
        assert_eq!(r.shape(), [1, 3, 9, 6]);
        // Codes out of range are rejected.
        assert!(augment_tensor(&t, 8).is_err());
        // Every code has an inverse within the set.
        for code in 0..AUGMENT_CODES as u8 {
            let once = augment_tensor(&t, code).unwrap();
            let inverted =
                (0..AUGMENT_CODES as u8).any(|inv| augment_tensor(&once, inv).unwrap() == t);
            assert!(inverted, "no inverse for code {code}");
        }
    }

    #[test]
    fn modcrop_truncates_to_multiple() {
        let t = test_image(19, 22).to_tensor();
        let c = modcrop(&t, 4).unwrap();
        assert_eq!(c.shape(), [1, 3, 16, 20]);
        for y in 0..16 {
            for x in 0..20 {
                assert_eq!(c.at(0, 1, y, x), t.at(0, 1, y, x));
            }
        }
    }
}
