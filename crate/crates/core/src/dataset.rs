//! Super-resolution dataset loading: a directory of HR PNGs, with LR images
//! either read from a sibling directory suffixed by the scale (for example
//! `Set5` with `Set5_x4`) or synthesized on the fly by anti-aliased bicubic
//! downscaling of the mod-cropped HR image.

use std::path::{Path, PathBuf};

use crate::error::{Result, SvanError};
use crate::image::{load_png, modcrop};
use crate::resample::bicubic_downscale;
use crate::tensor::Tensor4;

/// One LR/HR pair, already converted to `[0,1]` tensors.
#[derive(Debug, Clone)]
pub struct DatasetEntry {
    pub id: String,
    /// Mod-cropped HR image, `(1, 3, s*h, s*w)`.
    pub hr: Tensor4,
    /// LR image, `(1, 3, h, w)`.
    pub lr: Tensor4,
}

#[derive(Debug, Clone)]
pub struct SrDataset {
    pub scale: usize,
    pub entries: Vec<DatasetEntry>,
}

impl SrDataset {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Smallest LR spatial dimension across the dataset.
    pub fn min_lr_dim(&self) -> usize {
        self.entries
            .iter()
            .map(|e| e.lr.h().min(e.lr.w()))
            .min()
            .unwrap_or(0)
    }
}

/// Sibling LR directory for a given HR directory and scale.
pub fn lr_dir_for(hr_dir: &Path, scale: usize) -> PathBuf {
    let name = hr_dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    hr_dir.with_file_name(format!("{name}_x{scale}"))
}

fn png_paths(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| SvanError::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .map(|e| e.eq_ignore_ascii_case("png"))
                .unwrap_or(false)
        })
        .collect();
    paths.sort();
    Ok(paths)
}

/// Loads every PNG under `hr_dir`. HR images are mod-cropped to a multiple of
/// `scale`; LR comes from the sibling directory when a file of the same name
/// exists there, otherwise from bicubic downscaling.
pub fn load_dataset(hr_dir: &Path, scale: usize) -> Result<SrDataset> {
    if !(2..=4).contains(&scale) {
        return Err(SvanError::Usage(format!(
            "scale must be 2, 3 or 4, got {scale}"
        )));
    }
    let paths = png_paths(hr_dir)?;
    if paths.is_empty() {
        return Err(SvanError::Dataset(format!(
            "no PNG images found in {}",
            hr_dir.display()
        )));
    }
    let lr_dir = lr_dir_for(hr_dir, scale);

    let mut entries = Vec::with_capacity(paths.len());
    for path in paths {
        let id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let hr = modcrop(&load_png(&path)?.to_tensor(), scale)?;

        let lr_path = path
            .file_name()
            .map(|n| lr_dir.join(n))
            .filter(|p| p.is_file());
        let lr = match lr_path {
            Some(p) => {
                let lr = load_png(&p)?.to_tensor();
                if lr.h() * scale != hr.h() || lr.w() * scale != hr.w() {
                    return Err(SvanError::Dataset(format!(
                        "{id}: LR {}x{} does not match HR {}x{} at scale {scale}",
                        lr.h(),
                        lr.w(),
                        hr.h(),
                        hr.w()
                    )));
                }
                lr
            }
            None => bicubic_downscale(&hr, scale)?,
        };
        entries.push(DatasetEntry { id, hr, lr });
    }
    Ok(SrDataset { scale, entries })
}
