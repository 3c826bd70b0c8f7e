//! Whole-image composition: preprocess, segment, extract.

use std::path::Path;

use crate::config::PipelineConfig;
use crate::error::Result;
use crate::features::{extract, FeatureVector};
use crate::imaging::{load_image, Image};
use crate::preprocess::{preprocess, Preprocessed};
use crate::segment::{segment_image, SegmentationResult};

/// Everything the per-image pipeline produces, kept so callers can save
/// intermediates (enhanced image, mask overlay) next to the features.
#[derive(Debug, Clone)]
pub struct ProcessedImage {
    pub preprocessed: Preprocessed,
    pub segmentation: SegmentationResult,
    pub features: FeatureVector,
}

/// Runs the full per-image pipeline with the configured stages.
pub fn process_image(img: &Image, cfg: &PipelineConfig) -> Result<ProcessedImage> {
    cfg.validate()?;
    let preprocessed = preprocess(img, &cfg.preprocess);
    let segmentation = segment_image(&preprocessed.lab, &cfg.segment)?;
    let features = extract(&preprocessed.gray, &segmentation.lesion_mask, &cfg.glcm)?;
    Ok(ProcessedImage { preprocessed, segmentation, features })
}

/// Loads the image at `path` and runs `process_image`.
pub fn process_file(path: &Path, cfg: &PipelineConfig) -> Result<ProcessedImage> {
    let img = load_image(path)?;
    process_image(&img, cfg)
}

/// Blends the mask over an image for visual inspection: masked pixels are
/// pulled halfway to pure red, the rest pass through.
pub fn overlay_mask(img: &Image, mask: &[bool]) -> Image {
    assert_eq!(img.pixels().len(), mask.len(), "mask size mismatch");
    let pixels = img
        .pixels()
        .iter()
        .zip(mask)
        .map(|(&[r, g, b], &m)| {
            if m {
                [0.5 * r + 0.5, 0.5 * g, 0.5 * b]
            } else {
                [r, g, b]
            }
        })
        .collect();
    Image::from_pixels(img.width(), img.height(), pixels)
}
