//! Texture and statistical features of the segmented region.

mod glcm;
mod stats;
pub mod table;

pub use glcm::{compute_glcm, glcm_features, quantize, Angle, Glcm, GlcmConfig, GlcmFeatures};
pub use stats::{region_stats, statistical_features, RegionStats};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::GrayImage;

pub const FEATURE_COUNT: usize = 13;

/// Column names in canonical order; the first six are GLCM features, the
/// remaining seven are statistical.
pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "contrast",
    "correlation",
    "energy",
    "entropy",
    "homogeneity",
    "cluster_shade",
    "mean",
    "std",
    "variance",
    "kurtosis",
    "skewness",
    "rms",
    "smoothness",
];

/// The fixed-order 13-element descriptor of one image region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub contrast: f64,
    pub correlation: f64,
    pub energy: f64,
    pub entropy: f64,
    pub homogeneity: f64,
    pub cluster_shade: f64,
    pub mean: f64,
    pub std: f64,
    pub variance: f64,
    pub kurtosis: f64,
    pub skewness: f64,
    pub rms: f64,
    pub smoothness: f64,
}

impl FeatureVector {
    pub fn to_array(self) -> [f64; FEATURE_COUNT] {
        [
            self.contrast,
            self.correlation,
            self.energy,
            self.entropy,
            self.homogeneity,
            self.cluster_shade,
            self.mean,
            self.std,
            self.variance,
            self.kurtosis,
            self.skewness,
            self.rms,
            self.smoothness,
        ]
    }

    pub fn from_array(a: [f64; FEATURE_COUNT]) -> Self {
        FeatureVector {
            contrast: a[0],
            correlation: a[1],
            energy: a[2],
            entropy: a[3],
            homogeneity: a[4],
            cluster_shade: a[5],
            mean: a[6],
            std: a[7],
            variance: a[8],
            kurtosis: a[9],
            skewness: a[10],
            rms: a[11],
            smoothness: a[12],
        }
    }
}

/// Feature subset used for ablation runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureGroup {
    Combined,
    Glcm,
    Statistical,
}

impl FeatureGroup {
    pub fn indices(self) -> std::ops::Range<usize> {
        match self {
            FeatureGroup::Combined => 0..FEATURE_COUNT,
            FeatureGroup::Glcm => 0..6,
            FeatureGroup::Statistical => 6..FEATURE_COUNT,
        }
    }

    pub fn select(self, v: &[f64]) -> Vec<f64> {
        v[self.indices()].to_vec()
    }
}

/// Runs quantization, GLCM accumulation and region statistics, averaging the
/// GLCM features over all angles that produced at least one pair.
pub fn extract(gray: &GrayImage, mask: &[bool], cfg: &GlcmConfig) -> Result<FeatureVector> {
    let levels = quantize(gray, cfg.gray_levels);
    let mask_opt = if cfg.masked_pairs_only { Some(mask) } else { None };
    let glcms = compute_glcm(&levels, gray.width(), gray.height(), mask_opt, cfg)?;
    let mut acc = [0.0f64; 6];
    let mut used = 0usize;
    for g in &glcms {
        if g.pair_count == 0 {
            continue;
        }
        let f = glcm_features(g);
        acc[0] += f.contrast;
        acc[1] += f.correlation;
        acc[2] += f.energy;
        acc[3] += f.entropy;
        acc[4] += f.homogeneity;
        acc[5] += f.cluster_shade;
        used += 1;
    }
    for v in &mut acc {
        *v /= used as f64;
    }
    let s = statistical_features(gray, mask)?;
    Ok(FeatureVector {
        contrast: acc[0],
        correlation: acc[1],
        energy: acc[2],
        entropy: acc[3],
        homogeneity: acc[4],
        cluster_shade: acc[5],
        mean: s.mean,
        std: s.std,
        variance: s.variance,
        kurtosis: s.kurtosis,
        skewness: s.skewness,
        rms: s.rms,
        smoothness: s.smoothness,
    })
}

/// Per-dimension z-score transform fitted on training vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalizer {
    pub means: Vec<f64>,
    /// Population standard deviations; entries below 1e-12 mark dimensions
    /// that are centered but not scaled.
    pub stds: Vec<f64>,
}

pub const STD_FLOOR: f64 = 1e-12;

/// Fits per-dimension mean and population std over at least two vectors.
pub fn fit_normalizer(vectors: &[Vec<f64>]) -> Result<Normalizer> {
    if vectors.len() < 2 {
        return Err(Error::data("normalizer needs at least 2 vectors"));
    }
    let dim = vectors[0].len();
    if vectors.iter().any(|v| v.len() != dim) {
        return Err(Error::data("normalizer input dimensions differ"));
    }
    let n = vectors.len() as f64;
    let mut means = vec![0.0; dim];
    for v in vectors {
        for (m, x) in means.iter_mut().zip(v) {
            *m += x;
        }
    }
    for m in &mut means {
        *m /= n;
    }
    let mut stds = vec![0.0; dim];
    for v in vectors {
        for ((s, x), m) in stds.iter_mut().zip(v).zip(&means) {
            let d = x - m;
            *s += d * d;
        }
    }
    for s in &mut stds {
        *s = (*s / n).sqrt();
    }
    Ok(Normalizer { means, stds })
}

impl Normalizer {
    pub fn dim(&self) -> usize {
        self.means.len()
    }

    /// Applies the fitted transform; constant dimensions are centered only.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.dim(), "normalizer dimension mismatch");
        v.iter()
            .zip(&self.means)
            .zip(&self.stds)
            .map(|((x, m), s)| if *s < STD_FLOOR { x - m } else { (x - m) / s })
            .collect()
    }

    pub fn apply_all(&self, vs: &[Vec<f64>]) -> Vec<Vec<f64>> {
        vs.iter().map(|v| self.apply(v)).collect()
    }
}
