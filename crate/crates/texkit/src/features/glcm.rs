//! Gray-level co-occurrence matrices and the six texture features read from
//! them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::GrayImage;

/// Pair offset direction. Angles follow the usual GLCM convention: 0° looks
/// right along the row, 45° up-right, 90° up, 135° up-left.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Angle {
    Deg0,
    Deg45,
    Deg90,
    Deg135,
}

impl Angle {
    pub const ALL: [Angle; 4] = [Angle::Deg0, Angle::Deg45, Angle::Deg90, Angle::Deg135];

    /// (row, col) offset for distance `t`.
    fn offset(self, t: isize) -> (isize, isize) {
        match self {
            Angle::Deg0 => (0, t),
            Angle::Deg45 => (-t, t),
            Angle::Deg90 => (-t, 0),
            Angle::Deg135 => (-t, -t),
        }
    }

    pub fn degrees(self) -> u32 {
        match self {
            Angle::Deg0 => 0,
            Angle::Deg45 => 45,
            Angle::Deg90 => 90,
            Angle::Deg135 => 135,
        }
    }

    pub fn from_degrees(deg: u32) -> Option<Angle> {
        match deg {
            0 => Some(Angle::Deg0),
            45 => Some(Angle::Deg45),
            90 => Some(Angle::Deg90),
            135 => Some(Angle::Deg135),
            _ => None,
        }
    }
}

impl Serialize for Angle {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u32(self.degrees())
    }
}

impl<'de> Deserialize<'de> for Angle {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let deg = u32::deserialize(d)?;
        Angle::from_degrees(deg)
            .ok_or_else(|| serde::de::Error::custom(format!("angle must be 0, 45, 90 or 135, got {deg}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GlcmConfig {
    /// Number of gray levels L after quantization.
    pub gray_levels: usize,
    /// Pair distance T in pixels.
    pub distance: usize,
    /// Angles to compute; features are averaged over them.
    pub angles: Vec<Angle>,
    /// Count each pair in both directions.
    pub symmetric: bool,
    /// Require both endpoints of a pair to lie inside the lesion mask.
    pub masked_pairs_only: bool,
}

impl Default for GlcmConfig {
    fn default() -> Self {
        GlcmConfig {
            gray_levels: 8,
            distance: 1,
            angles: Angle::ALL.to_vec(),
            symmetric: true,
            masked_pairs_only: true,
        }
    }
}

impl GlcmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.gray_levels < 2 || self.gray_levels > 256 {
            return Err(Error::invalid("glcm.gray_levels must be in 2..=256"));
        }
        if self.distance == 0 {
            return Err(Error::invalid("glcm.distance must be at least 1"));
        }
        if self.angles.is_empty() {
            return Err(Error::invalid("glcm.angles must not be empty"));
        }
        Ok(())
    }
}

/// Normalized co-occurrence matrix for one angle.
#[derive(Debug, Clone)]
pub struct Glcm {
    pub levels: usize,
    /// Row-major L×L probabilities; sums to 1 when `pair_count > 0`.
    pub matrix: Vec<f64>,
    /// Raw number of counted (ordered) pairs before normalization.
    pub pair_count: u64,
}

impl Glcm {
    #[inline]
    pub fn p(&self, i: usize, j: usize) -> f64 {
        self.matrix[i * self.levels + j]
    }
}

/// Quantizes [0,1] gray values to `levels` buckets:
/// `level = min(floor(v * L), L - 1)`.
pub fn quantize(gray: &GrayImage, levels: usize) -> Vec<u8> {
    assert!((2..=256).contains(&levels), "levels must be in 2..=256");
    let l = levels as f64;
    gray.pixels()
        .iter()
        .map(|&v| {
            let q = (v.max(0.0) * l).floor() as usize;
            q.min(levels - 1) as u8
        })
        .collect()
}

/// Counts level pairs at the configured distance for every configured angle.
/// Angles with no valid pair produce a zeroed matrix with `pair_count = 0`;
/// if every angle is empty the region is degenerate.
pub fn compute_glcm(
    levels: &[u8],
    width: usize,
    height: usize,
    mask: Option<&[bool]>,
    cfg: &GlcmConfig,
) -> Result<Vec<Glcm>> {
    cfg.validate()?;
    assert_eq!(levels.len(), width * height);
    if let Some(m) = mask {
        assert_eq!(m.len(), levels.len());
    }
    let l = cfg.gray_levels;
    let t = cfg.distance as isize;
    let in_mask = |r: usize, c: usize| mask.is_none_or(|m| m[r * width + c]);

    let mut out = Vec::with_capacity(cfg.angles.len());
    for &angle in &cfg.angles {
        let (dr, dc) = angle.offset(t);
        let mut counts = vec![0u64; l * l];
        let mut total = 0u64;
        for r in 0..height {
            for c in 0..width {
                let r2 = r as isize + dr;
                let c2 = c as isize + dc;
                if r2 < 0 || r2 >= height as isize || c2 < 0 || c2 >= width as isize {
                    continue;
                }
                let (r2, c2) = (r2 as usize, c2 as usize);
                if cfg.masked_pairs_only && !(in_mask(r, c) && in_mask(r2, c2)) {
                    continue;
                }
                let i = levels[r * width + c] as usize;
                let j = levels[r2 * width + c2] as usize;
                debug_assert!(i < l && j < l, "level out of range");
                counts[i * l + j] += 1;
                total += 1;
                if cfg.symmetric {
                    counts[j * l + i] += 1;
                    total += 1;
                }
            }
        }
        let matrix = if total > 0 {
            counts.iter().map(|&c| c as f64 / total as f64).collect()
        } else {
            vec![0.0; l * l]
        };
        out.push(Glcm { levels: l, matrix, pair_count: total });
    }
    if out.iter().all(|g| g.pair_count == 0) {
        return Err(Error::data(
            "degenerate region: no valid pixel pair at any configured angle",
        ));
    }
    Ok(out)
}

/// The six texture features of one co-occurrence matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlcmFeatures {
    pub contrast: f64,
    pub correlation: f64,
    pub energy: f64,
    pub entropy: f64,
    pub homogeneity: f64,
    pub cluster_shade: f64,
}

/// Evaluates contrast, correlation, energy, entropy, homogeneity and cluster
/// shade on a normalized matrix. Correlation of a zero-variance matrix is
/// defined as 1 (a constant region co-occurs with itself perfectly).
pub fn glcm_features(g: &Glcm) -> GlcmFeatures {
    let l = g.levels;
    let mut px = vec![0.0; l];
    let mut py = vec![0.0; l];
    for (i, row_sum) in px.iter_mut().enumerate() {
        for (j, col_sum) in py.iter_mut().enumerate() {
            let p = g.p(i, j);
            *row_sum += p;
            *col_sum += p;
        }
    }
    let mean = |m: &[f64]| m.iter().enumerate().map(|(i, &p)| i as f64 * p).sum::<f64>();
    let mu_x = mean(&px);
    let mu_y = mean(&py);
    let var = |m: &[f64], mu: f64| {
        m.iter()
            .enumerate()
            .map(|(i, &p)| (i as f64 - mu) * (i as f64 - mu) * p)
            .sum::<f64>()
    };
    let sigma_x = var(&px, mu_x).sqrt();
    let sigma_y = var(&py, mu_y).sqrt();

    let mut contrast = 0.0;
    let mut cross = 0.0;
    let mut energy = 0.0;
    let mut entropy = 0.0;
    let mut homogeneity = 0.0;
    let mut shade = 0.0;
    for i in 0..l {
        for j in 0..l {
            let p = g.p(i, j);
            let (fi, fj) = (i as f64, j as f64);
            let d = fi - fj;
            contrast += d * d * p;
            cross += fi * fj * p;
            energy += p * p;
            if p > 0.0 {
                entropy -= p * p.log2();
            }
            homogeneity += p / (1.0 + d * d);
            let s = fi + fj - mu_x - mu_y;
            shade += s * s * s * p;
        }
    }
    let correlation = if sigma_x * sigma_y < 1e-12 {
        1.0
    } else {
        (cross - mu_x * mu_y) / (sigma_x * sigma_y)
    };
    GlcmFeatures { contrast, correlation, energy, entropy, homogeneity, cluster_shade: shade }
}
