//! First-order statistics of the masked gray region.

use crate::error::{Error, Result};
use crate::imaging::GrayImage;

const MODE_BINS: usize = 256;
const VAR_FLOOR: f64 = 1e-24;

/// Seven statistical descriptors of a value sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionStats {
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub variance: f64,
    /// Excess kurtosis, m4 / m2^2 - 3; 0 for a constant sample.
    pub kurtosis: f64,
    /// Pearson mode skewness (mean - mode) / std; 0 for a constant sample.
    pub skewness: f64,
    pub rms: f64,
    /// 1 - 1/(1 + variance), in [0, 1).
    pub smoothness: f64,
}

/// Histogram mode over 256 equal bins spanning [min, max]; ties break to the
/// smallest bin; the reported mode is the bin's lower edge.
fn histogram_mode(values: &[f64], lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return lo;
    }
    let mut bins = [0u32; MODE_BINS];
    let scale = MODE_BINS as f64 / (hi - lo);
    for &v in values {
        let idx = (((v - lo) * scale) as usize).min(MODE_BINS - 1);
        bins[idx] += 1;
    }
    let mut best = 0;
    for (i, &c) in bins.iter().enumerate() {
        if c > bins[best] {
            best = i;
        }
    }
    lo + best as f64 * (hi - lo) / MODE_BINS as f64
}

/// Computes the seven descriptors of a non-empty value sample.
pub fn region_stats(values: &[f64]) -> Result<RegionStats> {
    if values.is_empty() {
        return Err(Error::data("empty region: no pixels under the mask"));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let mut m2 = 0.0;
    let mut m4 = 0.0;
    let mut sq = 0.0;
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &v in values {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m4 += d2 * d2;
        sq += v * v;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    m2 /= n;
    m4 /= n;
    // Sub-floor variance is rounding residue of a constant sample; report it
    // as exactly zero so the degenerate conventions are crisp.
    let (variance, std, kurtosis, skewness) = if m2 < VAR_FLOOR {
        (0.0, 0.0, 0.0, 0.0)
    } else {
        let std = m2.sqrt();
        let mode = histogram_mode(values, lo, hi);
        (m2, std, m4 / (m2 * m2) - 3.0, (mean - mode) / std)
    };
    Ok(RegionStats {
        mean,
        std,
        variance,
        kurtosis,
        skewness,
        rms: (sq / n).sqrt(),
        smoothness: 1.0 - 1.0 / (1.0 + variance),
    })
}

/// Statistics over the in-mask pixels of a gray image.
pub fn statistical_features(gray: &GrayImage, mask: &[bool]) -> Result<RegionStats> {
    assert_eq!(mask.len(), gray.pixels().len());
    let values: Vec<f64> = gray
        .pixels()
        .iter()
        .zip(mask)
        .filter(|(_, &m)| m)
        .map(|(&v, _)| v)
        .collect();
    region_stats(&values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_region_degenerate_conventions() {
        let s = region_stats(&[0.3; 10]).unwrap();
        assert!((s.mean - 0.3).abs() < 1e-15);
        assert_eq!(s.std, 0.0);
        assert_eq!(s.variance, 0.0);
        assert_eq!(s.kurtosis, 0.0);
        assert_eq!(s.skewness, 0.0);
        assert!((s.rms - 0.3).abs() < 1e-15);
        assert_eq!(s.smoothness, 0.0);
    }

    #[test]
    fn reference_sample_1_1_2_3() {
        let s = region_stats(&[1.0, 1.0, 2.0, 3.0]).unwrap();
        assert!((s.mean - 1.75).abs() < 1e-12);
        assert!((s.std - 0.82915619758885).abs() < 1e-9);
        assert!((s.variance - 0.6875).abs() < 1e-12);
        assert!((s.kurtosis - -1.371900826446281).abs() < 1e-9);
        assert!((s.skewness - 0.9045340337332909).abs() < 1e-9);
        assert!((s.rms - 1.9364916731037085).abs() < 1e-9);
        assert!((s.smoothness - 0.40740740740740744).abs() < 1e-12);
    }

    #[test]
    fn two_point_distribution_has_kurtosis_minus_two() {
        use rand::Rng;
        let mut rng = crate::rng::rng_for(2, crate::rng::Stream::Synth, 1);
        let values: Vec<f64> =
            (0..10_000).map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 }).collect();
        let s = region_stats(&values).unwrap();
        assert!(s.mean.abs() < 0.05);
        assert!((s.kurtosis - -2.0).abs() < 0.05);
    }

    #[test]
    fn variance_equals_std_squared() {
        let s = region_stats(&[0.1, 0.4, 0.4, 0.9, 0.2]).unwrap();
        assert!((s.variance - s.std * s.std).abs() < 1e-9);
        assert!((0.0..1.0).contains(&s.smoothness));
    }

    #[test]
    fn empty_input_errors() {
        assert!(region_stats(&[]).is_err());
        let g = GrayImage::from_pixels(2, 2, vec![0.5; 4]);
        assert!(statistical_features(&g, &[false; 4]).is_err());
    }

    #[test]
    fn masked_selection_matches_manual_subset() {
        let g = GrayImage::from_pixels(2, 2, vec![0.1, 0.9, 0.5, 0.7]);
        let mask = [true, false, true, true];
        let s = statistical_features(&g, &mask).unwrap();
        let manual = region_stats(&[0.1, 0.5, 0.7]).unwrap();
        assert_eq!(s, manual);
    }

    #[test]
    fn mode_tie_breaks_to_smallest_bin() {
        // Two values, one sample each: both bins have count 1, the smaller
        // bin (holding 1.0) wins, so mode = lo and skewness is positive.
        let s = region_stats(&[1.0, 2.0]).unwrap();
        assert!(s.skewness > 0.0);
    }
}
