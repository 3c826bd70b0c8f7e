//! Brute-force reference arithmetic shared by the integration suites.
//!
//! Everything here is written as plainly as possible, favoring obvious
//! O(n^2) loops over the streaming or boundary-aware formulations used by
//! the library, so that agreement between the two is meaningful.

#![allow(dead_code)]

/// All (source, destination) pixel pairs at the given offset, counted by
/// scanning the full cross product of pixel coordinates.
pub fn brute_pair_counts(
    levels: &[u8],
    width: usize,
    height: usize,
    mask: Option<&[bool]>,
    (dr, dc): (isize, isize),
    symmetric: bool,
    l: usize,
) -> (Vec<u64>, u64) {
    let mut counts = vec![0u64; l * l];
    let mut total = 0u64;
    for r1 in 0..height as isize {
        for c1 in 0..width as isize {
            for r2 in 0..height as isize {
                for c2 in 0..width as isize {
                    if r2 - r1 != dr || c2 - c1 != dc {
                        continue;
                    }
                    let p1 = (r1 * width as isize + c1) as usize;
                    let p2 = (r2 * width as isize + c2) as usize;
                    if let Some(m) = mask {
                        if !m[p1] || !m[p2] {
                            continue;
                        }
                    }
                    let (i, j) = (levels[p1] as usize, levels[p2] as usize);
                    counts[i * l + j] += 1;
                    total += 1;
                    if symmetric {
                        counts[j * l + i] += 1;
                        total += 1;
                    }
                }
            }
        }
    }
    (counts, total)
}

/// Row/column offset of a co-occurrence direction given in degrees.
pub fn offset_of_degrees(deg: u32, t: isize) -> (isize, isize) {
    match deg {
        0 => (0, t),
        45 => (-t, t),
        90 => (-t, 0),
        135 => (-t, -t),
        other => panic!("unsupported angle {other}"),
    }
}

/// The six texture descriptors of a normalized co-occurrence matrix,
/// evaluated term by term from their definitions. A zero-variance matrix
/// gets correlation 1.
pub fn naive_glcm_features(p: &[f64], l: usize) -> [f64; 6] {
    let at = |i: usize, j: usize| p[i * l + j];
    let mut mu_x = 0.0;
    let mut mu_y = 0.0;
    for i in 0..l {
        for j in 0..l {
            mu_x += i as f64 * at(i, j);
            mu_y += j as f64 * at(i, j);
        }
    }
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for i in 0..l {
        for j in 0..l {
            var_x += (i as f64 - mu_x).powi(2) * at(i, j);
            var_y += (j as f64 - mu_y).powi(2) * at(i, j);
        }
    }
    let (sigma_x, sigma_y) = (var_x.sqrt(), var_y.sqrt());

    let mut contrast = 0.0;
    let mut cross = 0.0;
    let mut energy = 0.0;
    let mut entropy = 0.0;
    let mut homogeneity = 0.0;
    let mut shade = 0.0;
    for i in 0..l {
        for j in 0..l {
            let v = at(i, j);
            contrast += (i as f64 - j as f64).powi(2) * v;
            cross += i as f64 * j as f64 * v;
            energy += v * v;
            if v > 0.0 {
                entropy -= v * v.log2();
            }
            homogeneity += v / (1.0 + (i as f64 - j as f64).powi(2));
            shade += (i as f64 + j as f64 - mu_x - mu_y).powi(3) * v;
        }
    }
    let correlation =
        if sigma_x * sigma_y < 1e-12 { 1.0 } else { (cross - mu_x * mu_y) / (sigma_x * sigma_y) };
    [contrast, correlation, energy, entropy, homogeneity, shade]
}

/// Independent evaluation of the seven region descriptors: mean, std,
/// variance, kurtosis, skewness, RMS, smoothness. Population moments; a
/// sample whose central second moment is below 1e-24 is treated as
/// constant, with variance, std, kurtosis and skewness all zero.
pub fn naive_region_stats(values: &[f64]) -> [f64; 7] {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let variance = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let rms = (values.iter().map(|v| v * v).sum::<f64>() / n).sqrt();
    if variance < 1e-24 {
        // smoothness 1 - 1/(1 + variance) collapses to 0 for a constant sample
        return [mean, 0.0, 0.0, 0.0, 0.0, rms, 0.0];
    }
    let std = variance.sqrt();
    let m4 = values.iter().map(|v| (v - mean).powi(4)).sum::<f64>() / n;
    let kurtosis = m4 / (variance * variance) - 3.0;
    let skewness = (mean - naive_mode(values)) / std;
    [mean, std, variance, kurtosis, skewness, rms, 1.0 - 1.0 / (1.0 + variance)]
}

/// Mode as the lower edge of the fullest of 256 equal bins over
/// [min, max]; ties go to the lowest bin, and a zero-width range returns
/// the minimum itself.
fn naive_mode(values: &[f64]) -> f64 {
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi <= lo {
        return lo;
    }
    let mut bins = vec![0u32; 256];
    for &v in values {
        let idx = ((v - lo) / (hi - lo) * 256.0) as usize;
        bins[idx.min(255)] += 1;
    }
    let best = bins
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
        .unwrap()
        .0;
    lo + best as f64 / 256.0 * (hi - lo)
}
