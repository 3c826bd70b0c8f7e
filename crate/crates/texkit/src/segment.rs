//! K-means segmentation over L*a*b pixels and lesion mask selection.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::preprocess::LabImage;
use crate::rng::{rng_for, Stream};

/// Channels fed to the clustering stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureSpace {
    /// a* and b* only; lightness variation does not dominate the distance.
    Ab,
    /// Full L*, a*, b*.
    Lab,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KMeansConfig {
    pub k: usize,
    pub max_iterations: usize,
    /// Independent k-means++ runs; the one with minimal distortion wins.
    pub restarts: usize,
    /// Center-movement threshold that ends a run.
    pub tolerance: f64,
    pub feature_space: FeatureSpace,
    #[serde(skip)]
    pub seed: u64,
}

impl Default for KMeansConfig {
    fn default() -> Self {
        KMeansConfig {
            k: 3,
            max_iterations: 100,
            restarts: 5,
            tolerance: 1e-4,
            feature_space: FeatureSpace::Ab,
            seed: 0,
        }
    }
}

impl KMeansConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::invalid("segment.k must be at least 1"));
        }
        if self.restarts == 0 {
            return Err(Error::invalid("segment.restarts must be at least 1"));
        }
        if self.max_iterations == 0 {
            return Err(Error::invalid("segment.max_iterations must be at least 1"));
        }
        if !(self.tolerance >= 0.0) {
            return Err(Error::invalid("segment.tolerance must be non-negative"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct KMeansResult {
    pub assignments: Vec<usize>,
    pub centers: Vec<Vec<f64>>,
    /// Final value of the summed squared distance J.
    pub distortion: f64,
    /// J after every assignment step, in order; non-increasing.
    pub distortion_history: Vec<f64>,
}

#[inline]
fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest_center(point: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (j, c) in centers.iter().enumerate() {
        let d = dist_sq(point, c);
        if d < best_d {
            best = j;
            best_d = d;
        }
    }
    (best, best_d)
}

fn assign_all(points: &[Vec<f64>], centers: &[Vec<f64>]) -> (Vec<usize>, f64) {
    let mut assignments = Vec::with_capacity(points.len());
    let mut j = 0.0;
    for p in points {
        let (idx, d) = nearest_center(p, centers);
        assignments.push(idx);
        j += d;
    }
    (assignments, j)
}

/// Lloyd iterations from explicit starting centers. Public so the refinement
/// can be compared step for step against an independent implementation.
pub fn lloyd(
    points: &[Vec<f64>],
    mut centers: Vec<Vec<f64>>,
    max_iterations: usize,
    tolerance: f64,
) -> KMeansResult {
    let k = centers.len();
    let dim = points[0].len();
    let mut history = Vec::new();
    let mut assignments = vec![0; points.len()];
    let mut distortion = f64::INFINITY;
    for _ in 0..max_iterations {
        let (a, j) = assign_all(points, &centers);
        assignments = a;
        distortion = j;
        history.push(j);

        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &c) in points.iter().zip(&assignments) {
            counts[c] += 1;
            for (s, v) in sums[c].iter_mut().zip(p) {
                *s += v;
            }
        }
        let mut new_centers: Vec<Vec<f64>> = Vec::with_capacity(k);
        for c in 0..k {
            if counts[c] > 0 {
                new_centers.push(sums[c].iter().map(|s| s / counts[c] as f64).collect());
            } else {
                new_centers.push(centers[c].clone()); // reseeded below
            }
        }
        // Empty clusters grab the point currently farthest from its center.
        if counts.contains(&0) {
            let mut d2: Vec<f64> = points
                .iter()
                .zip(&assignments)
                .map(|(p, &c)| dist_sq(p, &centers[c]))
                .collect();
            for c in 0..k {
                if counts[c] == 0 {
                    let far = d2
                        .iter()
                        .enumerate()
                        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap().then(b.0.cmp(&a.0)))
                        .map(|(i, _)| i)
                        .unwrap();
                    new_centers[c] = points[far].clone();
                    d2[far] = -1.0;
                }
            }
        }
        let shift = centers
            .iter()
            .zip(&new_centers)
            .map(|(a, b)| dist_sq(a, b).sqrt())
            .fold(0.0, f64::max);
        centers = new_centers;
        if shift <= tolerance {
            break;
        }
    }
    // Final assignment against the final centers so the nearest-center
    // invariant holds exactly.
    let (a, j) = assign_all(points, &centers);
    assignments = a;
    if j <= distortion {
        distortion = j;
        history.push(j);
    }
    KMeansResult { assignments, centers, distortion, distortion_history: history }
}

fn kmeans_pp_init(points: &[Vec<f64>], k: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut centers: Vec<Vec<f64>> = Vec::with_capacity(k);
    centers.push(points[rng.random_range(0..n)].clone());
    let mut d2: Vec<f64> = points.iter().map(|p| dist_sq(p, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = d2.iter().sum();
        let chosen = if total > 0.0 {
            let mut target = rng.random::<f64>() * total;
            let mut pick = None;
            let mut last_positive = 0;
            for (i, &w) in d2.iter().enumerate() {
                if w > 0.0 {
                    last_positive = i;
                    if target < w {
                        pick = Some(i);
                        break;
                    }
                    target -= w;
                }
            }
            pick.unwrap_or(last_positive)
        } else {
            rng.random_range(0..n)
        };
        let c = points[chosen].clone();
        for (i, p) in points.iter().enumerate() {
            let d = dist_sq(p, &c);
            if d < d2[i] {
                d2[i] = d;
            }
        }
        centers.push(c);
    }
    centers
}

fn count_distinct(points: &[Vec<f64>]) -> usize {
    let mut seen: std::collections::BTreeSet<Vec<u64>> = std::collections::BTreeSet::new();
    for p in points {
        seen.insert(p.iter().map(|v| v.to_bits()).collect());
    }
    seen.len()
}

/// Best-of-restarts k-means with k-means++ initialization.
pub fn kmeans(points: &[Vec<f64>], cfg: &KMeansConfig) -> Result<KMeansResult> {
    cfg.validate()?;
    if points.is_empty() {
        return Err(Error::data("k-means: no points"));
    }
    let distinct = count_distinct(points);
    if cfg.k > distinct {
        return Err(Error::data(format!(
            "k-means: k={} exceeds the {distinct} distinct point(s)",
            cfg.k
        )));
    }
    use rayon::prelude::*;
    let runs: Vec<KMeansResult> = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng_for(cfg.seed, Stream::KmeansRestart, r as u64);
            let init = kmeans_pp_init(points, cfg.k, &mut rng);
            lloyd(points, init, cfg.max_iterations, cfg.tolerance)
        })
        .collect();
    Ok(runs
        .into_iter()
        .min_by(|a, b| a.distortion.partial_cmp(&b.distortion).unwrap())
        .unwrap())
}

#[derive(Debug, Clone)]
pub struct SegmentationResult {
    pub assignments: Vec<usize>,
    pub centers: Vec<Vec<f64>>,
    pub distortion: f64,
    pub lesion_mask: Vec<bool>,
    pub lesion_cluster: usize,
}

fn lab_points(lab: &LabImage, space: FeatureSpace) -> Vec<Vec<f64>> {
    lab.pixels()
        .iter()
        .map(|&[l, a, b]| match space {
            FeatureSpace::Ab => vec![a, b],
            FeatureSpace::Lab => vec![l, a, b],
        })
        .collect()
}

/// Picks the cluster with the highest mean a* (most red); ties break toward
/// higher mean L, then the lower index. Empty clusters are never picked.
pub fn select_lesion_cluster(assignments: &[usize], k: usize, lab: &LabImage) -> usize {
    let mut sum_a = vec![0.0; k];
    let mut sum_l = vec![0.0; k];
    let mut count = vec![0usize; k];
    for (px, &c) in lab.pixels().iter().zip(assignments) {
        sum_l[c] += px[0];
        sum_a[c] += px[1];
        count[c] += 1;
    }
    let mut best = 0;
    let mut best_key = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for c in 0..k {
        if count[c] == 0 {
            continue;
        }
        let key = (sum_a[c] / count[c] as f64, sum_l[c] / count[c] as f64);
        if key.0 > best_key.0 || (key.0 == best_key.0 && key.1 > best_key.1) {
            best = c;
            best_key = key;
        }
    }
    best
}

/// Clusters the image in the configured channel space and masks the cluster
/// selected as lesion.
pub fn segment_image(lab: &LabImage, cfg: &KMeansConfig) -> Result<SegmentationResult> {
    let points = lab_points(lab, cfg.feature_space);
    let result = kmeans(&points, cfg)?;
    let lesion = select_lesion_cluster(&result.assignments, cfg.k, lab);
    let mask = result.assignments.iter().map(|&c| c == lesion).collect();
    Ok(SegmentationResult {
        assignments: result.assignments,
        centers: result.centers,
        distortion: result.distortion,
        lesion_mask: mask,
        lesion_cluster: lesion,
    })
}
