//! Five classifiers behind one train/predict interface.
//!
//! All variants are trained natively, deterministically for a given seed, and
//! expose probability-like per-class scores so ROC analysis applies uniformly:
//! LR softmax probabilities, SVM margins, KNN vote fractions, DT leaf
//! frequencies, RF tree-vote fractions.

mod forest;
mod io;
mod knn;
mod logreg;
mod svm;
mod tree;

pub use io::{load_model, save_model, MODEL_MAGIC, MODEL_VERSION};
pub use tree::Tree;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::table::FeatureRow;
use crate::features::{fit_normalizer, Normalizer};

/// Classifier family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClassifierKind {
    Lr,
    Dt,
    Knn,
    Svm,
    Rf,
}

impl ClassifierKind {
    pub const ALL: [ClassifierKind; 5] = [
        ClassifierKind::Lr,
        ClassifierKind::Svm,
        ClassifierKind::Knn,
        ClassifierKind::Dt,
        ClassifierKind::Rf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ClassifierKind::Lr => "lr",
            ClassifierKind::Dt => "dt",
            ClassifierKind::Knn => "knn",
            ClassifierKind::Svm => "svm",
            ClassifierKind::Rf => "rf",
        }
    }
}

impl std::fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lr" => Ok(ClassifierKind::Lr),
            "dt" => Ok(ClassifierKind::Dt),
            "knn" => Ok(ClassifierKind::Knn),
            "svm" => Ok(ClassifierKind::Svm),
            "rf" => Ok(ClassifierKind::Rf),
            other => Err(Error::invalid(format!(
                "unknown classifier '{other}' (expected lr, dt, knn, svm or rf)"
            ))),
        }
    }
}

/// Labeled feature vectors plus class-name table. `groups` optionally tags
/// each sample with a source key; samples sharing a key stay on the same side
/// of any train/test split (leakage guard for augmented variants).
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSet {
    pub vectors: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub class_names: Vec<String>,
    pub groups: Option<Vec<String>>,
}

impl LabeledSet {
    pub fn new(
        vectors: Vec<Vec<f64>>,
        labels: Vec<usize>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        let set = LabeledSet { vectors, labels, class_names, groups: None };
        set.validate()?;
        Ok(set)
    }

    /// Builds a set from feature-table rows. Class names are in
    /// first-appearance order; groups come from the augmentation-stripped
    /// source key of each path.
    pub fn from_rows(rows: &[FeatureRow]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::data("feature table has no rows"));
        }
        let mut class_names: Vec<String> = Vec::new();
        let mut labels = Vec::with_capacity(rows.len());
        for row in rows {
            let idx = match class_names.iter().position(|c| c == &row.label) {
                Some(i) => i,
                None => {
                    class_names.push(row.label.clone());
                    class_names.len() - 1
                }
            };
            labels.push(idx);
        }
        let vectors = rows.iter().map(|r| r.features.to_array().to_vec()).collect();
        let groups = rows.iter().map(|r| crate::dataset::source_key(&r.path)).collect();
        let set = LabeledSet { vectors, labels, class_names, groups: Some(groups) };
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<()> {
        if self.vectors.is_empty() {
            return Err(Error::data("labeled set is empty"));
        }
        if self.vectors.len() != self.labels.len() {
            return Err(Error::data("labeled set: vectors and labels differ in length"));
        }
        if let Some(g) = &self.groups {
            if g.len() != self.vectors.len() {
                return Err(Error::data("labeled set: groups and vectors differ in length"));
            }
        }
        let dim = self.vectors[0].len();
        if dim == 0 {
            return Err(Error::data("labeled set: zero-dimensional vectors"));
        }
        if self.vectors.iter().any(|v| v.len() != dim) {
            return Err(Error::data("labeled set: inconsistent vector dimensions"));
        }
        if self.vectors.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::data("labeled set: non-finite feature value"));
        }
        if let Some(&bad) = self.labels.iter().find(|&&l| l >= self.class_names.len()) {
            return Err(Error::data(format!(
                "labeled set: label index {bad} outside {} classes",
                self.class_names.len()
            )));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.vectors.first().map_or(0, |v| v.len())
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n_classes()];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }

    /// Copies the rows at `indices`, keeping the full class-name table.
    pub fn subset(&self, indices: &[usize]) -> LabeledSet {
        LabeledSet {
            vectors: indices.iter().map(|&i| self.vectors[i].clone()).collect(),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            class_names: self.class_names.clone(),
            groups: self
                .groups
                .as_ref()
                .map(|g| indices.iter().map(|&i| g[i].clone()).collect()),
        }
    }

    /// Keeps only the columns in `indices` (feature-group ablation).
    pub fn select_columns(&self, indices: std::ops::Range<usize>) -> LabeledSet {
        LabeledSet {
            vectors: self.vectors.iter().map(|v| v[indices.clone()].to_vec()).collect(),
            labels: self.labels.clone(),
            class_names: self.class_names.clone(),
            groups: self.groups.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LrParams {
    pub learning_rate: f64,
    pub iterations: usize,
    pub l2: f64,
}

impl Default for LrParams {
    fn default() -> Self {
        LrParams { learning_rate: 0.1, iterations: 500, l2: 1e-4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvmParams {
    /// Hinge-loss cost C; the regularizer is 1/C.
    #[serde(alias = "C")]
    pub c: f64,
    pub epochs: usize,
}

impl Default for SvmParams {
    fn default() -> Self {
        SvmParams { c: 55.0, epochs: 200 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Manhattan,
    Euclidean,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KnnParams {
    pub k: usize,
    pub metric: Metric,
}

impl Default for KnnParams {
    fn default() -> Self {
        KnnParams { k: 7, metric: Metric::Manhattan }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitCriterion {
    Gini,
    Entropy,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TreeParams {
    pub criterion: SplitCriterion,
    pub min_samples_split: usize,
    /// None = unbounded height.
    pub max_depth: Option<usize>,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams { criterion: SplitCriterion::Gini, min_samples_split: 2, max_depth: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ForestParams {
    pub n_trees: usize,
    /// None = floor(sqrt(d)).
    pub features_per_split: Option<usize>,
    /// Bootstrap-bag each tree (size n, with replacement). Disabling this is
    /// a test hook making a 1-tree forest equal a decision tree.
    pub resample: bool,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams { n_trees: 100, features_per_split: None, resample: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    /// Fit a z-score normalizer on the training vectors and store it in the
    /// model; applies to every variant.
    pub normalize: bool,
    pub lr: LrParams,
    pub svm: SvmParams,
    pub knn: KnnParams,
    pub dt: TreeParams,
    pub rf: ForestParams,
    #[serde(skip)]
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            normalize: true,
            lr: LrParams::default(),
            svm: SvmParams::default(),
            knn: KnnParams::default(),
            dt: TreeParams::default(),
            rf: ForestParams::default(),
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lr.learning_rate > 0.0) {
            return Err(Error::invalid("train.lr.learning_rate must be positive"));
        }
        if self.lr.iterations == 0 {
            return Err(Error::invalid("train.lr.iterations must be at least 1"));
        }
        if !(self.lr.l2 >= 0.0) {
            return Err(Error::invalid("train.lr.l2 must be non-negative"));
        }
        if !(self.svm.c > 0.0) {
            return Err(Error::invalid("train.svm.c must be positive"));
        }
        if self.svm.epochs == 0 {
            return Err(Error::invalid("train.svm.epochs must be at least 1"));
        }
        if self.knn.k == 0 {
            return Err(Error::invalid("train.knn.k must be at least 1"));
        }
        if self.dt.min_samples_split < 2 {
            return Err(Error::invalid("train.dt.min_samples_split must be at least 2"));
        }
        if self.rf.n_trees == 0 {
            return Err(Error::invalid("train.rf.n_trees must be at least 1"));
        }
        if self.rf.features_per_split == Some(0) {
            return Err(Error::invalid("train.rf.features_per_split must be at least 1"));
        }
        Ok(())
    }

    /// Non-fatal advisories, printed by the CLI.
    pub fn warnings(&self) -> Vec<String> {
        let mut w = Vec::new();
        if self.knn.k.is_multiple_of(2) {
            w.push(format!("knn.k = {} is even; ties are broken by class index", self.knn.k));
        }
        w
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Variant-specific fitted parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelParams {
    /// Per-class weight rows, bias last column.
    Lr { weights: Vec<Vec<f64>> },
    /// One-vs-rest hyperplanes, bias last column.
    Svm { weights: Vec<Vec<f64>> },
    Knn { k: usize, metric: Metric, points: Vec<Vec<f64>>, labels: Vec<usize> },
    Dt { tree: Tree },
    Rf { trees: Vec<Tree> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub kind: ClassifierKind,
    pub class_names: Vec<String>,
    pub normalizer: Option<Normalizer>,
    pub params: ModelParams,
    pub seed: u64,
    dim: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub label: usize,
    pub scores: Vec<f64>,
}

pub(crate) fn argmax_tie_low(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

/// Fits the requested variant. Every class in the name table must be present
/// in the data so per-class scores are meaningful.
pub fn train(kind: ClassifierKind, data: &LabeledSet, cfg: &TrainConfig) -> Result<TrainedModel> {
    data.validate()?;
    cfg.validate()?;
    let counts = data.class_counts();
    let present = counts.iter().filter(|&&c| c > 0).count();
    if present < 2 {
        return Err(Error::data("training data contains fewer than 2 classes"));
    }
    if let Some(absent) = counts.iter().position(|&c| c == 0) {
        return Err(Error::data(format!(
            "class '{}' has no training samples",
            data.class_names[absent]
        )));
    }
    let normalizer = if cfg.normalize { Some(fit_normalizer(&data.vectors)?) } else { None };
    let x: Vec<Vec<f64>> = match &normalizer {
        Some(n) => n.apply_all(&data.vectors),
        None => data.vectors.clone(),
    };
    let y = &data.labels;
    let n_classes = data.n_classes();
    let params = match kind {
        ClassifierKind::Lr => ModelParams::Lr {
            weights: logreg::fit(&x, y, n_classes, &cfg.lr)?,
        },
        ClassifierKind::Svm => ModelParams::Svm {
            weights: svm::fit(&x, y, n_classes, &cfg.svm),
        },
        ClassifierKind::Knn => ModelParams::Knn {
            k: cfg.knn.k,
            metric: cfg.knn.metric,
            points: x.clone(),
            labels: y.clone(),
        },
        ClassifierKind::Dt => ModelParams::Dt {
            tree: tree::fit_full(&x, y, n_classes, &cfg.dt),
        },
        ClassifierKind::Rf => ModelParams::Rf {
            trees: forest::fit(&x, y, n_classes, &cfg.rf, &cfg.dt, cfg.seed),
        },
    };
    Ok(TrainedModel {
        kind,
        class_names: data.class_names.clone(),
        normalizer,
        params,
        seed: cfg.seed,
        dim: data.dim(),
    })
}

impl TrainedModel {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    /// Scores the vector and returns the argmax label (ties to the lowest
    /// class index).
    pub fn predict(&self, v: &[f64]) -> Result<Prediction> {
        if v.len() != self.dim {
            return Err(Error::invalid(format!(
                "dimension mismatch: model expects {}, got {}",
                self.dim,
                v.len()
            )));
        }
        let owned;
        let x: &[f64] = match &self.normalizer {
            Some(n) => {
                owned = n.apply(v);
                &owned
            }
            None => v,
        };
        let scores = match &self.params {
            ModelParams::Lr { weights } => logreg::scores(weights, x),
            ModelParams::Svm { weights } => svm::scores(weights, x),
            ModelParams::Knn { k, metric, points, labels } => {
                knn::scores(points, labels, self.n_classes(), *k, *metric, x)
            }
            ModelParams::Dt { tree } => tree.probs(x).to_vec(),
            ModelParams::Rf { trees } => forest::scores(trees, x, self.n_classes()),
        };
        debug_assert_eq!(scores.len(), self.n_classes());
        debug_assert!(scores.iter().all(|s| s.is_finite()));
        Ok(Prediction { label: argmax_tie_low(&scores), scores })
    }

    /// Predicts a whole set, in order.
    pub fn predict_all(&self, vectors: &[Vec<f64>]) -> Result<Vec<Prediction>> {
        vectors.iter().map(|v| self.predict(v)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Stream;

    pub(crate) fn toy_set() -> LabeledSet {
        // Two well-separated 2-D blobs plus a third off-axis class.
        let mut vectors = Vec::new();
        let mut labels = Vec::new();
        let mut rng = crate::rng::rng_for(11, Stream::Synth, 4);
        use rand::Rng;
        for i in 0..60 {
            let class = i % 3;
            let (cx, cy) = [(0.0, 0.0), (6.0, 0.0), (3.0, 6.0)][class];
            vectors.push(vec![cx + rng.random::<f64>(), cy + rng.random::<f64>()]);
            labels.push(class);
        }
        LabeledSet::new(vectors, labels, vec!["a".into(), "b".into(), "c".into()]).unwrap()
    }

    #[test]
    fn single_class_data_is_rejected() {
        let set = LabeledSet::new(
            vec![vec![1.0], vec![2.0]],
            vec![0, 0],
            vec!["only".into()],
        )
        .unwrap();
        for kind in ClassifierKind::ALL {
            assert!(train(kind, &set, &TrainConfig::default()).is_err());
        }
    }

    #[test]
    fn absent_class_is_rejected_by_name() {
        let set = LabeledSet::new(
            vec![vec![1.0], vec![2.0]],
            vec![0, 1],
            vec!["a".into(), "b".into(), "ghost".into()],
        )
        .unwrap();
        let err = train(ClassifierKind::Dt, &set, &TrainConfig::default()).unwrap_err();
        assert!(err.to_string().contains("ghost"));
    }

    #[test]
    fn every_variant_learns_the_toy_set() {
        let set = toy_set();
        let cfg = TrainConfig::default().with_seed(5);
        for kind in ClassifierKind::ALL {
            let model = train(kind, &set, &cfg).unwrap();
            let mut hits = 0;
            for (v, &l) in set.vectors.iter().zip(&set.labels) {
                let p = model.predict(v).unwrap();
                assert_eq!(p.scores.len(), 3);
                assert_eq!(p.label, argmax_tie_low(&p.scores));
                if p.label == l {
                    hits += 1;
                }
            }
            assert!(hits >= 57, "{kind}: {hits}/60 training accuracy too low");
        }
    }

    #[test]
    fn lr_scores_sum_to_one() {
        let set = toy_set();
        let model = train(ClassifierKind::Lr, &set, &TrainConfig::default()).unwrap();
        for v in &set.vectors {
            let p = model.predict(v).unwrap();
            let sum: f64 = p.scores.iter().sum();
            assert!((sum - 1.0).abs() < 1e-6);
        }
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let set = toy_set();
        let model = train(ClassifierKind::Knn, &set, &TrainConfig::default()).unwrap();
        assert!(model.predict(&[1.0]).is_err());
        assert!(model.predict(&[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn training_is_deterministic() {
        let set = toy_set();
        let cfg = TrainConfig::default().with_seed(33);
        for kind in ClassifierKind::ALL {
            let a = train(kind, &set, &cfg).unwrap();
            let b = train(kind, &set, &cfg).unwrap();
            assert_eq!(a, b, "{kind} retrain must be identical");
        }
    }

    #[test]
    fn even_k_warns() {
        let cfg = TrainConfig { knn: KnnParams { k: 8, metric: Metric::Manhattan }, ..Default::default() };
        assert_eq!(cfg.warnings().len(), 1);
        assert!(TrainConfig::default().warnings().is_empty());
    }

    #[test]
    fn kind_parses_and_prints() {
        for kind in ClassifierKind::ALL {
            let back: ClassifierKind = kind.name().parse().unwrap();
            assert_eq!(back, kind);
        }
        assert!("mlp".parse::<ClassifierKind>().is_err());
    }
}
