//! Protocol runners: k-fold cross-validation and stratified holdout, with
//! structured fold-by-fold reports and fold-averaged headline numbers.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    macro_auc, metrics, one_vs_rest, split_holdout, split_kfold, BinaryCm, ClassMetrics,
    ConfusionMatrix,
};
use crate::classify::{train, ClassifierKind, LabeledSet, TrainConfig};
use crate::error::{Error, Result};
use crate::rng::{derived_seed, Stream};

/// Evaluation protocol: k-fold cross-validation or a single stratified
/// holdout with the given train fraction.
///
/// Serialized with a `kind` tag, e.g. `{kind = "kfold", k = 5}` or
/// `{kind = "holdout", fraction = 0.66}`. Deserialization goes through an
/// explicit field check because serde's internally tagged enums silently
/// ignore `deny_unknown_fields`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", try_from = "ProtocolRepr")]
pub enum Protocol {
    Kfold { k: usize },
    Holdout { fraction: f64 },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProtocolRepr {
    kind: String,
    #[serde(default)]
    k: Option<usize>,
    #[serde(default)]
    fraction: Option<f64>,
}

impl TryFrom<ProtocolRepr> for Protocol {
    type Error = String;

    fn try_from(r: ProtocolRepr) -> std::result::Result<Protocol, String> {
        match r.kind.as_str() {
            "kfold" => {
                if r.fraction.is_some() {
                    return Err("protocol kind 'kfold' does not take 'fraction'".into());
                }
                Ok(Protocol::Kfold { k: r.k.unwrap_or(5) })
            }
            "holdout" => {
                if r.k.is_some() {
                    return Err("protocol kind 'holdout' does not take 'k'".into());
                }
                match r.fraction {
                    Some(fraction) => Ok(Protocol::Holdout { fraction }),
                    None => Err("protocol kind 'holdout' needs a 'fraction'".into()),
                }
            }
            other => Err(format!("unknown protocol kind '{other}'; use 'kfold' or 'holdout'")),
        }
    }
}

impl Default for Protocol {
    fn default() -> Protocol {
        Protocol::Kfold { k: 5 }
    }
}

impl Protocol {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Protocol::Kfold { k } if k < 2 => {
                Err(Error::invalid(format!("protocol.k must be at least 2, got {k}")))
            }
            Protocol::Holdout { fraction } if !(fraction > 0.0 && fraction < 1.0) => Err(
                Error::invalid(format!("protocol.fraction must be in (0, 1), got {fraction}")),
            ),
            _ => Ok(()),
        }
    }
}

/// One class's slice of a fold: one-vs-rest counts, the six rates, and the
/// ROC curve built from this class's score column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassEval {
    pub class: String,
    pub confusion: BinaryCm,
    pub metrics: ClassMetrics,
    pub auc: f64,
    pub roc: Vec<(f64, f64)>,
}

/// Everything measured on one held-out fold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldEval {
    pub fold: usize,
    pub train_size: usize,
    pub test_size: usize,
    /// Overall accuracy on the fold, percent.
    pub accuracy: f64,
    pub macro_auc: f64,
    pub confusion: ConfusionMatrix,
    pub classes: Vec<ClassEval>,
}

/// Per-class numbers arithmetic-meaned over folds. `undefined` collects any
/// rate that had a zero denominator in at least one fold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassAverage {
    pub class: String,
    pub metrics: ClassMetrics,
    pub auc: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Averages {
    pub accuracy: f64,
    pub macro_auc: f64,
    pub classes: Vec<ClassAverage>,
}

/// Full evaluation output: fold-by-fold details plus the averages. The
/// report is plain data and serializes to JSON; nothing in it depends on
/// wall-clock time or thread scheduling, so identical inputs give identical
/// bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub classifier: String,
    pub protocol: Protocol,
    pub seed: u64,
    pub class_names: Vec<String>,
    pub folds: Vec<FoldEval>,
    pub average: Averages,
}

/// Trains on `train_idx`, scores `test_idx`, and assembles the fold report.
fn eval_fold(
    variant: ClassifierKind,
    data: &LabeledSet,
    train_idx: &[usize],
    test_idx: &[usize],
    cfg: &TrainConfig,
    fold: usize,
    fold_seed: u64,
) -> Result<FoldEval> {
    let train_set = data.subset(train_idx);
    let test_set = data.subset(test_idx);
    let model = train(variant, &train_set, &cfg.with_seed(fold_seed))?;
    let preds = model.predict_all(&test_set.vectors)?;
    let predicted: Vec<usize> = preds.iter().map(|p| p.label).collect();
    let scores: Vec<Vec<f64>> = preds.into_iter().map(|p| p.scores).collect();

    let n = data.n_classes();
    let confusion = ConfusionMatrix::from_labels(&test_set.labels, &predicted, n)?;
    let curves = one_vs_rest(&test_set.labels, &scores, n)?;
    let classes = (0..n)
        .map(|c| {
            let b = confusion.binarize(c);
            ClassEval {
                class: data.class_names[c].clone(),
                confusion: b,
                metrics: metrics(&b),
                auc: curves[c].auc,
                roc: curves[c].points.clone(),
            }
        })
        .collect();
    Ok(FoldEval {
        fold,
        train_size: train_idx.len(),
        test_size: test_idx.len(),
        accuracy: confusion.accuracy_percent(),
        macro_auc: macro_auc(&curves),
        confusion,
        classes,
    })
}

fn average_folds(folds: &[FoldEval], class_names: &[String]) -> Averages {
    let nf = folds.len() as f64;
    let classes = class_names
        .iter()
        .enumerate()
        .map(|(c, name)| {
            let mean = |get: fn(&ClassMetrics) -> f64| {
                folds.iter().map(|f| get(&f.classes[c].metrics)).sum::<f64>() / nf
            };
            let mut undefined: Vec<String> = folds
                .iter()
                .flat_map(|f| f.classes[c].metrics.undefined.iter().cloned())
                .collect();
            undefined.sort();
            undefined.dedup();
            ClassAverage {
                class: name.clone(),
                metrics: ClassMetrics {
                    accuracy: mean(|m| m.accuracy),
                    precision: mean(|m| m.precision),
                    sensitivity: mean(|m| m.sensitivity),
                    specificity: mean(|m| m.specificity),
                    fpr: mean(|m| m.fpr),
                    fnr: mean(|m| m.fnr),
                    undefined,
                },
                auc: folds.iter().map(|f| f.classes[c].auc).sum::<f64>() / nf,
            }
        })
        .collect();
    Averages {
        accuracy: folds.iter().map(|f| f.accuracy).sum::<f64>() / nf,
        macro_auc: folds.iter().map(|f| f.macro_auc).sum::<f64>() / nf,
        classes,
    }
}

/// Runs the configured protocol for one classifier variant.
pub fn evaluate(
    variant: ClassifierKind,
    data: &LabeledSet,
    protocol: Protocol,
    cfg: &TrainConfig,
) -> Result<EvaluationReport> {
    protocol.validate()?;
    match protocol {
        Protocol::Kfold { k } => cross_validate(variant, data, k, cfg),
        Protocol::Holdout { fraction } => evaluate_holdout(variant, data, fraction, cfg),
    }
}

/// k-fold cross-validation: trains k models, each on k−1 folds, and
/// averages the per-fold results. Folds run concurrently; each derives its
/// own training seed from (cfg.seed, fold index), so the averaged report is
/// identical however the folds are scheduled.
pub fn cross_validate(
    variant: ClassifierKind,
    data: &LabeledSet,
    k: usize,
    cfg: &TrainConfig,
) -> Result<EvaluationReport> {
    cfg.validate()?;
    let fold_tests = split_kfold(data, k, cfg.seed)?;
    let folds = fold_tests
        .par_iter()
        .enumerate()
        .map(|(f, test_idx)| {
            let mut in_test = vec![false; data.len()];
            for &i in test_idx {
                in_test[i] = true;
            }
            let train_idx: Vec<usize> = (0..data.len()).filter(|&i| !in_test[i]).collect();
            let fold_seed = derived_seed(cfg.seed, Stream::Fold, f as u64);
            eval_fold(variant, data, &train_idx, test_idx, cfg, f, fold_seed)
        })
        .collect::<Result<Vec<FoldEval>>>()?;
    let average = average_folds(&folds, &data.class_names);
    Ok(EvaluationReport {
        classifier: variant.name().to_string(),
        protocol: Protocol::Kfold { k },
        seed: cfg.seed,
        class_names: data.class_names.clone(),
        folds,
        average,
    })
}

/// Single stratified holdout; the report contains one fold entry and
/// averages equal to it.
pub fn evaluate_holdout(
    variant: ClassifierKind,
    data: &LabeledSet,
    fraction: f64,
    cfg: &TrainConfig,
) -> Result<EvaluationReport> {
    cfg.validate()?;
    let (train_idx, test_idx) = split_holdout(data, fraction, cfg.seed)?;
    let fold_seed = derived_seed(cfg.seed, Stream::Fold, 0);
    let fold = eval_fold(variant, data, &train_idx, &test_idx, cfg, 0, fold_seed)?;
    let folds = vec![fold];
    let average = average_folds(&folds, &data.class_names);
    Ok(EvaluationReport {
        classifier: variant.name().to_string(),
        protocol: Protocol::Holdout { fraction },
        seed: cfg.seed,
        class_names: data.class_names.clone(),
        folds,
        average,
    })
}

/// Writes ROC points as tab-delimited text, one "fpr<TAB>tpr" line per
/// point, with a header row, for external plotting.
pub fn write_roc_points(points: &[(f64, f64)], path: &Path) -> Result<()> {
    let mut out = String::with_capacity(16 + points.len() * 42);
    out.push_str("fpr\ttpr\n");
    for &(fpr, tpr) in points {
        out.push_str(&format!("{fpr}\t{tpr}\n"));
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}
