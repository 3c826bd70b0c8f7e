//! Batch command-line front end.
//!
//! Artifacts move between stages as files: `extract` writes a feature
//! table, `train` turns a table into a model file, `evaluate` turns a table
//! into JSON reports plus ROC point files, `predict` runs one image through
//! a saved model. `synth` and `augment` produce image corpora with
//! manifests. Every command is byte-reproducible for fixed inputs, config,
//! and seed; `--jobs` changes scheduling, never output.
//!
//! Exit codes: 0 success, 1 data or processing failure, 2 usage error.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::classify::{load_model, save_model, train, ClassifierKind, LabeledSet};
use crate::config::PipelineConfig;
use crate::dataset::synth::generate_synthetic_benchmark;
use crate::dataset::{augment, load_manifest, variant_tags, Manifest, ManifestEntry};
use crate::error::{Error, Result};
use crate::eval::{evaluate, write_roc_points, EvaluationReport};
use crate::features::table::{read_table_file, write_table_file, FeatureRow};
use crate::imaging::{load_image, save_image, Image};
use crate::pipeline::{overlay_mask, process_image};

#[derive(Debug, Parser)]
#[command(
    name = "texkit",
    version,
    about = "Texture-based lesion classification: preprocessing, segmentation, features, classifiers, evaluation"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML run configuration; defaults apply when omitted.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Master seed, overriding the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for image-level parallelism; 0 means one per core.
    #[arg(long, global = true, default_value_t = 0)]
    jobs: usize,

    /// Where artifacts are written, overriding the config file.
    #[arg(long, global = true, value_name = "DIR")]
    output_dir: Option<PathBuf>,

    /// With `extract`: also write a mask overlay image per input.
    #[arg(long, global = true)]
    overlays: bool,

    /// With `evaluate`: run all five classifier variants, one report each.
    #[arg(long, global = true)]
    all_classifiers: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute the feature table for every image in a manifest.
    Extract {
        manifest: PathBuf,
        /// Table path; default <output_dir>/features.csv.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Fit one classifier variant on a feature table.
    Train {
        table: PathBuf,
        /// lr, svm, knn, dt or rf.
        variant: String,
        /// Model path; default <output_dir>/model_<variant>.tkm.
        #[arg(long, value_name = "FILE")]
        out: Option<PathBuf>,
    },
    /// Run the configured evaluation protocol on a feature table.
    Evaluate {
        table: PathBuf,
        /// Variant to evaluate; ignored with --all-classifiers.
        #[arg(long, default_value = "rf")]
        variant: String,
    },
    /// Classify one image with a saved model.
    Predict { model: PathBuf, image: PathBuf },
    /// Generate the synthetic texture benchmark into a directory.
    Synth {
        dir: PathBuf,
        /// Images per class (six classes).
        #[arg(long, default_value_t = 60)]
        n_per_class: usize,
    },
    /// Expand a manifest corpus with deterministic augmented variants.
    Augment {
        manifest: PathBuf,
        /// Directory for variant images and their manifest;
        /// default <output_dir>/augmented.
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
}

/// Parses arguments, runs the selected command, and returns the process
/// exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        // a failure here only means a pool already exists (tests); size is
        // advisory, determinism never depends on it
        let _ = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global();
    }
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_usage() {
                2
            } else {
                1
            }
        }
    }
}

fn load_config(cli: &Cli) -> Result<PipelineConfig> {
    let mut cfg = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg = cfg.with_seed(seed);
    }
    if let Some(dir) = &cli.output_dir {
        cfg.output_dir = dir.clone();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cli: &Cli) -> Result<()> {
    let cfg = load_config(cli)?;
    match &cli.command {
        Command::Extract { manifest, out } => {
            cmd_extract(&cfg, manifest, out.as_deref(), cli.overlays)
        }
        Command::Train { table, variant, out } => {
            cmd_train(&cfg, table, variant, out.as_deref())
        }
        Command::Evaluate { table, variant } => {
            cmd_evaluate(&cfg, table, variant, cli.all_classifiers)
        }
        Command::Predict { model, image } => cmd_predict(&cfg, model, image),
        Command::Synth { dir, n_per_class } => cmd_synth(&cfg, dir, *n_per_class),
        Command::Augment { manifest, out } => cmd_augment(&cfg, manifest, out.as_deref()),
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Path-safe file stem for per-image artifacts: separators and the
/// extension fold into the name, so `a/b.ppm` becomes `a_b`.
fn sanitized_stem(rel_path: &str) -> String {
    let flat = rel_path.replace(['/', '\\'], "_");
    match flat.rfind('.') {
        Some(dot) if dot > 0 => flat[..dot].to_string(),
        _ => flat,
    }
}

fn cmd_extract(
    cfg: &PipelineConfig,
    manifest_path: &Path,
    out: Option<&Path>,
    overlays: bool,
) -> Result<()> {
    use rayon::prelude::*;

    let manifest = load_manifest(manifest_path)?;
    ensure_dir(&cfg.output_dir)?;
    let overlay_dir = cfg.output_dir.join("overlays");
    if overlays {
        ensure_dir(&overlay_dir)?;
    }

    let results: Vec<Result<(FeatureRow, Option<Image>)>> = manifest
        .entries
        .par_iter()
        .map(|entry| {
            let img = load_image(&manifest.resolve(entry))?;
            let processed = process_image(&img, cfg)?;
            let overlay =
                overlays.then(|| overlay_mask(&img, &processed.segmentation.lesion_mask));
            Ok((
                FeatureRow {
                    path: entry.path.clone(),
                    label: entry.label.clone(),
                    features: processed.features,
                },
                overlay,
            ))
        })
        .collect();

    let mut rows = Vec::with_capacity(results.len());
    let mut failures = 0usize;
    for (entry, result) in manifest.entries.iter().zip(results) {
        match result {
            Ok((row, overlay)) => {
                if let Some(img) = overlay {
                    let name = format!("{}.overlay.ppm", sanitized_stem(&entry.path));
                    save_image(&overlay_dir.join(name), &img)?;
                }
                rows.push(row);
            }
            Err(e) => {
                eprintln!("skipping {}: {e}", entry.path);
                failures += 1;
            }
        }
    }

    let table = out
        .map(Path::to_path_buf)
        .unwrap_or_else(|| cfg.output_dir.join("features.csv"));
    write_table_file(&table, &rows)?;
    println!("wrote {} rows to {}", rows.len(), table.display());
    if failures > 0 {
        return Err(Error::data(format!(
            "{failures} of {} images failed; their rows were skipped",
            manifest.len()
        )));
    }
    Ok(())
}

fn cmd_train(
    cfg: &PipelineConfig,
    table: &Path,
    variant: &str,
    out: Option<&Path>,
) -> Result<()> {
    let kind: ClassifierKind = variant.parse()?;
    let rows = read_table_file(table)?;
    let data = LabeledSet::from_rows(&rows)?;
    for w in cfg.train.warnings() {
        eprintln!("warning: {w}");
    }
    let model = train(kind, &data, &cfg.train)?;
    ensure_dir(&cfg.output_dir)?;
    let path = out
        .map(Path::to_path_buf)
        .unwrap_or_else(|| cfg.output_dir.join(format!("model_{}.tkm", kind.name())));
    save_model(&model, &path)?;
    println!(
        "trained {} on {} samples, {} classes; wrote {}",
        kind.name(),
        data.len(),
        data.n_classes(),
        path.display()
    );
    Ok(())
}

fn write_report(cfg: &PipelineConfig, report: &EvaluationReport) -> Result<()> {
    let path = cfg.output_dir.join(format!("report_{}.json", report.classifier));
    let json = serde_json::to_string_pretty(report)
        .map_err(|e| Error::format(format!("report serialization failed: {e}")))?;
    std::fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))?;
    for fold in &report.folds {
        for class in &fold.classes {
            let name = format!(
                "roc_{}_f{}_{}.tsv",
                report.classifier,
                fold.fold,
                class.class.replace(['/', '\\'], "_")
            );
            write_roc_points(&class.roc, &cfg.output_dir.join(name))?;
        }
    }
    println!(
        "{}: accuracy {:.2}%, macro AUC {:.4} -> {}",
        report.classifier, report.average.accuracy, report.average.macro_auc,
        path.display()
    );
    Ok(())
}

fn cmd_evaluate(
    cfg: &PipelineConfig,
    table: &Path,
    variant: &str,
    all_classifiers: bool,
) -> Result<()> {
    let kinds: Vec<ClassifierKind> = if all_classifiers {
        ClassifierKind::ALL.to_vec()
    } else {
        vec![variant.parse()?]
    };
    let rows = read_table_file(table)?;
    let data = LabeledSet::from_rows(&rows)?;
    ensure_dir(&cfg.output_dir)?;
    for kind in kinds {
        let report = evaluate(kind, &data, cfg.protocol, &cfg.train)?;
        write_report(cfg, &report)?;
    }
    Ok(())
}

fn cmd_predict(cfg: &PipelineConfig, model_path: &Path, image: &Path) -> Result<()> {
    let model = load_model(model_path)?;
    let img = load_image(image)?;
    let processed = process_image(&img, cfg)?;
    let prediction = model.predict(&processed.features.to_array())?;
    println!("class: {}", model.class_names[prediction.label]);
    for (name, score) in model.class_names.iter().zip(&prediction.scores) {
        println!("{name}\t{score}");
    }
    Ok(())
}

fn cmd_synth(cfg: &PipelineConfig, dir: &Path, n_per_class: usize) -> Result<()> {
    let manifest = generate_synthetic_benchmark(dir, n_per_class, cfg.seed)?;
    println!(
        "wrote {} images and {}",
        manifest.len(),
        dir.join("manifest.csv").display()
    );
    Ok(())
}

fn cmd_augment(cfg: &PipelineConfig, manifest_path: &Path, out: Option<&Path>) -> Result<()> {
    let manifest = load_manifest(manifest_path)?;
    let out_dir = out
        .map(Path::to_path_buf)
        .unwrap_or_else(|| cfg.output_dir.join("augmented"));
    ensure_dir(&out_dir)?;
    let tags = variant_tags(&cfg.augment);
    let mut entries = Vec::with_capacity(manifest.len() * tags.len());
    for entry in &manifest.entries {
        let img = load_image(&manifest.resolve(entry))?;
        let variants = augment(&img, &cfg.augment)?;
        let stem = sanitized_stem(&entry.path);
        for (tag, variant) in tags.iter().zip(&variants) {
            // variants carry an `.aug_<tag>` marker so splits can group
            // them back onto their source image
            let name = if tag == "orig" {
                format!("{stem}.ppm")
            } else {
                format!("{stem}.aug_{tag}.ppm")
            };
            save_image(&out_dir.join(&name), variant)?;
            entries.push(ManifestEntry { path: name, label: entry.label.clone() });
        }
    }
    let augmented = Manifest {
        root: out_dir.clone(),
        entries,
        class_names: manifest.class_names.clone(),
    };
    let manifest_out = out_dir.join("manifest.csv");
    augmented.write(&manifest_out)?;
    println!("wrote {} images and {}", augmented.len(), manifest_out.display());
    Ok(())
}
