//! Run configuration: one TOML file covering every stage.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::classify::TrainConfig;
use crate::dataset::AugmentConfig;
use crate::error::{Error, Result};
use crate::eval::Protocol;
use crate::features::GlcmConfig;
use crate::preprocess::PreprocessConfig;
use crate::segment::KMeansConfig;

/// Every knob of the pipeline in one file. All sections and fields are
/// optional; omitted ones take their documented defaults. `seed` is the one
/// seed users set; the per-stage seeds are copies of it made at load time,
/// and stages further derive stream-specific seeds so no two consumers
/// share a random sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub output_dir: PathBuf,
    pub preprocess: PreprocessConfig,
    pub segment: KMeansConfig,
    pub glcm: GlcmConfig,
    pub train: TrainConfig,
    pub augment: AugmentConfig,
    pub protocol: Protocol,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        let mut cfg = PipelineConfig {
            seed: 0,
            output_dir: PathBuf::from("."),
            preprocess: PreprocessConfig::default(),
            segment: KMeansConfig::default(),
            glcm: GlcmConfig::default(),
            train: TrainConfig::default(),
            augment: AugmentConfig::default(),
            protocol: Protocol::default(),
        };
        cfg.propagate_seed();
        cfg
    }
}

impl PipelineConfig {
    /// Parses a TOML file. Syntax problems and unknown keys are usage
    /// errors carrying the file position reported by the parser.
    pub fn load(path: &Path) -> Result<PipelineConfig> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut cfg: PipelineConfig = toml::from_str(&text)
            .map_err(|e| Error::invalid(format!("{}: {e}", path.display())))?;
        cfg.propagate_seed();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.preprocess.validate()?;
        self.segment.validate()?;
        self.glcm.validate()?;
        self.train.validate()?;
        self.augment.validate()?;
        self.protocol.validate()?;
        Ok(())
    }

    /// Replaces the master seed, e.g. from a command-line override.
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self.propagate_seed();
        self
    }

    fn propagate_seed(&mut self) {
        self.segment.seed = self.seed;
        self.train.seed = self.seed;
        self.augment.seed = self.seed;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::SplitCriterion;
    use crate::segment::FeatureSpace;

    fn parse(text: &str) -> Result<PipelineConfig> {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("run.toml");
        std::fs::write(&path, text).unwrap();
        PipelineConfig::load(&path)
    }

    #[test]
    fn default_config_is_valid() {
        let cfg = PipelineConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.protocol, Protocol::Kfold { k: 5 });
        assert_eq!(cfg.segment.k, 3);
        assert_eq!(cfg.glcm.gray_levels, 8);
    }

    #[test]
    fn empty_file_gives_defaults() {
        let cfg = parse("").unwrap();
        assert_eq!(cfg, PipelineConfig::default());
    }

    #[test]
    fn partial_sections_override_only_their_fields() {
        let cfg = parse(
            "seed = 9\n\
             [segment]\n\
             k = 2\n\
             feature_space = \"lab\"\n\
             [train.rf]\n\
             n_trees = 50\n\
             [train.dt]\n\
             criterion = \"entropy\"\n",
        )
        .unwrap();
        assert_eq!(cfg.seed, 9);
        assert_eq!(cfg.segment.k, 2);
        assert_eq!(cfg.segment.feature_space, FeatureSpace::Lab);
        assert_eq!(cfg.segment.restarts, 5);
        assert_eq!(cfg.train.rf.n_trees, 50);
        assert_eq!(cfg.train.dt.criterion, SplitCriterion::Entropy);
        assert_eq!(cfg.train.lr.iterations, 500);
    }

    #[test]
    fn master_seed_reaches_stage_configs() {
        let cfg = parse("seed = 1234").unwrap();
        assert_eq!(cfg.segment.seed, 1234);
        assert_eq!(cfg.train.seed, 1234);
        assert_eq!(cfg.augment.seed, 1234);
        let cfg = cfg.with_seed(77);
        assert_eq!(cfg.segment.seed, 77);
        assert_eq!(cfg.train.seed, 77);
    }

    #[test]
    fn unknown_keys_are_usage_errors() {
        for text in [
            "sead = 1",
            "[segment]\nclusters = 4",
            "[preprocess]\nguided_radios = 2",
            "[train]\nnormalise = true",
        ] {
            let err = parse(text).unwrap_err();
            assert!(err.is_usage(), "{text:?} should be a usage error, got {err}");
        }
    }

    #[test]
    fn protocol_section_variants() {
        let cfg = parse("[protocol]\nkind = \"holdout\"\nfraction = 0.66").unwrap();
        assert_eq!(cfg.protocol, Protocol::Holdout { fraction: 0.66 });
        let cfg = parse("[protocol]\nkind = \"kfold\"\nk = 10").unwrap();
        assert_eq!(cfg.protocol, Protocol::Kfold { k: 10 });
        assert!(parse("[protocol]\nkind = \"kfold\"\nfraction = 0.5").is_err());
        assert!(parse("[protocol]\nkind = \"loocv\"").is_err());
    }

    #[test]
    fn invalid_stage_values_are_usage_errors() {
        let err = parse("[segment]\nk = 0").unwrap_err();
        assert!(err.is_usage());
        assert!(err.to_string().contains("segment.k"), "{err}");
        let err = parse("[glcm]\ngray_levels = 1").unwrap_err();
        assert!(err.to_string().contains("gray_levels"), "{err}");
        let err = parse("[protocol]\nkind = \"holdout\"\nfraction = 1.5").unwrap_err();
        assert!(err.to_string().contains("fraction"), "{err}");
    }

    #[test]
    fn toml_round_trip_preserves_everything() {
        let mut cfg = PipelineConfig::default().with_seed(31);
        cfg.segment.k = 4;
        cfg.glcm.gray_levels = 16;
        cfg.train.knn.k = 3;
        cfg.protocol = Protocol::Holdout { fraction: 0.8 };
        let text = toml::to_string_pretty(&cfg).unwrap();
        let mut back: PipelineConfig = toml::from_str(&text).unwrap();
        back.propagate_seed();
        assert_eq!(back, cfg);
    }

    #[test]
    fn missing_file_is_io_error() {
        let err = PipelineConfig::load(Path::new("/nonexistent/run.toml")).unwrap_err();
        assert!(matches!(err, Error::Io { .. }));
    }
}
