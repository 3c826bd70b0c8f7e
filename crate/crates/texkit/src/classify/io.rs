//! Model persistence.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! offset  size  field
//! 0       4     magic "TXKM"
//! 4       2     format version (currently 1)
//! 6       8     payload length in bytes
//! 14      n     payload: JSON-serialized model
//! ```
//!
//! The JSON payload carries the variant tag, class names, optional
//! normalizer, fitted parameters and the training seed. Floats are written in
//! shortest round-trip form, so a reloaded model scores bit-identically.

use std::fs;
use std::path::Path;

use super::{ModelParams, TrainedModel};
use crate::error::{Error, Result};

pub const MODEL_MAGIC: [u8; 4] = *b"TXKM";
pub const MODEL_VERSION: u16 = 1;

const HEADER_LEN: usize = 14;

impl TrainedModel {
    /// Internal-consistency check applied after deserialization, so a
    /// corrupted payload surfaces as a load error instead of a panic.
    fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::format(format!("model file invalid: {msg}")));
        let n_classes = self.n_classes();
        if n_classes < 2 {
            return bad(format!("{n_classes} classes"));
        }
        if self.dim == 0 {
            return bad("zero feature dimension".into());
        }
        if let Some(n) = &self.normalizer {
            if n.dim() != self.dim || n.stds.len() != self.dim {
                return bad(format!(
                    "normalizer dimension {} does not match model dimension {}",
                    n.dim(),
                    self.dim
                ));
            }
        }
        match &self.params {
            ModelParams::Lr { weights } | ModelParams::Svm { weights } => {
                if weights.len() != n_classes
                    || weights.iter().any(|w| w.len() != self.dim + 1)
                {
                    return bad("weight matrix shape".into());
                }
                if weights.iter().flatten().any(|w| !w.is_finite()) {
                    return bad("non-finite weight".into());
                }
            }
            ModelParams::Knn { k, points, labels, .. } => {
                if *k == 0 || points.is_empty() || points.len() != labels.len() {
                    return bad("neighbor table shape".into());
                }
                if points.iter().any(|p| p.len() != self.dim) {
                    return bad("neighbor dimension".into());
                }
                if labels.iter().any(|&l| l >= n_classes) {
                    return bad("neighbor label out of range".into());
                }
            }
            ModelParams::Dt { tree } => {
                tree.check(self.dim, n_classes).or_else(bad)?;
            }
            ModelParams::Rf { trees } => {
                if trees.is_empty() {
                    return bad("empty forest".into());
                }
                for tree in trees {
                    tree.check(self.dim, n_classes).or_else(bad)?;
                }
            }
        }
        Ok(())
    }
}

pub fn save_model(model: &TrainedModel, path: &Path) -> Result<()> {
    let payload = serde_json::to_vec(model)
        .map_err(|e| Error::format(format!("model serialization failed: {e}")))?;
    let mut bytes = Vec::with_capacity(HEADER_LEN + payload.len());
    bytes.extend_from_slice(&MODEL_MAGIC);
    bytes.extend_from_slice(&MODEL_VERSION.to_le_bytes());
    bytes.extend_from_slice(&(payload.len() as u64).to_le_bytes());
    bytes.extend_from_slice(&payload);
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: &Path) -> Result<TrainedModel> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() < HEADER_LEN {
        return Err(Error::format(format!(
            "model file truncated: {} bytes is shorter than the {HEADER_LEN}-byte header",
            bytes.len()
        )));
    }
    if bytes[0..4] != MODEL_MAGIC {
        return Err(Error::format("not a model file (bad magic bytes)"));
    }
    let version = u16::from_le_bytes([bytes[4], bytes[5]]);
    if version != MODEL_VERSION {
        return Err(Error::format(format!(
            "unsupported model format version {version} (this build reads version {MODEL_VERSION})"
        )));
    }
    let declared = u64::from_le_bytes(bytes[6..14].try_into().unwrap()) as usize;
    let actual = bytes.len() - HEADER_LEN;
    if actual < declared {
        return Err(Error::format(format!(
            "model file truncated: payload declares {declared} bytes, {actual} present"
        )));
    }
    if actual > declared {
        return Err(Error::format(format!(
            "model file has {} trailing bytes after the payload",
            actual - declared
        )));
    }
    let model: TrainedModel = serde_json::from_slice(&bytes[HEADER_LEN..])
        .map_err(|e| Error::format(format!("model payload unreadable: {e}")))?;
    model.check()?;
    Ok(model)
}
