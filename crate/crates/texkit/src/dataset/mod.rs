//! Corpus manifests and deterministic augmentation.
//!
//! A manifest is a two-column text file, header `path,label`, comma
//! delimited, no quoting; paths are relative to the manifest's directory.
//! Class order is first-appearance order and therefore stable across
//! reloads.

pub mod synth;

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::Image;
use crate::preprocess::reflect;

pub const MANIFEST_HEADER: &str = "path,label";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    /// Image path relative to `Manifest::root`.
    pub path: String,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    pub root: PathBuf,
    pub entries: Vec<ManifestEntry>,
    /// Deduplicated labels in first-appearance order.
    pub class_names: Vec<String>,
}

impl Manifest {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Absolute (root-joined) path of one entry.
    pub fn resolve(&self, entry: &ManifestEntry) -> PathBuf {
        self.root.join(&entry.path)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let mut out = String::from(MANIFEST_HEADER);
        out.push('\n');
        for e in &self.entries {
            check_manifest_field("path", &e.path)?;
            check_manifest_field("label", &e.label)?;
            out.push_str(&e.path);
            out.push(',');
            out.push_str(&e.label);
            out.push('\n');
        }
        fs::write(path, out).map_err(|e| Error::io(path, e))
    }
}

fn check_manifest_field(what: &str, value: &str) -> Result<()> {
    if value.is_empty() {
        return Err(Error::format(format!("manifest {what} is empty")));
    }
    if value.contains(',') || value.contains('\n') || value.contains('\r') {
        return Err(Error::format(format!(
            "manifest {what} '{value}' contains a delimiter character"
        )));
    }
    Ok(())
}

/// Parses and validates a manifest; every referenced file must exist under
/// the manifest's directory.
pub fn load_manifest(path: &Path) -> Result<Manifest> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let root = path.parent().unwrap_or(Path::new(".")).to_path_buf();
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim_end() == MANIFEST_HEADER => {}
        Some((_, header)) => {
            return Err(Error::format(format!(
                "manifest header is '{}', expected '{MANIFEST_HEADER}'",
                header.trim_end()
            )))
        }
        None => return Err(Error::format("manifest is empty")),
    }
    let mut entries = Vec::new();
    let mut class_names: Vec<String> = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, line) in lines {
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(',');
        let (p, l) = match (fields.next(), fields.next(), fields.next()) {
            (Some(p), Some(l), None) => (p, l),
            _ => {
                return Err(Error::format(format!(
                    "manifest line {}: expected 2 comma-separated fields",
                    i + 1
                )))
            }
        };
        if p.is_empty() || l.is_empty() {
            return Err(Error::format(format!("manifest line {}: empty field", i + 1)));
        }
        if !seen.insert(p.to_string()) {
            return Err(Error::format(format!("manifest line {}: duplicate path '{p}'", i + 1)));
        }
        let full = root.join(p);
        if !full.is_file() {
            return Err(Error::format(format!(
                "manifest line {}: file '{}' does not exist",
                i + 1,
                full.display()
            )));
        }
        if !class_names.iter().any(|c| c == l) {
            class_names.push(l.to_string());
        }
        entries.push(ManifestEntry { path: p.to_string(), label: l.to_string() });
    }
    if entries.is_empty() {
        return Err(Error::format("manifest has a header but no rows"));
    }
    Ok(Manifest { root, entries, class_names })
}

/// Collapses an augmented-variant path back to its source image, so variants
/// group with their source when splitting. Strips the final extension, then a
/// trailing `.aug_<tag>` marker if present: `a/img7.aug_rot-15.png` and
/// `a/img7.png` both map to `a/img7`.
pub fn source_key(path: &str) -> String {
    let name_start = path.rfind('/').map_or(0, |i| i + 1);
    let mut end = path.len();
    if let Some(dot) = path[name_start..].rfind('.') {
        end = name_start + dot;
    }
    if let Some(marker) = path[name_start..end].rfind(".aug_") {
        end = name_start + marker;
    }
    path[..end].to_string()
}

/// Augmentation recipe. The expansion is a fixed list of variants, so it is
/// deterministic per (image, config); the seed travels with the config for
/// interface parity with the other stages but the built-in variants draw no
/// randomness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AugmentConfig {
    pub horizontal_flip: bool,
    /// Nearest-neighbor rotation angles; edges fill by reflection.
    pub rotations_degrees: Vec<f64>,
    /// Per-channel offsets, result clamped to [0, 1].
    pub brightness_deltas: Vec<f64>,
    #[serde(skip)]
    pub seed: u64,
}

impl Default for AugmentConfig {
    fn default() -> Self {
        AugmentConfig {
            horizontal_flip: true,
            rotations_degrees: vec![-15.0, 15.0],
            brightness_deltas: vec![-0.1, 0.1],
            seed: 0,
        }
    }
}

impl AugmentConfig {
    pub fn validate(&self) -> Result<()> {
        for &d in &self.rotations_degrees {
            if !d.is_finite() || d.abs() >= 45.0 {
                return Err(Error::invalid(format!(
                    "augment rotation {d} outside (-45, 45) degrees"
                )));
            }
        }
        for &d in &self.brightness_deltas {
            if !d.is_finite() || d.abs() >= 0.5 {
                return Err(Error::invalid(format!(
                    "augment brightness delta {d} outside (-0.5, 0.5)"
                )));
            }
        }
        Ok(())
    }

    /// Number of images `augment` returns, original included.
    pub fn variant_count(&self) -> usize {
        1 + usize::from(self.horizontal_flip)
            + self.rotations_degrees.len()
            + self.brightness_deltas.len()
    }
}

/// File-name tags aligned with `augment`'s output order; the original is
/// tagged `orig` and is not suffixed when written out.
pub fn variant_tags(cfg: &AugmentConfig) -> Vec<String> {
    let mut tags = vec!["orig".to_string()];
    if cfg.horizontal_flip {
        tags.push("flip".to_string());
    }
    for d in &cfg.rotations_degrees {
        tags.push(format!("rot{d}"));
    }
    for d in &cfg.brightness_deltas {
        tags.push(format!("br{d}"));
    }
    tags
}

pub fn flip_horizontal(img: &Image) -> Image {
    let (w, h) = (img.width(), img.height());
    let mut out = Image::new(w, h);
    for y in 0..h {
        for x in 0..w {
            out.set_pixel(x, y, img.pixel(w - 1 - x, y));
        }
    }
    out
}

/// Rotates about the image center, positive angles turning x toward y.
/// Nearest-neighbor sampling; out-of-range sources reflect at the edges.
/// 0 degrees reproduces the input exactly.
pub fn rotate(img: &Image, degrees: f64) -> Image {
    let (w, h) = (img.width(), img.height());
    let (cx, cy) = ((w as f64 - 1.0) / 2.0, (h as f64 - 1.0) / 2.0);
    let (sin, cos) = degrees.to_radians().sin_cos();
    let mut out = Image::new(w, h);
    for y in 0..h {
        let dy = y as f64 - cy;
        for x in 0..w {
            let dx = x as f64 - cx;
            let sx = cx + dx * cos + dy * sin;
            let sy = cy - dx * sin + dy * cos;
            let sx = reflect(sx.round() as isize, w as isize);
            let sy = reflect(sy.round() as isize, h as isize);
            out.set_pixel(x, y, img.pixel(sx, sy));
        }
    }
    out
}

pub fn shift_brightness(img: &Image, delta: f64) -> Image {
    let pixels = img
        .pixels()
        .iter()
        .map(|p| [0, 1, 2].map(|c| (p[c] + delta).clamp(0.0, 1.0)))
        .collect();
    Image::from_pixels(img.width(), img.height(), pixels)
}

/// Expands one image into its variant list: original, then flip, rotations
/// and brightness shifts as enabled. Labels are untouched by construction;
/// callers reuse the source label for every variant.
pub fn augment(img: &Image, cfg: &AugmentConfig) -> Result<Vec<Image>> {
    cfg.validate()?;
    let mut out = Vec::with_capacity(cfg.variant_count());
    out.push(img.clone());
    if cfg.horizontal_flip {
        out.push(flip_horizontal(img));
    }
    for &d in &cfg.rotations_degrees {
        out.push(rotate(img, d));
    }
    for &d in &cfg.brightness_deltas {
        out.push(shift_brightness(img, d));
    }
    Ok(out)
}
