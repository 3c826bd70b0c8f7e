//! In-memory images and file I/O.
//!
//! Pixels are `f64` in [0, 1], row-major. PPM/PGM files are parsed by hand so
//! 8-bit round trips are bit-exact; PNG and JPEG go through the `image` crate.

mod pnm;

use std::path::Path;

use crate::error::{Error, Result};

/// RGB image, channel values in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct Image {
    width: usize,
    height: usize,
    pixels: Vec<[f64; 3]>,
}

/// Single-channel image, values in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl Image {
    pub fn new(width: usize, height: usize) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        Image { width, height, pixels: vec![[0.0; 3]; width * height] }
    }

    pub fn from_pixels(width: usize, height: usize, pixels: Vec<[f64; 3]>) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        assert_eq!(pixels.len(), width * height, "pixel count mismatch");
        Image { width, height, pixels }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[[f64; 3]] {
        &self.pixels
    }

    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> [f64; 3] {
        self.pixels[y * self.width + x]
    }

    #[inline]
    pub fn set_pixel(&mut self, x: usize, y: usize, value: [f64; 3]) {
        self.pixels[y * self.width + x] = value;
    }

    /// Copies one channel out as a flat plane.
    pub fn channel(&self, c: usize) -> Vec<f64> {
        self.pixels.iter().map(|p| p[c]).collect()
    }

    pub fn from_channels(width: usize, height: usize, planes: [Vec<f64>; 3]) -> Self {
        let [r, g, b] = planes;
        assert!(r.len() == width * height && g.len() == r.len() && b.len() == r.len());
        let pixels = (0..width * height).map(|i| [r[i], g[i], b[i]]).collect();
        Image { width, height, pixels }
    }
}

impl GrayImage {
    pub fn from_pixels(width: usize, height: usize, pixels: Vec<f64>) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        assert_eq!(pixels.len(), width * height, "pixel count mismatch");
        GrayImage { width, height, pixels }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> f64 {
        self.pixels[y * self.width + x]
    }
}

/// Rec. 601 luma; output clamped to [0, 1].
pub fn to_gray(img: &Image) -> GrayImage {
    let pixels = img
        .pixels
        .iter()
        .map(|[r, g, b]| (0.299 * r + 0.587 * g + 0.114 * b).clamp(0.0, 1.0))
        .collect();
    GrayImage { width: img.width, height: img.height, pixels }
}

fn extension_of(path: &Path) -> String {
    path.extension()
        .and_then(|e| e.to_str())
        .map(|e| e.to_ascii_lowercase())
        .unwrap_or_default()
}

/// Loads an RGB image. PPM (P6) is parsed natively; PGM (P5) is promoted to
/// RGB; PNG and JPEG are decoded through the `image` crate.
pub fn load_image(path: &Path) -> Result<Image> {
    let ext = extension_of(path);
    match ext.as_str() {
        "ppm" | "pnm" => {
            let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
            pnm::decode_ppm(&bytes).map_err(|e| tag_path(path, e))
        }
        "pgm" => {
            let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
            let g = pnm::decode_pgm(&bytes).map_err(|e| tag_path(path, e))?;
            let pixels = g.pixels.iter().map(|&v| [v, v, v]).collect();
            Ok(Image { width: g.width, height: g.height, pixels })
        }
        "png" | "jpg" | "jpeg" => {
            let decoded = image::ImageReader::open(path)
                .map_err(|e| Error::io(path, e))?
                .decode()
                .map_err(|e| Error::format(format!("{}: {e}", path.display())))?;
            let rgb = decoded.to_rgb8();
            let (w, h) = (rgb.width() as usize, rgb.height() as usize);
            if w == 0 || h == 0 {
                return Err(Error::format(format!("{}: zero-sized image", path.display())));
            }
            let pixels = rgb
                .pixels()
                .map(|p| [f64::from(p[0]) / 255.0, f64::from(p[1]) / 255.0, f64::from(p[2]) / 255.0])
                .collect();
            Ok(Image { width: w, height: h, pixels })
        }
        other => Err(Error::format(format!(
            "{}: unsupported image extension '{other}'",
            path.display()
        ))),
    }
}

/// Saves an RGB image; format chosen by extension (.ppm or .png).
pub fn save_image(path: &Path, img: &Image) -> Result<()> {
    match extension_of(path).as_str() {
        "ppm" | "pnm" => {
            std::fs::write(path, pnm::encode_ppm(img)).map_err(|e| Error::io(path, e))
        }
        "png" => {
            let mut out = image::RgbImage::new(img.width as u32, img.height as u32);
            for (i, px) in img.pixels.iter().enumerate() {
                let x = (i % img.width) as u32;
                let y = (i / img.width) as u32;
                out.put_pixel(x, y, image::Rgb([to_byte(px[0]), to_byte(px[1]), to_byte(px[2])]));
            }
            out.save(path)
                .map_err(|e| Error::format(format!("{}: {e}", path.display())))
        }
        other => Err(Error::format(format!(
            "{}: unsupported output extension '{other}'",
            path.display()
        ))),
    }
}

/// Loads a P5 graymap.
pub fn load_graymap(path: &Path) -> Result<GrayImage> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    pnm::decode_pgm(&bytes).map_err(|e| tag_path(path, e))
}

/// Saves a single-channel image as binary P5, maxval 255.
pub fn save_graymap(path: &Path, img: &GrayImage) -> Result<()> {
    std::fs::write(path, pnm::encode_pgm(img)).map_err(|e| Error::io(path, e))
}

fn tag_path(path: &Path, e: Error) -> Error {
    match e {
        Error::Format(msg) => Error::format(format!("{}: {msg}", path.display())),
        other => other,
    }
}

#[inline]
pub(crate) fn to_byte(v: f64) -> u8 {
    (v * 255.0).round().clamp(0.0, 255.0) as u8
}
