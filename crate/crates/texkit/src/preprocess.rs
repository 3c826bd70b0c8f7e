//! Contrast enhancement, smoothing, and CIELAB conversion.
//!
//! The enhancement stage is a self-guided edge-preserving filter whose
//! low-frequency output is used to re-amplify detail: `out = q + beta (p - q)`
//! where `q` is the guided-filter smoothing of the channel by itself. Box
//! means are computed with integral images, windows clipped at the borders.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::imaging::{to_gray, GrayImage, Image};

/// Which plane feeds texture analysis after preprocessing.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraySource {
    /// Luma of the enhanced, smoothed RGB image.
    Smoothed,
    /// L* of the Lab conversion, rescaled to [0, 1].
    Lightness,
    /// Luma of the unprocessed input.
    Original,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PreprocessConfig {
    /// Box window radius of the guided filter.
    pub guided_radius: usize,
    /// Regularizer deciding what counts as an edge (variance scale).
    pub guided_epsilon: f64,
    /// Detail amplification factor beta; 1.0 leaves the image unchanged
    /// apart from filter rounding.
    pub detail_gain: f64,
    pub gaussian_sigma: f64,
    /// Odd kernel width of the Gaussian smoothing stage.
    pub gaussian_kernel_size: usize,
    /// Reference white (D65 by default). The conversion maps RGB (1,1,1)
    /// exactly onto this point.
    pub white_point: [f64; 3],
    pub gray_source: GraySource,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        PreprocessConfig {
            guided_radius: 8,
            guided_epsilon: 0.01,
            detail_gain: 2.0,
            gaussian_sigma: 1.0,
            gaussian_kernel_size: 5,
            white_point: D65,
            gray_source: GraySource::Smoothed,
        }
    }
}

pub const D65: [f64; 3] = [0.95047, 1.0, 1.08883];

impl PreprocessConfig {
    pub fn validate(&self) -> Result<()> {
        if self.guided_radius == 0 {
            return Err(Error::invalid("preprocess.guided_radius must be at least 1"));
        }
        if !(self.guided_epsilon > 0.0) {
            return Err(Error::invalid("preprocess.guided_epsilon must be positive"));
        }
        if !(self.detail_gain >= 1.0) {
            return Err(Error::invalid("preprocess.detail_gain must be at least 1"));
        }
        if !(self.gaussian_sigma > 0.0) {
            return Err(Error::invalid("preprocess.gaussian_sigma must be positive"));
        }
        if self.gaussian_kernel_size < 3 || self.gaussian_kernel_size.is_multiple_of(2) {
            return Err(Error::invalid(
                "preprocess.gaussian_kernel_size must be odd and at least 3",
            ));
        }
        if self.white_point.iter().any(|&w| !(w > 0.0)) {
            return Err(Error::invalid("preprocess.white_point components must be positive"));
        }
        Ok(())
    }
}

/// Mean over the window [x-r, x+r] x [y-r, y+r] clipped to the image, for
/// every pixel, via an integral image.
pub(crate) fn box_mean(values: &[f64], width: usize, height: usize, radius: usize) -> Vec<f64> {
    let mut integral = vec![0.0f64; (width + 1) * (height + 1)];
    for y in 0..height {
        let mut row = 0.0;
        for x in 0..width {
            row += values[y * width + x];
            integral[(y + 1) * (width + 1) + x + 1] = integral[y * (width + 1) + x + 1] + row;
        }
    }
    let at = |x: usize, y: usize| integral[y * (width + 1) + x];
    let r = radius;
    let mut out = vec![0.0; width * height];
    for y in 0..height {
        let y0 = y.saturating_sub(r);
        let y1 = (y + r).min(height - 1) + 1;
        for x in 0..width {
            let x0 = x.saturating_sub(r);
            let x1 = (x + r).min(width - 1) + 1;
            let sum = at(x1, y1) - at(x0, y1) - at(x1, y0) + at(x0, y0);
            out[y * width + x] = sum / ((x1 - x0) * (y1 - y0)) as f64;
        }
    }
    out
}

fn enhance_plane(p: &[f64], width: usize, height: usize, cfg: &PreprocessConfig) -> Vec<f64> {
    let r = cfg.guided_radius;
    let eps = cfg.guided_epsilon;
    let beta = cfg.detail_gain;
    let mean_p = box_mean(p, width, height, r);
    let sq: Vec<f64> = p.iter().map(|v| v * v).collect();
    let mean_sq = box_mean(&sq, width, height, r);
    let mut a = vec![0.0; p.len()];
    let mut b = vec![0.0; p.len()];
    for i in 0..p.len() {
        let var = (mean_sq[i] - mean_p[i] * mean_p[i]).max(0.0);
        a[i] = var / (var + eps);
        b[i] = mean_p[i] * (1.0 - a[i]);
    }
    let mean_a = box_mean(&a, width, height, r);
    let mean_b = box_mean(&b, width, height, r);
    (0..p.len())
        .map(|i| {
            let q = mean_a[i] * p[i] + mean_b[i];
            (q + beta * (p[i] - q)).clamp(0.0, 1.0)
        })
        .collect()
}

/// Edge-preserving detail boost applied per channel.
pub fn enhance_contrast(img: &Image, cfg: &PreprocessConfig) -> Image {
    let (w, h) = (img.width(), img.height());
    let planes = [
        enhance_plane(&img.channel(0), w, h, cfg),
        enhance_plane(&img.channel(1), w, h, cfg),
        enhance_plane(&img.channel(2), w, h, cfg),
    ];
    Image::from_channels(w, h, planes)
}

/// Normalized 1-D Gaussian taps.
pub fn gaussian_kernel(size: usize, sigma: f64) -> Vec<f64> {
    assert!(size % 2 == 1 && size >= 1, "kernel size must be odd");
    let h = (size / 2) as isize;
    let mut k: Vec<f64> = (0..size as isize)
        .map(|i| {
            let d = (i - h) as f64;
            (-d * d / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let sum: f64 = k.iter().sum();
    for v in &mut k {
        *v /= sum;
    }
    k
}

/// Half-sample reflection: -1 -> 0, -2 -> 1, n -> n-1, ...
#[inline]
pub(crate) fn reflect(mut i: isize, n: isize) -> usize {
    loop {
        if i < 0 {
            i = -i - 1;
        } else if i >= n {
            i = 2 * n - 1 - i;
        } else {
            return i as usize;
        }
    }
}

fn convolve_rows(src: &[f64], width: usize, height: usize, kernel: &[f64]) -> Vec<f64> {
    let h = (kernel.len() / 2) as isize;
    let mut out = vec![0.0; src.len()];
    for y in 0..height {
        let row = &src[y * width..(y + 1) * width];
        for x in 0..width {
            let mut acc = 0.0;
            for (t, &k) in kernel.iter().enumerate() {
                let xx = reflect(x as isize + t as isize - h, width as isize);
                acc += k * row[xx];
            }
            out[y * width + x] = acc;
        }
    }
    out
}

fn convolve_cols(src: &[f64], width: usize, height: usize, kernel: &[f64]) -> Vec<f64> {
    let h = (kernel.len() / 2) as isize;
    let mut out = vec![0.0; src.len()];
    for y in 0..height {
        for x in 0..width {
            let mut acc = 0.0;
            for (t, &k) in kernel.iter().enumerate() {
                let yy = reflect(y as isize + t as isize - h, height as isize);
                acc += k * src[yy * width + x];
            }
            out[y * width + x] = acc;
        }
    }
    out
}

/// Separable Gaussian blur with reflected borders.
pub fn gaussian_smooth(img: &Image, cfg: &PreprocessConfig) -> Image {
    let kernel = gaussian_kernel(cfg.gaussian_kernel_size, cfg.gaussian_sigma);
    let (w, h) = (img.width(), img.height());
    let planes = [0, 1, 2].map(|c| {
        let plane = img.channel(c);
        let tmp = convolve_rows(&plane, w, h, &kernel);
        convolve_cols(&tmp, w, h, &kernel)
    });
    Image::from_channels(w, h, planes)
}

/// CIELAB image; L in [0, 100], a and b unbounded (typically within ±128).
#[derive(Debug, Clone)]
pub struct LabImage {
    width: usize,
    height: usize,
    pixels: Vec<[f64; 3]>,
}

impl LabImage {
    /// Builds an image from raw L*a*b triples.
    pub fn from_raw(width: usize, height: usize, pixels: Vec<[f64; 3]>) -> Self {
        assert!(width > 0 && height > 0, "image dimensions must be positive");
        assert_eq!(pixels.len(), width * height, "pixel count mismatch");
        LabImage { width, height, pixels }
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
}

// sRGB -> XYZ (D65). Rows are rescaled at use so that each row sums to the
// configured white point component; (1,1,1) then maps exactly onto the
// reference white and neutral inputs get a* = b* = 0.
const SRGB_TO_XYZ: [[f64; 3]; 3] = [
    [0.412453, 0.357580, 0.180423],
    [0.212671, 0.715160, 0.072169],
    [0.019334, 0.119193, 0.950227],
];

const LAB_THRESHOLD: f64 = 0.008856;

#[inline]
fn srgb_linearize(c: f64) -> f64 {
    if c <= 0.04045 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

/// Piecewise CIE lightness transfer: cube root above the dark threshold,
/// the published linear ramp below. The rounded constants leave a step of
/// about 1.6e-5 at the joint, which downstream tolerances absorb.
#[inline]
pub fn lab_f(t: f64) -> f64 {
    if t > LAB_THRESHOLD {
        t.cbrt()
    } else {
        7.787 * t + 16.0 / 116.0
    }
}

/// Converts one sRGB pixel (components in [0, 1]) to L*a*b*.
///
/// Relative colorimetry: each matrix row is rescaled so RGB (1,1,1) lands
/// exactly on `white_point`, then tristimulus values are divided by the same
/// white. Neutral inputs therefore get a* = b* = 0 to rounding error.
pub fn lab_pixel(r: f64, g: f64, b: f64, white_point: [f64; 3]) -> [f64; 3] {
    let lin = [srgb_linearize(r), srgb_linearize(g), srgb_linearize(b)];
    let mut ratio = [0.0; 3];
    for i in 0..3 {
        let row = SRGB_TO_XYZ[i];
        let row_sum = row[0] + row[1] + row[2];
        let scale = white_point[i] / row_sum;
        let tristimulus = (row[0] * lin[0] + row[1] * lin[1] + row[2] * lin[2]) * scale;
        ratio[i] = tristimulus / white_point[i];
    }
    let [xr, yr, zr] = ratio;
    let (fx, fy, fz) = (lab_f(xr), lab_f(yr), lab_f(zr));
    let l = if yr > LAB_THRESHOLD { 116.0 * fy - 16.0 } else { 903.3 * yr };
    [l, 500.0 * (fx - fy), 200.0 * (fy - fz)]
}

/// Converts a whole image to CIELAB.
pub fn rgb_to_lab(img: &Image, white_point: [f64; 3]) -> LabImage {
    let pixels = img
        .pixels()
        .iter()
        .map(|&[r, g, b]| lab_pixel(r, g, b, white_point))
        .collect();
    LabImage { width: img.width(), height: img.height(), pixels }
}

/// All intermediate planes produced by the preprocessing stage.
#[derive(Debug, Clone)]
pub struct Preprocessed {
    pub enhanced: Image,
    pub smoothed: Image,
    pub lab: LabImage,
    pub gray: GrayImage,
}

/// Runs enhancement, smoothing, Lab conversion, and gray plane selection.
pub fn preprocess(img: &Image, cfg: &PreprocessConfig) -> Preprocessed {
    let enhanced = enhance_contrast(img, cfg);
    let smoothed = gaussian_smooth(&enhanced, cfg);
    let lab = rgb_to_lab(&smoothed, cfg.white_point);
    let gray = match cfg.gray_source {
        GraySource::Smoothed => to_gray(&smoothed),
        GraySource::Lightness => GrayImage::from_pixels(
            lab.width(),
            lab.height(),
            lab.pixels().iter().map(|p| (p[0] / 100.0).clamp(0.0, 1.0)).collect(),
        ),
        GraySource::Original => to_gray(img),
    };
    Preprocessed { enhanced, smoothed, lab, gray }
}
