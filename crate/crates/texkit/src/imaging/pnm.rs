//! Binary PNM (P6/P5) codec, maxval 255 only.
//!
//! Hand-rolled so that save/load of an 8-bit-quantized image is bit-exact.

use super::{to_byte, GrayImage, Image};
use crate::error::{Error, Result};

const MAX_DIMENSION: usize = 1 << 16;

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Cursor { bytes, pos: 0 }
    }

    /// Skips whitespace and `#` comments (which run to end of line).
    fn skip_separators(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b.is_ascii_whitespace() {
                self.pos += 1;
            } else if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn token(&mut self) -> Result<&'a [u8]> {
        self.skip_separators();
        let start = self.pos;
        while self.pos < self.bytes.len() && !self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(Error::format("truncated PNM header"));
        }
        Ok(&self.bytes[start..self.pos])
    }

    fn integer(&mut self, what: &str) -> Result<usize> {
        let tok = self.token()?;
        let s = std::str::from_utf8(tok)
            .map_err(|_| Error::format(format!("non-ASCII {what} in PNM header")))?;
        s.parse()
            .map_err(|_| Error::format(format!("invalid {what} '{s}' in PNM header")))
    }
}

fn parse_header(bytes: &[u8], magic: &str) -> Result<(usize, usize, usize)> {
    let mut cur = Cursor::new(bytes);
    let m = cur.token()?;
    if m != magic.as_bytes() {
        return Err(Error::format(format!(
            "bad magic {:?}, expected {magic}",
            String::from_utf8_lossy(m)
        )));
    }
    let width = cur.integer("width")?;
    let height = cur.integer("height")?;
    let maxval = cur.integer("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::format("zero image dimension"));
    }
    if width > MAX_DIMENSION || height > MAX_DIMENSION {
        return Err(Error::format("image dimension too large"));
    }
    if maxval != 255 {
        return Err(Error::format(format!("unsupported maxval {maxval}, expected 255")));
    }
    // Exactly one whitespace byte separates the header from pixel data.
    if cur.pos >= bytes.len() || !bytes[cur.pos].is_ascii_whitespace() {
        return Err(Error::format("missing separator before pixel data"));
    }
    Ok((width, height, cur.pos + 1))
}

pub fn decode_ppm(bytes: &[u8]) -> Result<Image> {
    let (width, height, offset) = parse_header(bytes, "P6")?;
    let need = width * height * 3;
    let data = &bytes[offset..];
    if data.len() < need {
        return Err(Error::format(format!(
            "truncated pixel data: need {need} bytes, found {}",
            data.len()
        )));
    }
    let pixels = data[..need]
        .chunks_exact(3)
        .map(|c| {
            [
                f64::from(c[0]) / 255.0,
                f64::from(c[1]) / 255.0,
                f64::from(c[2]) / 255.0,
            ]
        })
        .collect();
    Ok(Image::from_pixels(width, height, pixels))
}

pub fn encode_ppm(img: &Image) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.reserve(img.width() * img.height() * 3);
    for px in img.pixels() {
        out.push(to_byte(px[0]));
        out.push(to_byte(px[1]));
        out.push(to_byte(px[2]));
    }
    out
}

pub fn decode_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let (width, height, offset) = parse_header(bytes, "P5")?;
    let need = width * height;
    let data = &bytes[offset..];
    if data.len() < need {
        return Err(Error::format(format!(
            "truncated pixel data: need {need} bytes, found {}",
            data.len()
        )));
    }
    let pixels = data[..need].iter().map(|&b| f64::from(b) / 255.0).collect();
    Ok(GrayImage::from_pixels(width, height, pixels))
}

pub fn encode_pgm(img: &GrayImage) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend(img.pixels().iter().map(|&v| to_byte(v)));
    out
}
