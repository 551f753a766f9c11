//! PGM (P2/P5) and PBM (P1/P4) reading, P5/P1 writing.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::{Image, Watermark, MARK_SIDE};
use crate::error::{Error, Result};

struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Header<'a> {
    fn new(bytes: &'a [u8]) -> Self {
        Header { bytes, pos: 0 }
    }

    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&b) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if b == b'\n' || b == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn magic(&mut self) -> Result<[u8; 2]> {
        match self.bytes.get(..2) {
            Some(&[b'P', d]) => {
                self.pos = 2;
                Ok([b'P', d])
            }
            _ => Err(Error::format(
                "magic number",
                "file does not start with 'P'",
            )),
        }
    }

    fn number(&mut self, field: &'static str) -> Result<u32> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(if self.pos >= self.bytes.len() {
                Error::format(field, "unexpected end of file")
            } else {
                Error::format(field, "expected a decimal number")
            });
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::format(field, "number out of range"))
    }

    /// Consume the single whitespace byte that separates a binary header
    /// from its raster.
    fn raster_start(&mut self) -> Result<&'a [u8]> {
        match self.bytes.get(self.pos) {
            Some(b) if b.is_ascii_whitespace() => Ok(&self.bytes[self.pos + 1..]),
            _ => Err(Error::format("header", "missing whitespace before raster")),
        }
    }

    /// Next P1 bit; digits may be packed without separators.
    fn bit(&mut self) -> Result<bool> {
        self.skip_space_and_comments();
        match self.bytes.get(self.pos) {
            Some(b'0') => {
                self.pos += 1;
                Ok(false)
            }
            Some(b'1') => {
                self.pos += 1;
                Ok(true)
            }
            Some(_) => Err(Error::format("pixel data", "expected '0' or '1'")),
            None => Err(Error::format("pixel data", "truncated payload")),
        }
    }
}

fn dims(header: &mut Header<'_>) -> Result<(usize, usize)> {
    let width = header.number("width")? as usize;
    let height = header.number("height")? as usize;
    if width == 0 || height == 0 {
        return Err(Error::format(
            "dimensions",
            format!("{width}×{height} is empty"),
        ));
    }
    Ok((width, height))
}

fn read_bytes(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::io(path, e))
}

/// Decode a P2 or P5 graymap with maxval 255.
pub fn decode_pgm(bytes: &[u8]) -> Result<Image> {
    let mut header = Header::new(bytes);
    let magic = header.magic()?;
    if magic != *b"P2" && magic != *b"P5" {
        return Err(Error::format(
            "magic number",
            format!(
                "expected P2 or P5, found {}",
                String::from_utf8_lossy(&magic)
            ),
        ));
    }
    let (width, height) = dims(&mut header)?;
    let maxval = header.number("maxval")?;
    if maxval != 255 {
        return Err(Error::UnsupportedMaxval(maxval));
    }
    let count = width * height;
    let data = if magic == *b"P5" {
        let raster = header.raster_start()?;
        if raster.len() < count {
            return Err(Error::format(
                "pixel data",
                format!(
                    "truncated payload: expected {count} bytes, found {}",
                    raster.len()
                ),
            ));
        }
        raster[..count].iter().map(|&b| b as f64).collect()
    } else {
        let mut data = Vec::with_capacity(count);
        for _ in 0..count {
            let v = header.number("pixel data")?;
            if v > maxval {
                return Err(Error::format(
                    "pixel data",
                    format!("sample {v} exceeds maxval"),
                ));
            }
            data.push(v as f64);
        }
        data
    };
    Image::new(width, height, data)
}

/// Encode as binary P5 with each sample clamped and rounded half-up.
pub fn encode_pgm(img: &Image) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend(img.to_u8());
    out
}

/// Decode a P1 or P4 bitmap into raw bits (`true` = 1), with dimensions.
fn decode_pbm(bytes: &[u8]) -> Result<(usize, usize, Vec<bool>)> {
    let mut header = Header::new(bytes);
    let magic = header.magic()?;
    let (width, height) = match &magic {
        b"P1" | b"P4" => dims(&mut header)?,
        _ => {
            return Err(Error::format(
                "magic number",
                format!(
                    "expected P1 or P4, found {}",
                    String::from_utf8_lossy(&magic)
                ),
            ))
        }
    };
    let mut bits = Vec::with_capacity(width * height);
    if magic == *b"P4" {
        let raster = header.raster_start()?;
        let stride = width.div_ceil(8);
        if raster.len() < stride * height {
            return Err(Error::format("pixel data", "truncated payload"));
        }
        for row in raster.chunks(stride).take(height) {
            bits.extend((0..width).map(|c| row[c / 8] & (0x80 >> (c % 8)) != 0));
        }
    } else {
        for _ in 0..width * height {
            bits.push(header.bit()?);
        }
    }
    Ok((width, height, bits))
}

/// Decode a 16×16 PBM as a watermark: bit 1 is +1, bit 0 is −1.
pub fn decode_watermark(bytes: &[u8]) -> Result<Watermark> {
    let (width, height, bits) = decode_pbm(bytes)?;
    if width != MARK_SIDE || height != MARK_SIDE {
        return Err(Error::WatermarkSize { width, height });
    }
    Ok(Watermark::from_fn(|r, c| bits[r * MARK_SIDE + c]))
}

/// Encode as ASCII P1 with +1 written as 1.
pub fn encode_watermark(wm: &Watermark) -> Vec<u8> {
    let mut out = format!("P1\n{MARK_SIDE} {MARK_SIDE}\n");
    for r in 0..MARK_SIDE {
        let row: Vec<&str> = (0..MARK_SIDE)
            .map(|c| if wm.get(r, c) > 0 { "1" } else { "0" })
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out.into_bytes()
}

pub fn read_image(path: impl AsRef<Path>) -> Result<Image> {
    decode_pgm(&read_bytes(path.as_ref())?)
}

pub fn write_image(img: &Image, path: impl AsRef<Path>) -> Result<()> {
    write_all(path.as_ref(), &encode_pgm(img))
}

pub fn read_watermark(path: impl AsRef<Path>) -> Result<Watermark> {
    decode_watermark(&read_bytes(path.as_ref())?)
}

pub fn write_watermark(wm: &Watermark, path: impl AsRef<Path>) -> Result<()> {
    write_all(path.as_ref(), &encode_watermark(wm))
}

fn write_all(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::File::create(path)
        .and_then(|mut f| f.write_all(bytes))
        .map_err(|e| Error::io(path, e))
}
